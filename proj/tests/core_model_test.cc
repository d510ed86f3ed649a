#include <gtest/gtest.h>

#include <cmath>

#include "lmperf/core_model.h"
#include "test_support.h"

namespace lmperf {
namespace {

using testing::Rng;
using testing::toy;

ModelConfig toy_shape() {
  return {.n_l = 2, .n_h = 2, .n_d = 4, .d = 8, .alpha = 4.0, .params = 1000.0};
}

TEST(ValidateModelConfig, AcceptsToyShape) {
  const ValidatedConfig c = validate_model_config(toy_shape(), ArchitectureKind::kAR);
  EXPECT_EQ(c.d(), 8);
  EXPECT_DOUBLE_EQ(c.params(), 1000.0);
  EXPECT_EQ(c.block_size(), 1);
}

TEST(ValidateModelConfig, RejectsHeadMismatch) {
  ModelConfig c = toy_shape();
  c.d = 9;
  try {
    validate_model_config(c, ArchitectureKind::kAR);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_TRUE(e.has(ErrorCode::kDimensionMismatch));
  }
}

TEST(ValidateModelConfig, BlockDiffusionNeedsG) {
  try {
    validate_model_config(toy_shape(), ArchitectureKind::kBlockDiffusion);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_TRUE(e.has(ErrorCode::kMissingBlockSize));
  }
}

TEST(ValidateModelConfig, GIgnoredOutsideBlockDiffusion) {
  ModelConfig c = toy_shape();
  c.block_size = 0;
  EXPECT_EQ(validate_model_config(c, ArchitectureKind::kDLM).block_size(), 1);
}

TEST(ValidateModelConfig, ReportsEveryIssue) {
  ModelConfig c{.n_l = 0, .n_h = 2, .n_d = 4, .d = 9, .alpha = -1.0, .params = 0.0};
  try {
    validate_model_config(c, ArchitectureKind::kBlockDiffusion);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_TRUE(e.has(ErrorCode::kNonPositiveField));
    EXPECT_TRUE(e.has(ErrorCode::kDimensionMismatch));
    EXPECT_TRUE(e.has(ErrorCode::kMissingBlockSize));
    EXPECT_EQ(e.issues().size(), 5u);
  }
}

TEST(ValidateModelConfig, DerivesMissingN) {
  ModelConfig c = toy_shape();
  c.params.reset();
  EXPECT_DOUBLE_EQ(validate_model_config(c, ArchitectureKind::kAR).params(), 1536.0);
}

TEST(DeriveParamCount, Examples) {
  EXPECT_DOUBLE_EQ(derive_param_count({.n_l = 2, .d = 8, .alpha = 4.0}), 1536.0);
  EXPECT_DOUBLE_EQ(derive_param_count({.n_l = 1, .d = 1, .alpha = 1.0}), 6.0);
  const double n = derive_param_count({.n_l = 32, .d = 4096, .alpha = 3.5});
  EXPECT_NEAR(n, 5.91e9, 0.01e9);
}

TEST(Acceleration, DualCacheIsDlmOnly) {
  AccelerationConfig a;
  a.dual_cache = true;
  EXPECT_NO_THROW(validate_acceleration(a, ArchitectureKind::kDLM));
  try {
    validate_acceleration(a, ArchitectureKind::kBlockDiffusion);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_TRUE(e.has(ErrorCode::kUnsupportedAcceleration));
  }
}

TEST(Acceleration, RejectsTpfBelowOne) {
  AccelerationConfig a;
  a.tpf = 0.5;
  EXPECT_THROW(validate_acceleration(a, ArchitectureKind::kDLM), ValidationError);
}

TEST(Acceleration, DefaultRefreshOncePerWindow) {
  AccelerationConfig a;
  a.dual_cache = true;
  EXPECT_EQ(a.effective_refresh_interval(), 32);
  a.tpf = 4;
  EXPECT_EQ(a.effective_refresh_interval(), 8);
  a.cache_refresh_interval = 5;
  EXPECT_EQ(a.effective_refresh_interval(), 5);
}

TEST(BuildSchedule, ArWithPrompt) {
  const auto s = build_schedule(toy(ArchitectureKind::kAR), {1, 2, 3}, {});
  ASSERT_EQ(s.steps.size(), 4u);
  EXPECT_TRUE(s.steps[0].is_prefill);
  EXPECT_EQ(s.steps[0].active_tokens, 2);
  EXPECT_EQ(s.steps[0].context_len, 2);
  for (int i = 1; i <= 3; ++i) {
    EXPECT_EQ(s.steps[i].active_tokens, 1);
    EXPECT_EQ(s.steps[i].context_len, 2 + i);
    EXPECT_EQ(s.steps[i].cached_kv_len, 1 + i);
  }
  EXPECT_EQ(s.decode_step_count(), 3);
}

TEST(BuildSchedule, DlmFullSequenceSteps) {
  const auto s = build_schedule(toy(ArchitectureKind::kDLM), {1, 0, 3}, {});
  ASSERT_EQ(s.steps.size(), 3u);
  for (const auto& st : s.steps) {
    EXPECT_EQ(st.active_tokens, 3);
    EXPECT_EQ(st.context_len, 3);
    EXPECT_EQ(st.cached_kv_len, 0);
  }
}

TEST(BuildSchedule, DlmTpfCeiling) {
  AccelerationConfig a;
  a.tpf = 4;
  EXPECT_EQ(build_schedule(toy(ArchitectureKind::kDLM), {1, 0, 256}, a)
                .decode_step_count(),
            64);
  a.tpf = 3.1;
  const auto s = build_schedule(toy(ArchitectureKind::kDLM), {1, 0, 256}, a);
  EXPECT_EQ(s.decode_step_count(), 83);
  EXPECT_NEAR(s.forward_passes(), 256 / 3.1, 1e-9);
}

TEST(BuildSchedule, BlockTrace) {
  const auto s =
      build_schedule(toy(ArchitectureKind::kBlockDiffusion, 2), {1, 0, 4}, {});
  ASSERT_EQ(s.steps.size(), 4u);
  const std::int64_t ctx[] = {2, 2, 4, 4};
  const std::int64_t cached[] = {0, 0, 2, 2};
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(s.steps[i].active_tokens, 2);
    EXPECT_EQ(s.steps[i].context_len, ctx[i]);
    EXPECT_EQ(s.steps[i].cached_kv_len, cached[i]);
  }
}

TEST(BuildSchedule, DualCacheWindowsAndRefresh) {
  AccelerationConfig a;
  a.dual_cache = true;
  a.dual_cache_block = 32;
  const auto s = build_schedule(toy(ArchitectureKind::kDLM), {1, 0, 1024}, a);
  std::int64_t refresh = 0;
  for (const auto& st : s.steps) {
    if (st.is_refresh) {
      ++refresh;
      EXPECT_EQ(st.active_tokens, 1024);
      EXPECT_EQ(st.finalized_tokens, 0);
    } else {
      EXPECT_EQ(st.active_tokens, 32);
      EXPECT_EQ(st.cached_kv_len, 1024 - 32);
    }
  }
  EXPECT_EQ(refresh, 32);
  EXPECT_EQ(s.finalized_tokens(), 1024);
}

TEST(BuildSchedule, DefaultStepCounts) {
  for (std::int64_t lg : {1, 5, 64, 257}) {
    const Workload wl{3, 7, lg};
    EXPECT_EQ(build_schedule(toy(ArchitectureKind::kAR), wl, {}).decode_step_count(), lg);
    EXPECT_EQ(build_schedule(toy(ArchitectureKind::kDLM), wl, {}).decode_step_count(), lg);
    for (std::int64_t g : {1, 4, 32}) {
      const auto s = build_schedule(toy(ArchitectureKind::kBlockDiffusion, g), wl, {});
      EXPECT_EQ(s.decode_step_count(), (lg + g - 1) / g * g);
    }
  }
}

TEST(BuildSchedule, PropertiesOverRandomInputs) {
  Rng rng(7);
  for (int trial = 0; trial < 400; ++trial) {
    const auto arch = static_cast<ArchitectureKind>(rng.integer(0, 2));
    const Workload wl{rng.integer(1, 8), rng.integer(0, 50), rng.integer(1, 300)};
    AccelerationConfig a;
    a.tpf = rng.integer(0, 1) ? 1.0 : rng.uniform(1.0, 6.0);
    if (arch == ArchitectureKind::kDLM && rng.integer(0, 1)) {
      a.dual_cache = true;
      a.dual_cache_block = rng.integer(1, 64);
    }
    const auto cfg = toy(arch, rng.integer(1, 40));
    const auto s = build_schedule(cfg, wl, a);
    EXPECT_EQ(s.finalized_tokens(), wl.gen_len);
    EXPECT_NEAR(s.forward_passes(),
                static_cast<double>(
                    arch == ArchitectureKind::kBlockDiffusion
                        ? (wl.gen_len + cfg.block_size() - 1) / cfg.block_size() *
                              cfg.block_size()
                        : wl.gen_len) /
                        a.tpf +
                    (a.dual_cache ? static_cast<double>(std::count_if(
                                        s.steps.begin(), s.steps.end(),
                                        [](const auto& st) { return st.is_refresh; }))
                                  : 0.0),
                1e-6 * static_cast<double>(wl.gen_len));
    std::int64_t prev_ctx = 0;
    for (const auto& st : s.steps) {
      EXPECT_GE(st.active_tokens, 1);
      EXPECT_LE(st.active_tokens, st.context_len);
      EXPECT_LE(st.context_len, wl.total_len());
      if (!st.is_prefill) {
        EXPECT_EQ(st.cached_kv_len, st.context_len - st.active_tokens);
        if (arch == ArchitectureKind::kDLM && !a.dual_cache) {
          EXPECT_EQ(st.cached_kv_len, 0);
        }
      }
      if (arch != ArchitectureKind::kDLM) {
        EXPECT_GE(st.context_len, prev_ctx);
        prev_ctx = st.context_len;
      }
    }
    EXPECT_EQ(s, build_schedule(cfg, wl, a));
  }
}

}  // namespace
}  // namespace lmperf
