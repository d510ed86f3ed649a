#include "lmperf/core_model.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace lmperf {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonPositiveField: return "NonPositiveField";
    case ErrorCode::kMissingBlockSize: return "MissingBlockSize";
    case ErrorCode::kInvalidField: return "InvalidField";
    case ErrorCode::kUnknownField: return "UnknownField";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnsupportedAcceleration: return "UnsupportedAcceleration";
    case ErrorCode::kNonPositiveIntensity: return "NonPositiveIntensity";
    case ErrorCode::kInsufficientPoints: return "InsufficientPoints";
    case ErrorCode::kRegimeViolation: return "RegimeViolation";
    case ErrorCode::kKeyMismatch: return "KeyMismatch";
    case ErrorCode::kEmptyRowSet: return "EmptyRowSet";
    case ErrorCode::kIoFailure: return "IoFailure";
  }
  return "Unknown";
}

namespace {

std::string join_issues(const std::vector<Issue>& issues) {
  std::string out;
  for (const auto& issue : issues) {
    if (!out.empty()) out += "; ";
    out += std::string(to_string(issue.code)) + ": " + issue.message;
  }
  return out;
}

// Splits `n` tokens into ceil(n / tpf) passes. Boundaries sit at
// floor(i * tpf), so every pass finalizes at least one token, and the last
// pass is charged the leftover fraction so the passes sum to n / tpf.
struct Pass {
  std::int64_t begin;
  std::int64_t end;
  double weight;
};

constexpr double kTpfEps = 1e-9;

std::vector<Pass> split_passes(std::int64_t n, double tpf) {
  const auto count = static_cast<std::int64_t>(
      std::ceil(static_cast<double>(n) / tpf - kTpfEps));
  std::vector<Pass> passes;
  passes.reserve(static_cast<std::size_t>(count));
  std::int64_t prev = 0;
  for (std::int64_t i = 1; i <= count; ++i) {
    std::int64_t next =
        i == count ? n
                   : std::min<std::int64_t>(
                         n, static_cast<std::int64_t>(std::floor(
                                static_cast<double>(i) * tpf + kTpfEps)));
    passes.push_back({prev, next, 1.0});
    prev = next;
  }
  double last = (static_cast<double>(n) - static_cast<double>(count - 1) * tpf) / tpf;
  if (std::abs(last - 1.0) < 1e-12) last = 1.0;
  passes.back().weight = last;
  return passes;
}

void build_ar(const Workload& wl, const AccelerationConfig& accel,
              std::vector<StepDescriptor>& steps) {
  if (wl.prompt_len > 0) {
    steps.push_back({.active_tokens = wl.prompt_len,
                     .context_len = wl.prompt_len,
                     .is_prefill = true});
  }
  std::int64_t ctx = wl.prompt_len;
  for (const Pass& p : split_passes(wl.gen_len, accel.tpf)) {
    const std::int64_t s = p.end - p.begin;
    ctx += s;
    steps.push_back({.active_tokens = s,
                     .context_len = ctx,
                     .cached_kv_len = ctx - s,
                     .finalized_tokens = s,
                     .pass_weight = p.weight});
  }
}

void build_dlm(const Workload& wl, const AccelerationConfig& accel,
               std::vector<StepDescriptor>& steps) {
  const std::int64_t total = wl.total_len();
  const StepDescriptor full{.active_tokens = total, .context_len = total};
  const auto passes = split_passes(wl.gen_len, accel.tpf);
  if (!accel.dual_cache) {
    for (const Pass& p : passes) {
      StepDescriptor step = full;
      step.finalized_tokens = p.end - p.begin;
      step.pass_weight = p.weight;
      steps.push_back(step);
    }
    return;
  }
  const std::int64_t window = std::min(accel.dual_cache_block, total);
  const std::int64_t interval = accel.effective_refresh_interval();
  for (std::size_t i = 0; i < passes.size(); ++i) {
    if (static_cast<std::int64_t>(i) % interval == 0) {
      StepDescriptor refresh = full;
      refresh.is_refresh = true;
      steps.push_back(refresh);
    }
    steps.push_back({.active_tokens = window,
                     .context_len = total,
                     .cached_kv_len = total - window,
                     .finalized_tokens = passes[i].end - passes[i].begin,
                     .pass_weight = passes[i].weight});
  }
}

void build_block(std::int64_t block, const Workload& wl,
                 const AccelerationConfig& accel,
                 std::vector<StepDescriptor>& steps) {
  if (wl.prompt_len > 0) {
    steps.push_back({.active_tokens = wl.prompt_len,
                     .context_len = wl.prompt_len,
                     .is_prefill = true});
  }
  // Every block runs ceil(G / tpf) passes; a truncated last block keeps its
  // pass count and simply finalizes fewer tokens.
  const auto passes = split_passes(block, accel.tpf);
  std::int64_t prefix = wl.prompt_len;
  std::int64_t remaining = wl.gen_len;
  while (remaining > 0) {
    const std::int64_t tokens = std::min(block, remaining);
    for (const Pass& p : passes) {
      steps.push_back({.active_tokens = tokens,
                       .context_len = prefix + tokens,
                       .cached_kv_len = prefix,
                       .finalized_tokens = std::min(p.end, tokens) -
                                           std::min(p.begin, tokens),
                       .pass_weight = p.weight});
    }
    prefix += tokens;
    remaining -= tokens;
  }
}

}  // namespace

ValidationError::ValidationError(std::vector<Issue> issues)
    : Error(issues.empty() ? ErrorCode::kInvalidField : issues.front().code,
            join_issues(issues)),
      issues_(std::move(issues)) {}

bool ValidationError::has(ErrorCode code) const {
  return std::any_of(issues_.begin(), issues_.end(),
                     [code](const Issue& i) { return i.code == code; });
}

std::string_view to_string(ArchitectureKind arch) {
  switch (arch) {
    case ArchitectureKind::kAR: return "AR";
    case ArchitectureKind::kDLM: return "DLM";
    case ArchitectureKind::kBlockDiffusion: return "BlockDiffusion";
  }
  return "Unknown";
}

std::optional<ArchitectureKind> parse_architecture(std::string_view name) {
  if (name == "AR") return ArchitectureKind::kAR;
  if (name == "DLM") return ArchitectureKind::kDLM;
  if (name == "BlockDiffusion") return ArchitectureKind::kBlockDiffusion;
  return std::nullopt;
}

std::int64_t AccelerationConfig::effective_refresh_interval() const {
  if (cache_refresh_interval) return *cache_refresh_interval;
  return std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(
             static_cast<double>(dual_cache_block) / tpf - kTpfEps)));
}

double derive_param_count(const ModelConfig& cfg) {
  const double d = static_cast<double>(cfg.d);
  return static_cast<double>(cfg.n_l) * (4.0 * d * d + 2.0 * cfg.alpha * d * d);
}

ValidatedConfig validate_model_config(const ModelConfig& cfg,
                                      ArchitectureKind arch) {
  std::vector<Issue> issues;
  auto positive = [&](std::int64_t v, const char* name) {
    if (v < 1) {
      issues.push_back({ErrorCode::kNonPositiveField,
                        std::string(name) + " must be >= 1, got " +
                            std::to_string(v)});
    }
  };
  positive(cfg.n_l, "n_l");
  positive(cfg.n_h, "n_h");
  positive(cfg.n_d, "n_d");
  positive(cfg.d, "d");
  if (!(cfg.alpha > 0.0)) {
    issues.push_back({ErrorCode::kNonPositiveField, "alpha must be > 0"});
  }
  if (cfg.params && !(*cfg.params > 0.0)) {
    issues.push_back({ErrorCode::kNonPositiveField, "N must be > 0"});
  }
  if (cfg.n_h >= 1 && cfg.n_d >= 1 && cfg.d != cfg.n_h * cfg.n_d) {
    issues.push_back({ErrorCode::kDimensionMismatch,
                      "d = " + std::to_string(cfg.d) + " but n_h * n_d = " +
                          std::to_string(cfg.n_h * cfg.n_d)});
  }
  std::int64_t block = 1;
  if (arch == ArchitectureKind::kBlockDiffusion) {
    if (!cfg.block_size) {
      issues.push_back({ErrorCode::kMissingBlockSize,
                        "BlockDiffusion requires block size G"});
    } else if (*cfg.block_size < 1) {
      issues.push_back({ErrorCode::kNonPositiveField, "G must be >= 1"});
    } else {
      block = *cfg.block_size;
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  const double params = cfg.params ? *cfg.params : derive_param_count(cfg);
  return ValidatedConfig(arch, cfg, params, block);
}

void validate_hardware(const HardwareSpec& hw) {
  std::vector<Issue> issues;
  if (!(hw.p_max > 0.0)) {
    issues.push_back({ErrorCode::kNonPositiveField, "p_max must be > 0"});
  }
  if (!(hw.b_mem > 0.0)) {
    issues.push_back({ErrorCode::kNonPositiveField, "b_mem must be > 0"});
  }
  if (!(hw.capacity > 0.0)) {
    issues.push_back({ErrorCode::kNonPositiveField, "capacity must be > 0"});
  }
  const int bpe = hw.bytes_per_element;
  if (bpe != 1 && bpe != 2 && bpe != 4 && bpe != 8) {
    issues.push_back({ErrorCode::kInvalidField,
                      "bytes_per_element must be one of 1, 2, 4, 8"});
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

void validate_workload(const Workload& wl) {
  std::vector<Issue> issues;
  if (wl.batch < 1) {
    issues.push_back({ErrorCode::kNonPositiveField, "batch must be >= 1"});
  }
  if (wl.prompt_len < 0) {
    issues.push_back({ErrorCode::kNonPositiveField, "prompt_len must be >= 0"});
  }
  if (wl.gen_len < 1) {
    issues.push_back({ErrorCode::kNonPositiveField, "gen_len must be >= 1"});
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

void validate_acceleration(const AccelerationConfig& accel,
                           ArchitectureKind arch) {
  std::vector<Issue> issues;
  if (!(accel.tpf >= 1.0) || !std::isfinite(accel.tpf)) {
    issues.push_back({ErrorCode::kInvalidField, "tpf must be >= 1"});
  }
  if (accel.dual_cache && accel.dual_cache_block < 1) {
    issues.push_back(
        {ErrorCode::kNonPositiveField, "dual_cache_block must be >= 1"});
  }
  if (accel.cache_refresh_interval && *accel.cache_refresh_interval < 1) {
    issues.push_back(
        {ErrorCode::kNonPositiveField, "cache_refresh_interval must be >= 1"});
  }
  if (accel.dual_cache && arch != ArchitectureKind::kDLM) {
    issues.push_back({ErrorCode::kUnsupportedAcceleration,
                      "dual cache applies to DLM only, not " +
                          std::string(to_string(arch))});
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

std::int64_t DecodeSchedule::decode_step_count() const {
  return std::count_if(steps.begin(), steps.end(),
                       [](const StepDescriptor& s) { return !s.is_prefill; });
}

std::int64_t DecodeSchedule::finalized_tokens() const {
  std::int64_t total = 0;
  for (const auto& s : steps) total += s.finalized_tokens;
  return total;
}

double DecodeSchedule::forward_passes() const {
  double total = 0.0;
  for (const auto& s : steps) {
    if (!s.is_prefill) total += s.pass_weight;
  }
  return total;
}

DecodeSchedule build_schedule(const ValidatedConfig& cfg, const Workload& wl,
                              const AccelerationConfig& accel) {
  validate_workload(wl);
  validate_acceleration(accel, cfg.arch());
  DecodeSchedule schedule{.arch = cfg.arch(),
                          .batch = wl.batch,
                          .total_len = wl.total_len(),
                          .steps = {}};
  switch (cfg.arch()) {
    case ArchitectureKind::kAR:
      build_ar(wl, accel, schedule.steps);
      break;
    case ArchitectureKind::kDLM:
      build_dlm(wl, accel, schedule.steps);
      break;
    case ArchitectureKind::kBlockDiffusion:
      build_block(cfg.block_size(), wl, accel, schedule.steps);
      break;
  }
  return schedule;
}

}  // namespace lmperf
