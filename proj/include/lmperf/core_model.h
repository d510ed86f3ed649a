#pragma once

// Domain types shared by every module, their validation, and construction of
// decode schedules for autoregressive, diffusion and block-diffusion models.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "lmperf/errors.h"

namespace lmperf {

enum class ArchitectureKind { kAR, kDLM, kBlockDiffusion };

std::string_view to_string(ArchitectureKind arch);
std::optional<ArchitectureKind> parse_architecture(std::string_view name);

// Transformer shape. `params` is the total parameter count N; when absent it
// is derived from the shape (see derive_param_count). `block_size` is G and is
// only meaningful for block diffusion.
struct ModelConfig {
  std::int64_t n_l = 0;
  std::int64_t n_h = 0;
  std::int64_t n_d = 0;
  std::int64_t d = 0;
  double alpha = 0.0;
  std::optional<double> params;
  std::optional<std::int64_t> block_size;
};

struct HardwareSpec {
  double p_max = 0.0;      // FLOPs/s
  double b_mem = 0.0;      // bytes/s
  double capacity = 0.0;   // bytes
  int bytes_per_element = 2;
};

struct Workload {
  std::int64_t batch = 1;
  std::int64_t prompt_len = 0;
  std::int64_t gen_len = 1;

  std::int64_t total_len() const { return prompt_len + gen_len; }
};

struct AccelerationConfig {
  double tpf = 1.0;
  bool dual_cache = false;
  std::int64_t dual_cache_block = 32;
  // Steps between refresh passes; unset means one refresh per window,
  // i.e. ceil(dual_cache_block / tpf) steps.
  std::optional<std::int64_t> cache_refresh_interval;

  std::int64_t effective_refresh_interval() const;
  bool is_vanilla() const { return tpf == 1.0 && !dual_cache; }
};

// A ModelConfig that passed validation for a given architecture, with the
// parameter count resolved. Only validate_model_config creates one.
class ValidatedConfig {
 public:
  ArchitectureKind arch() const { return arch_; }
  const ModelConfig& config() const { return config_; }
  std::int64_t n_l() const { return config_.n_l; }
  std::int64_t n_h() const { return config_.n_h; }
  std::int64_t n_d() const { return config_.n_d; }
  std::int64_t d() const { return config_.d; }
  double alpha() const { return config_.alpha; }
  double params() const { return params_; }
  // G for block diffusion, 1 otherwise.
  std::int64_t block_size() const { return block_size_; }

 private:
  friend ValidatedConfig validate_model_config(const ModelConfig&,
                                               ArchitectureKind);
  ValidatedConfig(ArchitectureKind arch, ModelConfig cfg, double params,
                  std::int64_t block)
      : arch_(arch), config_(cfg), params_(params), block_size_(block) {}

  ArchitectureKind arch_;
  ModelConfig config_;
  double params_;
  std::int64_t block_size_;
};

// Throws ValidationError listing every violated invariant.
ValidatedConfig validate_model_config(const ModelConfig& cfg,
                                      ArchitectureKind arch);
void validate_hardware(const HardwareSpec& hw);
void validate_workload(const Workload& wl);
void validate_acceleration(const AccelerationConfig& accel,
                           ArchitectureKind arch);

// Attention (Q, K, V, O) plus a two-matrix FFN per layer; embeddings excluded.
double derive_param_count(const ModelConfig& cfg);

struct StepDescriptor {
  std::int64_t active_tokens = 0;    // s, per sequence
  std::int64_t context_len = 0;      // L_ctx, per sequence
  std::int64_t cached_kv_len = 0;    // read from cache instead of recomputed
  std::int64_t finalized_tokens = 0;
  // Fraction of a forward pass charged for this step. Below 1 only on the
  // last step of a run when tpf does not divide the run length.
  double pass_weight = 1.0;
  bool is_prefill = false;
  bool is_refresh = false;

  bool operator==(const StepDescriptor&) const = default;
};

struct DecodeSchedule {
  ArchitectureKind arch = ArchitectureKind::kAR;
  std::int64_t batch = 1;
  std::int64_t total_len = 0;
  std::vector<StepDescriptor> steps;

  std::int64_t decode_step_count() const;
  std::int64_t finalized_tokens() const;
  // Sum of pass weights over decode steps.
  double forward_passes() const;

  bool operator==(const DecodeSchedule&) const = default;
};

DecodeSchedule build_schedule(const ValidatedConfig& cfg, const Workload& wl,
                              const AccelerationConfig& accel);

}  // namespace lmperf
