#include "lmperf/memory_model.h"

#include <algorithm>

namespace lmperf {

MemoryReport estimate_memory(const ValidatedConfig& cfg, const HardwareSpec& hw,
                             const Workload& wl, const AccelerationConfig& accel,
                             const MemoryConstants& k) {
  validate_hardware(hw);
  const DecodeSchedule schedule = build_schedule(cfg, wl, accel);

  std::int64_t s_max = 0;
  for (const auto& step : schedule.steps) {
    if (!step.is_prefill) s_max = std::max(s_max, step.active_tokens);
  }

  const double bpe = static_cast<double>(hw.bytes_per_element);
  const double B = static_cast<double>(wl.batch);
  const double n_l = static_cast<double>(cfg.n_l());
  const double d = static_cast<double>(cfg.d());
  const double L = static_cast<double>(wl.total_len());

  const bool has_kv = cfg.arch() != ArchitectureKind::kDLM || accel.dual_cache;

  MemoryReport r;
  r.max_active_tokens = s_max;
  r.weights_bytes = bpe * cfg.params();
  r.kv_cache_bytes = has_kv ? bpe * 2.0 * n_l * d * L * B : 0.0;
  r.activation_bytes =
      bpe * k.activation_factor * n_l * static_cast<double>(s_max) * d * B;
  r.total_bytes = r.weights_bytes + r.kv_cache_bytes + r.activation_bytes;
  r.overhead_bytes = k.fixed_overhead_bytes;
  r.capacity_bytes = hw.capacity - k.fixed_overhead_bytes;
  r.oom = r.total_bytes > r.capacity_bytes;
  r.headroom_bytes = r.capacity_bytes - r.total_bytes;
  return r;
}

}  // namespace lmperf
