#pragma once

#include <cstdint>

#include "lmperf/core_model.h"

namespace lmperf {

struct MemoryConstants {
  double activation_factor = 16.0;  // c_mem, calibration knob
  // Framework, allocator and workspace overhead. Deducted from the device
  // capacity rather than added to the footprint.
  double fixed_overhead_bytes = 2e9;
};

struct MemoryReport {
  double weights_bytes = 0.0;
  double kv_cache_bytes = 0.0;
  double activation_bytes = 0.0;
  double total_bytes = 0.0;     // weights + kv + activations
  double capacity_bytes = 0.0;  // device capacity minus fixed overhead
  double overhead_bytes = 0.0;
  bool oom = false;             // total > capacity
  double headroom_bytes = 0.0;  // capacity - total, may be negative
  std::int64_t max_active_tokens = 0;
};

MemoryReport estimate_memory(const ValidatedConfig& cfg, const HardwareSpec& hw,
                             const Workload& wl, const AccelerationConfig& accel,
                             const MemoryConstants& k = {});

}  // namespace lmperf
