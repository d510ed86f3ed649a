#pragma once

#include <string_view>

#include "lmperf/core_model.h"

namespace lmperf {

enum class Regime { kMemoryBound, kComputeBound };

std::string_view to_string(Regime regime);

struct RooflinePoint {
  double arint = 0.0;       // FLOPs/byte
  double attainable = 0.0;  // FLOPs/s
  Regime regime = Regime::kMemoryBound;
  double ridge = 0.0;       // FLOPs/byte
};

// Peak compute over peak bandwidth: the intensity separating the two regimes.
double ridge_point(const HardwareSpec& hw);

// min(p_max, b_mem * arint). An intensity exactly at the ridge counts as
// compute-bound. Throws Error(kNonPositiveIntensity) unless arint > 0.
RooflinePoint attainable_performance(const HardwareSpec& hw, double arint);

}  // namespace lmperf
