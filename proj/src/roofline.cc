#include "lmperf/roofline.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace lmperf {

std::string_view to_string(Regime regime) {
  return regime == Regime::kMemoryBound ? "MemoryBound" : "ComputeBound";
}

double ridge_point(const HardwareSpec& hw) { return hw.p_max / hw.b_mem; }

RooflinePoint attainable_performance(const HardwareSpec& hw, double arint) {
  if (!(arint > 0.0) || !std::isfinite(arint)) {
    throw Error(ErrorCode::kNonPositiveIntensity,
                "arithmetic intensity must be positive and finite, got " +
                    std::to_string(arint));
  }
  RooflinePoint p;
  p.arint = arint;
  p.ridge = ridge_point(hw);
  if (arint < p.ridge) {
    p.regime = Regime::kMemoryBound;
    p.attainable = std::min(hw.p_max, hw.b_mem * arint);
  } else {
    p.regime = Regime::kComputeBound;
    p.attainable = hw.p_max;
  }
  return p;
}

}  // namespace lmperf
