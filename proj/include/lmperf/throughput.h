#pragma once

// Throughput = attainable FLOPs/s divided by FLOPs per generated token.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lmperf/analytic_cost.h"
#include "lmperf/roofline.h"

namespace lmperf {

enum class IntensitySource {
  kAuto,             // closed form when it applies, else schedule
  kClosedForm,       // closed form (falls back when inexpressible)
  kScheduleDerived,  // summed step_cost over the decode schedule
};

std::string_view to_string(IntensitySource source);
std::optional<IntensitySource> parse_intensity_source(std::string_view name);

// The closed forms describe vanilla decoding only; they can absorb
// a tpf change for DLM/BD (fewer identical passes) but not dual cache or
// multi-token AR steps.
bool closed_form_expressible(ArchitectureKind arch, const AccelerationConfig& accel);

struct ThroughputOptions {
  IntensitySource source = IntensitySource::kAuto;
  bool include_prefill = false;
  CostConstants constants;
};

struct ThroughputEstimate {
  double flops_per_token = 0.0;
  double attainable = 0.0;
  double tokens_per_second = 0.0;
  double generated_tokens = 0.0;  // B * L_g
  Regime regime = Regime::kMemoryBound;
  IntensitySource source = IntensitySource::kScheduleDerived;  // resolved

  double arint = 0.0;
  double ridge = 0.0;
  double flops_total = 0.0;
  double mops_total = 0.0;
  std::int64_t decode_steps = 0;
  double forward_passes = 0.0;
  ScheduleCost cost;
};

double flops_per_token(const CostBreakdown& total, const Workload& wl);

ThroughputEstimate estimate_throughput(const ValidatedConfig& cfg,
                                       const HardwareSpec& hw, const Workload& wl,
                                       const AccelerationConfig& accel,
                                       const ThroughputOptions& opts = {});

// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

enum class TrendVariable { kLength, kBatch, kBlockSize };
enum class LengthRegime { kAny, kShortContext, kLongContext };

struct TrendQuery {
  Regime regime = Regime::kMemoryBound;
  TrendVariable variable = TrendVariable::kLength;
  LengthRegime length_regime = LengthRegime::kAny;
  // Values of the variable. For kLength these are total lengths L; the
  // generation length is L minus the base prompt length.
  std::vector<double> points;
};

// Fitted log-log slope of throughput against the query variable. Every point
// must sit in the requested roofline regime and, when a length regime is
// given, satisfy L <= d/10 (short) or L >= 10 d (long).
// Throws Error(kInsufficientPoints) or Error(kRegimeViolation).
double asymptotic_trend(const ValidatedConfig& cfg, const HardwareSpec& hw,
                        const Workload& base, const AccelerationConfig& accel,
                        const TrendQuery& query,
                        const ThroughputOptions& opts = {});

// Smallest batch in [1, max_batch] at which the estimate is compute-bound,
// found by bisection (intensity grows with batch).
std::optional<std::int64_t> compute_bound_crossing_batch(
    const ValidatedConfig& cfg, const HardwareSpec& hw, const Workload& base,
    const AccelerationConfig& accel, const ThroughputOptions& opts,
    std::int64_t max_batch);

}  // namespace lmperf
