#include "lmperf/throughput.h"

#include <cmath>
#include <string>

namespace lmperf {

std::string_view to_string(IntensitySource source) {
  switch (source) {
    case IntensitySource::kAuto: return "auto";
    case IntensitySource::kClosedForm: return "appendix-a";
    case IntensitySource::kScheduleDerived: return "schedule";
  }
  return "unknown";
}

std::optional<IntensitySource> parse_intensity_source(std::string_view name) {
  if (name == "auto") return IntensitySource::kAuto;
  if (name == "appendix-a") return IntensitySource::kClosedForm;
  if (name == "schedule") return IntensitySource::kScheduleDerived;
  return std::nullopt;
}

bool closed_form_expressible(ArchitectureKind arch,
                            const AccelerationConfig& accel) {
  if (accel.dual_cache) return false;
  return arch != ArchitectureKind::kAR || accel.tpf == 1.0;
}

double flops_per_token(const CostBreakdown& total, const Workload& wl) {
  return total.flops() /
         (static_cast<double>(wl.batch) * static_cast<double>(wl.gen_len));
}

ThroughputEstimate estimate_throughput(const ValidatedConfig& cfg,
                                       const HardwareSpec& hw, const Workload& wl,
                                       const AccelerationConfig& accel,
                                       const ThroughputOptions& opts) {
  validate_hardware(hw);
  const DecodeSchedule schedule = build_schedule(cfg, wl, accel);

  ThroughputEstimate est;
  est.source = opts.source != IntensitySource::kScheduleDerived &&
                       closed_form_expressible(cfg.arch(), accel)
                   ? IntensitySource::kClosedForm
                   : IntensitySource::kScheduleDerived;
  est.cost = est.source == IntensitySource::kClosedForm
                 ? closed_form_cost(schedule, cfg, wl, hw, opts.constants)
                 : total_cost(schedule, cfg, hw, opts.constants);

  CostBreakdown charged = est.cost.decode;
  if (opts.include_prefill) charged += est.cost.prefill;

  est.flops_total = charged.flops();
  est.mops_total = charged.mops();
  est.arint = est.flops_total / est.mops_total;
  const RooflinePoint point = attainable_performance(hw, est.arint);
  est.attainable = point.attainable;
  est.regime = point.regime;
  est.ridge = point.ridge;
  est.generated_tokens =
      static_cast<double>(wl.batch) * static_cast<double>(wl.gen_len);
  est.flops_per_token = flops_per_token(charged, wl);
  est.tokens_per_second = est.attainable / est.flops_per_token;
  est.decode_steps = schedule.decode_step_count();
  est.forward_passes = schedule.forward_passes();
  return est;
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

double asymptotic_trend(const ValidatedConfig& cfg, const HardwareSpec& hw,
                        const Workload& base, const AccelerationConfig& accel,
                        const TrendQuery& query, const ThroughputOptions& opts) {
  const auto& pts = query.points;
  if (pts.size() < 3) {
    throw Error(ErrorCode::kInsufficientPoints,
                "need at least 3 points, got " + std::to_string(pts.size()));
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i] >= 1.0) || pts[i] != std::floor(pts[i]) ||
        (i > 0 && !(pts[i] > pts[i - 1]))) {
      throw Error(ErrorCode::kInsufficientPoints,
                  "points must be strictly increasing positive integers");
    }
  }

  const double d = static_cast<double>(cfg.d());
  std::vector<double> throughput;
  throughput.reserve(pts.size());
  for (double p : pts) {
    const auto v = static_cast<std::int64_t>(p);
    Workload wl = base;
    ModelConfig shape = cfg.config();
    switch (query.variable) {
      case TrendVariable::kLength:
        wl.gen_len = v - base.prompt_len;
        if (wl.gen_len < 1) {
          throw Error(ErrorCode::kRegimeViolation,
                      "length point " + std::to_string(v) +
                          " does not exceed the prompt length");
        }
        break;
      case TrendVariable::kBatch:
        wl.batch = v;
        break;
      case TrendVariable::kBlockSize:
        shape.block_size = v;
        break;
    }
    const ValidatedConfig point_cfg = validate_model_config(shape, cfg.arch());

    const double L = static_cast<double>(wl.total_len());
    if (query.length_regime == LengthRegime::kShortContext && 10.0 * L > d) {
      throw Error(ErrorCode::kRegimeViolation,
                  "L = " + std::to_string(wl.total_len()) +
                      " violates L <= d/10");
    }
    if (query.length_regime == LengthRegime::kLongContext && L < 10.0 * d) {
      throw Error(ErrorCode::kRegimeViolation,
                  "L = " + std::to_string(wl.total_len()) +
                      " violates L >= 10 d");
    }

    const ThroughputEstimate est =
        estimate_throughput(point_cfg, hw, wl, accel, opts);
    if (est.regime != query.regime) {
      throw Error(ErrorCode::kRegimeViolation,
                  "point " + std::to_string(v) + " is " +
                      std::string(to_string(est.regime)) + ", expected " +
                      std::string(to_string(query.regime)));
    }
    throughput.push_back(est.tokens_per_second);
  }
  return fit_loglog_slope(pts, throughput);
}

std::optional<std::int64_t> compute_bound_crossing_batch(
    const ValidatedConfig& cfg, const HardwareSpec& hw, const Workload& base,
    const AccelerationConfig& accel, const ThroughputOptions& opts,
    std::int64_t max_batch) {
  auto compute_bound = [&](std::int64_t b) {
    Workload wl = base;
    wl.batch = b;
    return estimate_throughput(cfg, hw, wl, accel, opts).regime ==
           Regime::kComputeBound;
  };
  if (!compute_bound(max_batch)) return std::nullopt;
  std::int64_t lo = 0;  // known memory-bound (or below range)
  std::int64_t hi = max_batch;
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (compute_bound(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace lmperf
