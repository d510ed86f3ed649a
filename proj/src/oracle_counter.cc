#include "lmperf/oracle_counter.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>

namespace lmperf {

std::string_view to_string(OperatorKind op) {
  switch (op) {
    case OperatorKind::kQkvProj: return "qkv_proj";
    case OperatorKind::kAttnScores: return "attn_scores";
    case OperatorKind::kAttnValue: return "attn_value";
    case OperatorKind::kOutProj: return "out_proj";
    case OperatorKind::kFfnUp: return "ffn_up";
    case OperatorKind::kFfnDown: return "ffn_down";
    case OperatorKind::kKvCacheRead: return "kv_cache_read";
    case OperatorKind::kKvCacheWrite: return "kv_cache_write";
    case OperatorKind::kWeightRead: return "weight_read";
    case OperatorKind::kActivationIo: return "activation_io";
  }
  return "unknown";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "PASS";
    case Verdict::kExponentMismatch: return "EXPONENT_MISMATCH";
    case Verdict::kConstantDrift: return "CONSTANT_DRIFT";
    case Verdict::kSkipped: return "SKIPPED";
  }
  return "UNKNOWN";
}

namespace {

// (m x k) . (k x n)
double matmul_flops(double m, double k, double n) { return 2.0 * m * k * n; }

}  // namespace

std::vector<OperatorCost> count_forward(const ValidatedConfig& cfg,
                                        const StepDescriptor& step,
                                        std::int64_t batch, const HardwareSpec& hw,
                                        double activation_traffic) {
  const double s = static_cast<double>(step.active_tokens);
  const double ctx = static_cast<double>(step.context_len);
  const double cached = static_cast<double>(step.cached_kv_len);
  const double d = static_cast<double>(cfg.d());
  const double head_dim = static_cast<double>(cfg.n_d());
  const double ffn = cfg.alpha() * d;
  const double bpe = static_cast<double>(hw.bytes_per_element);

  std::vector<OperatorCost> ops;
  ops.reserve(static_cast<std::size_t>(cfg.n_l()) * 9 + 1);
  for (std::int64_t layer = 0; layer < cfg.n_l(); ++layer) {
    double qkv = 0.0, scores = 0.0, value = 0.0, out = 0.0, up = 0.0, down = 0.0;
    double kv_read = 0.0, kv_write = 0.0, act = 0.0;
    for (std::int64_t seq = 0; seq < batch; ++seq) {
      qkv += 3.0 * matmul_flops(s, d, d);
      for (std::int64_t h = 0; h < cfg.n_h(); ++h) {
        scores += matmul_flops(s, head_dim, ctx);
        value += matmul_flops(s, ctx, head_dim);
      }
      out += matmul_flops(s, d, d);
      up += matmul_flops(s, d, ffn);
      down += matmul_flops(s, ffn, d);
      kv_read += bpe * 2.0 * d * cached;
      kv_write += bpe * 2.0 * d * s;
      act += bpe * activation_traffic * s * d;
    }
    ops.push_back({OperatorKind::kQkvProj, layer, qkv, 0.0});
    ops.push_back({OperatorKind::kAttnScores, layer, scores, 0.0});
    ops.push_back({OperatorKind::kAttnValue, layer, value, 0.0});
    ops.push_back({OperatorKind::kOutProj, layer, out, 0.0});
    ops.push_back({OperatorKind::kFfnUp, layer, up, 0.0});
    ops.push_back({OperatorKind::kFfnDown, layer, down, 0.0});
    ops.push_back({OperatorKind::kKvCacheRead, layer, 0.0, kv_read});
    ops.push_back({OperatorKind::kKvCacheWrite, layer, 0.0, kv_write});
    ops.push_back({OperatorKind::kActivationIo, layer, 0.0, act});
  }
  ops.push_back({OperatorKind::kWeightRead, -1, 0.0, bpe * cfg.params()});
  return ops;
}

namespace {

CostBreakdown fold(const std::vector<OperatorCost>& ops) {
  CostBreakdown c;
  for (const auto& op : ops) {
    switch (op.op) {
      case OperatorKind::kQkvProj:
      case OperatorKind::kOutProj:
        c.projection_flops += op.flops;
        break;
      case OperatorKind::kAttnScores:
      case OperatorKind::kAttnValue:
        c.attention_flops += op.flops;
        break;
      case OperatorKind::kFfnUp:
      case OperatorKind::kFfnDown:
        c.ffn_flops += op.flops;
        break;
      case OperatorKind::kKvCacheRead:
      case OperatorKind::kKvCacheWrite:
        c.kv_read_write += op.bytes;
        break;
      case OperatorKind::kWeightRead:
        c.weights_read += op.bytes;
        break;
      case OperatorKind::kActivationIo:
        c.activation_io += op.bytes;
        break;
    }
  }
  return c;
}

}  // namespace

ScheduleCost count_schedule(const DecodeSchedule& schedule,
                            const ValidatedConfig& cfg, const HardwareSpec& hw,
                            double activation_traffic) {
  ScheduleCost out;
  for (const auto& step : schedule.steps) {
    CostBreakdown c =
        fold(count_forward(cfg, step, schedule.batch, hw, activation_traffic));
    if (step.is_prefill) {
      out.prefill += c;
    } else {
      out.decode += c.scaled(step.pass_weight);
    }
  }
  return out;
}

Verdict OracleReport::verdict() const {
  bool drift = false;
  for (const auto& s : series) {
    if (s.verdict == Verdict::kExponentMismatch) return Verdict::kExponentMismatch;
    if (s.verdict == Verdict::kConstantDrift) drift = true;
  }
  return drift ? Verdict::kConstantDrift : Verdict::kPass;
}

namespace {

enum class Metric { kFlopsPerToken, kMopsPerToken, kArint, kThroughput };

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::kFlopsPerToken: return "flops_per_token";
    case Metric::kMopsPerToken: return "mops_per_token";
    case Metric::kArint: return "arint";
    case Metric::kThroughput: return "throughput";
  }
  return "";
}

std::string_view variable_name(TrendVariable v) {
  switch (v) {
    case TrendVariable::kLength: return "L";
    case TrendVariable::kBatch: return "B";
    case TrendVariable::kBlockSize: return "G";
  }
  return "";
}

struct Measured {
  double flops_per_token;
  double mops_per_token;
  double arint;
  double throughput;

  double get(Metric m) const {
    switch (m) {
      case Metric::kFlopsPerToken: return flops_per_token;
      case Metric::kMopsPerToken: return mops_per_token;
      case Metric::kArint: return arint;
      case Metric::kThroughput: return throughput;
    }
    return 0.0;
  }
};

Measured summarize(const CostBreakdown& c, const Workload& wl,
                   const HardwareSpec& hw) {
  const double tokens =
      static_cast<double>(wl.batch) * static_cast<double>(wl.gen_len);
  Measured m;
  m.flops_per_token = c.flops() / tokens;
  m.mops_per_token = c.mops() / tokens;
  m.arint = c.flops() / c.mops();
  m.throughput = attainable_performance(hw, m.arint).attainable / m.flops_per_token;
  return m;
}

struct ProbePoint {
  ValidatedConfig cfg;
  Workload wl;
  double value;
};

struct Probe {
  TrendVariable variable;
  std::vector<Metric> metrics;
  std::vector<ProbePoint> points;
};

class ProbeRunner {
 public:
  ProbeRunner(const ValidatedConfig& cfg, const AccelerationConfig& accel,
              const HardwareSpec& hw, const OracleCheckOptions& opts)
      : cfg_(cfg), accel_(accel), hw_(hw), opts_(opts) {}

  std::string label(TrendVariable v) const {
    std::ostringstream ss;
    ss << to_string(cfg_.arch()) << "[n_l=" << cfg_.n_l() << ";d=" << cfg_.d()
       << "]." << variable_name(v);
    return ss.str();
  }

  CostBreakdown oracle_cost(const ValidatedConfig& cfg, const Workload& wl) const {
    return count_schedule(build_schedule(cfg, wl, accel_), cfg, hw_,
                          opts_.constants.activation_traffic)
        .decode;
  }

  bool weight_dominated(const ValidatedConfig& cfg, const Workload& wl) const {
    const CostBreakdown c = oracle_cost(cfg, wl);
    return c.kv_read_write + c.activation_io <=
           opts_.tolerance.weight_dominance * c.weights_read;
  }

  ValidatedConfig with_block(std::int64_t g) const {
    ModelConfig shape = cfg_.config();
    shape.block_size = g;
    return validate_model_config(shape, cfg_.arch());
  }

  void run(const Probe& probe, OracleReport& report) const {
    const std::string base = label(probe.variable);
    std::vector<double> xs;
    std::vector<Measured> analytic, oracle;
    for (const auto& p : probe.points) {
      xs.push_back(p.value);
      const DecodeSchedule schedule = build_schedule(p.cfg, p.wl, accel_);
      analytic.push_back(summarize(
          closed_form_cost(schedule, p.cfg, p.wl, hw_, opts_.constants,
                          opts_.analytic)
              .decode,
          p.wl, hw_));
      oracle.push_back(summarize(oracle_cost(p.cfg, p.wl), p.wl, hw_));
    }
    for (Metric m : probe.metrics) {
      OracleSeries series;
      series.label = base + "." + std::string(metric_name(m));
      std::vector<double> ya, yo, ratios;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        ya.push_back(analytic[i].get(m));
        yo.push_back(oracle[i].get(m));
        ratios.push_back(ya.back() / yo.back());
      }
      const double ea = fit_loglog_slope(xs, ya);
      const double eo = fit_loglog_slope(xs, yo);
      std::vector<double> sorted = ratios;
      std::sort(sorted.begin(), sorted.end());
      const double median = sorted[sorted.size() / 2];
      double spread = 0.0;
      for (double r : ratios) spread = std::max(spread, std::abs(r / median - 1.0));

      if (!(std::abs(ea - eo) <= opts_.tolerance.exponent)) {
        series.verdict = Verdict::kExponentMismatch;
      } else if (!(spread <= opts_.tolerance.ratio)) {
        series.verdict = Verdict::kConstantDrift;
      }
      for (std::size_t i = 0; i < xs.size(); ++i) {
        series.rows.push_back({series.label, xs[i], ya[i], yo[i], ratios[i], ea,
                               eo, series.verdict});
      }
      report.series.push_back(std::move(series));
    }
  }

  void skip(TrendVariable v, std::string reason, OracleReport& report) const {
    report.skipped.push_back({label(v), std::move(reason)});
  }

  // Doubling sweep 1, 2, 4, ... kept while `ok` holds.
  template <typename Make>
  std::vector<ProbePoint> doubling(std::int64_t limit, Make make) const {
    std::vector<ProbePoint> pts;
    for (std::int64_t v = 1; v <= limit; v *= 2) {
      auto p = make(v);
      if (!p) break;
      pts.push_back(*p);
    }
    return pts;
  }

  void run_ar(OracleReport& report) const {
    const double d = static_cast<double>(cfg_.d());
    auto batch_pts = doubling(1024, [&](std::int64_t b) -> std::optional<ProbePoint> {
      Workload wl{.batch = b, .prompt_len = 0, .gen_len = 1};
      if (10.0 * static_cast<double>(wl.total_len()) > d) return std::nullopt;
      if (!weight_dominated(cfg_, wl)) return std::nullopt;
      return ProbePoint{cfg_, wl, static_cast<double>(b)};
    });
    if (batch_pts.size() >= 3) {
      run({TrendVariable::kBatch,
           {Metric::kThroughput, Metric::kArint, Metric::kFlopsPerToken,
            Metric::kMopsPerToken},
           batch_pts},
          report);
    } else {
      skip(TrendVariable::kBatch,
           "weight-dominated memory-bound regime unreachable (needs B*(2L+c_act) << d)",
           report);
    }

    auto len_pts = doubling(opts_.max_len, [&](std::int64_t L) -> std::optional<ProbePoint> {
      Workload wl{.batch = 1, .prompt_len = 0, .gen_len = L};
      if (10.0 * static_cast<double>(L) > d) return std::nullopt;
      if (!weight_dominated(cfg_, wl)) return std::nullopt;
      return ProbePoint{cfg_, wl, static_cast<double>(L)};
    });
    if (len_pts.size() >= 3) {
      run({TrendVariable::kLength,
           {Metric::kFlopsPerToken, Metric::kArint, Metric::kThroughput},
           len_pts},
          report);
    } else {
      skip(TrendVariable::kLength, "fewer than 3 lengths satisfy L <= d/10", report);
    }
  }

  void run_dlm(OracleReport& report) const {
    const std::int64_t floor_len = 10 * cfg_.d();
    std::vector<std::int64_t> lens;
    for (int k = 0;; ++k) {
      const auto L = static_cast<std::int64_t>(std::llround(
          static_cast<double>(opts_.max_len) / std::pow(2.0, k / 2.0)));
      if (L < floor_len) break;
      if (lens.empty() || lens.back() != L) lens.push_back(L);
    }
    std::reverse(lens.begin(), lens.end());
    if (lens.size() < 3) {
      skip(TrendVariable::kLength, "fewer than 3 lengths satisfy L >= 10 d", report);
      return;
    }
    std::vector<ProbePoint> pts;
    for (std::int64_t L : lens) {
      pts.push_back({cfg_,
                     Workload{.batch = opts_.long_context_batch,
                              .prompt_len = 0,
                              .gen_len = L},
                     static_cast<double>(L)});
    }
    run({TrendVariable::kLength,
         {Metric::kFlopsPerToken, Metric::kArint, Metric::kMopsPerToken},
         pts},
        report);
  }

  void run_block(OracleReport& report) const {
    // Single trailing-aligned generation of G_max tokens so every G divides it.
    for (int top = 10; top >= 2; --top) {
      const std::int64_t g_max = std::int64_t{1} << top;
      if (g_max > opts_.max_len) continue;
      std::vector<ProbePoint> pts;
      bool ok = true;
      for (std::int64_t g = 1; g <= g_max && ok; g *= 2) {
        Workload wl{.batch = 1, .prompt_len = 0, .gen_len = g_max};
        ValidatedConfig c = with_block(g);
        ok = weight_dominated(c, wl);
        pts.push_back({c, wl, static_cast<double>(g)});
      }
      if (ok) {
        run({TrendVariable::kBlockSize,
             {Metric::kFlopsPerToken, Metric::kArint, Metric::kMopsPerToken},
             pts},
            report);
        return;
      }
    }
    skip(TrendVariable::kBlockSize,
         "weight-dominated regime unreachable for G in {1, 2, 4}", report);
  }

 private:
  const ValidatedConfig& cfg_;
  const AccelerationConfig& accel_;
  const HardwareSpec& hw_;
  const OracleCheckOptions& opts_;
};

}  // namespace

OracleReport oracle_check(const ValidatedConfig& cfg,
                          const AccelerationConfig& accel, const HardwareSpec& hw,
                          const OracleCheckOptions& opts) {
  validate_hardware(hw);
  validate_acceleration(accel, cfg.arch());
  OracleReport report;
  ProbeRunner runner(cfg, accel, hw, opts);
  if (!closed_form_expressible(cfg.arch(), accel)) {
    runner.skip(TrendVariable::kLength,
                "closed-form intensity does not model this acceleration", report);
    return report;
  }
  switch (cfg.arch()) {
    case ArchitectureKind::kAR: runner.run_ar(report); break;
    case ArchitectureKind::kDLM: runner.run_dlm(report); break;
    case ArchitectureKind::kBlockDiffusion: runner.run_block(report); break;
  }
  return report;
}

OracleReport oracle_check_grid(const OracleGrid& grid,
                               const OracleCheckOptions& opts) {
  OracleReport all;
  for (std::int64_t n_l : grid.n_layers) {
    for (std::int64_t d : grid.hidden) {
      for (ArchitectureKind arch :
           {ArchitectureKind::kAR, ArchitectureKind::kDLM,
            ArchitectureKind::kBlockDiffusion}) {
        ModelConfig shape;
        shape.n_l = n_l;
        shape.n_h = 2;
        shape.n_d = d / 2;
        shape.d = d;
        shape.alpha = grid.alpha;
        if (arch == ArchitectureKind::kBlockDiffusion) shape.block_size = 1;
        const ValidatedConfig cfg = validate_model_config(shape, arch);
        OracleReport r = oracle_check(cfg, AccelerationConfig{}, grid.hw, opts);
        for (auto& s : r.series) all.series.push_back(std::move(s));
        for (auto& s : r.skipped) all.skipped.push_back(std::move(s));
      }
    }
  }
  return all;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

void write_oracle_csv(const OracleReport& report, std::ostream& out) {
  out << "variable,point,analytic,oracle,ratio,exponent_analytic,"
         "exponent_oracle,verdict\n";
  for (const auto& s : report.series) {
    for (const auto& r : s.rows) {
      out << r.variable << ',' << num(r.point) << ',' << num(r.analytic) << ','
          << num(r.oracle) << ',' << num(r.ratio) << ','
          << num(r.exponent_analytic) << ',' << num(r.exponent_oracle) << ','
          << to_string(r.verdict) << '\n';
    }
  }
}

void write_oracle_text(const OracleReport& report, std::ostream& out) {
  out << "oracle discrepancy report\n"
      << "excluded operators: softmax, layernorm, residual, embedding, lm_head\n"
      << "analytic: closed-form intensity expressions; oracle: operator "
         "enumeration\n\n";
  for (const auto& s : report.series) {
    const auto& first = s.rows.front();
    double lo = first.ratio, hi = first.ratio;
    for (const auto& r : s.rows) {
      lo = std::min(lo, r.ratio);
      hi = std::max(hi, r.ratio);
    }
    out << s.label << ": exponent analytic " << num(first.exponent_analytic)
        << " oracle " << num(first.exponent_oracle) << ", ratio [" << num(lo)
        << ", " << num(hi) << "] over " << s.rows.size() << " points -> "
        << to_string(s.verdict) << '\n';
  }
  for (const auto& s : report.skipped) {
    out << s.label << ": SKIPPED (" << s.reason << ")\n";
  }
  out << "\nverdict: " << to_string(report.verdict()) << '\n';
}

}  // namespace lmperf
