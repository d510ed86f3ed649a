#include "lmperf/analytic_cost.h"

namespace lmperf {

CostBreakdown& CostBreakdown::operator+=(const CostBreakdown& o) {
  weights_read += o.weights_read;
  kv_read_write += o.kv_read_write;
  activation_io += o.activation_io;
  attention_flops += o.attention_flops;
  projection_flops += o.projection_flops;
  ffn_flops += o.ffn_flops;
  return *this;
}

CostBreakdown CostBreakdown::scaled(double f) const {
  return {weights_read * f,    kv_read_write * f,    activation_io * f,
          attention_flops * f, projection_flops * f, ffn_flops * f};
}

namespace {

struct Dims {
  double B, N, n_l, n_h, n_d, d, alpha, L, G;
};

Dims dims(const ValidatedConfig& cfg, const Workload& wl) {
  return {static_cast<double>(wl.batch),
          cfg.params(),
          static_cast<double>(cfg.n_l()),
          static_cast<double>(cfg.n_h()),
          static_cast<double>(cfg.n_d()),
          static_cast<double>(cfg.d()),
          cfg.alpha(),
          static_cast<double>(wl.total_len()),
          static_cast<double>(cfg.block_size())};
}

// ArInt_AR = B N / (N + B n_l n_h n_d L)
CostBreakdown ar_pass(const Dims& x) {
  CostBreakdown c;
  c.projection_flops = x.B * x.N;
  c.weights_read = x.N;
  c.kv_read_write = x.B * x.n_l * x.n_h * x.n_d * x.L;
  return c;
}

// ArInt_DLM = 2 B n_l (2 L d^2 + alpha^2 L d^2 + L^2 d) / (N + B n_l d L)
CostBreakdown dlm_pass(const Dims& x) {
  const double k = 2.0 * x.B * x.n_l;
  CostBreakdown c;
  c.projection_flops = k * 2.0 * x.L * x.d * x.d;
  c.ffn_flops = k * x.alpha * x.alpha * x.L * x.d * x.d;
  c.attention_flops = k * x.L * x.L * x.d;
  c.weights_read = x.N;
  c.activation_io = x.B * x.n_l * x.d * x.L;
  return c;
}

// ArInt_BD = 2 B n_l (2 G d^2 + alpha^2 G d^2 + L G d)
//            / (N + 2 B n_l d L + B n_l d G)
CostBreakdown block_pass(const Dims& x) {
  const double k = 2.0 * x.B * x.n_l;
  CostBreakdown c;
  c.projection_flops = k * 2.0 * x.G * x.d * x.d;
  c.ffn_flops = k * x.alpha * x.alpha * x.G * x.d * x.d;
  c.attention_flops = k * x.L * x.G * x.d;
  c.weights_read = x.N;
  c.kv_read_write = 2.0 * x.B * x.n_l * x.d * x.L;
  c.activation_io = x.B * x.n_l * x.d * x.G;
  return c;
}

double ratio(const CostBreakdown& c) { return c.flops() / c.mops(); }

}  // namespace

double arint_ar(const ValidatedConfig& cfg, const Workload& wl) {
  return ratio(ar_pass(dims(cfg, wl)));
}

double arint_dlm(const ValidatedConfig& cfg, const Workload& wl) {
  return ratio(dlm_pass(dims(cfg, wl)));
}

double arint_block(const ValidatedConfig& cfg, const Workload& wl) {
  return ratio(block_pass(dims(cfg, wl)));
}

DominantTerm dlm_dominant_term(const ValidatedConfig& cfg, const Workload& wl) {
  const Dims x = dims(cfg, wl);
  return x.L * x.d > (2.0 + x.alpha * x.alpha) * x.d * x.d
             ? DominantTerm::kAttentionBound
             : DominantTerm::kWeightBound;
}

CostBreakdown closed_form_pass(const ValidatedConfig& cfg, const Workload& wl) {
  const Dims x = dims(cfg, wl);
  switch (cfg.arch()) {
    case ArchitectureKind::kAR: return ar_pass(x);
    case ArchitectureKind::kDLM: return dlm_pass(x);
    case ArchitectureKind::kBlockDiffusion: return block_pass(x);
  }
  return {};
}

CostBreakdown step_cost(const ValidatedConfig& cfg, const StepDescriptor& step,
                        std::int64_t batch, const HardwareSpec& hw,
                        const CostConstants& k) {
  const double B = static_cast<double>(batch);
  const double n_l = static_cast<double>(cfg.n_l());
  const double d = static_cast<double>(cfg.d());
  const double s = static_cast<double>(step.active_tokens);
  const double ctx = static_cast<double>(step.context_len);
  const double bpe = static_cast<double>(hw.bytes_per_element);

  CostBreakdown c;
  c.projection_flops = B * n_l * 8.0 * s * d * d;
  c.attention_flops = B * n_l * 4.0 * s * ctx * d;
  c.ffn_flops = B * n_l * 4.0 * cfg.alpha() * s * d * d;
  c.weights_read = bpe * cfg.params();
  c.kv_read_write = bpe * B * n_l * 2.0 * d * ctx;
  c.activation_io = bpe * k.activation_traffic * B * n_l * s * d;
  return c;
}

ScheduleCost total_cost(const DecodeSchedule& schedule, const ValidatedConfig& cfg,
                        const HardwareSpec& hw, const CostConstants& k) {
  ScheduleCost out;
  for (const auto& step : schedule.steps) {
    CostBreakdown c = step_cost(cfg, step, schedule.batch, hw, k);
    if (step.is_prefill) {
      out.prefill += c;
    } else {
      out.decode += c.scaled(step.pass_weight);
    }
  }
  return out;
}

ScheduleCost closed_form_cost(const DecodeSchedule& schedule,
                             const ValidatedConfig& cfg, const Workload& wl,
                             const HardwareSpec& hw, const CostConstants& k,
                             PassCostFn pass_cost) {
  ScheduleCost out;
  const CostBreakdown per_pass = pass_cost(cfg, wl);
  for (const auto& step : schedule.steps) {
    if (step.is_prefill) {
      out.prefill += step_cost(cfg, step, schedule.batch, hw, k);
    }
  }
  out.decode = per_pass.scaled(schedule.forward_passes());
  return out;
}

}  // namespace lmperf
