#pragma once

// Closed-form FLOPs / memory-traffic accounting.
//
// Two families of expressions live here and are deliberately kept apart:
//
//  * The closed-form arithmetic-intensity estimates (arint_ar / arint_dlm /
//    arint_block). They are evaluated as written, including the
//    alpha^2 FFN term and the B*N numerator for AR.
//
//  * Per-step costs derived from standard matmul counting (step_cost):
//      FLOPs = B * n_l * (8 s d^2 + 4 s L_ctx d + 4 alpha s d^2)
//      bytes = bpe * (N + B * n_l * 2 d L_ctx + c_act * B * n_l * s d)
//
// The two agree in scaling exponents only; their constants differ.

#include <cstdint>

#include "lmperf/core_model.h"

namespace lmperf {

struct CostConstants {
  // Activation reads/writes per token per layer, in units of d elements.
  double activation_traffic = 4.0;
};

struct CostBreakdown {
  double weights_read = 0.0;
  double kv_read_write = 0.0;
  double activation_io = 0.0;
  double attention_flops = 0.0;
  double projection_flops = 0.0;
  double ffn_flops = 0.0;

  double flops() const { return attention_flops + projection_flops + ffn_flops; }
  double mops() const { return weights_read + kv_read_write + activation_io; }

  CostBreakdown& operator+=(const CostBreakdown& o);
  CostBreakdown scaled(double factor) const;
};

struct ScheduleCost {
  CostBreakdown decode;
  CostBreakdown prefill;
};

// Arithmetic intensity expressions, FLOPs per byte.
double arint_ar(const ValidatedConfig& cfg, const Workload& wl);
double arint_dlm(const ValidatedConfig& cfg, const Workload& wl);
double arint_block(const ValidatedConfig& cfg, const Workload& wl);

// Which term dominates the DLM expression: L << d makes the d^2 projection
// and FFN terms dominant, L >> d the L^2 d attention term.
enum class DominantTerm { kWeightBound, kAttentionBound };
DominantTerm dlm_dominant_term(const ValidatedConfig& cfg, const Workload& wl);

// Numerator and denominator of the closed-form expression for cfg.arch(),
// itemized. Interpreted as the cost of one forward pass.
CostBreakdown closed_form_pass(const ValidatedConfig& cfg, const Workload& wl);

// Same, as a plain function type so alternative evaluators can be injected
// into validation harnesses.
using PassCostFn = CostBreakdown (*)(const ValidatedConfig&, const Workload&);

CostBreakdown step_cost(const ValidatedConfig& cfg, const StepDescriptor& step,
                        std::int64_t batch, const HardwareSpec& hw,
                        const CostConstants& k = {});

// Weighted sum of step_cost over the schedule, prefill kept separate.
ScheduleCost total_cost(const DecodeSchedule& schedule, const ValidatedConfig& cfg,
                        const HardwareSpec& hw, const CostConstants& k = {});

// Closed-form cost summed over the decode passes of `schedule`; prefill (if
// any) is charged with step_cost since the closed forms cover
// decoding only.
ScheduleCost closed_form_cost(const DecodeSchedule& schedule,
                             const ValidatedConfig& cfg, const Workload& wl,
                             const HardwareSpec& hw, const CostConstants& k = {},
                             PassCostFn pass_cost = closed_form_pass);

}  // namespace lmperf
