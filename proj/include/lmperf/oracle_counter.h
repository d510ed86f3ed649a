#pragma once

// Operator-by-operator enumeration of FLOPs and bytes for a decode schedule.
// Independent of analytic_cost: it rebuilds every count from matmul shapes
// and per-head loops, and is used to arbitrate the closed-form expressions.
//
// Excluded operators: softmax, layer norms, residual adds, embeddings and the
// LM head. None of them carries a term that changes a scaling exponent.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "lmperf/analytic_cost.h"
#include "lmperf/throughput.h"

namespace lmperf {

enum class OperatorKind {
  kQkvProj,
  kAttnScores,
  kAttnValue,
  kOutProj,
  kFfnUp,
  kFfnDown,
  kKvCacheRead,
  kKvCacheWrite,
  kWeightRead,
  kActivationIo,
};

std::string_view to_string(OperatorKind op);

struct OperatorCost {
  OperatorKind op;
  std::int64_t layer = -1;  // -1 for whole-model operators (weight_read)
  double flops = 0.0;
  double bytes = 0.0;
};

std::vector<OperatorCost> count_forward(const ValidatedConfig& cfg,
                                        const StepDescriptor& step,
                                        std::int64_t batch, const HardwareSpec& hw,
                                        double activation_traffic = 4.0);

// Pass-weighted sum over the schedule, prefill kept separate.
ScheduleCost count_schedule(const DecodeSchedule& schedule,
                            const ValidatedConfig& cfg, const HardwareSpec& hw,
                            double activation_traffic = 4.0);

// --- discrepancy check -----------------------------------------------------

enum class Verdict { kPass, kExponentMismatch, kConstantDrift, kSkipped };
std::string_view to_string(Verdict v);

struct OracleTolerance {
  double exponent = 0.05;  // absolute difference in fitted slope
  double ratio = 0.10;     // relative spread of analytic/oracle around median
  // Weight-dominated probes require non-weight traffic <= this fraction of
  // weight traffic at every point.
  double weight_dominance = 0.10;
};

struct OracleRow {
  std::string variable;  // e.g. "DLM[n_l=2;d=32].L.arint"
  double point = 0.0;
  double analytic = 0.0;
  double oracle = 0.0;
  double ratio = 0.0;
  double exponent_analytic = 0.0;
  double exponent_oracle = 0.0;
  Verdict verdict = Verdict::kPass;
};

struct OracleSeries {
  std::string label;
  std::vector<OracleRow> rows;
  Verdict verdict = Verdict::kPass;
};

struct SkippedProbe {
  std::string label;
  std::string reason;
};

struct OracleReport {
  std::vector<OracleSeries> series;
  std::vector<SkippedProbe> skipped;

  Verdict verdict() const;  // kPass, kExponentMismatch or kConstantDrift
};

struct OracleCheckOptions {
  OracleTolerance tolerance;
  std::int64_t max_len = 4096;
  std::int64_t long_context_batch = 16;
  CostConstants constants;
  // Analytic side of the comparison; replaceable for mutation testing.
  PassCostFn analytic = closed_form_pass;
};

// Runs the probes relevant to cfg.arch():
//   AR:  batch sweep and length sweep, weight-dominated memory traffic
//   DLM: length sweep with L >= 10 d
//   BD:  block-size sweep, weight-dominated memory traffic
// Probes whose regime cannot be reached for this shape are reported as
// skipped. `accel` applies to every probe point.
OracleReport oracle_check(const ValidatedConfig& cfg,
                          const AccelerationConfig& accel, const HardwareSpec& hw,
                          const OracleCheckOptions& opts = {});

struct OracleGrid {
  std::vector<std::int64_t> n_layers{1, 2, 4};
  std::vector<std::int64_t> hidden{8, 32, 128};
  double alpha = 1.0;
  HardwareSpec hw{.p_max = 1e12, .b_mem = 1e10, .capacity = 8e10,
                  .bytes_per_element = 2};
};

// oracle_check for every (n_l, d) shape and all three architectures. Shapes
// use n_h = 2 and N = derive_param_count; block diffusion starts at G = 1.
OracleReport oracle_check_grid(const OracleGrid& grid,
                               const OracleCheckOptions& opts = {});

void write_oracle_csv(const OracleReport& report, std::ostream& out);
void write_oracle_text(const OracleReport& report, std::ostream& out);

}  // namespace lmperf
