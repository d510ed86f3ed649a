#pragma once

// Grid sweeps over (architecture, acceleration, batch, prompt, generation),
// acceleration comparisons, and CSV / SVG emission.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lmperf/config_io.h"
#include "lmperf/memory_model.h"
#include "lmperf/throughput.h"

namespace lmperf {

struct AccelVariant {
  std::string label = "none";  // "none", "parallel", "dual-cache", ...
  AccelerationConfig accel;
};

// "none", "parallel", "dual-cache" or "parallel+dual-cache".
std::string default_accel_label(const AccelerationConfig& accel);

struct SweepEntry {
  ValidatedConfig cfg;
  std::vector<AccelVariant> variants{AccelVariant{}};
};

std::vector<std::int64_t> default_gen_lens();
std::vector<std::int64_t> default_batches();
std::vector<std::int64_t> default_prompt_lens();
std::vector<std::int64_t> extended_gen_lens();  // {2048, 4096, 8192, 16384}

struct SweepSpec {
  std::vector<SweepEntry> architectures;
  std::vector<std::int64_t> gen_lens = default_gen_lens();
  std::vector<std::int64_t> batches = default_batches();
  std::vector<std::int64_t> prompt_lens = default_prompt_lens();
  HardwareSpec hw;
  ThroughputOptions throughput;
  MemoryConstants memory;
  unsigned threads = 0;  // 0: hardware concurrency

  // Merges extended_gen_lens() into gen_lens.
  void extend_lengths();
};

// Lists must be non-empty, strictly increasing and positive; every
// acceleration variant must be supported by its architecture.
void validate_sweep_spec(const SweepSpec& spec);

struct SweepRow {
  ArchitectureKind arch = ArchitectureKind::kAR;
  std::string accel_label;
  AccelerationConfig accel;
  Workload wl;
  ThroughputEstimate est;
  MemoryReport mem;
  // Per-pass decode FLOPs from step_cost, independent of the intensity source.
  double step_flops_median = 0.0;
  double step_flops_mean = 0.0;

  bool has_throughput() const { return !mem.oom; }
};

SweepRow evaluate_point(const ValidatedConfig& cfg, const AccelVariant& variant,
                        const Workload& wl, const HardwareSpec& hw,
                        const ThroughputOptions& topts = {},
                        const MemoryConstants& mopts = {});

// Rows ordered lexicographically on (arch name, accel label, B, L_p, L_g).
// OOM rows are kept.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

std::vector<SweepRow> select_rows(const std::vector<SweepRow>& rows,
                                  ArchitectureKind arch,
                                  const std::string& accel_label);

struct SpeedupRow {
  std::int64_t batch = 0;
  std::int64_t prompt_len = 0;
  std::int64_t gen_len = 0;
  double tpf = 1.0;
  double baseline_tok_s = 0.0;
  double accel_tok_s = 0.0;
  double speedup = 0.0;
  double step_flops_ratio = 0.0;       // median per-pass, baseline / accel
  double amortized_flops_ratio = 0.0;  // total decode FLOPs, baseline / accel
  bool oom = false;                    // either side out of memory
};

// Rows are matched on (B, L_p, L_g); both sets must carry the same keys, once
// each. Throws Error(kKeyMismatch).
std::vector<SpeedupRow> compare_acceleration(const std::vector<SweepRow>& baseline,
                                             const std::vector<SweepRow>& accel);

void write_speedup_csv(const std::vector<SpeedupRow>& rows, std::ostream& out);

// CSV columns: arch, accel, batch, prompt_len, gen_len, steps, tpf,
// flops_total, mops_total, arint, regime, attainable_flops_s, flops_per_token,
// throughput_tok_s, mem_bytes, oom. throughput_tok_s is empty on OOM rows.
void write_csv(const std::vector<SweepRow>& rows, std::ostream& out);
void emit_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);

enum class SweepAxis { kGenLen, kBatch };

struct PlotSpec {
  SweepAxis axis = SweepAxis::kGenLen;
  std::int64_t prompt_len = 40;
  std::int64_t fixed_batch = 1;      // for the gen_len axis
  std::int64_t fixed_gen_len = 256;  // for the batch axis
};

std::string render_svg(const std::vector<SweepRow>& rows, const PlotSpec& plot);
void emit_svg(const std::vector<SweepRow>& rows, const PlotSpec& plot,
              const std::filesystem::path& path);

// sweep.csv plus one SVG per (axis, prompt_len). Returns the written paths.
std::vector<std::filesystem::path> emit_report(const std::vector<SweepRow>& rows,
                                               const SweepSpec& spec,
                                               const std::filesystem::path& out_dir);

// JSON sweep spec. Model and hardware paths are relative to the spec file.
SweepSpec load_sweep_spec(const std::filesystem::path& path,
                          const ParseOptions& opts = {});

}  // namespace lmperf
