#include "lmperf/cli.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "lmperf/config_io.h"
#include "lmperf/oracle_counter.h"
#include "lmperf/sweep_report.h"

namespace lmperf {

namespace {

namespace fs = std::filesystem;

struct CommonFlags {
  bool include_prefill = false;
  std::string intensity_source = "auto";
  bool lenient = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_flag("--include-prefill", f.include_prefill,
                "Charge prompt prefill to throughput");
  cmd->add_option("--intensity-source", f.intensity_source,
                  "Arithmetic intensity source")
      ->check(CLI::IsMember({"auto", "appendix-a", "schedule"}));
  cmd->add_flag("--lenient-config", f.lenient,
                "Warn on unknown config fields instead of failing");
}

ThroughputOptions throughput_options(const CommonFlags& f) {
  ThroughputOptions t;
  t.include_prefill = f.include_prefill;
  t.source = *parse_intensity_source(f.intensity_source);
  return t;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void flush_warnings(std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  warnings.clear();
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  f << body;
  if (!f) throw Error(ErrorCode::kIoFailure, "write failed: " + path.string());
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + dir.string());
}

struct AnalyzeArgs {
  std::string model, hardware, workload, arch, csv;
};

int analyze(const AnalyzeArgs& a, const CommonFlags& f, std::ostream& out,
            std::ostream& err) {
  std::vector<std::string> warnings;
  const ParseOptions popts{f.lenient, &warnings};
  const ModelDocument model = load_model(a.model, popts);
  const HardwareSpec hw = load_hardware(a.hardware, popts);
  const WorkloadDocument wd = load_workload(a.workload, popts);
  flush_warnings(warnings, err);

  std::optional<ArchitectureKind> arch = model.variant;
  if (!a.arch.empty()) arch = parse_architecture(a.arch);
  if (!arch) {
    throw ValidationError({{ErrorCode::kInvalidField,
                            "architecture unknown: pass --arch or set \"variant\""}});
  }
  const ValidatedConfig cfg = validate_model_config(model.config, *arch);
  validate_workload(wd.workload);
  validate_acceleration(wd.acceleration, *arch);

  const AccelVariant variant{default_accel_label(wd.acceleration), wd.acceleration};
  const SweepRow row =
      evaluate_point(cfg, variant, wd.workload, hw, throughput_options(f));
  const auto& e = row.est;
  const auto& m = row.mem;

  out << "arch: " << to_string(*arch) << '\n'
      << "accel: " << variant.label << '\n'
      << "batch: " << wd.workload.batch << '\n'
      << "prompt_len: " << wd.workload.prompt_len << '\n'
      << "gen_len: " << wd.workload.gen_len << '\n'
      << "tpf: " << num(wd.acceleration.tpf) << '\n'
      << "intensity_source: " << to_string(e.source) << '\n'
      << "decode_steps: " << e.decode_steps << '\n'
      << "forward_passes: " << num(e.forward_passes) << '\n'
      << "flops_total: " << num(e.flops_total) << '\n'
      << "mops_total: " << num(e.mops_total) << '\n'
      << "arint: " << num(e.arint) << '\n'
      << "ridge: " << num(e.ridge) << '\n'
      << "regime: " << to_string(e.regime) << '\n'
      << "attainable_flops_s: " << num(e.attainable) << '\n'
      << "flops_per_token: " << num(e.flops_per_token) << '\n'
      << "throughput_tok_s: " << num(e.tokens_per_second) << '\n'
      << "weights_bytes: " << num(m.weights_bytes) << '\n'
      << "kv_cache_bytes: " << num(m.kv_cache_bytes) << '\n'
      << "activation_bytes: " << num(m.activation_bytes) << '\n'
      << "mem_bytes: " << num(m.total_bytes) << '\n'
      << "capacity_bytes: " << num(m.capacity_bytes) << '\n'
      << "headroom_bytes: " << num(m.headroom_bytes) << '\n'
      << "oom: " << (m.oom ? "true" : "false") << '\n';
  if (m.oom) err << "note: configuration exceeds device memory\n";

  if (!a.csv.empty()) {
    std::ostringstream ss;
    write_csv({row}, ss);
    write_text(a.csv, ss.str());
  }
  return 0;
}

struct SweepArgs {
  std::string spec, out;
  bool extended = false;
};

int sweep(const SweepArgs& a, const CommonFlags& f, CLI::App* cmd,
          std::ostream& out, std::ostream& err) {
  std::vector<std::string> warnings;
  SweepSpec spec = load_sweep_spec(a.spec, ParseOptions{f.lenient, &warnings});
  flush_warnings(warnings, err);
  if (a.extended) spec.extend_lengths();
  if (cmd->count("--include-prefill")) spec.throughput.include_prefill = true;
  if (cmd->count("--intensity-source")) {
    spec.throughput.source = *parse_intensity_source(f.intensity_source);
  }

  const std::vector<SweepRow> rows = run_sweep(spec);
  std::vector<fs::path> written = emit_report(rows, spec, a.out);

  // Speedup tables against each architecture's unaccelerated variant.
  for (const auto& entry : spec.architectures) {
    const ArchitectureKind arch = entry.cfg.arch();
    const auto base = select_rows(rows, arch, "none");
    if (base.empty()) continue;
    for (const auto& v : entry.variants) {
      if (v.label == "none") continue;
      std::ostringstream ss;
      write_speedup_csv(compare_acceleration(base, select_rows(rows, arch, v.label)),
                        ss);
      written.push_back(fs::path(a.out) / ("speedup_" + std::string(to_string(arch)) +
                                           "_" + v.label + ".csv"));
      write_text(written.back(), ss.str());
    }
  }
  std::size_t oom = 0;
  for (const auto& r : rows) oom += r.mem.oom;
  err << rows.size() << " rows (" << oom << " out of memory)\n";
  for (const auto& p : written) out << p.string() << '\n';
  return 0;
}

struct OracleArgs {
  std::string config, workload, hardware, out;
};

int oracle(const OracleArgs& a, const CommonFlags& f, std::ostream& out,
           std::ostream& err) {
  OracleReport report;
  if (a.config.empty()) {
    report = oracle_check_grid(OracleGrid{});
  } else {
    std::vector<std::string> warnings;
    const ParseOptions popts{f.lenient, &warnings};
    const ModelDocument model = load_model(a.config, popts);
    if (!model.variant) {
      throw ValidationError({{ErrorCode::kInvalidField,
                              a.config + ": \"variant\" is required for oracle-check"}});
    }
    AccelerationConfig accel;
    if (!a.workload.empty()) accel = load_workload(a.workload, popts).acceleration;
    HardwareSpec hw = OracleGrid{}.hw;
    if (!a.hardware.empty()) hw = load_hardware(a.hardware, popts);
    flush_warnings(warnings, err);
    report = oracle_check(validate_model_config(model.config, *model.variant), accel,
                          hw);
  }

  std::ostringstream text, csv;
  write_oracle_text(report, text);
  write_oracle_csv(report, csv);
  make_dir(a.out);
  write_text(fs::path(a.out) / "report.txt", text.str());
  write_text(fs::path(a.out) / "report.csv", csv.str());
  out << text.str();
  const Verdict v = report.verdict();
  if (v != Verdict::kPass) {
    err << "oracle-check: " << to_string(v) << '\n';
    return 3;
  }
  return 0;
}

int exit_code(const Error& e) {
  return e.code() == ErrorCode::kIoFailure ? 1 : 2;
}

void report(const Error& e, std::ostream& err) {
  err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
  if (const auto* v = dynamic_cast<const ValidationError*>(&e)) {
    for (const auto& issue : v->issues()) {
      err << "  - " << to_string(issue.code) << ": " << issue.message << '\n';
    }
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Roofline throughput model for AR, diffusion and block-diffusion LMs",
               "lmperf"};
  app.require_subcommand(1, 1);

  CommonFlags common;
  AnalyzeArgs aa;
  auto* analyze_cmd = app.add_subcommand("analyze", "Single-point estimate");
  analyze_cmd->add_option("--model", aa.model, "Model JSON")->required();
  analyze_cmd->add_option("--hardware", aa.hardware, "Hardware JSON")->required();
  analyze_cmd->add_option("--workload", aa.workload, "Workload JSON")->required();
  analyze_cmd->add_option("--arch", aa.arch, "AR, DLM or BlockDiffusion")
      ->check(CLI::IsMember({"AR", "DLM", "BlockDiffusion"}));
  analyze_cmd->add_option("--csv", aa.csv, "Also write a one-row CSV here");
  add_common(analyze_cmd, common);

  SweepArgs sa;
  auto* sweep_cmd = app.add_subcommand("sweep", "Grid sweep, CSV and SVG output");
  sweep_cmd->add_option("--spec", sa.spec, "Sweep spec JSON")->required();
  sweep_cmd->add_option("--out", sa.out, "Output directory")->required();
  sweep_cmd->add_flag("--extended-lengths", sa.extended,
                      "Add gen_len 2048..16384 to the grid");
  add_common(sweep_cmd, common);

  OracleArgs oa;
  auto* oracle_cmd =
      app.add_subcommand("oracle-check", "Compare closed forms with operator counts");
  oracle_cmd->add_option("--config", oa.config,
                         "Model JSON (default: built-in toy grid)");
  oracle_cmd->add_option("--workload", oa.workload, "Workload JSON for acceleration");
  oracle_cmd->add_option("--hardware", oa.hardware, "Hardware JSON");
  oracle_cmd->add_option("--out", oa.out, "Output directory")->required();
  add_common(oracle_cmd, common);

  std::string ridge_hw;
  auto* ridge_cmd = app.add_subcommand("ridge", "Print the roofline ridge point");
  ridge_cmd->add_option("--hardware", ridge_hw, "Hardware JSON")->required();
  add_common(ridge_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*analyze_cmd) return analyze(aa, common, out, err);
    if (*sweep_cmd) return sweep(sa, common, sweep_cmd, out, err);
    if (*oracle_cmd) return oracle(oa, common, out, err);
    if (*ridge_cmd) {
      std::vector<std::string> warnings;
      const HardwareSpec hw =
          load_hardware(ridge_hw, ParseOptions{common.lenient, &warnings});
      flush_warnings(warnings, err);
      out << num(ridge_point(hw)) << '\n';
      return 0;
    }
  } catch (const Error& e) {
    report(e, err);
    return exit_code(e);
  }
  return 2;
}

}  // namespace lmperf
