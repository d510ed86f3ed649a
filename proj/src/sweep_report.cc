#include "lmperf/sweep_report.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "json.hpp"

namespace lmperf {

std::string default_accel_label(const AccelerationConfig& accel) {
  const bool parallel = accel.tpf != 1.0;
  if (parallel && accel.dual_cache) return "parallel+dual-cache";
  if (parallel) return "parallel";
  if (accel.dual_cache) return "dual-cache";
  return "none";
}

std::vector<std::int64_t> default_gen_lens() { return {64, 128, 256, 512, 1024, 2048}; }
std::vector<std::int64_t> default_batches() { return {1, 2, 4, 8, 16, 20, 24, 32, 64}; }
std::vector<std::int64_t> default_prompt_lens() { return {40, 920}; }
std::vector<std::int64_t> extended_gen_lens() { return {2048, 4096, 8192, 16384}; }

void SweepSpec::extend_lengths() {
  std::set<std::int64_t> all(gen_lens.begin(), gen_lens.end());
  for (auto v : extended_gen_lens()) all.insert(v);
  gen_lens.assign(all.begin(), all.end());
}

namespace {

void check_axis(const std::vector<std::int64_t>& xs, const char* name,
                std::vector<Issue>& issues) {
  if (xs.empty()) {
    issues.push_back({ErrorCode::kInvalidField, std::string(name) + " is empty"});
    return;
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] <= 0) {
      issues.push_back({ErrorCode::kNonPositiveField,
                        std::string(name) + " contains " + std::to_string(xs[i])});
    } else if (i > 0 && xs[i] <= xs[i - 1]) {
      issues.push_back({ErrorCode::kInvalidField,
                        std::string(name) + " is not strictly increasing"});
    }
  }
}

}  // namespace

void validate_sweep_spec(const SweepSpec& spec) {
  std::vector<Issue> issues;
  if (spec.architectures.empty()) {
    issues.push_back({ErrorCode::kInvalidField, "architectures is empty"});
  }
  check_axis(spec.gen_lens, "gen_lens", issues);
  check_axis(spec.batches, "batches", issues);
  // A zero prompt is a valid workload but the spec asks for positive lists.
  check_axis(spec.prompt_lens, "prompt_lens", issues);
  for (const auto& entry : spec.architectures) {
    if (entry.variants.empty()) {
      issues.push_back({ErrorCode::kInvalidField,
                        std::string(to_string(entry.cfg.arch())) +
                            " has no acceleration variants"});
    }
    std::set<std::string> labels;
    for (const auto& v : entry.variants) {
      if (!labels.insert(v.label).second) {
        issues.push_back({ErrorCode::kInvalidField,
                          "duplicate accel label '" + v.label + "' for " +
                              std::string(to_string(entry.cfg.arch()))});
      }
      try {
        validate_acceleration(v.accel, entry.cfg.arch());
      } catch (const ValidationError& e) {
        issues.insert(issues.end(), e.issues().begin(), e.issues().end());
      }
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  validate_hardware(spec.hw);
}

SweepRow evaluate_point(const ValidatedConfig& cfg, const AccelVariant& variant,
                        const Workload& wl, const HardwareSpec& hw,
                        const ThroughputOptions& topts,
                        const MemoryConstants& mopts) {
  SweepRow row;
  row.arch = cfg.arch();
  row.accel_label = variant.label;
  row.accel = variant.accel;
  row.wl = wl;
  row.est = estimate_throughput(cfg, hw, wl, variant.accel, topts);
  row.mem = estimate_memory(cfg, hw, wl, variant.accel, mopts);

  const DecodeSchedule schedule = build_schedule(cfg, wl, variant.accel);
  std::vector<double> per_step;
  for (const auto& step : schedule.steps) {
    if (step.is_prefill) continue;
    per_step.push_back(step_cost(cfg, step, wl.batch, hw, topts.constants).flops());
  }
  if (!per_step.empty()) {
    double sum = 0.0;
    for (double f : per_step) sum += f;
    row.step_flops_mean = sum / static_cast<double>(per_step.size());
    std::sort(per_step.begin(), per_step.end());
    const std::size_t n = per_step.size();
    row.step_flops_median =
        n % 2 ? per_step[n / 2] : 0.5 * (per_step[n / 2 - 1] + per_step[n / 2]);
  }
  return row;
}

namespace {

struct Job {
  const SweepEntry* entry;
  const AccelVariant* variant;
  Workload wl;
};

auto job_key(const Job& j) {
  return std::make_tuple(std::string(to_string(j.entry->cfg.arch())),
                         j.variant->label, j.wl.batch, j.wl.prompt_len,
                         j.wl.gen_len);
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  validate_sweep_spec(spec);

  std::vector<Job> jobs;
  for (const auto& entry : spec.architectures) {
    for (const auto& variant : entry.variants) {
      for (auto b : spec.batches) {
        for (auto lp : spec.prompt_lens) {
          for (auto lg : spec.gen_lens) {
            jobs.push_back({&entry, &variant, Workload{b, lp, lg}});
          }
        }
      }
    }
  }
  std::stable_sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
    return job_key(a) < job_key(b);
  });
  for (std::size_t i = 1; i < jobs.size(); ++i) {
    if (job_key(jobs[i]) == job_key(jobs[i - 1])) {
      throw ValidationError({{ErrorCode::kInvalidField,
                              "sweep contains the same architecture twice"}});
    }
  }

  std::vector<SweepRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const Job& j = jobs[i];
        rows[i] = evaluate_point(j.entry->cfg, *j.variant, j.wl, spec.hw,
                                 spec.throughput, spec.memory);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };

  unsigned n_threads = spec.threads ? spec.threads : std::thread::hardware_concurrency();
  n_threads = std::max(1u, std::min<unsigned>(n_threads, 16));
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, jobs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::vector<SweepRow> select_rows(const std::vector<SweepRow>& rows,
                                  ArchitectureKind arch,
                                  const std::string& accel_label) {
  std::vector<SweepRow> out;
  for (const auto& r : rows) {
    if (r.arch == arch && r.accel_label == accel_label) out.push_back(r);
  }
  return out;
}

std::vector<SpeedupRow> compare_acceleration(const std::vector<SweepRow>& baseline,
                                             const std::vector<SweepRow>& accel) {
  using Key = std::tuple<std::int64_t, std::int64_t, std::int64_t>;
  auto index = [](const std::vector<SweepRow>& rows, const char* side) {
    std::map<Key, const SweepRow*> m;
    for (const auto& r : rows) {
      if (!m.emplace(Key{r.wl.batch, r.wl.prompt_len, r.wl.gen_len}, &r).second) {
        throw Error(ErrorCode::kKeyMismatch,
                    std::string(side) + " rows repeat key (B=" +
                        std::to_string(r.wl.batch) + ", L_p=" +
                        std::to_string(r.wl.prompt_len) + ", L_g=" +
                        std::to_string(r.wl.gen_len) + ")");
      }
    }
    return m;
  };
  const auto base = index(baseline, "baseline");
  const auto acc = index(accel, "accelerated");
  if (base.size() != acc.size()) {
    throw Error(ErrorCode::kKeyMismatch,
                "baseline has " + std::to_string(base.size()) +
                    " keys, accelerated has " + std::to_string(acc.size()));
  }

  std::vector<SpeedupRow> out;
  for (const auto& [key, b] : base) {
    auto it = acc.find(key);
    if (it == acc.end()) {
      throw Error(ErrorCode::kKeyMismatch,
                  "accelerated rows lack key (B=" + std::to_string(std::get<0>(key)) +
                      ", L_p=" + std::to_string(std::get<1>(key)) +
                      ", L_g=" + std::to_string(std::get<2>(key)) + ")");
    }
    const SweepRow& a = *it->second;
    SpeedupRow s;
    std::tie(s.batch, s.prompt_len, s.gen_len) = key;
    s.tpf = a.accel.tpf;
    s.baseline_tok_s = b->est.tokens_per_second;
    s.accel_tok_s = a.est.tokens_per_second;
    s.speedup = s.accel_tok_s / s.baseline_tok_s;
    s.step_flops_ratio = b->step_flops_median / a.step_flops_median;
    s.amortized_flops_ratio = b->est.cost.decode.flops() / a.est.cost.decode.flops();
    s.oom = b->mem.oom || a.mem.oom;
    out.push_back(s);
  }
  return out;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  f << body;
  f.close();
  if (!f) throw Error(ErrorCode::kIoFailure, "write failed: " + path.string());
}

}  // namespace

void write_speedup_csv(const std::vector<SpeedupRow>& rows, std::ostream& out) {
  out << "batch,prompt_len,gen_len,tpf,baseline_tok_s,accel_tok_s,speedup,"
         "step_flops_ratio,amortized_flops_ratio,oom\n";
  for (const auto& r : rows) {
    out << r.batch << ',' << r.prompt_len << ',' << r.gen_len << ',' << num(r.tpf)
        << ',' << num(r.baseline_tok_s) << ',' << num(r.accel_tok_s) << ','
        << num(r.speedup) << ',' << num(r.step_flops_ratio) << ','
        << num(r.amortized_flops_ratio) << ',' << (r.oom ? "true" : "false")
        << '\n';
  }
}

void write_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "arch,accel,batch,prompt_len,gen_len,steps,tpf,flops_total,mops_total,"
         "arint,regime,attainable_flops_s,flops_per_token,throughput_tok_s,"
         "mem_bytes,oom\n";
  for (const auto& r : rows) {
    out << to_string(r.arch) << ',' << r.accel_label << ',' << r.wl.batch << ','
        << r.wl.prompt_len << ',' << r.wl.gen_len << ',' << r.est.decode_steps
        << ',' << num(r.accel.tpf) << ',' << num(r.est.flops_total) << ','
        << num(r.est.mops_total) << ',' << num(r.est.arint) << ','
        << to_string(r.est.regime) << ',' << num(r.est.attainable) << ','
        << num(r.est.flops_per_token) << ','
        << (r.has_throughput() ? num(r.est.tokens_per_second) : "") << ','
        << num(r.mem.total_bytes) << ',' << (r.mem.oom ? "true" : "false")
        << '\n';
  }
}

void emit_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
  if (rows.empty()) throw Error(ErrorCode::kEmptyRowSet, "no rows to write");
  std::ostringstream ss;
  write_csv(rows, ss);
  write_file(path, ss.str());
}

namespace {

constexpr double kWidth = 760, kHeight = 440;
constexpr double kLeft = 80, kRight = 200, kTop = 48, kBottom = 56;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, tok/s)
  std::vector<double> oom_x;
};

std::string legend_label(const SweepRow& r) {
  std::string s(to_string(r.arch));
  if (r.accel_label != "none") s += "+" + r.accel_label;
  return s;
}

}  // namespace

std::string render_svg(const std::vector<SweepRow>& rows, const PlotSpec& plot) {
  if (rows.empty()) throw Error(ErrorCode::kEmptyRowSet, "no rows to plot");
  const bool by_len = plot.axis == SweepAxis::kGenLen;

  std::vector<Series> series;
  std::set<double> xs;
  for (const auto& r : rows) {
    if (r.wl.prompt_len != plot.prompt_len) continue;
    if (by_len ? r.wl.batch != plot.fixed_batch : r.wl.gen_len != plot.fixed_gen_len) {
      continue;
    }
    const std::string label = legend_label(r);
    auto it = std::find_if(series.begin(), series.end(),
                           [&](const Series& s) { return s.label == label; });
    if (it == series.end()) {
      series.push_back({label, {}, {}});
      it = series.end() - 1;
    }
    const double x = static_cast<double>(by_len ? r.wl.gen_len : r.wl.batch);
    xs.insert(x);
    if (r.has_throughput()) {
      it->points.emplace_back(x, r.est.tokens_per_second);
    } else {
      it->oom_x.push_back(x);
    }
  }
  if (xs.empty()) {
    throw Error(ErrorCode::kEmptyRowSet, "no rows match the plot selection");
  }

  double y_lo = 0, y_hi = 0;
  bool any = false;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      y_lo = any ? std::min(y_lo, y) : y;
      y_hi = any ? std::max(y_hi, y) : y;
      any = true;
    }
  }
  if (!any) y_lo = y_hi = 1.0;
  const double dec_lo = std::floor(std::log10(y_lo));
  double dec_hi = std::ceil(std::log10(y_hi));
  if (dec_hi <= dec_lo) dec_hi = dec_lo + 1;

  double x_lo = std::log10(*xs.begin());
  double x_hi = std::log10(*xs.rbegin());
  if (x_hi <= x_lo) {
    x_lo -= 0.5;
    x_hi += 0.5;
  }
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (std::log10(x) - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double y) {
    return kTop + ph - (std::log10(y) - dec_lo) / (dec_hi - dec_lo) * ph;
  };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
    << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" "
       "font-size=\"14\">Throughput (prompt_len="
    << plot.prompt_len << ", "
    << (by_len ? "batch=" + std::to_string(plot.fixed_batch)
               : "gen_len=" + std::to_string(plot.fixed_gen_len))
    << ")</text>\n";

  // Axes and grid.
  o << "<g stroke=\"#cccccc\" stroke-width=\"1\">\n";
  for (double x : xs) {
    o << "<line x1=\"" << fixed(px(x)) << "\" y1=\"" << fixed(kTop) << "\" x2=\""
      << fixed(px(x)) << "\" y2=\"" << fixed(kTop + ph) << "\"/>\n";
  }
  for (double e = dec_lo; e <= dec_hi; e += 1) {
    const double y = std::pow(10.0, e);
    o << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(py(y)) << "\" x2=\""
      << fixed(kLeft + pw) << "\" y2=\"" << fixed(py(y)) << "\"/>\n";
  }
  o << "</g>\n";
  o << "<rect x=\"" << fixed(kLeft) << "\" y=\"" << fixed(kTop) << "\" width=\""
    << fixed(pw) << "\" height=\"" << fixed(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double x : xs) {
    o << "<text x=\"" << fixed(px(x)) << "\" y=\"" << fixed(kTop + ph + 18)
      << "\" text-anchor=\"middle\">" << num(x) << "</text>\n";
  }
  for (double e = dec_lo; e <= dec_hi; e += 1) {
    o << "<text x=\"" << fixed(kLeft - 6) << "\" y=\"" << fixed(py(std::pow(10.0, e)) + 4)
      << "\" text-anchor=\"end\">1e" << static_cast<int>(e) << "</text>\n";
  }
  o << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"" << fixed(kHeight - 14)
    << "\" text-anchor=\"middle\">" << (by_len ? "gen_len (tokens)" : "batch size")
    << "</text>\n";
  o << "<text transform=\"translate(18," << fixed(kTop + ph / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">tokens/s</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    if (!s.points.empty()) {
      o << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"";
      for (std::size_t k = 0; k < s.points.size(); ++k) {
        if (k) o << ' ';
        o << fixed(px(s.points[k].first)) << ',' << fixed(py(s.points[k].second));
      }
      o << "\"/>\n";
      for (const auto& [x, y] : s.points) {
        o << "<circle cx=\"" << fixed(px(x)) << "\" cy=\"" << fixed(py(y))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
    }
    // OOM points sit on the bottom axis as crosses.
    for (double x : s.oom_x) {
      const double cx = px(x), cy = kTop + ph - 6 - 6.0 * static_cast<double>(i);
      o << "<path d=\"M" << fixed(cx - 4) << ',' << fixed(cy - 4) << " L"
        << fixed(cx + 4) << ',' << fixed(cy + 4) << " M" << fixed(cx - 4) << ','
        << fixed(cy + 4) << " L" << fixed(cx + 4) << ',' << fixed(cy - 4)
        << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    }
    const double ly = kTop + 12 + 20.0 * static_cast<double>(i);
    const double lx = kLeft + pw + 16;
    o << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(ly) << "\" x2=\""
      << fixed(lx + 24) << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << fixed(lx + 30) << "\" y=\"" << fixed(ly + 4) << "\">"
      << s.label << (s.oom_x.empty() ? "" : " (x = OOM)") << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void emit_svg(const std::vector<SweepRow>& rows, const PlotSpec& plot,
              const std::filesystem::path& path) {
  write_file(path, render_svg(rows, plot));
}

std::vector<std::filesystem::path> emit_report(const std::vector<SweepRow>& rows,
                                               const SweepSpec& spec,
                                               const std::filesystem::path& out_dir) {
  if (rows.empty()) throw Error(ErrorCode::kEmptyRowSet, "no rows to write");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + out_dir.string());

  std::vector<std::filesystem::path> written;
  written.push_back(out_dir / "sweep.csv");
  emit_csv(rows, written.back());

  const auto& lens = spec.gen_lens;
  const std::int64_t fixed_len =
      std::find(lens.begin(), lens.end(), 256) != lens.end() ? 256
                                                            : lens[lens.size() / 2];
  for (auto lp : spec.prompt_lens) {
    PlotSpec p{SweepAxis::kGenLen, lp, spec.batches.front(), fixed_len};
    written.push_back(out_dir / ("throughput_gen_len_p" + std::to_string(lp) + ".svg"));
    emit_svg(rows, p, written.back());
    p.axis = SweepAxis::kBatch;
    written.push_back(out_dir / ("throughput_batch_p" + std::to_string(lp) + ".svg"));
    emit_svg(rows, p, written.back());
  }
  return written;
}

namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where, const ParseOptions& opts) {
  std::vector<Issue> issues;
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; })) {
      const std::string msg = where + ": unknown field '" + key + "'";
      if (opts.lenient) {
        if (opts.warnings) opts.warnings->push_back(msg);
      } else {
        issues.push_back({ErrorCode::kUnknownField, msg});
      }
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

template <typename T>
T field(const json& obj, const char* key, T fallback, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError({{ErrorCode::kInvalidField,
                            where + ": field '" + key + "' has the wrong type"}});
  }
}

std::vector<std::int64_t> axis(const json& doc, const char* key,
                               std::vector<std::int64_t> fallback) {
  return field<std::vector<std::int64_t>>(doc, key, std::move(fallback), "sweep");
}

}  // namespace

SweepSpec load_sweep_spec(const std::filesystem::path& path,
                          const ParseOptions& opts) {
  const std::string text = read_text_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError,
                path.string() + ": malformed JSON (" + e.what() + ")");
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::kParseError, path.string() + ": expected an object");
  }
  check_keys(doc,
             {"hardware", "architectures", "gen_lens", "batches", "prompt_lens",
              "extended_lengths", "include_prefill", "intensity_source",
              "activation_factor", "fixed_overhead_bytes"},
             "sweep", opts);
  const auto base = path.parent_path();

  SweepSpec spec;
  const auto hw_path = field<std::string>(doc, "hardware", "", "sweep");
  if (hw_path.empty()) {
    throw ValidationError({{ErrorCode::kInvalidField, "sweep: 'hardware' is required"}});
  }
  spec.hw = load_hardware(base / hw_path, opts);
  spec.gen_lens = axis(doc, "gen_lens", spec.gen_lens);
  spec.batches = axis(doc, "batches", spec.batches);
  spec.prompt_lens = axis(doc, "prompt_lens", spec.prompt_lens);
  if (field<bool>(doc, "extended_lengths", false, "sweep")) spec.extend_lengths();
  spec.throughput.include_prefill = field<bool>(doc, "include_prefill", false, "sweep");
  const auto src = field<std::string>(doc, "intensity_source", "auto", "sweep");
  const auto parsed = parse_intensity_source(src);
  if (!parsed) {
    throw ValidationError(
        {{ErrorCode::kInvalidField, "sweep: unknown intensity_source '" + src + "'"}});
  }
  spec.throughput.source = *parsed;
  spec.memory.activation_factor =
      field<double>(doc, "activation_factor", spec.memory.activation_factor, "sweep");
  spec.memory.fixed_overhead_bytes = field<double>(
      doc, "fixed_overhead_bytes", spec.memory.fixed_overhead_bytes, "sweep");

  const auto arch_it = doc.find("architectures");
  if (arch_it == doc.end() || !arch_it->is_array()) {
    throw ValidationError(
        {{ErrorCode::kInvalidField, "sweep: 'architectures' must be an array"}});
  }
  for (const auto& a : *arch_it) {
    if (!a.is_object()) {
      throw ValidationError(
          {{ErrorCode::kInvalidField, "sweep: architecture entries must be objects"}});
    }
    check_keys(a, {"model", "arch", "variants"}, "sweep.architectures", opts);
    const auto model_path = field<std::string>(a, "model", "", "sweep.architectures");
    const ModelDocument model = load_model(base / model_path, opts);
    std::optional<ArchitectureKind> arch = model.variant;
    if (auto name = field<std::string>(a, "arch", "", "sweep.architectures");
        !name.empty()) {
      arch = parse_architecture(name);
      if (!arch) {
        throw ValidationError({{ErrorCode::kInvalidField,
                                "sweep: unknown architecture '" + name + "'"}});
      }
    }
    if (!arch) {
      throw ValidationError({{ErrorCode::kInvalidField,
                              "sweep: architecture of " + model_path +
                                  " is not given"}});
    }
    SweepEntry entry{validate_model_config(model.config, *arch), {}};
    const json variants = a.value("variants", json::array({json::object()}));
    for (const auto& v : variants) {
      check_keys(v,
                 {"label", "tpf", "dual_cache", "dual_cache_block",
                  "cache_refresh_interval"},
                 "sweep.variants", opts);
      AccelVariant av;
      const std::string where = "sweep.variants";
      av.accel.tpf = field<double>(v, "tpf", 1.0, where);
      av.accel.dual_cache = field<bool>(v, "dual_cache", false, where);
      av.accel.dual_cache_block = field<std::int64_t>(v, "dual_cache_block", 32, where);
      if (v.contains("cache_refresh_interval") && !v["cache_refresh_interval"].is_null()) {
        av.accel.cache_refresh_interval =
            field<std::int64_t>(v, "cache_refresh_interval", 0, where);
      }
      av.label = field<std::string>(v, "label", default_accel_label(av.accel), where);
      entry.variants.push_back(av);
    }
    spec.architectures.push_back(std::move(entry));
  }
  validate_sweep_spec(spec);
  return spec;
}

}  // namespace lmperf
