#include "lmperf/config_io.h"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace lmperf {

namespace {

using nlohmann::json;

std::pair<std::size_t, std::size_t> line_column(std::string_view text,
                                                std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_object(std::string_view text, std::string_view what) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte just past the offending token.
    auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorCode::kParseError,
                std::string(what) + ": malformed JSON at line " +
                    std::to_string(line) + ", column " + std::to_string(col));
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::kParseError,
                std::string(what) + ": top-level value must be an object");
  }
  return doc;
}

class FieldReader {
 public:
  FieldReader(const json& doc, std::string_view what, const ParseOptions& opts)
      : doc_(doc), what_(what), opts_(opts) {}

  template <typename T>
  std::optional<T> get(const char* name) {
    seen_.insert(name);
    auto it = doc_.find(name);
    if (it == doc_.end() || it->is_null()) return std::nullopt;
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) return bad_type<T>(name, "a boolean");
      return it->template get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (it->is_number_integer()) return it->template get<T>();
      if (it->is_number_float()) {
        double v = it->template get<double>();
        if (v == static_cast<double>(static_cast<T>(v))) return static_cast<T>(v);
      }
      return bad_type<T>(name, "an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) return bad_type<T>(name, "a number");
      return it->template get<T>();
    } else {
      if (!it->is_string()) return bad_type<T>(name, "a string");
      return it->template get<T>();
    }
  }

  template <typename T>
  T require(const char* name) {
    auto v = get<T>(name);
    if (!v) {
      // A mistyped value has already been reported by get().
      auto it = doc_.find(name);
      if (it == doc_.end() || it->is_null()) {
        issues_.push_back({ErrorCode::kInvalidField,
                           std::string(what_) + ": missing field '" + name + "'"});
      }
      return T{};
    }
    return *v;
  }

  void add_issue(Issue issue) { issues_.push_back(std::move(issue)); }

  void finish() {
    for (auto it = doc_.begin(); it != doc_.end(); ++it) {
      if (seen_.count(it.key())) continue;
      std::string msg =
          std::string(what_) + ": unknown field '" + it.key() + "'";
      if (opts_.lenient) {
        if (opts_.warnings) opts_.warnings->push_back(msg);
      } else {
        issues_.push_back({ErrorCode::kUnknownField, msg});
      }
    }
    if (!issues_.empty()) throw ValidationError(std::move(issues_));
  }

 private:
  template <typename T>
  std::optional<T> bad_type(const char* name, const char* expected) {
    issues_.push_back({ErrorCode::kInvalidField,
                       std::string(what_) + ": field '" + name +
                           "' must be " + expected});
    return std::nullopt;
  }

  const json& doc_;
  std::string_view what_;
  const ParseOptions& opts_;
  std::set<std::string> seen_;
  std::vector<Issue> issues_;
};

}  // namespace

ModelDocument parse_model(std::string_view text, const ParseOptions& opts) {
  json doc = parse_object(text, "model");
  FieldReader r(doc, "model", opts);
  ModelDocument out;
  out.config.n_l = r.require<std::int64_t>("n_l");
  out.config.n_h = r.require<std::int64_t>("n_h");
  out.config.n_d = r.require<std::int64_t>("n_d");
  out.config.d = r.require<std::int64_t>("d");
  out.config.alpha = r.require<double>("alpha");
  out.config.params = r.get<double>("N");
  out.config.block_size = r.get<std::int64_t>("G");
  if (auto variant = r.get<std::string>("variant")) {
    out.variant = parse_architecture(*variant);
    if (!out.variant) {
      r.add_issue({ErrorCode::kInvalidField,
                   "model: variant must be AR, DLM or BlockDiffusion"});
    }
  }
  r.finish();
  return out;
}

HardwareSpec parse_hardware(std::string_view text, const ParseOptions& opts) {
  json doc = parse_object(text, "hardware");
  FieldReader r(doc, "hardware", opts);
  HardwareSpec hw;
  hw.p_max = r.require<double>("p_max");
  hw.b_mem = r.require<double>("b_mem");
  hw.capacity = r.require<double>("capacity");
  hw.bytes_per_element = r.get<int>("bytes_per_element").value_or(2);
  r.finish();
  validate_hardware(hw);
  return hw;
}

WorkloadDocument parse_workload(std::string_view text, const ParseOptions& opts) {
  json doc = parse_object(text, "workload");
  FieldReader r(doc, "workload", opts);
  WorkloadDocument out;
  out.workload.batch = r.require<std::int64_t>("batch");
  out.workload.prompt_len = r.require<std::int64_t>("prompt_len");
  out.workload.gen_len = r.require<std::int64_t>("gen_len");
  if (auto total = r.get<std::int64_t>("total_len");
      total && *total != out.workload.total_len()) {
    r.add_issue({ErrorCode::kInvalidField,
                 "workload: total_len must equal prompt_len + gen_len"});
  }
  auto& accel = out.acceleration;
  accel.tpf = r.get<double>("tpf").value_or(1.0);
  accel.dual_cache = r.get<bool>("dual_cache").value_or(false);
  accel.dual_cache_block =
      r.get<std::int64_t>("dual_cache_block").value_or(accel.dual_cache_block);
  accel.cache_refresh_interval = r.get<std::int64_t>("cache_refresh_interval");
  r.finish();
  validate_workload(out.workload);
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoFailure, "cannot read " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ModelDocument load_model(const std::filesystem::path& path,
                         const ParseOptions& opts) {
  return parse_model(read_text_file(path), opts);
}

HardwareSpec load_hardware(const std::filesystem::path& path,
                           const ParseOptions& opts) {
  return parse_hardware(read_text_file(path), opts);
}

WorkloadDocument load_workload(const std::filesystem::path& path,
                               const ParseOptions& opts) {
  return parse_workload(read_text_file(path), opts);
}

}  // namespace lmperf
