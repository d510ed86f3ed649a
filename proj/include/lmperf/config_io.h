#pragma once

// JSON ingestion for model, hardware and workload documents. Field names are
// exactly those of the corresponding types; unknown fields are rejected unless
// parsing is lenient, in which case they are reported as warnings.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lmperf/core_model.h"

namespace lmperf {

struct ParseOptions {
  bool lenient = false;
  std::vector<std::string>* warnings = nullptr;
};

struct ModelDocument {
  ModelConfig config;
  std::optional<ArchitectureKind> variant;
};

struct WorkloadDocument {
  Workload workload;
  AccelerationConfig acceleration;
};

ModelDocument parse_model(std::string_view json_text, const ParseOptions& opts = {});
HardwareSpec parse_hardware(std::string_view json_text, const ParseOptions& opts = {});
WorkloadDocument parse_workload(std::string_view json_text,
                                const ParseOptions& opts = {});

ModelDocument load_model(const std::filesystem::path& path,
                         const ParseOptions& opts = {});
HardwareSpec load_hardware(const std::filesystem::path& path,
                           const ParseOptions& opts = {});
WorkloadDocument load_workload(const std::filesystem::path& path,
                               const ParseOptions& opts = {});

// Throws Error(kIoFailure) when the file cannot be read.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace lmperf
