#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cforge/errors.hpp"
#include "cforge/serialize.hpp"

namespace cforge {

inline constexpr const char* kVersion = "0.1.0";

/// report.json plus named CSV tables (written to tables/<name>.csv).
struct CommandOutput {
  Json report;
  std::vector<std::pair<std::string, CsvTable>> tables;
  int exit_code = 0;
};

const std::vector<std::string>& command_names();

/// FNV-1a 64-bit hash as 16 lowercase hex digits.
std::string fnv1a64_hex(const std::string& bytes);

/// 0 success, 2 structured domain error, 3 budget exceeded, 1 anything else.
int exit_code_for(ErrorKind kind);

/// Parses the config text and runs one command. Errors become a structured report.
CommandOutput run_command(const std::string& command, const std::string& config_text, unsigned threads = 1);

void write_outputs(const CommandOutput& out, const std::string& out_dir);

}  // namespace cforge
