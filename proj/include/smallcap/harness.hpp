#pragma once

// Command-line front end: number formatting, CSV tables, sweep config files,
// run manifests with SHA-256 output digests, and the subcommand drivers.
//
// Exit codes: 0 success, 1 a check failed (geometry violation or sweep FAIL),
// 2 invalid input, 3 budget exceeded, 4 unexpected internal error.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "smallcap/sharpness.hpp"

namespace smallcap::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitInternal = 4;

/// 12 significant digits; scientific notation when |v| >= 1e9 or 0 < |v| < 1e-9.
std::string format_number(double v);

/// v rounded to the digits format_number prints.
double rounded(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Comma separated, header first, LF line endings.
  std::string str() const;
};

/// Lowercase hex SHA-256 of a byte string or a file's contents.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Parsed `[section]` / `key = value` text. Keys outside any section go to "".
struct ConfigDoc {
  std::map<std::string, std::map<std::string, std::string>> sections;

  static ConfigDoc parse(std::string_view text);
  static ConfigDoc load(const std::filesystem::path& path);

  bool has(const std::string& section, const std::string& key) const;
  const std::string& get(const std::string& section, const std::string& key) const;
};

/// "1, 2, 3" or "1..20" (inclusive); mixed forms allowed.
std::vector<std::int64_t> parse_int_list(std::string_view text);
std::vector<double> parse_real_list(std::string_view text);
double parse_real(std::string_view text);
std::int64_t parse_int(std::string_view text);

/// Sweep description read from a config file.
struct SweepPlan {
  std::string name;
  std::string kind;  // mainexp | maincor | synthetic
  SweepConfig mainexp;
  MaincorConfig maincor;
  // synthetic: value = scale * N^exponent
  std::vector<double> synthetic_x;
  double synthetic_exponent = 1.0;
  double synthetic_scale = 1.0;
  double synthetic_tolerance = 0.3;

  /// Throws ValidationError on unknown sections, keys or kinds.
  static SweepPlan from_doc(const ConfigDoc& doc, const std::string& default_name);
};

/// Runs the CLI; returns the process exit code. Never throws.
int run_cli(int argc, char** argv);

}  // namespace smallcap::harness
