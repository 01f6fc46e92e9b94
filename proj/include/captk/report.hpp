// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace captk {

inline constexpr const char* kToolVersion = "captk 0.1.0";

// 64-bit FNV-1a over bytes; the content hash recorded in reports.
std::uint64_t content_hash(const std::string& bytes);
std::string hash_hex(std::uint64_t h);

// Shortest round-trip decimal for a double (CSV cells; JSON inherits the
// library's shortest-form serializer).
std::string format_double(double v);

// Report skeleton: {"tool_version", "input_hash", "seed", "grid", "results",
// "flags"} plus the fully resolved config. Keys are emitted sorted so equal
// runs produce identical bytes.
nlohmann::json make_report(const std::string& input_hash, std::uint64_t seed,
                           const nlohmann::json& grid, const nlohmann::json& config);

// One row per curve point with the shared column set.
struct CsvRow {
  std::string parameter;
  double value = 0;
  double tolerance = 0;
  bool pass = true;
};
std::string to_csv(const std::vector<CsvRow>& rows);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace captk
