// SPDX-License-Identifier: Apache-2.0
#include "captk/report.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace captk {

std::uint64_t content_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

nlohmann::json make_report(const std::string& input_hash, std::uint64_t seed,
                           const nlohmann::json& grid, const nlohmann::json& config) {
  nlohmann::json j;
  j["tool_version"] = kToolVersion;
  j["input_hash"] = input_hash;
  j["seed"] = seed;
  j["grid"] = grid;
  j["config"] = config;
  j["results"] = nlohmann::json::array();
  j["flags"] = nlohmann::json::array();
  return j;
}

std::string to_csv(const std::vector<CsvRow>& rows) {
  std::string out = "parameter,value,tolerance,pass\n";
  for (const auto& r : rows) {
    out += r.parameter;
    out += ',';
    out += format_double(r.value);
    out += ',';
    out += format_double(r.tolerance);
    out += ',';
    out += r.pass ? "1" : "0";
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << contents;
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace captk
