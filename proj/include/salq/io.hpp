#pragma once

// Deterministic serialization helpers for the CLI: 17-significant-digit
// number formatting, CSV assembly with a commented metadata block, and the
// schema version tags shared with the golden files.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "salq/errors.hpp"

namespace salq {

inline constexpr const char* kScanSchema = "salq.scan-pump.v1";
inline constexpr const char* kTableSchema = "salq.table.v1";
inline constexpr const char* kProfileSchema = "salq.profile.v1";
inline constexpr const char* kValidateSchema = "salq.validate.v1";

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CsvDocument {
  std::vector<std::pair<std::string, std::string>> metadata;  // "# key: value"
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void meta(std::string key, std::string value) {
    metadata.emplace_back(std::move(key), std::move(value));
  }

  std::string str() const {
    std::string out;
    for (const auto& [k, v] : metadata) out += "# " + k + ": " + v + "\n";
    for (std::size_t i = 0; i < header.size(); ++i)
      out += (i ? "," : "") + header[i];
    out += "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
      out += "\n";
    }
    return out;
  }
};

inline void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw error("cannot open output file: " + path);
  f << text;
}

}  // namespace salq
