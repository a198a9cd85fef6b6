#pragma once

// CSV output helpers. Numbers are rendered with up to 12 significant digits,
// '.' decimal separator and no grouping, so repeated runs with the same
// inputs produce byte-identical files.

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "agevac/errors.hpp"

namespace agevac {

inline std::string format_sig(double v, int digits = 12) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) raise(errc::invalid_config, "cannot open output file: " + path);
  }

  void row(std::initializer_list<std::string> cells) {
    bool first = true;
    for (const auto& c : cells) {
      if (!first) out_ << ',';
      out_ << c;
      first = false;
    }
    out_ << '\n';
  }

  void row(const std::vector<std::string>& cells) {
    bool first = true;
    for (const auto& c : cells) {
      if (!first) out_ << ',';
      out_ << c;
      first = false;
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

}  // namespace agevac
