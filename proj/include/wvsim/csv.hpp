#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "wvsim/errors.hpp"

namespace wvsim {

// Deterministic CSV emission: fixed %.17g formatting, a config-hash comment
// line for provenance, no timestamps.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& config_hash,
            const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_) throw ConfigError("cannot open output file " + path);
    out_ << "# config_hash=" << config_hash << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
      out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
  }

  void row(const std::vector<double>& values) {
    char buf[32];
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
      out_ << buf << (i + 1 < values.size() ? "," : "\n");
    }
  }

 private:
  std::ofstream out_;
};

}  // namespace wvsim
