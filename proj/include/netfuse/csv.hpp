#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "netfuse/linalg.hpp"

namespace netfuse {

/// Minimal CSV emitter with locale-independent, reproducible formatting.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw ConfigError("cannot open output file: " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
      out_ << (i ? "," : "") << header[i];
    out_ << "\n";
  }

  CsvWriter& field(const std::string& s) {
    sep();
    out_ << s;
    return *this;
  }
  CsvWriter& field(long long v) {
    sep();
    out_ << v;
    return *this;
  }
  CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
  CsvWriter& field(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    sep();
    out_ << buf;
    return *this;
  }
  CsvWriter& field(const Vec& v) {
    for (int i = 0; i < v.size(); ++i) field(v(i));
    return *this;
  }
  void endrow() {
    out_ << "\n";
    first_ = true;
  }

 private:
  void sep() {
    if (!first_) out_ << ",";
    first_ = false;
  }
  std::ofstream out_;
  bool first_ = true;
};

}  // namespace netfuse
