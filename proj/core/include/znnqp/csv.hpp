#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace znnqp {

/// Full-precision scientific text for a double ("%.17e"; nan/inf spelled out).
std::string format_real(double v);

/// Minimal CSV emitter; cells are written verbatim (no quoting needed for our output).
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& values);

 private:
  std::ostream& out_;
  std::size_t width_;
};

}  // namespace znnqp
