#ifndef VIAB_CSV_HPP
#define VIAB_CSV_HPP

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "viab/common.hpp"

// RFC-4180-style CSV output: '.' decimal separator, 17 significant digits
// (doubles round-trip), "\n" line ends. Each file starts with a comment line
// embedding the scenario hash and seed so reruns are byte-comparable.

namespace viab {

std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::uint64_t scenario_hash, std::uint64_t seed);

  void header(const std::vector<std::string>& names);

  void begin_row();
  void field(const std::string& s);
  void field(double v);
  void field(long v);
  void end_row();

  // convenience: a full row of doubles
  void row(const std::vector<double>& values);

 private:
  std::ofstream out_;
  bool first_in_row_ = true;
};

}  // namespace viab

#endif  // VIAB_CSV_HPP
