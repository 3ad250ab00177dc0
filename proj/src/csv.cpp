#include "viab/csv.hpp"

#include <cstdio>

namespace viab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, std::uint64_t scenario_hash, std::uint64_t seed) {
  out_.open(path, std::ios::binary);
  if (!out_) throw Error("cannot open output file '" + path + "'");
  char buf[80];
  std::snprintf(buf, sizeof buf, "# scenario=%016llx seed=%llu\n",
                static_cast<unsigned long long>(scenario_hash),
                static_cast<unsigned long long>(seed));
  out_ << buf;
}

void CsvWriter::header(const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out_ << ',';
    out_ << names[i];
  }
  out_ << '\n';
}

void CsvWriter::begin_row() { first_in_row_ = true; }

void CsvWriter::field(const std::string& s) {
  if (!first_in_row_) out_ << ',';
  first_in_row_ = false;
  bool needs_quote = s.find_first_of(",\"\n") != std::string::npos;
  if (!needs_quote) {
    out_ << s;
    return;
  }
  out_ << '"';
  for (char c : s) {
    if (c == '"') out_ << '"';
    out_ << c;
  }
  out_ << '"';
}

void CsvWriter::field(double v) { field(format_double(v)); }

void CsvWriter::field(long v) { field(std::to_string(v)); }

void CsvWriter::end_row() {
  out_ << '\n';
  first_in_row_ = true;
}

void CsvWriter::row(const std::vector<double>& values) {
  begin_row();
  for (double v : values) field(v);
  end_row();
}

}  // namespace viab
