#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rlex {

/// Shortest round-trip decimal form of a double, for reproducible CSV
/// output.
inline std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

/// Minimal CSV emitter: a header row followed by data rows.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(const std::vector<std::string>& names) { write_row(names); }

  void row(const std::vector<std::string>& fields) { write_row(fields); }

  static std::string field(double v) { return format_double(v); }
  static std::string field(std::int64_t v) { return std::to_string(v); }
  static std::string field(int v) { return std::to_string(v); }
  static std::string field(std::uint64_t v) { return std::to_string(v); }
  static std::string field(const std::string& v) { return v; }

 private:
  void write_row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
  }

  std::ostream& out_;
};

inline std::ofstream open_output_file(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

}  // namespace rlex
