#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <vector>

namespace mbspec {

/// Shortest round-trip decimal form of a double (std::to_chars), so emitted
/// files are byte-identical across runs and parse back to the same bits.
inline std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string fmt(long v) { return std::to_string(v); }
inline std::string fmt(int v) { return std::to_string(v); }
inline std::string fmt(std::size_t v) { return std::to_string(v); }

/// RFC-4180-style quoting: quote fields containing comma, quote, or newline;
/// double any embedded quotes.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

class CsvWriter {
public:
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) buf_ += ',';
      buf_ += csv_field(fields[i]);
    }
    buf_ += '\n';
  }
  const std::string& str() const { return buf_; }

private:
  std::string buf_;
};

}  // namespace mbspec
