#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include "seqpred/errors.hpp"

namespace seqpred {

inline constexpr std::string_view kVersion = "0.1.0";

// 17 significant digits round-trips IEEE doubles exactly, so emitted CSV is
// byte-identical across runs.
inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Minimal CSV emitter: '.' decimal separator, LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot open output file: " + path.string());
  }

  template <class... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((write_field(fields, first), first = false), ...);
    out_.put('\n');
  }

  void flush() { out_.flush(); }

 private:
  void write_sep(bool first) {
    if (!first) out_.put(',');
  }
  void write_field(double x, bool first) {
    write_sep(first);
    out_ << format_double(x);
  }
  void write_field(int x, bool first) {
    write_sep(first);
    out_ << x;
  }
  void write_field(std::uint64_t x, bool first) {
    write_sep(first);
    out_ << x;
  }
  void write_field(bool x, bool first) {
    write_sep(first);
    out_ << (x ? 1 : 0);
  }
  void write_field(const char* s, bool first) {
    write_sep(first);
    out_ << s;
  }
  void write_field(const std::string& s, bool first) {
    write_sep(first);
    out_ << s;
  }

  std::ofstream out_;
};

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::string fnv1a64_hex(std::string_view data) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(data)));
  return buf;
}

}  // namespace seqpred
