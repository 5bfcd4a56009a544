#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "seqpred/errors.hpp"

namespace seqpred {

// Finite binary string. The empty string is a valid value.
class BitString {
 public:
  BitString() = default;

  explicit BitString(std::string_view s) {
    bits_.reserve(s.size());
    for (char c : s) {
      if (c != '0' && c != '1') {
        throw ConfigError("bit string may contain only '0' and '1': \"" + std::string(s) + "\"");
      }
      bits_.push_back(static_cast<std::uint8_t>(c - '0'));
    }
  }

  static BitString repeated(int bit, std::size_t n) {
    BitString out;
    out.bits_.assign(n, static_cast<std::uint8_t>(bit != 0));
    return out;
  }

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  int operator[](std::size_t i) const { return bits_[i]; }

  void push_back(int bit) { bits_.push_back(static_cast<std::uint8_t>(bit != 0)); }
  void pop_back() { bits_.pop_back(); }

  std::string str() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
    return s;
  }

  auto begin() const { return bits_.begin(); }
  auto end() const { return bits_.end(); }

  bool operator==(const BitString&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

}  // namespace seqpred
