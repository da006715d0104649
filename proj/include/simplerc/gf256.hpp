// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>

namespace simplerc::gf256 {

// x^8 + x^4 + x^3 + x^2 + 1
inline constexpr unsigned kPolynomial = 0x11D;

namespace detail {

struct Tables {
  std::array<std::uint8_t, 512> exp{};
  std::array<std::uint8_t, 256> log{};
};

constexpr Tables make_tables() {
  Tables t;
  unsigned x = 1;
  for (unsigned i = 0; i < 255; ++i) {
    t.exp[i] = static_cast<std::uint8_t>(x);
    t.log[x] = static_cast<std::uint8_t>(i);
    x <<= 1;
    if (x & 0x100) x ^= kPolynomial;
  }
  // doubled so exp[log a + log b] never needs a modulo
  for (unsigned i = 255; i < 512; ++i) t.exp[i] = t.exp[i - 255];
  return t;
}

inline constexpr Tables kTables = make_tables();

}  // namespace detail

/// One element of GF(2^8). Addition is XOR; multiplication goes through
/// log/antilog tables.
class Element {
 public:
  constexpr Element() = default;
  constexpr explicit Element(std::uint8_t v) : value_(v) {}

  constexpr std::uint8_t value() const { return value_; }
  constexpr bool is_zero() const { return value_ == 0; }

  friend constexpr Element operator+(Element a, Element b) {
    return Element(static_cast<std::uint8_t>(a.value_ ^ b.value_));
  }
  // characteristic 2: subtraction is addition
  friend constexpr Element operator-(Element a, Element b) { return a + b; }

  friend constexpr Element operator*(Element a, Element b) {
    if (a.value_ == 0 || b.value_ == 0) return Element{};
    const auto& t = detail::kTables;
    return Element(t.exp[t.log[a.value_] + t.log[b.value_]]);
  }

  constexpr Element inverse() const {
    assert(value_ != 0);
    const auto& t = detail::kTables;
    return Element(t.exp[255 - t.log[value_]]);
  }

  friend constexpr Element operator/(Element a, Element b) { return a * b.inverse(); }

  constexpr Element& operator+=(Element o) { return *this = *this + o; }
  constexpr Element& operator*=(Element o) { return *this = *this * o; }

  friend constexpr bool operator==(Element, Element) = default;

 private:
  std::uint8_t value_ = 0;
};

/// dst[i] ^= src[i]
inline void add_region(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src) {
  assert(dst.size() == src.size());
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
}

/// dst[i] += c * src[i]
inline void mul_add_region(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src,
                           Element c) {
  assert(dst.size() == src.size());
  if (c.is_zero()) return;
  if (c == Element(1)) {
    add_region(dst, src);
    return;
  }
  std::array<std::uint8_t, 256> row;
  for (unsigned v = 0; v < 256; ++v)
    row[v] = (Element(static_cast<std::uint8_t>(v)) * c).value();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= row[src[i]];
}

}  // namespace simplerc::gf256
