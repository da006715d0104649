// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "simplerc/mds.hpp"

namespace testing_support {

inline simplerc::Buffer random_bytes(std::size_t size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  simplerc::Buffer out(size);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng());
  return out;
}

// Calls fn(subset) for every size-r subset of {first, ..., first+n-1}.
template <typename Fn>
void for_each_subset(std::size_t n, std::size_t r, std::size_t first, Fn&& fn) {
  std::vector<std::size_t> idx(r);
  for (std::size_t i = 0; i < r; ++i) idx[i] = i;
  while (true) {
    std::vector<std::size_t> subset(r);
    for (std::size_t i = 0; i < r; ++i) subset[i] = idx[i] + first;
    fn(subset);
    std::size_t i = r;
    while (i > 0 && idx[i - 1] == n - r + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// Shift-and-add multiplication modulo x^8+x^4+x^3+x^2+1, no tables.
inline std::uint8_t slow_mul(std::uint8_t a, std::uint8_t b) {
  unsigned acc = 0, x = a;
  for (unsigned y = b; y != 0; y >>= 1) {
    if (y & 1u) acc ^= x;
    x <<= 1;
    if (x & 0x100u) x ^= 0x11Du;
  }
  return static_cast<std::uint8_t>(acc);
}

inline std::uint8_t slow_inv(std::uint8_t a) {
  for (unsigned b = 1; b < 256; ++b)
    if (slow_mul(a, static_cast<std::uint8_t>(b)) == 1) return static_cast<std::uint8_t>(b);
  return 0;
}

// All valid (n,k,f) with n <= max_n.
struct Code {
  std::size_t n, k, f;
};

inline std::vector<Code> small_codes(std::size_t max_n, std::size_t max_f = 8) {
  std::vector<Code> out;
  for (std::size_t n = 2; n <= max_n; ++n)
    for (std::size_t k = 1; k < n; ++k)
      for (std::size_t f = 1; f + 1 <= n && f <= max_f; ++f) out.push_back({n, k, f});
  return out;
}

// Exact rational arithmetic for the oracle: quantities are written as
// fractions of the file size M and converted to M/k units at the end.
struct Frac {
  long long num, den;
  Frac(long long n, long long d = 1) : num(n), den(d) {
    const long long g = std::gcd(num, den);
    num /= g;
    den /= g;
  }
  friend Frac operator*(Frac a, Frac b) { return Frac(a.num * b.num, a.den * b.den); }
  friend Frac operator/(Frac a, Frac b) { return Frac(a.num * b.den, a.den * b.num); }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct OracleRow {
  Frac alpha_M, gamma_M;
  long long d;
  Frac rate;
};

inline std::vector<OracleRow> metric_oracle(long long n, long long k, long long f) {
  std::vector<OracleRow> rows;
  rows.push_back({Frac(1, k), Frac(1), k, Frac(k, n)});
  rows.push_back({Frac(1, k), Frac(n - 1, k * (n - k)), n - 1, Frac(k, n)});
  rows.push_back({Frac(2, k + 1), Frac(2, k + 1), k, Frac(k + 1, 2 * n)});
  const Frac mbr(2 * (n - 1), k * (2 * n - k - 1));
  rows.push_back({mbr, mbr, n - 1, Frac(k * (2 * n - k - 1), 2 * n * (n - 1))});
  rows.push_back({Frac(f + 1, f * k), Frac(f + 1, k), std::min(2 * f, n - 1), Frac(f * k, (f + 1) * n)});
  return rows;
}

}  // namespace testing_support
