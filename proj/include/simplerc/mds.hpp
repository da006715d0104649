// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "simplerc/error.hpp"
#include "simplerc/gf256.hpp"

namespace simplerc {

using Buffer = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using MutableByteView = std::span<std::uint8_t>;

/// Identifies the generator family in manifests so decoders can rebuild it
/// from (k, n) alone.
inline constexpr std::string_view kGeneratorConstructionId = "systematic-cauchy-gf256-11d-v1";

inline constexpr std::size_t kMaxCodeLength = 255;

/// k x n generator of a scalar (n,k) MDS code over GF(2^8). Codewords are row
/// vectors: codeword = data * G, so column j produces output chunk j.
class GeneratorMatrix {
 public:
  GeneratorMatrix(std::size_t k, std::size_t n, std::vector<gf256::Element> entries,
                  bool systematic)
      : k_(k), n_(n), entries_(std::move(entries)), systematic_(systematic) {
    if (entries_.size() != k_ * n_)
      throw Error(ErrorKind::shape, "generator entry count does not match k x n");
  }

  std::size_t rows() const { return k_; }
  std::size_t cols() const { return n_; }
  bool systematic() const { return systematic_; }

  gf256::Element at(std::size_t row, std::size_t col) const { return entries_[row * n_ + col]; }

  friend bool operator==(const GeneratorMatrix&, const GeneratorMatrix&) = default;

 private:
  std::size_t k_;
  std::size_t n_;
  std::vector<gf256::Element> entries_;
  bool systematic_;
};

/// Systematic generator [I_k | C] where C is the Cauchy matrix
/// c_ij = 1 / (i + (k + j)). Every square submatrix of a Cauchy matrix is
/// nonsingular, so any k columns of [I | C] are independent.
inline GeneratorMatrix make_generator(std::size_t k, std::size_t n) {
  if (k < 1 || n < 1) throw Error(ErrorKind::parameter, "k and n must be positive");
  if (k > n) throw Error(ErrorKind::parameter, "k must not exceed n");
  if (n > kMaxCodeLength) throw Error(ErrorKind::parameter, "n must be at most 255 over GF(2^8)");

  std::vector<gf256::Element> entries(k * n);
  for (std::size_t i = 0; i < k; ++i) {
    entries[i * n + i] = gf256::Element(1);
    for (std::size_t j = 0; j < n - k; ++j) {
      gf256::Element x(static_cast<std::uint8_t>(i));
      gf256::Element y(static_cast<std::uint8_t>(k + j));
      entries[i * n + k + j] = (x + y).inverse();
    }
  }
  return GeneratorMatrix(k, n, std::move(entries), true);
}

namespace detail {

/// Gauss-Jordan inversion of a square row-major matrix. Returns false when
/// the matrix is singular.
inline bool invert(std::vector<gf256::Element>& m, std::size_t dim) {
  std::vector<gf256::Element> inv(dim * dim);
  for (std::size_t i = 0; i < dim; ++i) inv[i * dim + i] = gf256::Element(1);

  for (std::size_t col = 0; col < dim; ++col) {
    std::size_t pivot = col;
    while (pivot < dim && m[pivot * dim + col].is_zero()) ++pivot;
    if (pivot == dim) return false;
    if (pivot != col) {
      for (std::size_t c = 0; c < dim; ++c) {
        std::swap(m[pivot * dim + c], m[col * dim + c]);
        std::swap(inv[pivot * dim + c], inv[col * dim + c]);
      }
    }
    const gf256::Element scale = m[col * dim + col].inverse();
    for (std::size_t c = 0; c < dim; ++c) {
      m[col * dim + c] *= scale;
      inv[col * dim + c] *= scale;
    }
    for (std::size_t r = 0; r < dim; ++r) {
      if (r == col) continue;
      const gf256::Element factor = m[r * dim + col];
      if (factor.is_zero()) continue;
      for (std::size_t c = 0; c < dim; ++c) {
        m[r * dim + c] += factor * m[col * dim + c];
        inv[r * dim + c] += factor * inv[col * dim + c];
      }
    }
  }
  m = std::move(inv);
  return true;
}

inline std::size_t common_length(std::span<const ByteView> buffers) {
  if (buffers.empty()) return 0;
  const std::size_t len = buffers.front().size();
  for (const auto& b : buffers)
    if (b.size() != len) throw Error(ErrorKind::shape, "buffers have different lengths");
  return len;
}

}  // namespace detail

/// Writes the n coded chunks of `data` into `out`. All views must share one
/// length; `out` must hold g.cols() views.
inline void mds_encode_into(std::span<const ByteView> data, const GeneratorMatrix& g,
                            std::span<const MutableByteView> out) {
  if (data.size() != g.rows()) throw Error(ErrorKind::shape, "expected k data buffers");
  if (out.size() != g.cols()) throw Error(ErrorKind::shape, "expected n output buffers");
  const std::size_t len = detail::common_length(data);
  for (const auto& o : out)
    if (o.size() != len) throw Error(ErrorKind::shape, "output buffer length mismatch");

  for (std::size_t col = 0; col < g.cols(); ++col) {
    std::fill(out[col].begin(), out[col].end(), std::uint8_t{0});
    for (std::size_t row = 0; row < g.rows(); ++row)
      gf256::mul_add_region(out[col], data[row], g.at(row, col));
  }
}

inline std::vector<Buffer> mds_encode(std::span<const ByteView> data, const GeneratorMatrix& g) {
  if (data.size() != g.rows()) throw Error(ErrorKind::shape, "expected k data buffers");
  const std::size_t len = detail::common_length(data);
  std::vector<Buffer> out(g.cols(), Buffer(len));
  std::vector<MutableByteView> views(out.begin(), out.end());
  mds_encode_into(data, g, views);
  return out;
}

inline std::vector<Buffer> mds_encode(const std::vector<Buffer>& data, const GeneratorMatrix& g) {
  std::vector<ByteView> views(data.begin(), data.end());
  return mds_encode(std::span<const ByteView>(views), g);
}

/// One received codeword chunk: its 0-based generator column and bytes.
struct Share {
  std::size_t column;
  ByteView bytes;
};

/// Recovers the k data buffers from k shares with distinct columns.
inline void mds_decode_into(std::span<const Share> shares, const GeneratorMatrix& g,
                            std::span<const MutableByteView> out) {
  const std::size_t k = g.rows();
  if (shares.size() != k) throw Error(ErrorKind::insufficient_data, "exactly k shares are required");
  if (out.size() != k) throw Error(ErrorKind::shape, "expected k output buffers");
  const std::size_t len = shares.front().bytes.size();
  for (std::size_t i = 0; i < k; ++i) {
    if (shares[i].column >= g.cols()) throw Error(ErrorKind::parameter, "share column out of range");
    if (shares[i].bytes.size() != len || out[i].size() != len)
      throw Error(ErrorKind::shape, "share lengths differ");
    for (std::size_t j = 0; j < i; ++j)
      if (shares[i].column == shares[j].column)
        throw Error(ErrorKind::parameter, "duplicate share column");
  }

  // Fast path: all shares are systematic columns, a permutation of the data.
  if (g.systematic() &&
      std::all_of(shares.begin(), shares.end(), [k](const Share& s) { return s.column < k; })) {
    for (const auto& s : shares) std::copy(s.bytes.begin(), s.bytes.end(), out[s.column].begin());
    return;
  }

  // shares = data * G_S, so data = shares * G_S^{-1}
  std::vector<gf256::Element> sub(k * k);
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < k; ++c) sub[r * k + c] = g.at(r, shares[c].column);
  if (!detail::invert(sub, k))
    throw Error(ErrorKind::internal, "singular generator submatrix (MDS property violated)");

  for (std::size_t d = 0; d < k; ++d) {
    std::fill(out[d].begin(), out[d].end(), std::uint8_t{0});
    for (std::size_t s = 0; s < k; ++s) gf256::mul_add_region(out[d], shares[s].bytes, sub[s * k + d]);
  }
}

inline std::vector<Buffer> mds_decode(std::span<const Share> shares, const GeneratorMatrix& g) {
  if (shares.size() != g.rows())
    throw Error(ErrorKind::insufficient_data, "exactly k shares are required");
  std::vector<Buffer> out(g.rows(), Buffer(shares.front().bytes.size()));
  std::vector<MutableByteView> views(out.begin(), out.end());
  mds_decode_into(shares, g, views);
  return out;
}

}  // namespace simplerc
