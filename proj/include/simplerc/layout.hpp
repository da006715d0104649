// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "simplerc/error.hpp"
#include "simplerc/mds.hpp"

namespace simplerc {

/// 1-based storage node index.
using NodeIndex = std::size_t;

/// Code triple (n, k, f) plus the chunk size in bytes.
struct SrcParams {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t f = 0;
  std::size_t chunk_size = 1;

  std::size_t chunks_per_node() const { return f + 1; }
  std::size_t data_chunks_per_stripe() const { return f * k; }
  std::size_t stripe_bytes() const { return f * k * chunk_size; }

  /// Throws a parameter error naming the first violated constraint.
  void validate() const {
    if (k < 1) throw Error(ErrorKind::parameter, "k must be at least 1");
    if (k >= n) throw Error(ErrorKind::parameter, "k must be smaller than n");
    if (n > kMaxCodeLength) throw Error(ErrorKind::parameter, "n must be at most 255");
    if (f < 1) throw Error(ErrorKind::parameter, "f must be at least 1");
    if (f + 1 > n) throw Error(ErrorKind::parameter, "f + 1 must not exceed n");
    if (chunk_size < 1) throw Error(ErrorKind::parameter, "chunk_size must be at least 1");
  }

  friend bool operator==(const SrcParams&, const SrcParams&) = default;
};

/// Coordinate of one stored chunk. Parts 1..f are the MDS-coded vectors,
/// part f+1 is the parity vector. Subscripts run over 1..n.
struct ChunkId {
  std::size_t part = 1;
  std::size_t subscript = 1;

  friend auto operator<=>(const ChunkId&, const ChunkId&) = default;
};

/// Addition on the ring {1, ..., n}: ring_add(n, 1, n) == 1.
inline std::size_t ring_add(std::size_t i, std::ptrdiff_t delta, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  auto r = (static_cast<std::ptrdiff_t>(i) - 1 + delta) % m;
  if (r < 0) r += m;
  return static_cast<std::size_t>(r) + 1;
}

/// Subtraction on the ring {1, ..., n}: ring_sub(1, 1, n) == n.
inline std::size_t ring_sub(std::size_t i, std::ptrdiff_t delta, std::size_t n) {
  return ring_add(i, -delta, n);
}

inline bool is_parity(const SrcParams& p, const ChunkId& id) { return id.part == p.f + 1; }

/// "x_1", "y_2", "s_3" for f = 2; "x(l)_m" and "s_m" otherwise.
inline std::string chunk_label(const SrcParams& p, const ChunkId& id) {
  if (is_parity(p, id)) return "s_" + std::to_string(id.subscript);
  if (p.f == 2) return std::string(id.part == 1 ? "x" : "y") + "_" + std::to_string(id.subscript);
  return "x(" + std::to_string(id.part) + ")_" + std::to_string(id.subscript);
}

/// Circular placement: node i stores x(l)_{i+(l-1)} for l = 1..f followed by
/// s_{i+f}, all indices on the ring. Slot j of a node holds part j+1.
class StripeLayout {
 public:
  explicit StripeLayout(const SrcParams& params) : params_(params) {
    params_.validate();
    const std::size_t n = params_.n;
    const std::size_t parts = params_.chunks_per_node();
    node_chunks_.resize(n);
    location_.assign(parts * n, 0);
    for (NodeIndex node = 1; node <= n; ++node) {
      auto& chunks = node_chunks_[node - 1];
      chunks.reserve(parts);
      for (std::size_t part = 1; part <= parts; ++part) {
        ChunkId id{part, ring_add(node, static_cast<std::ptrdiff_t>(part - 1), n)};
        chunks.push_back(id);
        location_[(id.part - 1) * n + (id.subscript - 1)] = node;
      }
    }
  }

  const SrcParams& params() const { return params_; }

  /// The f+1 chunks of `node`, in slot order.
  const std::vector<ChunkId>& chunks_of(NodeIndex node) const {
    check_node(node);
    return node_chunks_[node - 1];
  }

  NodeIndex chunk_location(const ChunkId& id) const {
    if (id.part < 1 || id.part > params_.f + 1 || id.subscript < 1 || id.subscript > params_.n)
      throw Error(ErrorKind::parameter, "chunk id out of range");
    return location_[(id.part - 1) * params_.n + (id.subscript - 1)];
  }

  /// Position of a chunk inside its node's shard (0-based).
  std::size_t slot_of(const ChunkId& id) const { return id.part - 1; }

  void check_node(NodeIndex node) const {
    if (node < 1 || node > params_.n) throw Error(ErrorKind::parameter, "node index out of range");
  }

 private:
  SrcParams params_;
  std::vector<std::vector<ChunkId>> node_chunks_;
  std::vector<NodeIndex> location_;
};

inline StripeLayout layout(const SrcParams& params) { return StripeLayout(params); }

}  // namespace simplerc
