// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "simplerc/error.hpp"
#include "simplerc/gf256.hpp"
#include "simplerc/layout.hpp"
#include "simplerc/mds.hpp"

namespace simplerc {

/// Everything one node stores: its f+1 chunks for stripe 0, then stripe 1,
/// and so on. This is exactly the payload of a shard file.
struct Shard {
  NodeIndex node = 0;
  Buffer bytes;
};

/// Read-only view of a shard, used as decoder input.
struct ShardView {
  NodeIndex node = 0;
  ByteView bytes;
};

inline std::size_t stripe_count_for(const SrcParams& p, std::uint64_t file_size) {
  const std::uint64_t stripe = p.stripe_bytes();
  return static_cast<std::size_t>((file_size + stripe - 1) / stripe);
}

inline std::size_t shard_bytes_for(const SrcParams& p, std::size_t stripe_count) {
  return stripe_count * p.chunks_per_node() * p.chunk_size;
}

/// Offset of a chunk inside a shard payload.
inline std::size_t chunk_offset(const SrcParams& p, std::size_t stripe, std::size_t slot) {
  return (stripe * p.chunks_per_node() + slot) * p.chunk_size;
}

/// The n shards produced by encoding one file.
class CodedArray {
 public:
  CodedArray(SrcParams params, std::size_t stripe_count, std::uint64_t file_size)
      : params_(params), layout_(params), stripe_count_(stripe_count), file_size_(file_size) {
    shards_.resize(params_.n);
    for (NodeIndex node = 1; node <= params_.n; ++node) {
      shards_[node - 1].node = node;
      shards_[node - 1].bytes.assign(shard_bytes_for(params_, stripe_count_), 0);
    }
  }

  const SrcParams& params() const { return params_; }
  const StripeLayout& layout() const { return layout_; }
  std::size_t stripe_count() const { return stripe_count_; }
  std::uint64_t file_size() const { return file_size_; }

  const Shard& shard(NodeIndex node) const {
    layout_.check_node(node);
    return shards_[node - 1];
  }
  Shard& shard(NodeIndex node) {
    layout_.check_node(node);
    return shards_[node - 1];
  }
  const std::vector<Shard>& shards() const { return shards_; }

  ByteView chunk(std::size_t stripe, const ChunkId& id) const {
    const auto& s = shards_[layout_.chunk_location(id) - 1];
    return ByteView(s.bytes).subspan(chunk_offset(params_, stripe, layout_.slot_of(id)),
                                     params_.chunk_size);
  }
  MutableByteView chunk(std::size_t stripe, const ChunkId& id) {
    auto& s = shards_[layout_.chunk_location(id) - 1];
    return MutableByteView(s.bytes).subspan(chunk_offset(params_, stripe, layout_.slot_of(id)),
                                            params_.chunk_size);
  }

  std::uint64_t stored_bytes() const { return params_.n * shard_bytes_for(params_, stripe_count_); }

 private:
  SrcParams params_;
  StripeLayout layout_;
  std::size_t stripe_count_;
  std::uint64_t file_size_;
  std::vector<Shard> shards_;
};

/// Encodes one stripe (f*k data chunks, concatenated) into `array`.
inline void encode_stripe(ByteView stripe_data, const GeneratorMatrix& g, std::size_t stripe,
                          CodedArray& array) {
  const SrcParams& p = array.params();
  const std::size_t cs = p.chunk_size;
  std::vector<ByteView> data(p.k);
  std::vector<MutableByteView> coded(p.n);
  for (std::size_t part = 1; part <= p.f; ++part) {
    for (std::size_t j = 0; j < p.k; ++j)
      data[j] = stripe_data.subspan(((part - 1) * p.k + j) * cs, cs);
    for (std::size_t m = 1; m <= p.n; ++m) coded[m - 1] = array.chunk(stripe, ChunkId{part, m});
    mds_encode_into(data, g, coded);
  }
  for (std::size_t m = 1; m <= p.n; ++m) {
    auto parity = array.chunk(stripe, ChunkId{p.f + 1, m});
    std::fill(parity.begin(), parity.end(), std::uint8_t{0});
    for (std::size_t part = 1; part <= p.f; ++part)
      gf256::add_region(parity, array.chunk(stripe, ChunkId{part, m}));
  }
}

/// Splits `file` into stripes of f*k chunks (zero-padding the last one),
/// MDS-encodes each of the f parts, adds the parity vector and places every
/// chunk per the circular layout.
inline CodedArray encode(ByteView file, const SrcParams& params, const GeneratorMatrix& g) {
  params.validate();
  if (g.rows() != params.k || g.cols() != params.n)
    throw Error(ErrorKind::parameter, "generator shape does not match (n, k)");
  const std::size_t stripes = stripe_count_for(params, file.size());
  CodedArray array(params, stripes, file.size());
  const std::size_t sb = params.stripe_bytes();
  Buffer padded;
  for (std::size_t s = 0; s < stripes; ++s) {
    const std::size_t begin = s * sb;
    ByteView stripe_data;
    if (begin + sb <= file.size()) {
      stripe_data = file.subspan(begin, sb);
    } else {
      padded.assign(sb, 0);
      std::copy(file.begin() + static_cast<std::ptrdiff_t>(begin), file.end(), padded.begin());
      stripe_data = padded;
    }
    encode_stripe(stripe_data, g, s, array);
  }
  return array;
}

inline CodedArray encode(ByteView file, const SrcParams& params) {
  params.validate();
  return encode(file, params, make_generator(params.k, params.n));
}

namespace detail {

/// Picks the first k distinct shards and validates their lengths.
inline std::vector<ShardView> select_decoders(const SrcParams& p, std::span<const ShardView> shards,
                                              std::size_t stripe_count) {
  std::vector<ShardView> chosen;
  for (const auto& s : shards) {
    if (s.node < 1 || s.node > p.n) throw Error(ErrorKind::parameter, "shard node index out of range");
    for (const auto& c : chosen)
      if (c.node == s.node) throw Error(ErrorKind::parameter, "duplicate shard node index");
    if (s.bytes.size() != shard_bytes_for(p, stripe_count))
      throw Error(ErrorKind::shape, "shard " + std::to_string(s.node) + " has the wrong length");
    if (chosen.size() < p.k) chosen.push_back(s);
  }
  if (chosen.size() < p.k)
    throw Error(ErrorKind::insufficient_data, "need " + std::to_string(p.k) + " shards, got " +
                                                  std::to_string(chosen.size()));
  return chosen;
}

}  // namespace detail

/// Recovers the f*k data chunks of one stripe from k distinct shards (already
/// validated). Parity chunks are not read.
inline void decode_stripe_into(const StripeLayout& lay, const GeneratorMatrix& g,
                               std::span<const ShardView> decoders, std::size_t stripe,
                               MutableByteView out) {
  const SrcParams& p = lay.params();
  const std::size_t cs = p.chunk_size;
  std::vector<Share> shares(p.k);
  std::vector<MutableByteView> dst(p.k);
  for (std::size_t part = 1; part <= p.f; ++part) {
    for (std::size_t j = 0; j < p.k; ++j) {
      const NodeIndex node = decoders[j].node;
      const ChunkId id = lay.chunks_of(node)[part - 1];
      shares[j] = Share{id.subscript - 1,
                        decoders[j].bytes.subspan(chunk_offset(p, stripe, part - 1), cs)};
      dst[j] = out.subspan(((part - 1) * p.k + j) * cs, cs);
    }
    mds_decode_into(shares, g, dst);
  }
}

/// Rebuilds the original file from any k distinct shards.
inline Buffer reconstruct(std::span<const ShardView> shards, const SrcParams& params,
                          const GeneratorMatrix& g, std::uint64_t file_size) {
  params.validate();
  const std::size_t stripes = stripe_count_for(params, file_size);
  const auto decoders = detail::select_decoders(params, shards, stripes);
  const StripeLayout lay(params);
  const std::size_t sb = params.stripe_bytes();
  Buffer out(stripes * sb);
  for (std::size_t s = 0; s < stripes; ++s)
    decode_stripe_into(lay, g, decoders, s, MutableByteView(out).subspan(s * sb, sb));
  out.resize(static_cast<std::size_t>(file_size));
  return out;
}

/// Convenience: reconstruct from the listed nodes of an in-memory array.
inline Buffer reconstruct(const CodedArray& array, std::span<const NodeIndex> nodes,
                          const GeneratorMatrix& g) {
  std::vector<ShardView> views;
  for (NodeIndex node : nodes) views.push_back(ShardView{node, array.shard(node).bytes});
  return reconstruct(views, array.params(), g, array.file_size());
}

}  // namespace simplerc
