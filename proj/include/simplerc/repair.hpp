// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "simplerc/codec.hpp"
#include "simplerc/error.hpp"
#include "simplerc/gf256.hpp"
#include "simplerc/layout.hpp"
#include "simplerc/mds.hpp"

namespace simplerc {

struct ChunkRead {
  NodeIndex helper = 0;
  ChunkId chunk;
};

/// Restores one chunk as the XOR of `reads`. In characteristic 2 the
/// "parity minus the other parts" and "sum of the parts" rules coincide.
struct ChunkRepair {
  ChunkId target;
  NodeIndex target_node = 0;
  std::vector<ChunkRead> reads;
};

struct RepairPlan {
  SrcParams params;
  std::optional<NodeIndex> failed_node;  // set for whole-node plans
  std::vector<ChunkRepair> steps;
  std::set<NodeIndex> disk_access_set;

  std::size_t chunk_reads() const {
    std::size_t total = 0;
    for (const auto& s : steps) total += s.reads.size();
    return total;
  }

  std::size_t disk_accesses() const { return disk_access_set.size(); }

  /// Bytes that cross the network over `stripe_count` stripes.
  std::uint64_t bytes_moved(std::size_t stripe_count) const {
    return static_cast<std::uint64_t>(chunk_reads()) * stripe_count * params.chunk_size;
  }
};

/// Reads the f chunks sharing the target's subscript: the other coded parts
/// plus the parity for a coded target, or all f coded parts for a parity
/// target.
inline ChunkRepair plan_chunk(const StripeLayout& lay, const ChunkId& target) {
  const SrcParams& p = lay.params();
  ChunkRepair step;
  step.target = target;
  step.target_node = lay.chunk_location(target);
  for (std::size_t part = 1; part <= p.f + 1; ++part) {
    if (part == target.part) continue;
    ChunkId id{part, target.subscript};
    step.reads.push_back(ChunkRead{lay.chunk_location(id), id});
  }
  return step;
}

inline RepairPlan chunk_repair_plan(const SrcParams& params, const ChunkId& target) {
  const StripeLayout lay(params);
  RepairPlan plan;
  plan.params = params;
  plan.steps.push_back(plan_chunk(lay, target));
  for (const auto& r : plan.steps.front().reads) plan.disk_access_set.insert(r.helper);
  return plan;
}

/// Union of the f+1 chunk plans for everything `failed` stores.
inline RepairPlan node_repair_plan(const SrcParams& params, NodeIndex failed) {
  const StripeLayout lay(params);
  lay.check_node(failed);
  RepairPlan plan;
  plan.params = params;
  plan.failed_node = failed;
  for (const ChunkId& id : lay.chunks_of(failed)) {
    plan.steps.push_back(plan_chunk(lay, id));
    for (const auto& r : plan.steps.back().reads) plan.disk_access_set.insert(r.helper);
  }
  return plan;
}

/// Where repair and degraded reads fetch chunks from. Implementations must
/// return stable bytes for the duration of a repair.
class ChunkSource {
 public:
  virtual ~ChunkSource() = default;
  virtual bool available(NodeIndex node) const = 0;
  /// The chunk's bytes for `stripe`, or nullopt when its node is unavailable.
  virtual std::optional<ByteView> read(NodeIndex node, std::size_t stripe, const ChunkId& id) = 0;
};

/// Chunk source backed by in-memory shard payloads; nodes without a shard
/// are unavailable.
class ShardSource : public ChunkSource {
 public:
  ShardSource(const SrcParams& params, std::vector<ShardView> shards)
      : layout_(params), shards_(std::move(shards)) {}

  /// All shards of `array` except the nodes in `unavailable`.
  static ShardSource from_array(const CodedArray& array, const std::set<NodeIndex>& unavailable = {}) {
    std::vector<ShardView> views;
    for (const auto& s : array.shards())
      if (!unavailable.contains(s.node)) views.push_back(ShardView{s.node, s.bytes});
    return ShardSource(array.params(), std::move(views));
  }

  bool available(NodeIndex node) const override { return find(node) != nullptr; }

  std::optional<ByteView> read(NodeIndex node, std::size_t stripe, const ChunkId& id) override {
    const ShardView* s = find(node);
    if (s == nullptr || layout_.chunk_location(id) != node) return std::nullopt;
    const SrcParams& p = layout_.params();
    const std::size_t off = chunk_offset(p, stripe, layout_.slot_of(id));
    if (off + p.chunk_size > s->bytes.size()) return std::nullopt;
    ++reads_;
    accessed_.insert(node);
    return s->bytes.subspan(off, p.chunk_size);
  }

  std::vector<NodeIndex> live_nodes() const {
    std::vector<NodeIndex> out;
    for (const auto& s : shards_) out.push_back(s.node);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Chunk reads served and distinct nodes touched so far.
  std::size_t reads_served() const { return reads_; }
  const std::set<NodeIndex>& nodes_accessed() const { return accessed_; }
  void reset_counters() {
    reads_ = 0;
    accessed_.clear();
  }

 private:
  const ShardView* find(NodeIndex node) const {
    for (const auto& s : shards_)
      if (s.node == node) return &s;
    return nullptr;
  }

  StripeLayout layout_;
  std::vector<ShardView> shards_;
  std::size_t reads_ = 0;
  std::set<NodeIndex> accessed_;
};

struct RestoredChunk {
  ChunkId id;
  NodeIndex node = 0;
  Buffer bytes;  // stripe_count * chunk_size, stripe-major
};

/// Runs every step of `plan` on each stripe in file order.
inline std::vector<RestoredChunk> execute_repair(const RepairPlan& plan, ChunkSource& source,
                                                 std::size_t stripe_count) {
  const SrcParams& p = plan.params;
  const std::size_t cs = p.chunk_size;
  std::vector<RestoredChunk> out;
  for (const auto& step : plan.steps)
    out.push_back(RestoredChunk{step.target, step.target_node, Buffer(stripe_count * cs, 0)});

  for (std::size_t stripe = 0; stripe < stripe_count; ++stripe) {
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
      const auto& step = plan.steps[i];
      MutableByteView dst = MutableByteView(out[i].bytes).subspan(stripe * cs, cs);
      for (const auto& r : step.reads) {
        auto bytes = source.read(r.helper, stripe, r.chunk);
        if (!bytes)
          throw Error(ErrorKind::repair_failure,
                      "helper chunk " + chunk_label(p, r.chunk) + " on node " +
                          std::to_string(r.helper) + " is unavailable");
        if (bytes->size() != cs) throw Error(ErrorKind::shape, "helper chunk has the wrong length");
        gf256::add_region(dst, *bytes);
      }
    }
  }
  return out;
}

/// Lays restored chunks back out as the failed node's shard payload.
inline Shard assemble_shard(const SrcParams& params, NodeIndex node,
                            const std::vector<RestoredChunk>& restored, std::size_t stripe_count) {
  const StripeLayout lay(params);
  const std::size_t cs = params.chunk_size;
  Shard shard{node, Buffer(shard_bytes_for(params, stripe_count), 0)};
  for (const auto& id : lay.chunks_of(node)) {
    auto it = std::find_if(restored.begin(), restored.end(),
                           [&](const RestoredChunk& r) { return r.id == id; });
    if (it == restored.end())
      throw Error(ErrorKind::repair_failure, "chunk " + chunk_label(params, id) + " was not restored");
    for (std::size_t s = 0; s < stripe_count; ++s)
      std::copy_n(it->bytes.begin() + static_cast<std::ptrdiff_t>(s * cs), cs,
                  shard.bytes.begin() + static_cast<std::ptrdiff_t>(chunk_offset(params, s, lay.slot_of(id))));
  }
  return shard;
}

namespace detail {

/// Recomputes chunk `target` of one stripe through the outer MDS code using
/// the first k live nodes other than `exclude`.
inline Buffer mds_recompute_chunk(const StripeLayout& lay, const GeneratorMatrix& g,
                                  const ChunkId& target, std::size_t stripe, ChunkSource& source,
                                  const std::set<NodeIndex>& exclude) {
  const SrcParams& p = lay.params();
  std::vector<NodeIndex> live;
  for (NodeIndex node = 1; node <= p.n && live.size() < p.k; ++node)
    if (!exclude.contains(node) && source.available(node)) live.push_back(node);
  if (live.size() < p.k)
    throw Error(ErrorKind::insufficient_data,
                "only " + std::to_string(live.size()) + " live nodes, need " + std::to_string(p.k));

  const std::size_t cs = p.chunk_size;
  const std::size_t first = is_parity(p, target) ? 1 : target.part;
  const std::size_t last = is_parity(p, target) ? p.f : target.part;
  Buffer result(cs, 0);
  std::vector<Share> shares(p.k);
  std::vector<Buffer> data(p.k, Buffer(cs));
  std::vector<MutableByteView> dst(data.begin(), data.end());
  for (std::size_t part = first; part <= last; ++part) {
    for (std::size_t j = 0; j < p.k; ++j) {
      const ChunkId id = lay.chunks_of(live[j])[part - 1];
      auto bytes = source.read(live[j], stripe, id);
      if (!bytes) throw Error(ErrorKind::insufficient_data, "live node stopped serving chunks");
      shares[j] = Share{id.subscript - 1, *bytes};
    }
    mds_decode_into(shares, g, dst);
    for (std::size_t j = 0; j < p.k; ++j)
      gf256::mul_add_region(result, data[j], g.at(j, target.subscript - 1));
  }
  return result;
}

}  // namespace detail

struct DegradedRead {
  Buffer bytes;
  std::size_t helper_reads = 0;  // chunks fetched from other nodes
  bool direct = false;           // served by the target's own node
  bool fallback = false;         // look-up repair blocked; used the outer MDS code
};

/// Serves one chunk of one stripe while its node may be down. Nothing is
/// persisted.
inline DegradedRead degraded_read(const SrcParams& params, const GeneratorMatrix& g,
                                  const ChunkId& target, std::size_t stripe, ChunkSource& source) {
  const StripeLayout lay(params);
  const NodeIndex home = lay.chunk_location(target);
  DegradedRead result;
  if (source.available(home)) {
    if (auto bytes = source.read(home, stripe, target)) {
      result.bytes.assign(bytes->begin(), bytes->end());
      result.direct = true;
      return result;
    }
  }

  const ChunkRepair step = plan_chunk(lay, target);
  const bool helpers_live = std::all_of(step.reads.begin(), step.reads.end(),
                                        [&](const ChunkRead& r) { return source.available(r.helper); });
  if (helpers_live) {
    result.bytes.assign(params.chunk_size, 0);
    for (const auto& r : step.reads) {
      auto bytes = source.read(r.helper, stripe, r.chunk);
      if (!bytes)
        throw Error(ErrorKind::repair_failure, "helper chunk " + chunk_label(params, r.chunk) + " vanished");
      gf256::add_region(result.bytes, *bytes);
      ++result.helper_reads;
    }
    return result;
  }

  result.fallback = true;
  const std::size_t parts = is_parity(params, target) ? params.f : 1;
  result.bytes = detail::mds_recompute_chunk(lay, g, target, stripe, source, {home});
  result.helper_reads = parts * params.k;
  return result;
}

struct NodeRebuild {
  Shard shard;
  bool fallback_used = false;
  std::size_t chunk_reads = 0;
};

/// Rebuilds a whole node. Uses look-up repair when every helper is live and
/// falls back to MDS recomputation from k live nodes otherwise.
inline NodeRebuild rebuild_node(const SrcParams& params, const GeneratorMatrix& g, NodeIndex failed,
                                ChunkSource& source, std::size_t stripe_count) {
  const RepairPlan plan = node_repair_plan(params, failed);
  const bool lookup_ok = std::all_of(plan.disk_access_set.begin(), plan.disk_access_set.end(),
                                     [&](NodeIndex n) { return source.available(n); });
  NodeRebuild out;
  if (lookup_ok) {
    out.shard = assemble_shard(params, failed, execute_repair(plan, source, stripe_count), stripe_count);
    out.chunk_reads = plan.chunk_reads() * stripe_count;
    return out;
  }

  out.fallback_used = true;
  const StripeLayout lay(params);
  out.shard = Shard{failed, Buffer(shard_bytes_for(params, stripe_count), 0)};
  for (std::size_t s = 0; s < stripe_count; ++s) {
    for (const ChunkId& id : lay.chunks_of(failed)) {
      Buffer bytes = detail::mds_recompute_chunk(lay, g, id, s, source, {failed});
      out.chunk_reads += (is_parity(params, id) ? params.f : 1) * params.k;
      std::copy(bytes.begin(), bytes.end(),
                out.shard.bytes.begin() + static_cast<std::ptrdiff_t>(chunk_offset(params, s, lay.slot_of(id))));
    }
  }
  return out;
}

/// Human-readable plan, one "key: value" per line.
inline std::string plan_report(const RepairPlan& plan, std::size_t stripe_count) {
  const SrcParams& p = plan.params;
  std::ostringstream os;
  os << "code: (" << p.n << "," << p.k << "," << p.f << ")\n";
  if (plan.failed_node) os << "target: node " << *plan.failed_node << "\n";
  else os << "target: chunk " << chunk_label(p, plan.steps.front().target) << "\n";
  for (const auto& step : plan.steps) {
    os << "restore: " << chunk_label(p, step.target) << " on node " << step.target_node << " <-";
    for (std::size_t i = 0; i < step.reads.size(); ++i)
      os << (i ? " +" : "") << " " << chunk_label(p, step.reads[i].chunk) << "@node" << step.reads[i].helper;
    os << "\n";
  }
  os << "disks:";
  for (NodeIndex n : plan.disk_access_set) os << " " << n;
  os << "\n";
  os << "disk_accesses: " << plan.disk_accesses() << "\n";
  os << "chunk_reads_per_stripe: " << plan.chunk_reads() << "\n";
  os << "stripes: " << stripe_count << "\n";
  os << "chunks_moved: " << plan.chunk_reads() * stripe_count << "\n";
  // f chunks make up one M/k unit of a stripe
  os << "bandwidth_M_over_k: " << plan.chunk_reads() * stripe_count / p.f << "\n";
  os << "bytes_moved: " << plan.bytes_moved(stripe_count) << "\n";
  return os.str();
}

}  // namespace simplerc
