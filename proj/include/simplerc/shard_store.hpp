// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "simplerc/codec.hpp"
#include "simplerc/error.hpp"
#include "simplerc/mds.hpp"
#include "simplerc/repair.hpp"
#include "simplerc/shard_format.hpp"

namespace simplerc::store {

namespace fs = std::filesystem;

inline constexpr const char* kManifestName = "manifest.json";

/// Encodes `file` and writes n shard files plus manifest.json into `dir`.
inline format::Manifest encode_to_directory(ByteView file, const SrcParams& params, const fs::path& dir) {
  params.validate();
  const auto g = make_generator(params.k, params.n);
  const CodedArray array = encode(file, params, g);
  fs::create_directories(dir);

  format::Manifest m;
  m.params = params;
  m.file_size = array.file_size();
  m.stripe_count = array.stripe_count();
  m.file_digest = format::sha256_hex(file);
  for (const Shard& shard : array.shards()) {
    const Buffer image = format::serialize_shard(params, shard, array.stripe_count(), array.file_size());
    const std::string name = format::shard_file_name(shard.node);
    format::write_file(dir / name, image);
    m.shards.push_back(format::ManifestShard{shard.node, name, format::sha256_hex(image)});
  }
  format::save_manifest(dir / kManifestName, m);
  return m;
}

struct LoadedShards {
  std::vector<Shard> shards;
  std::vector<NodeIndex> missing;
  std::vector<std::string> corrupt;  // "node N: reason"
};

/// Loads and verifies the listed nodes' shards. Absent files are reported as
/// missing; files failing digest, checksum or header checks as corrupt.
inline LoadedShards load_shards(const format::Manifest& m, const fs::path& dir,
                                const std::vector<NodeIndex>& nodes) {
  LoadedShards out;
  for (NodeIndex node : nodes) {
    const auto& entry = m.shard(node);
    const fs::path path = dir / entry.file;
    if (!fs::exists(path)) {
      out.missing.push_back(node);
      continue;
    }
    try {
      const Buffer image = format::read_file(path);
      if (format::sha256_hex(image) != entry.digest)
        throw Error(ErrorKind::integrity, "digest does not match the manifest");
      auto parsed = format::parse_shard(image);
      const auto& h = parsed.header;
      if (h.node != node || h.params != m.params || h.stripe_count != m.stripe_count || h.file_size != m.file_size)
        throw Error(ErrorKind::integrity, "header disagrees with the manifest");
      out.shards.push_back(std::move(parsed.shard));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::io) throw;
      out.corrupt.push_back("node " + std::to_string(node) + ": " + e.detail());
    }
  }
  return out;
}

inline std::vector<NodeIndex> all_nodes(const format::Manifest& m) {
  std::vector<NodeIndex> nodes;
  for (const auto& s : m.shards) nodes.push_back(s.node);
  std::sort(nodes.begin(), nodes.end());
  return nodes;
}

struct RepairOutcome {
  RepairPlan plan;
  std::string report;
  bool dry_run = false;
  bool fallback_used = false;
  std::size_t chunk_reads = 0;
  std::set<NodeIndex> nodes_read;
  fs::path written;
};

/// Rebuilds node `failed`'s shard file from the other shards in `dir`.
/// Look-up repair is used when all of its helpers are present; otherwise the
/// shard is recomputed through the outer MDS code from any k shards.
inline RepairOutcome repair_in_directory(const fs::path& manifest_path, const fs::path& dir, NodeIndex failed,
                                         bool dry_run) {
  const format::Manifest m = format::load_manifest(manifest_path);
  StripeLayout(m.params).check_node(failed);
  RepairOutcome out;
  out.plan = node_repair_plan(m.params, failed);
  out.dry_run = dry_run;
  out.report = plan_report(out.plan, m.stripe_count);
  if (dry_run) return out;

  std::vector<NodeIndex> others;
  for (NodeIndex n : all_nodes(m))
    if (n != failed) others.push_back(n);
  LoadedShards loaded = load_shards(m, dir, others);
  if (!loaded.corrupt.empty()) throw Error(ErrorKind::integrity, loaded.corrupt.front());

  std::vector<ShardView> views;
  for (const auto& s : loaded.shards) views.push_back(ShardView{s.node, s.bytes});
  ShardSource source(m.params, views);

  if (views.size() < m.params.k) {
    std::string names;
    for (NodeIndex h : out.plan.disk_access_set)
      if (!source.available(h)) names += (names.empty() ? "" : ", ") + m.shard(h).file;
    throw Error(ErrorKind::insufficient_data, "missing helper shards " + names + "; only " +
                                                  std::to_string(views.size()) + " of " +
                                                  std::to_string(m.params.k) + " needed shards present");
  }

  const auto g = make_generator(m.params.k, m.params.n);
  NodeRebuild rebuilt = rebuild_node(m.params, g, failed, source, m.stripe_count);
  out.fallback_used = rebuilt.fallback_used;
  out.chunk_reads = rebuilt.chunk_reads;
  out.nodes_read = source.nodes_accessed();

  const Buffer image = format::serialize_shard(m.params, rebuilt.shard, m.stripe_count, m.file_size);
  if (format::sha256_hex(image) != m.shard(failed).digest)
    throw Error(ErrorKind::integrity, "rebuilt shard for node " + std::to_string(failed) +
                                          " does not match the manifest digest");
  out.written = dir / m.shard(failed).file;
  format::write_file(out.written, image);
  return out;
}

struct DecodeOutcome {
  std::vector<NodeIndex> nodes_used;
  std::vector<std::string> skipped;  // corrupt shards ignored in automatic mode
  std::uint64_t bytes = 0;
};

/// Rebuilds the original file. With `nodes` given exactly those shards are
/// used; otherwise the first k valid shards present in `dir`.
inline DecodeOutcome decode_from_directory(const fs::path& manifest_path, const fs::path& dir,
                                           const std::optional<std::vector<NodeIndex>>& nodes,
                                           const fs::path& output) {
  const format::Manifest m = format::load_manifest(manifest_path);
  DecodeOutcome out;
  LoadedShards loaded = load_shards(m, dir, nodes ? *nodes : all_nodes(m));
  if (nodes) {
    if (!loaded.corrupt.empty()) throw Error(ErrorKind::integrity, loaded.corrupt.front());
    if (!loaded.missing.empty())
      throw Error(ErrorKind::insufficient_data, "shard " + m.shard(loaded.missing.front()).file + " is missing");
  }
  out.skipped = loaded.corrupt;
  if (loaded.shards.size() < m.params.k)
    throw Error(ErrorKind::insufficient_data, "need " + std::to_string(m.params.k) + " shards, found " +
                                                  std::to_string(loaded.shards.size()));
  loaded.shards.resize(m.params.k);

  std::vector<ShardView> views;
  for (const auto& s : loaded.shards) {
    views.push_back(ShardView{s.node, s.bytes});
    out.nodes_used.push_back(s.node);
  }
  const auto g = make_generator(m.params.k, m.params.n);
  const Buffer file = reconstruct(views, m.params, g, m.file_size);
  if (format::sha256_hex(file) != m.file_digest)
    throw Error(ErrorKind::integrity, "decoded file does not match the manifest digest");
  format::write_file(output, file);
  out.bytes = file.size();
  return out;
}

}  // namespace simplerc::store
