// SPDX-License-Identifier: Apache-2.0

#pragma once

// Shard file layout, all integers little-endian:
//
//   offset  size  field
//        0     8  magic "SRCSHARD"
//        8     2  format version (1)
//       10     2  node index, 1-based
//       12     2  n
//       14     2  k
//       16     2  f
//       18     2  reserved, zero
//       20     4  chunk size in bytes
//       24     8  stripe count
//       32     8  original file size in bytes
//       40  4*C   CRC-32 of each chunk, C = stripe_count * (f+1), payload order
//   40+4C     4   CRC-32 of header bytes [0, 40+4C)
//   44+4C     -   payload: stripe 0 slots 0..f, stripe 1 slots 0..f, ...

#include <openssl/evp.h>
#include <zlib.h>

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "simplerc/codec.hpp"
#include "simplerc/error.hpp"
#include "simplerc/layout.hpp"
#include "simplerc/mds.hpp"

namespace simplerc::format {

inline constexpr std::array<char, 8> kShardMagic{'S', 'R', 'C', 'S', 'H', 'A', 'R', 'D'};
inline constexpr std::uint16_t kShardVersion = 1;
inline constexpr std::size_t kFixedHeaderBytes = 40;
inline constexpr int kManifestVersion = 1;
inline constexpr std::string_view kDigestAlgorithm = "sha256";

inline std::uint32_t crc32_of(ByteView bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  std::size_t off = 0;
  while (off < bytes.size()) {
    const auto len = static_cast<uInt>(std::min<std::size_t>(bytes.size() - off, 1u << 30));
    crc = ::crc32(crc, bytes.data() + off, len);
    off += len;
  }
  return static_cast<std::uint32_t>(crc);
}

/// Lower-case hex SHA-256.
inline std::string sha256_hex(ByteView bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1)
    throw Error(ErrorKind::internal, "SHA-256 computation failed");
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(md[i]);
  return os.str();
}

namespace detail {

inline void put_le(Buffer& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint64_t get_le(ByteView in, std::size_t off, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in[off + i]) << (8 * i);
  return v;
}

}  // namespace detail

struct ShardHeader {
  NodeIndex node = 0;
  SrcParams params;
  std::uint64_t stripe_count = 0;
  std::uint64_t file_size = 0;
  std::vector<std::uint32_t> chunk_crcs;

  std::size_t size() const { return kFixedHeaderBytes + 4 * chunk_crcs.size() + 4; }
};

/// Full shard file image: header followed by the payload.
inline Buffer serialize_shard(const SrcParams& params, const Shard& shard, std::uint64_t stripe_count,
                              std::uint64_t file_size) {
  if (shard.bytes.size() != shard_bytes_for(params, stripe_count))
    throw Error(ErrorKind::shape, "shard payload length does not match the stripe count");
  if (params.chunk_size > UINT32_MAX) throw Error(ErrorKind::parameter, "chunk size exceeds 4 GiB");
  Buffer out;
  const std::size_t chunks = stripe_count * params.chunks_per_node();
  out.reserve(kFixedHeaderBytes + 4 * chunks + 4 + shard.bytes.size());
  for (char c : kShardMagic) out.push_back(static_cast<std::uint8_t>(c));
  detail::put_le(out, kShardVersion, 2);
  detail::put_le(out, shard.node, 2);
  detail::put_le(out, params.n, 2);
  detail::put_le(out, params.k, 2);
  detail::put_le(out, params.f, 2);
  detail::put_le(out, 0, 2);
  detail::put_le(out, params.chunk_size, 4);
  detail::put_le(out, stripe_count, 8);
  detail::put_le(out, file_size, 8);
  for (std::size_t c = 0; c < chunks; ++c)
    detail::put_le(out, crc32_of(ByteView(shard.bytes).subspan(c * params.chunk_size, params.chunk_size)), 4);
  detail::put_le(out, crc32_of(out), 4);
  out.insert(out.end(), shard.bytes.begin(), shard.bytes.end());
  return out;
}

struct ParsedShard {
  ShardHeader header;
  Shard shard;
};

/// Parses and verifies a shard file image; any checksum failure is an
/// integrity error.
inline ParsedShard parse_shard(ByteView image) {
  if (image.size() < kFixedHeaderBytes + 4) throw Error(ErrorKind::shape, "shard file truncated");
  if (std::memcmp(image.data(), kShardMagic.data(), kShardMagic.size()) != 0)
    throw Error(ErrorKind::integrity, "bad shard magic");
  const auto version = detail::get_le(image, 8, 2);
  if (version != kShardVersion)
    throw Error(ErrorKind::integrity, "unsupported shard format version " + std::to_string(version));

  ParsedShard out;
  ShardHeader& h = out.header;
  h.node = detail::get_le(image, 10, 2);
  h.params.n = detail::get_le(image, 12, 2);
  h.params.k = detail::get_le(image, 14, 2);
  h.params.f = detail::get_le(image, 16, 2);
  h.params.chunk_size = detail::get_le(image, 20, 4);
  h.stripe_count = detail::get_le(image, 24, 8);
  h.file_size = detail::get_le(image, 32, 8);
  h.params.validate();

  const std::uint64_t chunks = h.stripe_count * h.params.chunks_per_node();
  const std::uint64_t header_bytes = kFixedHeaderBytes + 4 * chunks + 4;
  if (image.size() < header_bytes) throw Error(ErrorKind::shape, "shard header truncated");
  if (crc32_of(image.subspan(0, header_bytes - 4)) != detail::get_le(image, header_bytes - 4, 4))
    throw Error(ErrorKind::integrity, "shard header checksum mismatch");
  if (image.size() - header_bytes != shard_bytes_for(h.params, h.stripe_count))
    throw Error(ErrorKind::shape, "shard payload has the wrong length");

  h.chunk_crcs.resize(chunks);
  for (std::size_t c = 0; c < chunks; ++c) h.chunk_crcs[c] = static_cast<std::uint32_t>(detail::get_le(image, kFixedHeaderBytes + 4 * c, 4));
  ByteView payload = image.subspan(header_bytes);
  for (std::size_t c = 0; c < chunks; ++c) {
    if (crc32_of(payload.subspan(c * h.params.chunk_size, h.params.chunk_size)) != h.chunk_crcs[c])
      throw Error(ErrorKind::integrity, "chunk " + std::to_string(c) + " of node " + std::to_string(h.node) +
                                            " fails its checksum");
  }
  out.shard = Shard{h.node, Buffer(payload.begin(), payload.end())};
  return out;
}

inline Buffer read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  in.seekg(0, std::ios::beg);
  Buffer out(static_cast<std::size_t>(size));
  if (size > 0 && !in.read(reinterpret_cast<char*>(out.data()), size))
    throw Error(ErrorKind::io, "cannot read " + path.string());
  return out;
}

inline void write_file(const std::filesystem::path& path, ByteView bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
}

struct ManifestShard {
  NodeIndex node = 0;
  std::string file;
  std::string digest;
};

/// Index of one encoded file. Stored as JSON.
struct Manifest {
  int version = kManifestVersion;
  SrcParams params;
  std::string generator{kGeneratorConstructionId};
  std::string digest_algorithm{kDigestAlgorithm};
  std::uint64_t file_size = 0;
  std::uint64_t stripe_count = 0;
  std::string file_digest;
  std::vector<ManifestShard> shards;

  const ManifestShard& shard(NodeIndex node) const {
    for (const auto& s : shards)
      if (s.node == node) return s;
    throw Error(ErrorKind::parameter, "node " + std::to_string(node) + " is not in the manifest");
  }

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

inline std::string shard_file_name(NodeIndex node) {
  std::ostringstream os;
  os << "node_" << std::setw(3) << std::setfill('0') << node << ".shard";
  return os.str();
}

inline nlohmann::json to_json(const Manifest& m) {
  nlohmann::json j;
  j["format"] = "src-manifest";
  j["version"] = m.version;
  j["params"] = {{"n", m.params.n}, {"k", m.params.k}, {"f", m.params.f}, {"chunk_size", m.params.chunk_size}};
  j["generator"] = m.generator;
  j["digest_algorithm"] = m.digest_algorithm;
  j["file_size"] = m.file_size;
  j["stripe_count"] = m.stripe_count;
  j["file_digest"] = m.file_digest;
  j["shards"] = nlohmann::json::array();
  for (const auto& s : m.shards) j["shards"].push_back({{"node", s.node}, {"file", s.file}, {"digest", s.digest}});
  return j;
}

inline Manifest manifest_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "src-manifest") throw Error(ErrorKind::integrity, "not a manifest");
    Manifest m;
    m.version = j.at("version").get<int>();
    if (m.version != kManifestVersion)
      throw Error(ErrorKind::integrity, "unsupported manifest version " + std::to_string(m.version));
    const auto& p = j.at("params");
    m.params = SrcParams{p.at("n").get<std::size_t>(), p.at("k").get<std::size_t>(), p.at("f").get<std::size_t>(),
                         p.at("chunk_size").get<std::size_t>()};
    m.params.validate();
    m.generator = j.at("generator").get<std::string>();
    if (m.generator != kGeneratorConstructionId)
      throw Error(ErrorKind::integrity, "unknown generator construction " + m.generator);
    m.digest_algorithm = j.at("digest_algorithm").get<std::string>();
    if (m.digest_algorithm != kDigestAlgorithm)
      throw Error(ErrorKind::integrity, "unsupported digest algorithm " + m.digest_algorithm);
    m.file_size = j.at("file_size").get<std::uint64_t>();
    m.stripe_count = j.at("stripe_count").get<std::uint64_t>();
    m.file_digest = j.at("file_digest").get<std::string>();
    for (const auto& s : j.at("shards"))
      m.shards.push_back(ManifestShard{s.at("node").get<NodeIndex>(), s.at("file").get<std::string>(),
                                       s.at("digest").get<std::string>()});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::integrity, std::string("malformed manifest: ") + e.what());
  }
}

inline void save_manifest(const std::filesystem::path& path, const Manifest& m) {
  const std::string text = to_json(m).dump(2) + "\n";
  write_file(path, ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

inline Manifest load_manifest(const std::filesystem::path& path) {
  const Buffer raw = read_file(path);
  const auto j = nlohmann::json::parse(raw.begin(), raw.end(), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::integrity, "manifest is not valid JSON: " + path.string());
  return manifest_from_json(j);
}

}  // namespace simplerc::format
