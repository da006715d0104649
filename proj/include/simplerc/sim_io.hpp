// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <json.hpp>

#include "simplerc/error.hpp"
#include "simplerc/scheme.hpp"
#include "simplerc/sim.hpp"

namespace simplerc::sim {

inline Scheme scheme_from_name(const std::string& name, std::size_t n, std::size_t k, std::size_t f) {
  if (name == "replication" || name == "repl") return Scheme::replication(n == 0 ? 3 : n);
  if (name == "rs") return Scheme::reed_solomon(n, k);
  if (name == "src") return Scheme::src(n, k, f);
  throw Error(ErrorKind::parameter, "unknown scheme '" + name + "' (expected replication, rs or src)");
}

inline std::string scheme_name(const Scheme& s) {
  switch (s.kind) {
    case Scheme::Kind::replication: return "replication";
    case Scheme::Kind::reed_solomon: return "rs";
    case Scheme::Kind::src: return "src";
  }
  return "?";
}

/// Reads a config object; absent keys keep their defaults.
///
///   {"scheme": "src", "n": 10, "k": 6, "f": 2, "machines": 100,
///    "data_per_machine": 4294967296, "chunk_size": 67108864,
///    "network_bps": 1e9, "disk_read_Bps": 2e8, "disk_write_Bps": 2e8,
///    "repair_parallelism": 2, "max_concurrent_jobs": 10, "seed": 1}
inline ClusterConfig config_from_json(const nlohmann::json& j, ClusterConfig c = {}) {
  try {
    std::string name = j.value("scheme", scheme_name(c.scheme));
    const std::size_t n = j.value("n", c.scheme.n);
    const std::size_t k = j.value("k", c.scheme.k);
    const std::size_t f = j.value("f", c.scheme.f);
    c.scheme = scheme_from_name(name, n, k, f);
    c.machine_count = j.value("machines", c.machine_count);
    c.data_per_machine = j.value("data_per_machine", c.data_per_machine);
    c.chunk_size = j.value("chunk_size", c.chunk_size);
    c.network_bps = j.value("network_bps", c.network_bps);
    c.disk_read_Bps = j.value("disk_read_Bps", c.disk_read_Bps);
    c.disk_write_Bps = j.value("disk_write_Bps", c.disk_write_Bps);
    c.repair_parallelism = j.value("repair_parallelism", c.repair_parallelism);
    c.max_concurrent_jobs = j.value("max_concurrent_jobs", c.max_concurrent_jobs);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parameter, std::string("bad simulator config: ") + e.what());
  }
  return c;
}

inline nlohmann::json to_json(const ClusterConfig& c) {
  return {{"scheme", scheme_name(c.scheme)},
          {"n", c.scheme.n},
          {"k", c.scheme.k},
          {"f", c.scheme.f},
          {"machines", c.machine_count},
          {"data_per_machine", c.data_per_machine},
          {"chunk_size", c.chunk_size},
          {"network_bps", c.network_bps},
          {"disk_read_Bps", c.disk_read_Bps},
          {"disk_write_Bps", c.disk_write_Bps},
          {"repair_parallelism", c.repair_parallelism},
          {"max_concurrent_jobs", c.max_concurrent_jobs},
          {"seed", c.seed}};
}

inline nlohmann::json to_json(const SimReport& r) {
  return {{"scheme", r.scheme},
          {"mode", r.mode},
          {"seed", r.seed},
          {"failed_machine", r.failed_machine},
          {"chunk_size", r.chunk_size},
          {"jobs", r.durations.size()},
          {"elapsed_seconds", r.elapsed},
          {"throughput_Bps", r.throughput},
          {"served_bytes", r.served_bytes},
          {"bytes_read", r.bytes_read},
          {"bytes_transferred", r.bytes_transferred},
          {"bytes_written", r.bytes_written},
          {"disk_accesses", r.disk_accesses},
          {"data_loss", r.data_loss},
          {"helper_counts", r.helper_counts},
          {"durations_seconds", r.durations}};
}

}  // namespace simplerc::sim
