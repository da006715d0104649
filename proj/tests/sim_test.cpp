// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "simplerc/error.hpp"
#include "simplerc/sim.hpp"
#include "simplerc/sim_io.hpp"

using namespace simplerc;
using namespace simplerc::sim;

namespace {

ClusterConfig config_for(Scheme s, std::uint64_t seed = 1) {
  ClusterConfig c;
  c.scheme = s;
  c.seed = seed;
  return c;
}

std::vector<Scheme> all_schemes() {
  return {Scheme::replication(), Scheme::src(10, 6, 2), Scheme::reed_solomon(10, 6), Scheme::src(20, 16, 2),
          Scheme::reed_solomon(20, 16), Scheme::src(50, 46, 2), Scheme::reed_solomon(50, 46),
          Scheme::src(7, 3, 3)};
}

void check_conservation(const SimReport& r, const ClusterConfig& c, bool repair) {
  ASSERT_FALSE(r.data_loss);
  std::uint64_t helper_chunks = 0;
  for (auto h : r.helper_counts) {
    ASSERT_EQ(h, c.scheme.helper_reads());
    helper_chunks += h;
  }
  ASSERT_EQ(r.bytes_read, helper_chunks * c.chunk_size);
  ASSERT_EQ(r.bytes_transferred, r.bytes_read);
  ASSERT_EQ(r.disk_accesses, helper_chunks);
  ASSERT_EQ(r.served_bytes, r.durations.size() * c.chunk_size);
  ASSERT_EQ(r.bytes_written, repair ? r.served_bytes : 0u);
  ASSERT_DOUBLE_EQ(r.throughput, static_cast<double>(r.served_bytes) / r.elapsed);
  for (double d : r.durations) {
    ASSERT_GT(d, 0);
    ASSERT_LE(d, r.elapsed * (1 + 1e-12));
  }
}

}  // namespace

TEST(Placement, SetsUseDistinctMachinesAndRespectCapacity) {
  for (const Scheme& s : all_schemes()) {
    const auto c = config_for(s, 5);
    const auto cluster = build_cluster(c);
    for (const auto& set : cluster.sets()) {
      ASSERT_EQ(set.members.size(), s.width());
      ASSERT_EQ(std::set<MachineId>(set.members.begin(), set.members.end()).size(), s.width());
    }
    std::size_t with_room = 0;
    for (MachineId m = 0; m < cluster.machine_count(); ++m) {
      const auto held = cluster.slots_on(m).size();
      ASSERT_LE(held, c.chunks_per_machine());
      if (held + s.slots_per_member() <= c.chunks_per_machine()) ++with_room;
      for (const auto& slot : cluster.slots_on(m)) ASSERT_EQ(cluster.sets()[slot.set].members[slot.member], m);
    }
    ASSERT_LT(with_room, s.width()) << s.label();
  }
}

TEST(Placement, ReplicationOnFourMachines) {
  ClusterConfig c = config_for(Scheme::replication());
  c.machine_count = 4;
  c.data_per_machine = c.chunk_size;
  const auto cluster = build_cluster(c);
  ASSERT_EQ(cluster.sets().size(), 1u);
  const auto& m = cluster.sets()[0].members;
  EXPECT_EQ(std::set<MachineId>(m.begin(), m.end()).size(), 3u);
}

TEST(Placement, AboutSixThousandFourHundredChunksPerMachine) {
  ClusterConfig c = config_for(Scheme::src(10, 6, 2));
  c.data_per_machine = 410'000'000'000ULL;
  c.chunk_size = 64'000'000ULL;
  EXPECT_EQ(c.chunks_per_machine(), 6406u);
  const auto cluster = build_cluster(c);
  for (MachineId m = 0; m < cluster.machine_count(); ++m) EXPECT_GE(cluster.slots_on(m).size(), 6404u);
}

TEST(Placement, DeterministicPerSeed) {
  const auto a = build_cluster(config_for(Scheme::src(10, 6, 2), 9));
  const auto b = build_cluster(config_for(Scheme::src(10, 6, 2), 9));
  const auto c = build_cluster(config_for(Scheme::src(10, 6, 2), 10));
  ASSERT_EQ(a.sets().size(), b.sets().size());
  bool differs = false;
  for (std::size_t i = 0; i < a.sets().size(); ++i) {
    ASSERT_EQ(a.sets()[i].members, b.sets()[i].members);
    if (i < c.sets().size() && c.sets()[i].members != a.sets()[i].members) differs = true;
  }
  EXPECT_TRUE(differs);
}

TEST(Placement, TooFewMachines) {
  ClusterConfig c = config_for(Scheme::reed_solomon(10, 6));
  c.machine_count = 10;
  try {
    build_cluster(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parameter);
  }
}

// One replicated chunk on an idle cluster: the transfer is bound by the
// 1 Gb/s link, then the rebuilt chunk is written at disk speed.
TEST(Timing, SingleReplicatedChunk) {
  ClusterConfig c = config_for(Scheme::replication());
  c.machine_count = 4;
  c.data_per_machine = c.chunk_size;
  const auto cluster = build_cluster(c);
  const MachineId failed = cluster.sets()[0].members[0];
  const double transfer = static_cast<double>(c.chunk_size) * 8 / c.network_bps;
  const double write = static_cast<double>(c.chunk_size) / c.disk_write_Bps;
  EXPECT_NEAR(transfer, 0.537, 0.001);

  const auto deg = run_degraded_read(cluster, failed);
  ASSERT_EQ(deg.durations.size(), 1u);
  EXPECT_NEAR(deg.durations[0], transfer, 1e-9);
  const auto rep = run_node_failure(cluster, failed);
  EXPECT_NEAR(rep.durations[0], transfer + write, 1e-9);
  EXPECT_NEAR(rep.elapsed, transfer + write, 1e-9);
}

// RS with k helpers on an idle cluster: k flows share the target's downlink.
TEST(Timing, SingleRsChunkSharesTheDownlink) {
  ClusterConfig c = config_for(Scheme::reed_solomon(6, 4));
  c.machine_count = 7;
  c.data_per_machine = c.chunk_size;
  const auto cluster = build_cluster(c);
  ASSERT_EQ(cluster.sets().size(), 1u);
  const auto deg = run_degraded_read(cluster, cluster.sets()[0].members[2]);
  EXPECT_NEAR(deg.durations[0], 4 * static_cast<double>(c.chunk_size) * 8 / c.network_bps, 1e-9);
}

TEST(Conservation, EverySchemeBothModes) {
  for (const Scheme& s : all_schemes()) {
    for (std::uint64_t seed : {1u, 2u}) {
      const auto c = config_for(s, seed);
      const auto cluster = build_cluster(c);
      const auto failed = pick_failed_machine(cluster);
      check_conservation(run_node_failure(cluster, failed), c, true);
      check_conservation(run_degraded_read(cluster, failed), c, false);
    }
  }
}

TEST(Determinism, EqualSeedsGiveIdenticalReports) {
  for (const Scheme& s : all_schemes()) {
    const auto c = config_for(s, 4);
    const auto a = build_cluster(c), b = build_cluster(c);
    ASSERT_EQ(pick_failed_machine(a), pick_failed_machine(b));
    const auto f = pick_failed_machine(a);
    EXPECT_EQ(run_node_failure(a, f), run_node_failure(b, f));
    EXPECT_EQ(run_degraded_read(a, f), run_degraded_read(b, f));
    EXPECT_EQ(to_json(run_node_failure(a, f)).dump(), to_json(run_node_failure(b, f)).dump());
  }
}

TEST(Trends, SrcReadsKOverFFewerBytesThanRs) {
  for (auto [n, k] : {std::pair{20, 16}, std::pair{50, 46}}) {
    const auto src = config_for(Scheme::src(n, k, 2)), rs = config_for(Scheme::reed_solomon(n, k));
    const auto cs = build_cluster(src), cr = build_cluster(rs);
    const auto a = run_node_failure(cs, pick_failed_machine(cs));
    const auto b = run_node_failure(cr, pick_failed_machine(cr));
    const double per_chunk_src = static_cast<double>(a.bytes_read) / a.served_bytes;
    const double per_chunk_rs = static_cast<double>(b.bytes_read) / b.served_bytes;
    EXPECT_DOUBLE_EQ(per_chunk_rs / per_chunk_src, k / 2.0);
  }
}

TEST(Trends, RsThroughputNonIncreasingInK) {
  double prev = std::numeric_limits<double>::infinity();
  for (auto [n, k] : {std::pair{10, 6}, std::pair{20, 16}, std::pair{50, 46}}) {
    const auto c = build_cluster(config_for(Scheme::reed_solomon(n, k)));
    const double t = run_node_failure(c, pick_failed_machine(c)).throughput;
    EXPECT_LE(t, prev);
    prev = t;
  }
}

TEST(Trends, DegradedReadAtLeastRepair) {
  for (const Scheme& s : all_schemes()) {
    const auto c = build_cluster(config_for(s));
    const auto f = pick_failed_machine(c);
    EXPECT_GE(run_degraded_read(c, f).throughput, run_node_failure(c, f).throughput) << s.label();
  }
}

TEST(DegradedRead, WorkloadSubset) {
  const auto c = build_cluster(config_for(Scheme::src(10, 6, 2)));
  const auto f = pick_failed_machine(c);
  const auto r = run_degraded_read(c, f, ReadWorkload{5});
  EXPECT_EQ(r.durations.size(), 5u);
  EXPECT_EQ(r.bytes_written, 0u);
}

TEST(Cdf, DefinitionalCases) {
  SimReport r;
  r.durations = {3.0, 1.0};
  auto cdf = repair_time_cdf(r);
  ASSERT_EQ(cdf.size(), 2u);
  EXPECT_EQ(cdf[0].time, 1.0);
  EXPECT_EQ(cdf[0].fraction, 0.5);
  EXPECT_EQ(cdf[1].time, 3.0);
  EXPECT_EQ(cdf[1].fraction, 1.0);

  r.durations = {2.0, 2.0, 2.0};
  cdf = repair_time_cdf(r);
  ASSERT_EQ(cdf.size(), 1u);
  EXPECT_EQ(cdf[0].time, 2.0);
  EXPECT_EQ(cdf[0].fraction, 1.0);

  r.durations.clear();
  EXPECT_TRUE(repair_time_cdf(r).empty());
  EXPECT_EQ(cdf_csv({}), "seconds,fraction\n");
}

TEST(Cdf, MonotoneAndEndsAtMax) {
  const auto c = build_cluster(config_for(Scheme::src(20, 16, 2)));
  const auto r = run_node_failure(c, pick_failed_machine(c));
  const auto cdf = repair_time_cdf(r);
  ASSERT_FALSE(cdf.empty());
  for (std::size_t i = 1; i < cdf.size(); ++i) {
    EXPECT_GT(cdf[i].time, cdf[i - 1].time);
    EXPECT_GT(cdf[i].fraction, cdf[i - 1].fraction);
  }
  EXPECT_EQ(cdf.back().fraction, 1.0);
  EXPECT_EQ(cdf.back().time, *std::max_element(r.durations.begin(), r.durations.end()));
}

TEST(ConfigJson, RoundTripAndErrors) {
  ClusterConfig c = config_for(Scheme::reed_solomon(20, 16), 77);
  c.machine_count = 60;
  const auto back = config_from_json(to_json(c));
  EXPECT_EQ(to_json(back).dump(), to_json(c).dump());
  try {
    config_from_json(nlohmann::json{{"scheme", "lrc"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parameter);
  }
  try {
    config_from_json(nlohmann::json{{"machines", "many"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parameter);
  }
}
