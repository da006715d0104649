// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "simplerc/error.hpp"
#include "simplerc/layout.hpp"
#include "simplerc/repair.hpp"
#include "simplerc/scheme.hpp"

namespace simplerc::sim {

/// 0-based machine index.
using MachineId = std::size_t;

struct ClusterConfig {
  std::size_t machine_count = 100;
  std::uint64_t data_per_machine = std::uint64_t{4} << 30;
  std::uint64_t chunk_size = std::uint64_t{64} << 20;
  double network_bps = 1e9;       // per direction, per machine
  double disk_read_Bps = 200e6;   // bytes/s
  double disk_write_Bps = 200e6;  // bytes/s
  Scheme scheme = Scheme::src(10, 6, 2);
  std::size_t repair_parallelism = 2;    // concurrent inbound rebuilds per machine
  std::size_t max_concurrent_jobs = 10;  // repair jobs the master keeps in flight
  std::uint64_t seed = 1;

  std::size_t chunks_per_machine() const {
    return static_cast<std::size_t>(
        std::llround(static_cast<double>(data_per_machine) / static_cast<double>(chunk_size)));
  }

  void validate() const {
    scheme.validate();
    if (machine_count <= scheme.width())
      throw Error(ErrorKind::parameter, "placement infeasible: need more machines than the set width " +
                                            std::to_string(scheme.width()));
    if (chunk_size == 0) throw Error(ErrorKind::parameter, "chunk_size must be positive");
    if (!(network_bps > 0) || !(disk_read_Bps > 0) || !(disk_write_Bps > 0))
      throw Error(ErrorKind::parameter, "bandwidths must be positive");
    if (repair_parallelism == 0 || max_concurrent_jobs == 0)
      throw Error(ErrorKind::parameter, "repair parallelism must be positive");
  }
};

/// Machines holding one group of mutually protecting chunks. For SRC the
/// member at position p plays node p+1 of the code.
struct RedundancySet {
  std::vector<MachineId> members;
};

struct SlotRef {
  std::size_t set = 0;
  std::size_t member = 0;
  std::size_t slot = 0;
};

/// Deterministic 64-bit generator; bounded draws use plain modulo so results
/// do not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::size_t index(std::size_t bound) { return static_cast<std::size_t>(engine_() % bound); }

 private:
  std::mt19937_64 engine_;
};

class Cluster {
 public:
  const ClusterConfig& config() const { return config_; }
  const std::vector<RedundancySet>& sets() const { return sets_; }
  const std::vector<SlotRef>& slots_on(MachineId m) const { return machine_slots_.at(m); }
  std::size_t machine_count() const { return machine_slots_.size(); }

 private:
  friend Cluster build_cluster(const ClusterConfig& config);
  ClusterConfig config_;
  std::vector<RedundancySet> sets_;
  std::vector<std::vector<SlotRef>> machine_slots_;
};

/// Fills machines up to chunks_per_machine() slots by repeatedly drawing
/// `width` distinct machines, favouring those with the most spare capacity
/// and breaking ties at random. Stops once fewer than `width` machines have
/// room for another member.
inline Cluster build_cluster(const ClusterConfig& config) {
  config.validate();
  Cluster c;
  c.config_ = config;
  c.machine_slots_.resize(config.machine_count);
  const std::size_t width = config.scheme.width();
  const std::size_t per_member = config.scheme.slots_per_member();

  std::vector<std::size_t> remaining(config.machine_count, config.chunks_per_machine());
  std::vector<MachineId> eligible;
  for (MachineId m = 0; m < config.machine_count; ++m)
    if (remaining[m] >= per_member) eligible.push_back(m);

  Rng rng(config.seed);
  while (eligible.size() >= width) {
    // random order, then the machines with the most free slots first
    for (std::size_t i = 0; i + 1 < eligible.size(); ++i)
      std::swap(eligible[i], eligible[i + rng.index(eligible.size() - i)]);
    std::stable_sort(eligible.begin(), eligible.end(),
                     [&](MachineId a, MachineId b) { return remaining[a] > remaining[b]; });
    RedundancySet set{std::vector<MachineId>(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(width))};
    const std::size_t set_index = c.sets_.size();
    for (std::size_t p = 0; p < width; ++p) {
      const MachineId m = set.members[p];
      for (std::size_t s = 0; s < per_member; ++s) c.machine_slots_[m].push_back(SlotRef{set_index, p, s});
      remaining[m] -= per_member;
    }
    c.sets_.push_back(std::move(set));
    std::erase_if(eligible, [&](MachineId m) { return remaining[m] < per_member; });
  }
  return c;
}

/// Failed machine drawn from the config seed.
inline MachineId pick_failed_machine(const Cluster& cluster) {
  Rng rng(cluster.config().seed ^ 0x9e3779b97f4a7c15ULL);
  return rng.index(cluster.machine_count());
}

struct SimReport {
  std::string scheme;
  std::string mode;  // "repair" or "degraded_read"
  std::uint64_t seed = 0;
  MachineId failed_machine = 0;
  std::uint64_t chunk_size = 0;
  std::vector<double> durations;          // per job, seconds, in lost-chunk order
  std::vector<std::size_t> helper_counts;  // per job
  double elapsed = 0;
  double throughput = 0;  // served bytes / elapsed, bytes/s
  std::uint64_t served_bytes = 0;
  std::uint64_t bytes_read = 0;
  std::uint64_t bytes_transferred = 0;
  std::uint64_t bytes_written = 0;
  std::uint64_t disk_accesses = 0;
  bool data_loss = false;

  friend bool operator==(const SimReport&, const SimReport&) = default;
};

/// Which lost chunks a degraded-read experiment requests; zero means every
/// chunk of the failed machine once.
struct ReadWorkload {
  std::size_t reads = 0;
};

namespace detail {

enum class Mode { repair, degraded_read };

/// Max-min fair sharing of per-machine uplink, downlink, disk-read and
/// disk-write capacity among active flows, advanced event by event.
class Engine {
 public:
  Engine(const Cluster& cluster, MachineId failed, Mode mode)
      : cluster_(cluster), cfg_(cluster.config()), failed_(failed), mode_(mode),
        rng_(cfg_.seed * 0x2545f4914f6cdd1dULL + failed + 1) {
    const std::size_t m = cfg_.machine_count;
    capacity_.resize(4 * m);
    for (MachineId i = 0; i < m; ++i) {
      capacity_[uplink(i)] = cfg_.network_bps / 8.0;
      capacity_[downlink(i)] = cfg_.network_bps / 8.0;
      capacity_[disk_read(i)] = cfg_.disk_read_Bps;
      capacity_[disk_write(i)] = cfg_.disk_write_Bps;
    }
    inbound_.assign(m, 0);
    outbound_flows_.assign(m, 0);
    if (cfg_.scheme.kind == Scheme::Kind::src)
      layout_.emplace(cfg_.scheme.src_params());
  }

  SimReport run(const std::vector<SlotRef>& work) {
    SimReport r;
    r.scheme = cfg_.scheme.label();
    r.mode = mode_ == Mode::repair ? "repair" : "degraded_read";
    r.seed = cfg_.seed;
    r.failed_machine = failed_;
    r.chunk_size = cfg_.chunk_size;
    r.durations.assign(work.size(), 0.0);
    r.helper_counts.assign(work.size(), 0);
    report_ = &r;

    for (std::size_t i = 0; i < work.size(); ++i) {
      const auto& set = cluster_.sets()[work[i].set];
      const std::size_t survivors = set.members.size() - 1;
      if (survivors < cfg_.scheme.k) r.data_loss = true;
      else pending_.push_back(Job{work[i], i});
    }

    while (!pending_.empty() || active_jobs_ > 0) {
      dispatch();
      if (live_flows_ == 0) throw Error(ErrorKind::internal, "simulator stalled with pending jobs");
      step();
    }
    r.elapsed = now_;
    r.served_bytes = static_cast<std::uint64_t>(work.size()) * cfg_.chunk_size;
    r.throughput = now_ > 0 ? static_cast<double>(r.served_bytes) / now_ : 0.0;
    return r;
  }

 private:
  struct Job {
    SlotRef lost;
    std::size_t index = 0;
    MachineId target = 0;
    double start = 0;
    std::size_t pending_flows = 0;
  };

  struct Flow {
    std::size_t job = 0;
    std::vector<std::size_t> resources;
    double remaining = 0;
    double rate = 0;
    bool write = false;
    bool alive = true;
  };

  static std::size_t uplink(MachineId m) { return 4 * m; }
  static std::size_t downlink(MachineId m) { return 4 * m + 1; }
  static std::size_t disk_read(MachineId m) { return 4 * m + 2; }
  static std::size_t disk_write(MachineId m) { return 4 * m + 3; }

  std::vector<MachineId> choose_helpers(const SlotRef& lost) const {
    const auto& members = cluster_.sets()[lost.set].members;
    const Scheme& s = cfg_.scheme;
    if (s.kind == Scheme::Kind::src) {
      const NodeIndex node = lost.member + 1;
      const ChunkId id = layout_->chunks_of(node)[lost.slot];
      std::vector<MachineId> helpers;
      for (const auto& read : plan_chunk(*layout_, id).reads) helpers.push_back(members[read.helper - 1]);
      return helpers;
    }
    // replication and RS read from the least busy survivors
    std::vector<std::size_t> order;
    for (std::size_t p = 0; p < members.size(); ++p)
      if (members[p] != failed_) order.push_back(p);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return outbound_flows_[members[a]] < outbound_flows_[members[b]];
    });
    std::vector<MachineId> helpers;
    for (std::size_t i = 0; i < s.helper_reads(); ++i) helpers.push_back(members[order[i]]);
    return helpers;
  }

  bool try_start(Job& job) {
    const auto& members = cluster_.sets()[job.lost.set].members;
    // least-loaded machines outside the set, ties broken at random
    std::vector<MachineId> candidates;
    std::size_t least = cfg_.repair_parallelism;
    for (MachineId m = 0; m < cfg_.machine_count; ++m) {
      if (m == failed_ || inbound_[m] > least || inbound_[m] >= cfg_.repair_parallelism) continue;
      if (std::find(members.begin(), members.end(), m) != members.end()) continue;
      if (inbound_[m] < least) {
        least = inbound_[m];
        candidates.clear();
      }
      candidates.push_back(m);
    }
    if (candidates.empty()) return false;
    job.target = candidates[rng_.index(candidates.size())];
    job.start = now_;
    ++inbound_[job.target];

    const auto helpers = choose_helpers(job.lost);
    report_->helper_counts[job.index] = helpers.size();
    for (MachineId h : helpers) {
      add_flow(job.index, {disk_read(h), uplink(h), downlink(job.target)}, false);
      ++outbound_flows_[h];
    }
    job.pending_flows = helpers.size();
    const auto bytes = static_cast<std::uint64_t>(helpers.size()) * cfg_.chunk_size;
    report_->bytes_read += bytes;
    report_->bytes_transferred += bytes;
    report_->disk_accesses += helpers.size();
    return true;
  }

  void dispatch() {
    while (!pending_.empty() && active_jobs_ < cfg_.max_concurrent_jobs) {
      Job job = pending_.front();
      if (!try_start(job)) break;
      pending_.pop_front();
      active_[job.index] = job;
      ++active_jobs_;
    }
    if (active_jobs_ == 0 && !pending_.empty())
      throw Error(ErrorKind::parameter, "no machine can host a rebuild");
  }

  void add_flow(std::size_t job, std::vector<std::size_t> resources, bool write) {
    flows_.push_back(Flow{job, std::move(resources), static_cast<double>(cfg_.chunk_size), 0.0, write, true});
    ++live_flows_;
  }

  void allocate() {
    std::vector<double> residual = capacity_;
    std::vector<std::size_t> count(capacity_.size(), 0);
    std::vector<std::vector<std::size_t>> on(capacity_.size());
    std::size_t unfrozen = 0;
    for (std::size_t i = 0; i < flows_.size(); ++i) {
      if (!flows_[i].alive) continue;
      flows_[i].rate = -1;
      ++unfrozen;
      for (std::size_t r : flows_[i].resources) {
        ++count[r];
        on[r].push_back(i);
      }
    }
    while (unfrozen > 0) {
      double share = std::numeric_limits<double>::infinity();
      std::size_t bottleneck = 0;
      for (std::size_t r = 0; r < residual.size(); ++r) {
        if (count[r] == 0) continue;
        const double s = residual[r] / static_cast<double>(count[r]);
        if (s < share) {
          share = s;
          bottleneck = r;
        }
      }
      for (std::size_t i : on[bottleneck]) {
        Flow& f = flows_[i];
        if (f.rate >= 0) continue;
        f.rate = share;
        --unfrozen;
        for (std::size_t r : f.resources) {
          residual[r] = std::max(0.0, residual[r] - share);
          --count[r];
        }
      }
    }
  }

  void step() {
    allocate();
    double dt = std::numeric_limits<double>::infinity();
    for (const Flow& f : flows_)
      if (f.alive) dt = std::min(dt, f.remaining / f.rate);
    now_ += dt;
    const double eps = 1e-6 * static_cast<double>(cfg_.chunk_size);
    std::vector<std::size_t> done;
    for (std::size_t i = 0; i < flows_.size(); ++i) {
      Flow& f = flows_[i];
      if (!f.alive) continue;
      f.remaining -= f.rate * dt;
      if (f.remaining <= eps) done.push_back(i);
    }
    for (std::size_t i : done) finish_flow(i);
    if (live_flows_ == 0) flows_.clear();
    else if (flows_.size() > 4 * live_flows_ + 64) std::erase_if(flows_, [](const Flow& f) { return !f.alive; });
  }

  void finish_flow(std::size_t i) {
    flows_[i].alive = false;
    --live_flows_;
    const std::size_t job_index = flows_[i].job;
    Job& job = active_.at(job_index);
    if (flows_[i].write) {
      report_->bytes_written += cfg_.chunk_size;
      complete(job);
      return;
    }
    --outbound_flows_[helper_of(flows_[i])];
    if (--job.pending_flows > 0) return;
    if (mode_ == Mode::repair) add_flow(job_index, {disk_write(job.target)}, true);
    else complete(job);
  }

  MachineId helper_of(const Flow& f) const { return f.resources[0] / 4; }

  void complete(Job& job) {
    report_->durations[job.index] = now_ - job.start;
    --inbound_[job.target];
    --active_jobs_;
    active_.erase(job.index);
  }

  const Cluster& cluster_;
  const ClusterConfig& cfg_;
  MachineId failed_;
  Mode mode_;
  Rng rng_;
  std::optional<StripeLayout> layout_;
  std::vector<double> capacity_;
  std::vector<std::size_t> inbound_;
  std::vector<std::size_t> outbound_flows_;
  std::deque<Job> pending_;
  std::map<std::size_t, Job> active_;
  std::size_t active_jobs_ = 0;
  std::vector<Flow> flows_;
  std::size_t live_flows_ = 0;
  double now_ = 0;
  SimReport* report_ = nullptr;
};

}  // namespace detail

/// Rebuilds every chunk of `failed` onto other machines and writes it back.
inline SimReport run_node_failure(const Cluster& cluster, MachineId failed) {
  if (failed >= cluster.machine_count()) throw Error(ErrorKind::parameter, "failed machine out of range");
  detail::Engine engine(cluster, failed, detail::Mode::repair);
  return engine.run(cluster.slots_on(failed));
}

/// Serves reads of `failed`'s chunks by in-memory repair; nothing is written.
inline SimReport run_degraded_read(const Cluster& cluster, MachineId failed, ReadWorkload workload = {}) {
  if (failed >= cluster.machine_count()) throw Error(ErrorKind::parameter, "failed machine out of range");
  std::vector<SlotRef> work = cluster.slots_on(failed);
  if (workload.reads > 0 && workload.reads < work.size()) {
    Rng rng(cluster.config().seed + 0x51ed27ULL);
    for (std::size_t i = 0; i < workload.reads; ++i)
      std::swap(work[i], work[i + rng.index(work.size() - i)]);
    work.resize(workload.reads);
  }
  detail::Engine engine(cluster, failed, detail::Mode::degraded_read);
  return engine.run(work);
}

struct CdfPoint {
  double time = 0;
  double fraction = 0;
};

/// Empirical CDF of per-job durations; one point per distinct duration.
inline std::vector<CdfPoint> repair_time_cdf(const SimReport& report) {
  std::vector<double> d = report.durations;
  std::sort(d.begin(), d.end());
  std::vector<CdfPoint> out;
  const double total = static_cast<double>(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i + 1 < d.size() && d[i + 1] == d[i]) continue;
    out.push_back(CdfPoint{d[i], static_cast<double>(i + 1) / total});
  }
  return out;
}

inline std::string cdf_csv(const std::vector<CdfPoint>& cdf) {
  std::ostringstream os;
  os.precision(17);
  os << "seconds,fraction\n";
  for (const auto& p : cdf) os << p.time << "," << p.fraction << "\n";
  return os.str();
}

}  // namespace simplerc::sim
