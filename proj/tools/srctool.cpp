// SPDX-License-Identifier: Apache-2.0

// srctool: encode files into SRC shards, repair and decode them, and run the
// metric, simulator and reliability experiments.
//
// Exit codes: 0 success, 1 other failure, 2 usage, 3 insufficient data,
// 4 integrity failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "simplerc/metrics.hpp"
#include "simplerc/reliability.hpp"
#include "simplerc/shard_format.hpp"
#include "simplerc/shard_store.hpp"
#include "simplerc/sim.hpp"
#include "simplerc/sim_io.hpp"

namespace fs = std::filesystem;
using namespace simplerc;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kInsufficient = 3, kIntegrity = 4 };

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parameter: return kUsage;
    case ErrorKind::insufficient_data: return kInsufficient;
    case ErrorKind::repair_failure: return kInsufficient;
    case ErrorKind::integrity: return kIntegrity;
    case ErrorKind::shape: return kIntegrity;
    default: return kFailure;
  }
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + out_path);
  out << text;
}

struct EncodeArgs {
  std::string input, out_dir;
  std::size_t n = 0, k = 0, f = 2, chunk_size = 65536;
};

int run_encode(const EncodeArgs& a) {
  const Buffer file = format::read_file(a.input);
  const SrcParams params{a.n, a.k, a.f, a.chunk_size};
  params.validate();
  const auto m = store::encode_to_directory(file, params, a.out_dir);
  std::cout << "encoded " << m.file_size << " bytes as (" << params.n << "," << params.k << "," << params.f
            << ") into " << m.shards.size() << " shards, " << m.stripe_count << " stripes\n"
            << "manifest: " << (fs::path(a.out_dir) / store::kManifestName).string() << "\n";
  return kOk;
}

struct RepairArgs {
  std::string manifest, dir;
  std::size_t node = 0;
  bool dry_run = false;
};

int run_repair(const RepairArgs& a) {
  const fs::path manifest = a.manifest.empty() ? fs::path(a.dir) / store::kManifestName : fs::path(a.manifest);
  const fs::path dir = a.dir.empty() ? manifest.parent_path() : fs::path(a.dir);
  const auto out = store::repair_in_directory(manifest, dir, a.node, a.dry_run);
  std::cout << out.report;
  if (a.dry_run) {
    std::cout << "dry_run: true\n";
    return kOk;
  }
  std::cout << "fallback_used: " << (out.fallback_used ? "true" : "false") << "\n"
            << "chunks_read: " << out.chunk_reads << "\n"
            << "nodes_read:";
  for (auto n : out.nodes_read) std::cout << " " << n;
  std::cout << "\nwritten: " << out.written.string() << "\n"
            << "digest: ok\n";
  return kOk;
}

struct DecodeArgs {
  std::string manifest, dir, out;
  std::vector<std::size_t> nodes;
};

int run_decode(const DecodeArgs& a) {
  const fs::path manifest = a.manifest.empty() ? fs::path(a.dir) / store::kManifestName : fs::path(a.manifest);
  const fs::path dir = a.dir.empty() ? manifest.parent_path() : fs::path(a.dir);
  std::optional<std::vector<NodeIndex>> nodes;
  if (!a.nodes.empty()) nodes = std::vector<NodeIndex>(a.nodes.begin(), a.nodes.end());
  const auto out = store::decode_from_directory(manifest, dir, nodes, a.out);
  for (const auto& s : out.skipped) std::cerr << "warning: skipped corrupt shard " << s << "\n";
  std::cout << "decoded " << out.bytes << " bytes from nodes";
  for (auto n : out.nodes_used) std::cout << " " << n;
  std::cout << "\ndigest: ok\n";
  return kOk;
}

struct SimulateArgs {
  std::string config_path, scheme = "src", mode = "both", out, cdf;
  std::size_t n = 10, k = 6, f = 2, machines = 100, parallelism = 2, max_jobs = 10;
  std::uint64_t data_per_machine = std::uint64_t{4} << 30, chunk_size = std::uint64_t{64} << 20, seed = 1;
  double network_bps = 1e9;
  std::optional<std::size_t> failed;
  bool sweep = false;
};

sim::ClusterConfig config_from_args(const SimulateArgs& a, const CLI::App& cmd) {
  sim::ClusterConfig c;
  if (!a.config_path.empty()) {
    std::ifstream in(a.config_path);
    if (!in) throw Error(ErrorKind::io, "cannot open " + a.config_path);
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorKind::parameter, "config is not valid JSON");
    c = sim::config_from_json(j);
  }
  // explicit flags override the config file
  auto given = [&](const char* name) { return cmd.count(name) > 0; };
  if (a.config_path.empty() || given("--scheme") || given("--n") || given("--k") || given("--f")) {
    const std::string name = given("--scheme") || a.config_path.empty() ? a.scheme : sim::scheme_name(c.scheme);
    c.scheme = sim::scheme_from_name(name, given("--n") || a.config_path.empty() ? a.n : c.scheme.n,
                                     given("--k") || a.config_path.empty() ? a.k : c.scheme.k,
                                     given("--f") || a.config_path.empty() ? a.f : c.scheme.f);
    if (name == "replication" && !given("--n")) c.scheme = Scheme::replication(3);
  }
  if (a.config_path.empty() || given("--machines")) c.machine_count = a.machines;
  if (a.config_path.empty() || given("--data-per-machine")) c.data_per_machine = a.data_per_machine;
  if (a.config_path.empty() || given("--chunk-size")) c.chunk_size = a.chunk_size;
  if (a.config_path.empty() || given("--network-bps")) c.network_bps = a.network_bps;
  if (a.config_path.empty() || given("--parallelism")) c.repair_parallelism = a.parallelism;
  if (a.config_path.empty() || given("--max-jobs")) c.max_concurrent_jobs = a.max_jobs;
  if (a.config_path.empty() || given("--seed")) c.seed = a.seed;
  c.validate();
  return c;
}

int run_sweep(const sim::ClusterConfig& base, const std::string& out) {
  std::ostringstream os;
  os.precision(10);
  os << "scheme,n,k,f,repair_Bps,degraded_read_Bps,seed\n";
  const std::vector<std::pair<std::size_t, std::size_t>> codes{{10, 6}, {20, 16}, {50, 46}};
  for (const auto& [n, k] : codes) {
    for (const Scheme& s : {Scheme::replication(), Scheme::src(n, k, 2), Scheme::reed_solomon(n, k)}) {
      sim::ClusterConfig c = base;
      c.scheme = s;
      const auto cluster = sim::build_cluster(c);
      const auto failed = sim::pick_failed_machine(cluster);
      const auto rep = sim::run_node_failure(cluster, failed);
      const auto deg = sim::run_degraded_read(cluster, failed);
      os << sim::scheme_name(s) << "," << n << "," << k << "," << s.f << "," << rep.throughput << ","
         << deg.throughput << "," << c.seed << "\n";
    }
  }
  emit(os.str(), out);
  return kOk;
}

int run_simulate(const SimulateArgs& a, const CLI::App& cmd) {
  const sim::ClusterConfig c = config_from_args(a, cmd);
  if (a.sweep) return run_sweep(c, a.out);
  const auto cluster = sim::build_cluster(c);
  const sim::MachineId failed = a.failed ? *a.failed : sim::pick_failed_machine(cluster);
  nlohmann::json doc;
  doc["config"] = sim::to_json(c);
  std::optional<sim::SimReport> cdf_source;
  if (a.mode == "repair" || a.mode == "both") {
    auto r = sim::run_node_failure(cluster, failed);
    doc["repair"] = sim::to_json(r);
    cdf_source = r;
  }
  if (a.mode == "degraded" || a.mode == "both") {
    auto r = sim::run_degraded_read(cluster, failed);
    doc["degraded_read"] = sim::to_json(r);
    if (!cdf_source) cdf_source = r;
  }
  emit(doc.dump(2) + "\n", a.out);
  if (!a.cdf.empty() && cdf_source) emit(sim::cdf_csv(sim::repair_time_cdf(*cdf_source)), a.cdf);
  return kOk;
}

struct MetricsArgs {
  std::size_t n = 10, k = 6, f = 2;
  bool csv = false, asymptotic = false;
  double rate = 0.8;
};

int run_metrics(const MetricsArgs& a) {
  SrcParams{a.n, a.k, a.f, 1}.validate();
  if (a.asymptotic) {
    std::vector<double> ks;
    for (int e = 1; e <= 20; ++e) ks.push_back(static_cast<double>(1u << e));
    std::cout << "# f = log2(k), rate R = " << a.rate << "\n";
    std::cout << "k,f,gamma_src_over_gamma_msr,src_rate,mds_rate\n";
    std::cout.precision(10);
    for (const auto& p : asymptotic_report(ks, a.rate))
      std::cout << p.k << "," << p.f << "," << p.bandwidth_ratio << "," << p.src_rate << "," << p.mds_rate << "\n";
    return kOk;
  }
  const auto rows = comparison_table(a.n, a.k, a.f);
  if (a.csv) {
    std::cout << format_csv(rows);
  } else {
    std::cout << "(n,k,f) = (" << a.n << "," << a.k << "," << a.f << "); alpha and gamma in units of M/k\n"
              << format_table(rows);
  }
  std::cout.setf(std::ios::fixed);
  std::cout.precision(4);
  if (a.csv) {
    std::cout << "scheme,cost_vs_3_replication\n"
              << "SRC," << src_normalized_cost(a.n, a.k, a.f) << "\n"
              << "RS," << rs_normalized_cost(a.n, a.k) << "\n";
  } else {
    std::cout << "storage cost vs 3-way replication: SRC " << src_normalized_cost(a.n, a.k, a.f) << ", RS "
              << rs_normalized_cost(a.n, a.k) << "\n";
  }
  return kOk;
}

struct ReliabilityArgs {
  bool csv = false, from_sim = false;
  double disk_mttf_years = 5, system_bytes = 1e15, chunk_bytes = 64.0 * 1024 * 1024, machine_data = 410e9;
  std::optional<std::size_t> n, k;
  std::size_t f = 2;
  std::uint64_t seed = 1;
};

int run_reliability(const ReliabilityArgs& a) {
  std::vector<std::pair<std::size_t, std::size_t>> codes{{10, 6}, {20, 16}, {50, 46}};
  if (a.n || a.k) {
    if (!a.n || !a.k) throw Error(ErrorKind::parameter, "--n and --k go together");
    codes = {{*a.n, *a.k}};
  }
  std::vector<Scheme> schemes{Scheme::replication()};
  for (const auto& [n, k] : codes) {
    schemes.push_back(Scheme::src(n, k, a.f));
    schemes.push_back(Scheme::reed_solomon(n, k));
  }

  std::vector<reliability::MttfRow> rows;
  for (const Scheme& s : schemes) {
    double hours = reliability::default_repair_hours(s);
    if (a.from_sim) {
      sim::ClusterConfig c;
      c.scheme = s;
      c.seed = a.seed;
      const auto cluster = sim::build_cluster(c);
      const auto r = sim::run_node_failure(cluster, sim::pick_failed_machine(cluster));
      hours = reliability::repair_hours_from_throughput(a.machine_data, r.throughput);
    }
    auto p = reliability::params_for(s, hours);
    p.disk_mttf_hours = a.disk_mttf_years * reliability::kHoursPerYear;
    p.system_bytes = a.system_bytes;
    p.chunk_bytes = a.chunk_bytes;
    rows.push_back(reliability::evaluate(s, p));
  }
  if (a.csv) std::cout << reliability::format_csv(rows);
  else std::cout << reliability::format_table(rows);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simple regenerating code toolkit"};
  app.require_subcommand(1);

  EncodeArgs enc;
  auto* encode = app.add_subcommand("encode", "Encode a file into per-node shard files");
  encode->add_option("-i,--input", enc.input, "File to encode")->required();
  encode->add_option("-o,--out", enc.out_dir, "Output directory")->required();
  encode->add_option("--n", enc.n, "Number of nodes")->required();
  encode->add_option("--k", enc.k, "Nodes needed to reconstruct")->required();
  encode->add_option("--f", enc.f, "Parity degree")->capture_default_str();
  encode->add_option("--chunk-size", enc.chunk_size, "Bytes per chunk")->capture_default_str();

  RepairArgs rep;
  auto* repair = app.add_subcommand("repair", "Rebuild one node's shard file");
  repair->add_option("-m,--manifest", rep.manifest, "Manifest path (default DIR/manifest.json)");
  repair->add_option("-d,--dir", rep.dir, "Shard directory (default: the manifest's directory)");
  repair->add_option("--node", rep.node, "Failed node index (1-based)")->required();
  repair->add_flag("--dry-run", rep.dry_run, "Print the repair plan only");

  DecodeArgs dec;
  auto* decode = app.add_subcommand("decode", "Rebuild the original file from any k shards");
  decode->add_option("-m,--manifest", dec.manifest, "Manifest path (default DIR/manifest.json)");
  decode->add_option("-d,--dir", dec.dir, "Shard directory (default: the manifest's directory)");
  decode->add_option("--nodes", dec.nodes, "Use exactly these nodes")->delimiter(',');
  decode->add_option("-o,--out", dec.out, "Output file")->required();

  SimulateArgs simargs;
  auto* simulate = app.add_subcommand("simulate", "Run the cluster repair simulator");
  simulate->add_option("--config", simargs.config_path, "JSON config file");
  simulate->add_option("--scheme", simargs.scheme, "replication | rs | src")->capture_default_str();
  simulate->add_option("--n", simargs.n)->capture_default_str();
  simulate->add_option("--k", simargs.k)->capture_default_str();
  simulate->add_option("--f", simargs.f)->capture_default_str();
  simulate->add_option("--machines", simargs.machines)->capture_default_str();
  simulate->add_option("--data-per-machine", simargs.data_per_machine, "Bytes per machine")->capture_default_str();
  simulate->add_option("--chunk-size", simargs.chunk_size)->capture_default_str();
  simulate->add_option("--network-bps", simargs.network_bps)->capture_default_str();
  simulate->add_option("--parallelism", simargs.parallelism, "Inbound rebuilds per machine")->capture_default_str();
  simulate->add_option("--max-jobs", simargs.max_jobs, "Repair jobs in flight")->capture_default_str();
  simulate->add_option("--seed", simargs.seed)->capture_default_str();
  simulate->add_option("--failed", simargs.failed, "Failed machine (default: drawn from the seed)");
  simulate->add_option("--mode", simargs.mode, "repair | degraded | both")
      ->check(CLI::IsMember({"repair", "degraded", "both"}))
      ->capture_default_str();
  simulate->add_option("--out", simargs.out, "Report file (default stdout)");
  simulate->add_option("--cdf", simargs.cdf, "Write the repair-time CDF as CSV");
  simulate->add_flag("--sweep", simargs.sweep, "Throughput of every scheme at (10,6), (20,16), (50,46)");

  MetricsArgs met;
  auto* metrics = app.add_subcommand("metrics", "Storage and repair metric comparison");
  metrics->add_option("--n", met.n)->capture_default_str();
  metrics->add_option("--k", met.k)->capture_default_str();
  metrics->add_option("--f", met.f)->capture_default_str();
  metrics->add_flag("--csv", met.csv, "Comma-separated output");
  metrics->add_flag("--asymptotic", met.asymptotic, "Bandwidth ratio and rate with f = log2 k");
  metrics->add_option("--rate", met.rate, "Fixed k/n for --asymptotic")->capture_default_str();

  ReliabilityArgs rel;
  auto* reliab = app.add_subcommand("reliability", "Markov MTTF of replication, RS and SRC");
  reliab->add_flag("--csv", rel.csv, "Comma-separated output");
  reliab->add_flag("--from-sim", rel.from_sim, "Derive repair times from simulated throughput");
  reliab->add_option("--machine-data", rel.machine_data, "Bytes per machine for --from-sim")->capture_default_str();
  reliab->add_option("--disk-mttf-years", rel.disk_mttf_years)->capture_default_str();
  reliab->add_option("--system-bytes", rel.system_bytes)->capture_default_str();
  reliab->add_option("--chunk-size", rel.chunk_bytes)->capture_default_str();
  reliab->add_option("--n", rel.n);
  reliab->add_option("--k", rel.k);
  reliab->add_option("--f", rel.f)->capture_default_str();
  reliab->add_option("--seed", rel.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (encode->parsed()) return run_encode(enc);
    if (repair->parsed()) return run_repair(rep);
    if (decode->parsed()) return run_decode(dec);
    if (simulate->parsed()) return run_simulate(simargs, *simulate);
    if (metrics->parsed()) return run_metrics(met);
    if (reliab->parsed()) return run_reliability(rel);
  } catch (const Error& e) {
    std::cerr << "srctool: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "srctool: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
