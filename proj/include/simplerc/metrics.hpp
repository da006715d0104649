// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "simplerc/error.hpp"
#include "simplerc/layout.hpp"

namespace simplerc {

/// One column of the storage/repair comparison. alpha and gamma are in units
/// of M/k (M = file size).
struct MetricRow {
  std::string scheme;
  double storage_per_node = 0;   // alpha
  double repair_bandwidth = 0;   // gamma
  double disk_accesses = 0;      // d
  double rate = 0;               // R
};

inline MetricRow src_metrics(const SrcParams& p) {
  p.validate();
  const double n = static_cast<double>(p.n), k = static_cast<double>(p.k), f = static_cast<double>(p.f);
  return MetricRow{"SRC(f=" + std::to_string(p.f) + ")", (f + 1) / f, f + 1,
                   static_cast<double>(std::min(2 * p.f, p.n - 1)), f * k / ((f + 1) * n)};
}

/// MDS, MSR (d=n-1), MBR (d=k), MBR (d=n-1) and SRC rows. Regenerating-code
/// rows are formula evaluations only; rate is k / (n * alpha).
inline std::vector<MetricRow> comparison_table(std::size_t n_, std::size_t k_, std::size_t f_) {
  if (k_ < 1 || k_ >= n_) throw Error(ErrorKind::parameter, "need 1 <= k < n");
  const double n = static_cast<double>(n_), k = static_cast<double>(k_);
  std::vector<MetricRow> rows;
  rows.push_back(MetricRow{"MDS", 1.0, k, k, k / n});
  rows.push_back(MetricRow{"MSR(d=n-1)", 1.0, (n - 1) / (n - k), n - 1, k / n});
  const double mbr_k = 2 * k / (k + 1);
  rows.push_back(MetricRow{"MBR(d=k)", mbr_k, mbr_k, k, k / (n * mbr_k)});
  const double mbr_n = 2 * (n - 1) / (2 * (n - 1) - k + 1);
  rows.push_back(MetricRow{"MBR(d=n-1)", mbr_n, mbr_n, n - 1, k / (n * mbr_n)});
  rows.push_back(src_metrics(SrcParams{n_, k_, f_, 1}));
  return rows;
}

/// Bytes stored per useful byte, divided by 3 (3-way replication's cost).
inline double replication_normalized_cost(double rate) { return (1.0 / rate) / 3.0; }

inline double src_normalized_cost(std::size_t n, std::size_t k, std::size_t f) {
  return replication_normalized_cost(src_metrics(SrcParams{n, k, f, 1}).rate);
}

inline double rs_normalized_cost(std::size_t n, std::size_t k) {
  return replication_normalized_cost(static_cast<double>(k) / static_cast<double>(n));
}

struct AsymptoticPoint {
  double k = 0;
  double f = 0;                 // log2 k
  double bandwidth_ratio = 0;   // gamma_SRC / gamma_MSR
  double src_rate = 0;
  double mds_rate = 0;
};

/// Grows k at fixed rate R with f = log2 k (real-valued):
/// gamma_SRC / gamma_MSR = (f + 1) / ((k/R - 1) / ((1/R - 1) k)), R_SRC = f/(f+1) R.
inline std::vector<AsymptoticPoint> asymptotic_report(const std::vector<double>& ks, double rate) {
  if (!(rate > 0 && rate < 1)) throw Error(ErrorKind::parameter, "rate must lie in (0, 1)");
  std::vector<AsymptoticPoint> out;
  for (double k : ks) {
    if (k < 1) throw Error(ErrorKind::parameter, "k must be at least 1");
    const double f = std::log2(k);
    const double msr = (k / rate - 1) / ((1 / rate - 1) * k);
    out.push_back(AsymptoticPoint{k, f, (f + 1) / msr, f / (f + 1) * rate, rate});
  }
  return out;
}

inline std::string format_table(const std::vector<MetricRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(14) << "scheme" << std::right << std::setw(12) << "alpha"
     << std::setw(12) << "gamma" << std::setw(8) << "d" << std::setw(10) << "rate" << "\n";
  os << std::fixed;
  for (const auto& r : rows) {
    os << std::left << std::setw(14) << r.scheme << std::right << std::setprecision(4)
       << std::setw(12) << r.storage_per_node << std::setw(12) << r.repair_bandwidth
       << std::setprecision(0) << std::setw(8) << r.disk_accesses << std::setprecision(4)
       << std::setw(10) << r.rate << "\n";
  }
  return os.str();
}

inline std::string format_csv(const std::vector<MetricRow>& rows) {
  std::ostringstream os;
  os << "scheme,alpha_M_over_k,gamma_M_over_k,disk_accesses,rate\n";
  os << std::setprecision(17);
  for (const auto& r : rows)
    os << r.scheme << "," << r.storage_per_node << "," << r.repair_bandwidth << ","
       << r.disk_accesses << "," << r.rate << "\n";
  return os.str();
}

}  // namespace simplerc
