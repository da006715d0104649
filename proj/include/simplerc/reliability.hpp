// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "simplerc/error.hpp"
#include "simplerc/scheme.hpp"

namespace simplerc::reliability {

inline constexpr double kHoursPerYear = 8760.0;

/// Inputs of the birth-death model of one redundancy set. Every member fails
/// independently at rate 1/disk_mttf_hours; one repair runs at a time at
/// rate 1/repair_hours (non-positive or infinite repair_hours means no repair).
struct MarkovParams {
  std::size_t n = 3;
  std::size_t k = 1;
  double disk_mttf_hours = 5 * kHoursPerYear;
  double repair_hours = 0.25;
  double system_bytes = 1e15;
  double chunk_bytes = 64.0 * 1024 * 1024;
  std::size_t useful_chunks_per_set = 1;

  double failure_rate() const { return 1.0 / disk_mttf_hours; }
  double repair_rate() const {
    return (repair_hours > 0 && std::isfinite(repair_hours)) ? 1.0 / repair_hours : 0.0;
  }
  double set_count() const {
    return system_bytes / (static_cast<double>(useful_chunks_per_set) * chunk_bytes);
  }

  void validate() const {
    if (k < 1 || k > n) throw Error(ErrorKind::parameter, "need 1 <= k <= n");
    if (!(disk_mttf_hours > 0)) throw Error(ErrorKind::parameter, "disk MTTF must be positive");
    if (!(system_bytes > 0) || !(chunk_bytes > 0) || useful_chunks_per_set == 0)
      throw Error(ErrorKind::parameter, "system and chunk sizes must be positive");
  }
};

/// Expected hours until a set with n members loses more than n-k of them.
///
/// States 0..n-k count failed members; state n-k+1 absorbs. From state i the
/// chain moves up at (n-i)*lambda and, for i >= 1, down at mu. The first-passage
/// system T_i = 1/q_i + sum_j p_ij T_j is tridiagonal; eliminating it in the
/// difference variables E_i = T_i - T_{i+1} gives
///   E_0 = 1/b_0,  E_i = (1 + mu * E_{i-1}) / b_i,  T_0 = sum_i E_i,
/// a recursion of positive terms that stays accurate when mu/lambda ~ 1e5.
inline double mttf_redundancy_set(const MarkovParams& p) {
  p.validate();
  const double lambda = p.failure_rate();
  const double mu = p.repair_rate();
  const std::size_t tolerated = p.n - p.k;
  double total = 0;
  double up_time = 0;  // E_{i-1}
  for (std::size_t i = 0; i <= tolerated; ++i) {
    const double birth = static_cast<double>(p.n - i) * lambda;
    up_time = (1.0 + (i > 0 ? mu * up_time : 0.0)) / birth;
    total += up_time;
  }
  return total;
}

/// Independent sets: the first loss anywhere arrives set_count times sooner.
inline double mttf_system(const MarkovParams& p) { return mttf_redundancy_set(p) / p.set_count(); }

/// Repair times used when no simulator measurement is supplied: 15 minutes
/// for replication, 30 minutes for SRC, and RS scaled linearly in k so that
/// RS at k = 6 matches SRC.
inline double default_repair_hours(const Scheme& s) {
  switch (s.kind) {
    case Scheme::Kind::replication: return 0.25;
    case Scheme::Kind::src: return 0.5;
    case Scheme::Kind::reed_solomon: return 0.5 * static_cast<double>(s.k) / 6.0;
  }
  return 0.5;
}

/// Hours to rebuild one machine's data at a measured repair throughput.
inline double repair_hours_from_throughput(double machine_bytes, double bytes_per_second) {
  if (!(bytes_per_second > 0)) throw Error(ErrorKind::parameter, "throughput must be positive");
  return machine_bytes / bytes_per_second / 3600.0;
}

inline MarkovParams params_for(const Scheme& s, double repair_hours) {
  s.validate();
  MarkovParams p;
  p.n = s.n;
  p.k = s.k;
  p.repair_hours = repair_hours;
  p.useful_chunks_per_set = s.useful_chunks();
  return p;
}

inline MarkovParams params_for(const Scheme& s) { return params_for(s, default_repair_hours(s)); }

struct MttfRow {
  std::string scheme;
  double repair_hours = 0;
  double set_mttf_hours = 0;
  double set_count = 0;
  double system_mttf_hours = 0;
};

inline MttfRow evaluate(const Scheme& s, const MarkovParams& p) {
  return MttfRow{s.label(), p.repair_hours, mttf_redundancy_set(p), p.set_count(), mttf_system(p)};
}

inline std::string format_table(const std::vector<MttfRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(16) << "scheme" << std::right << std::setw(12) << "repair_h"
     << std::setw(14) << "set_mttf_h" << std::setw(12) << "sets" << std::setw(14) << "system_mttf_h"
     << "\n";
  for (const auto& r : rows) {
    os << std::left << std::setw(16) << r.scheme << std::right << std::fixed << std::setprecision(4)
       << std::setw(12) << r.repair_hours << std::scientific << std::setprecision(3) << std::setw(14)
       << r.set_mttf_hours << std::setw(12) << r.set_count << std::setw(14) << r.system_mttf_hours
       << "\n";
    os.unsetf(std::ios::floatfield);
  }
  return os.str();
}

inline std::string format_csv(const std::vector<MttfRow>& rows) {
  std::ostringstream os;
  os << "scheme,repair_hours,set_mttf_hours,set_count,system_mttf_hours\n";
  os << std::setprecision(17);
  for (const auto& r : rows)
    os << '"' << r.scheme << "\"," << r.repair_hours << "," << r.set_mttf_hours << "," << r.set_count << ","
       << r.system_mttf_hours << "\n";
  return os.str();
}

}  // namespace simplerc::reliability
