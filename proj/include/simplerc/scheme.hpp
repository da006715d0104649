// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>

#include "simplerc/error.hpp"
#include "simplerc/layout.hpp"

namespace simplerc {

/// Redundancy scheme of one redundancy set: r-way replication, RS(n,k) or
/// SRC(n,k,f). Replication is modelled as an (r, 1) code.
struct Scheme {
  enum class Kind { replication, reed_solomon, src };

  Kind kind = Kind::replication;
  std::size_t n = 3;
  std::size_t k = 1;
  std::size_t f = 0;

  static Scheme replication(std::size_t copies = 3) { return Scheme{Kind::replication, copies, 1, 0}; }
  static Scheme reed_solomon(std::size_t n, std::size_t k) { return Scheme{Kind::reed_solomon, n, k, 0}; }
  static Scheme src(std::size_t n, std::size_t k, std::size_t f) { return Scheme{Kind::src, n, k, f}; }

  /// Machines per redundancy set.
  std::size_t width() const { return n; }
  /// Chunks each member machine stores for one set.
  std::size_t slots_per_member() const { return kind == Kind::src ? f + 1 : 1; }
  /// Helper chunks read to rebuild one lost chunk.
  std::size_t helper_reads() const {
    switch (kind) {
      case Kind::replication: return 1;
      case Kind::reed_solomon: return k;
      case Kind::src: return f;
    }
    return 0;
  }
  /// Chunks of user data protected by one set.
  std::size_t useful_chunks() const { return kind == Kind::src ? f * k : k; }
  std::size_t tolerated_losses() const { return n - k; }

  SrcParams src_params(std::size_t chunk_size = 1) const { return SrcParams{n, k, f, chunk_size}; }

  void validate() const {
    switch (kind) {
      case Kind::replication:
        if (n < 1 || k != 1) throw Error(ErrorKind::parameter, "replication needs at least one copy");
        break;
      case Kind::reed_solomon:
        if (k < 1 || k >= n || n > 255) throw Error(ErrorKind::parameter, "RS needs 1 <= k < n <= 255");
        break;
      case Kind::src:
        SrcParams{n, k, f, 1}.validate();
        break;
    }
  }

  std::string label() const {
    switch (kind) {
      case Kind::replication: return std::to_string(n) + "-replication";
      case Kind::reed_solomon: return "RS(" + std::to_string(n) + "," + std::to_string(k) + ")";
      case Kind::src:
        return "SRC(" + std::to_string(n) + "," + std::to_string(k) + "," + std::to_string(f) + ")";
    }
    return "?";
  }

  friend bool operator==(const Scheme&, const Scheme&) = default;
};

}  // namespace simplerc
