// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace simplerc {

enum class ErrorKind {
  parameter,          // invalid code or cluster parameters
  shape,              // ragged or truncated buffers
  insufficient_data,  // fewer than k usable nodes
  repair_failure,     // a helper chunk is missing
  integrity,          // checksum or digest mismatch
  io,
  internal,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::shape: return "shape error";
    case ErrorKind::insufficient_data: return "insufficient data";
    case ErrorKind::repair_failure: return "repair failure";
    case ErrorKind::integrity: return "integrity error";
    case ErrorKind::io: return "i/o error";
    case ErrorKind::internal: return "internal error";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  // message without the kind prefix
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace simplerc
