#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trivscan {

enum class ErrorKind {
  missing_manifest,
  malformed_manifest,
  io_failure,
  no_measurable_source,
  malformed_version,
  malformed_range,
  malformed_registry,
  malformed_advisory,
  invalid_thresholds,
  invalid_confidence,
  invalid_argument,
  missing_package,
};

std::string_view to_string(ErrorKind kind);

/// Error raised across the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace trivscan
