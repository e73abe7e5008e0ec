#include "trivscan/error.hpp"

namespace trivscan {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::missing_manifest: return "MissingManifest";
    case ErrorKind::malformed_manifest: return "MalformedManifest";
    case ErrorKind::io_failure: return "IoFailure";
    case ErrorKind::no_measurable_source: return "NoMeasurableSource";
    case ErrorKind::malformed_version: return "MalformedVersion";
    case ErrorKind::malformed_range: return "MalformedRange";
    case ErrorKind::malformed_registry: return "MalformedRegistry";
    case ErrorKind::malformed_advisory: return "MalformedAdvisory";
    case ErrorKind::invalid_thresholds: return "InvalidThresholds";
    case ErrorKind::invalid_confidence: return "InvalidConfidence";
    case ErrorKind::invalid_argument: return "InvalidArgument";
    case ErrorKind::missing_package: return "MissingPackage";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace trivscan
