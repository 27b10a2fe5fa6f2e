#include "gwf/errors.hpp"

namespace gwf {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Resource: return "resource";
    case ErrorKind::NotFound: return "not-found";
    case ErrorKind::EmptySet: return "empty-set";
    case ErrorKind::Horizon: return "horizon";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Sampling: return "sampling";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
      return 1;
    case ErrorKind::Resource:
    case ErrorKind::Sampling:
      return 3;
    default:
      return 2;
  }
}

}  // namespace gwf
