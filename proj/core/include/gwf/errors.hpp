#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gwf {

enum class ErrorKind {
  InvalidArgument,  // malformed input (bad word, bad map, bad distribution)
  Domain,           // value outside the mathematical domain (subcritical, rho >= r_min)
  Resource,         // configured cap exceeded
  NotFound,         // word not in tree
  EmptySet,         // result would be the empty compact set
  Horizon,          // tree too shallow for the requested section
  Resolution,       // scale below the certified resolution guard
  Precondition,     // caller contract violated (e.g. tree not in family)
  Sampling,         // rejection sampling exhausted its attempts
  Config,           // configuration / parse error
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Process exit code for the CLI: 1 config, 2 domain-type, 3 resource-type.
int exit_code_for(ErrorKind kind);

}  // namespace gwf
