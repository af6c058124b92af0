#pragma once

#include <stdexcept>
#include <string>

namespace nrstream {

// Error taxonomy mirrored by the CLI exit codes:
//   usage_error  -> 2 (caller misused an API / bad flags)
//   format_error -> 3 (malformed container or pattern file)
//   config_error -> 4 (parameter combination violates an invariant)
//   infra_error  -> 5 (I/O, stream underrun, resource trouble)
struct usage_error : std::invalid_argument {
  explicit usage_error(const std::string& msg) : std::invalid_argument(msg) {}
};

struct format_error : std::runtime_error {
  explicit format_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct infra_error : std::runtime_error {
  explicit infra_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace nrstream
