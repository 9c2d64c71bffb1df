#pragma once

#include <stdexcept>

namespace spotquart {

// Error taxonomy mirrors the CLI exit-code contract:
//   ConfigError -> 1 (usage / configuration), DataError -> 2 (malformed input),
//   NumericError -> 3 (non-finite or otherwise invalid numerical state).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace spotquart
