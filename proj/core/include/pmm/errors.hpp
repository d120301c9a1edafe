#pragma once

#include <stdexcept>
#include <string>

namespace pmm {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// invalid model document, schema violation, unusable input file
struct ModelError : Error {
  using Error::Error;
};

// bad CLI usage / IO failure
struct UsageError : Error {
  using Error::Error;
};

// instance-too-large guard tripped (brute force, cluster enumeration, ...)
struct GuardError : Error {
  using Error::Error;
};

// every hidden path has probability zero for the given observations
struct ZeroLikelihoodError : Error {
  using Error::Error;
};

}  // namespace pmm
