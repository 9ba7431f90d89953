#pragma once

#include <stdexcept>
#include <string>

namespace oil {

// Base for everything the library throws on purpose. The CLI turns these into
// a one-line diagnostic and a nonzero exit code.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct GenerationError : Error {
  using Error::Error;
};

// A caller broke a precondition (wrong vector length, bad dims, ...).
struct ContractError : Error {
  using Error::Error;
};

// Non-finite loss or parameters during training.
struct DivergenceError : Error {
  using Error::Error;
};

struct EvalAbortError : Error {
  using Error::Error;
};

struct LoadError : Error {
  using Error::Error;
};

}  // namespace oil
