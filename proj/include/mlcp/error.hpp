#pragma once

#include <stdexcept>
#include <string>

namespace mlcp {

// Base class for all library errors.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct parse_error : error {   // malformed input file
  using error::error;
};
struct data_error : error {    // dataset-level violation (empty split, bad labelset, ...)
  using error::error;
};
struct config_error : error {  // experiment configuration problem
  using error::error;
};
struct contract_error : error {  // API misuse (dimension mismatch, missing p-value, ...)
  using error::error;
};

}  // namespace mlcp
