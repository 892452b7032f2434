#pragma once

#include <stdexcept>

namespace sharpweak {

// Building a table or process failed one of its invariants.
struct ConstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A point could not be evaluated, usually because a tabulated function was
// asked for an argument outside its table.
struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParameterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sharpweak
