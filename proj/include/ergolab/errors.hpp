#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ergolab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Index or length outside the admissible range.
struct RangeError : Error {
  using Error::Error;
};

/// Operands of incompatible shape (block lengths, word lengths).
struct ShapeError : Error {
  using Error::Error;
};

/// A chain has more than one closed communicating class.
struct IrreducibilityError : Error {
  IrreducibilityError(const std::string& what, std::vector<std::vector<std::string>> classes)
      : Error(what), classes(std::move(classes)) {}
  std::vector<std::vector<std::string>> classes;
};

struct InconsistentMarginalsError : Error {
  using Error::Error;
};

/// A search ran out of budget; `best` holds the best value reached.
struct BudgetError : Error {
  BudgetError(const std::string& what, double best) : Error(what), best(best) {}
  double best;
};

struct ConstructionError : Error {
  using Error::Error;
};

struct DecodeError : Error {
  using Error::Error;
};

struct ClassifierError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace ergolab
