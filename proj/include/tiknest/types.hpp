#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace tiknest {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Iteration index. Outer iterations start at k = 1.
using Index = std::int64_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define TIKNEST_DECLARE_ERROR(Name) \
  class Name : public Error {       \
   public:                          \
    using Error::Error;             \
  }

TIKNEST_DECLARE_ERROR(InvalidProblemError);
TIKNEST_DECLARE_ERROR(UnboundedBelowError);
TIKNEST_DECLARE_ERROR(OracleFailureError);
TIKNEST_DECLARE_ERROR(IndexError);
TIKNEST_DECLARE_ERROR(ConditionSUnsatisfiableError);
TIKNEST_DECLARE_ERROR(PreconditionError);
TIKNEST_DECLARE_ERROR(DegenerateWeightError);
TIKNEST_DECLARE_ERROR(InsufficientDataError);
TIKNEST_DECLARE_ERROR(ConfigError);

#undef TIKNEST_DECLARE_ERROR

/// Which Tikhonov terms are active in the iteration.
enum class Variant { full, drop_eps, drop_c, drop_both };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

}  // namespace tiknest
