#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace capalloc::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Feasibility tolerance honoured by every returned optimum.
inline constexpr double kFeasTol = 1e-8;

enum class Status { optimal, infeasible, unbounded, error };

std::string to_string(Status s);

/// Sparse constraint row: sum(coeff_i * x_i) (= or <=) rhs.
struct Row {
  std::vector<std::pair<int, double>> coeffs;
  double rhs = 0.0;

  Row& add(int var, double coeff) {
    if (coeff != 0.0) coeffs.emplace_back(var, coeff);
    return *this;
  }
};

/// Maximization problem over box-bounded variables.
///   max  objective . x
///   s.t. eq rows hold with equality, le rows with <=,
///        lower <= x <= upper  (upper entries may be kInf)
struct LinearProgram {
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Row> eq;
  std::vector<Row> le;

  int num_vars() const { return static_cast<int>(objective.size()); }

  int add_variable(double obj, double lo, double hi) {
    objective.push_back(obj);
    lower.push_back(lo);
    upper.push_back(hi);
    return num_vars() - 1;
  }
};

struct Solution {
  Status status = Status::error;
  std::vector<double> values;
  double objective_value = 0.0;

  bool ok() const { return status == Status::optimal; }
};

/// Deterministic bounded-variable primal simplex. Identical input yields a
/// bit-identical solution.
Solution solve(const LinearProgram& lp);

/// Dump in CPLEX LP text format for external cross-checking.
void write_lp(const LinearProgram& lp, std::ostream& os);

}  // namespace capalloc::lp
