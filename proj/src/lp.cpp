#include "capalloc/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>

namespace capalloc::lp {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kRatioTol = 1e-9;
constexpr double kZeroTol = 1e-11;

// Bounded-variable primal simplex on a dense tableau. All working variables
// live on [0, ub] (ub possibly infinite); variables currently sitting at
// their upper bound are kept in the "flipped" representation x -> ub - x so
// that every nonbasic variable is at zero.
struct Tableau {
  int ncols = 0;
  std::vector<std::vector<double>> rows;  // each of size ncols + 1, rhs last
  std::vector<double> z;                  // reduced costs, z[ncols] = obj const
  std::vector<int> basis;                 // per row
  std::vector<double> ub;                 // per column
  std::vector<std::uint8_t> flipped;      // per column
  std::vector<std::uint8_t> in_basis;     // per column

  double& rhs(int i) { return rows[i][ncols]; }
  double rhs(int i) const { return rows[i][ncols]; }

  void flip_column(int j) {
    const double u = ub[j];
    for (auto& r : rows) {
      r[ncols] -= r[j] * u;
      r[j] = -r[j];
    }
    z[ncols] += z[j] * u;
    z[j] = -z[j];
    flipped[j] ^= 1;
  }

  void pivot(int pr, int pc) {
    auto& prow = rows[pr];
    const double inv = 1.0 / prow[pc];
    for (double& v : prow) v *= inv;
    prow[pc] = 1.0;
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
      if (i == pr) continue;
      const double f = rows[i][pc];
      if (f == 0.0) continue;
      auto& r = rows[i];
      for (int j = 0; j <= ncols; ++j) r[j] -= f * prow[j];
      r[pc] = 0.0;
    }
    const double fz = z[pc];
    if (fz != 0.0) eliminate_from_z(fz, prow);
    in_basis[basis[pr]] = 0;
    in_basis[pc] = 1;
    basis[pr] = pc;
  }

  // Substituting a basic variable x_b = rhs - sum(T x) into the objective:
  // coefficients drop by f*T, the constant grows by f*rhs.
  void eliminate_from_z(double f, const std::vector<double>& row) {
    for (int j = 0; j < ncols; ++j) z[j] -= f * row[j];
    z[ncols] += f * row[ncols];
  }

  // Flip a basic variable that leaves at its upper bound, so that it leaves
  // at zero instead.
  void flip_basic(int row_idx) {
    const int col = basis[row_idx];
    auto& r = rows[row_idx];
    r[ncols] -= ub[col];  // the basic coefficient in its own row is 1
    r[col] = -1.0;
    for (double& v : r) v = -v;  // restate with the basic coefficient +1
    flipped[col] ^= 1;
  }

  enum class RunResult { optimal, unbounded, iteration_limit };

  RunResult run() {
    const int nrows = static_cast<int>(rows.size());
    const long max_iter = 200L * (nrows + ncols) + 20000;
    const long stall_limit = 4L * (nrows + ncols) + 200;
    bool bland = false;
    long stall = 0;
    double last_obj = z[ncols];
    for (long iter = 0; iter < max_iter; ++iter) {
      int enter = -1;
      if (bland) {
        for (int j = 0; j < ncols; ++j) {
          if (!in_basis[j] && z[j] > kPivotTol) {
            enter = j;
            break;
          }
        }
      } else {
        double best = kPivotTol;
        for (int j = 0; j < ncols; ++j) {
          if (!in_basis[j] && z[j] > best) {
            best = z[j];
            enter = j;
          }
        }
      }
      if (enter < 0) return RunResult::optimal;

      // Ratio test: entering may rise until a basic hits a bound or the
      // entering variable hits its own upper bound.
      double best_t = ub[enter];
      int leave_row = -1;
      bool leave_at_upper = false;
      double best_abs = 0.0;
      for (int i = 0; i < nrows; ++i) {
        const double a = rows[i][enter];
        double t;
        bool at_upper;
        if (a > kRatioTol) {
          t = rhs(i) / a;
          at_upper = false;
        } else if (a < -kRatioTol && std::isfinite(ub[basis[i]])) {
          t = (rhs(i) - ub[basis[i]]) / a;
          at_upper = true;
        } else {
          continue;
        }
        if (t < 0.0) t = 0.0;
        bool take;
        if (leave_row < 0 && t <= best_t + 1e-12) {
          take = true;
        } else if (t < best_t - 1e-12) {
          take = true;
        } else if (t < best_t + 1e-12 && leave_row >= 0) {
          take = bland ? basis[i] < basis[leave_row] : std::abs(a) > best_abs + 1e-12;
        } else {
          take = false;
        }
        if (take) {
          best_t = std::min(best_t, t);
          leave_row = i;
          leave_at_upper = at_upper;
          best_abs = std::abs(a);
        }
      }

      if (leave_row < 0) {
        if (std::isinf(best_t)) return RunResult::unbounded;
        flip_column(enter);  // entering goes straight to its upper bound
      } else {
        if (leave_at_upper) flip_basic(leave_row);
        pivot(leave_row, enter);
      }

      if (z[ncols] > last_obj + 1e-12) {
        stall = 0;
        last_obj = z[ncols];
      } else if (++stall > stall_limit) {
        bland = true;
      }
    }
    return RunResult::iteration_limit;
  }
};

}  // namespace

std::string to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::error: return "error";
  }
  return "error";
}

Solution solve(const LinearProgram& lp) {
  const int n = lp.num_vars();
  Solution sol;
  if (static_cast<int>(lp.lower.size()) != n || static_cast<int>(lp.upper.size()) != n) {
    sol.status = Status::error;
    return sol;
  }
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(lp.lower[j]) || lp.upper[j] < lp.lower[j] - kZeroTol) {
      sol.status = Status::error;
      return sol;
    }
  }
  if (n == 0) {
    bool feasible = true;
    for (const auto& r : lp.eq) feasible = feasible && std::abs(r.rhs) <= kFeasTol;
    for (const auto& r : lp.le) feasible = feasible && r.rhs >= -kFeasTol;
    sol.status = feasible ? Status::optimal : Status::infeasible;
    sol.objective_value = 0.0;
    return sol;
  }

  // Shift every variable to [0, span]; variables with an empty span are fixed
  // at their lower bound and leave the problem.
  std::vector<int> col_of(n, -1);
  std::vector<double> span;
  int live = 0;
  for (int j = 0; j < n; ++j) {
    const double s = lp.upper[j] - lp.lower[j];
    if (s > kZeroTol) {
      col_of[j] = live++;
      span.push_back(s);
    }
  }

  const int n_rows = static_cast<int>(lp.eq.size() + lp.le.size());
  Tableau t;
  std::vector<std::vector<double>> dense(n_rows, std::vector<double>(live, 0.0));
  std::vector<double> rhs(n_rows, 0.0);
  std::vector<bool> is_eq(n_rows, false);
  int ri = 0;
  for (const auto* group : {&lp.eq, &lp.le}) {
    for (const auto& row : *group) {
      double b = row.rhs;
      for (auto [var, c] : row.coeffs) {
        if (var < 0 || var >= n) {
          sol.status = Status::error;
          return sol;
        }
        b -= c * lp.lower[var];
        if (col_of[var] >= 0) dense[ri][col_of[var]] += c;
      }
      rhs[ri] = b;
      is_eq[ri] = group == &lp.eq;
      ++ri;
    }
  }

  int n_slack = 0, n_art = 0;
  for (int i = 0; i < n_rows; ++i) {
    if (!is_eq[i]) ++n_slack;
    if (is_eq[i] || rhs[i] < 0.0) ++n_art;
  }
  t.ncols = live + n_slack + n_art;
  t.rows.assign(n_rows, std::vector<double>(t.ncols + 1, 0.0));
  t.z.assign(t.ncols + 1, 0.0);
  t.ub.assign(t.ncols, kInf);
  t.flipped.assign(t.ncols, 0);
  t.in_basis.assign(t.ncols, 0);
  t.basis.assign(n_rows, -1);
  for (int k = 0; k < live; ++k) t.ub[k] = span[k];

  int slack_at = live, art_at = live + n_slack;
  for (int i = 0; i < n_rows; ++i) {
    const double sgn = rhs[i] < 0.0 ? -1.0 : 1.0;
    for (int k = 0; k < live; ++k) t.rows[i][k] = sgn * dense[i][k];
    t.rows[i][t.ncols] = sgn * rhs[i];
    if (!is_eq[i]) t.rows[i][slack_at++] = sgn;
    if (is_eq[i] || sgn < 0.0) {
      t.rows[i][art_at] = 1.0;
      t.basis[i] = art_at;
      t.in_basis[art_at] = 1;
      ++art_at;
    } else {
      t.basis[i] = slack_at - 1;
      t.in_basis[slack_at - 1] = 1;
    }
  }

  // Phase 1: drive the artificials to zero.
  if (n_art > 0) {
    for (int j = live + n_slack; j < t.ncols; ++j) t.z[j] = -1.0;
    for (int i = 0; i < n_rows; ++i) {
      const double f = t.z[t.basis[i]];
      if (f != 0.0) t.eliminate_from_z(f, t.rows[i]);
    }
    const auto r1 = t.run();
    if (r1 == Tableau::RunResult::iteration_limit) {
      sol.status = Status::error;
      return sol;
    }
    if (t.z[t.ncols] < -1e-7) {
      sol.status = Status::infeasible;
      return sol;
    }
    // Pivot lingering artificials out of the basis; all-zero rows are
    // redundant and dropped.
    for (int i = static_cast<int>(t.rows.size()) - 1; i >= 0; --i) {
      if (t.basis[i] < live + n_slack) continue;
      int pc = -1;
      for (int j = 0; j < live + n_slack; ++j) {
        if (!t.in_basis[j] && std::abs(t.rows[i][j]) > 1e-7) {
          pc = j;
          break;
        }
      }
      if (pc >= 0) {
        t.pivot(i, pc);
      } else {
        t.in_basis[t.basis[i]] = 0;
        t.rows.erase(t.rows.begin() + i);
        t.basis.erase(t.basis.begin() + i);
      }
    }
    const int keep = live + n_slack;
    for (auto& r : t.rows) {
      r[keep] = r[t.ncols];
      r.resize(keep + 1);
    }
    t.ncols = keep;
    t.z.assign(t.ncols + 1, 0.0);
    t.ub.resize(keep);
    t.flipped.resize(keep);
    t.in_basis.resize(keep);
  }

  // Phase 2 objective, restated in the shifted/flipped frame.
  double zc = 0.0;
  for (int j = 0; j < n; ++j) zc += lp.objective[j] * lp.lower[j];
  t.z[t.ncols] = zc;
  for (int j = 0; j < n; ++j) {
    if (col_of[j] >= 0) t.z[col_of[j]] = lp.objective[j];
  }
  for (int k = 0; k < live; ++k) {
    if (t.flipped[k]) {
      t.z[t.ncols] += t.z[k] * t.ub[k];
      t.z[k] = -t.z[k];
    }
  }
  for (size_t i = 0; i < t.rows.size(); ++i) {
    const double f = t.z[t.basis[i]];
    if (f != 0.0) t.eliminate_from_z(f, t.rows[i]);
  }

  const auto r2 = t.run();
  if (r2 == Tableau::RunResult::iteration_limit) {
    sol.status = Status::error;
    return sol;
  }
  if (r2 == Tableau::RunResult::unbounded) {
    sol.status = Status::unbounded;
    return sol;
  }

  std::vector<double> work(t.ncols, 0.0);
  for (size_t i = 0; i < t.rows.size(); ++i) work[t.basis[i]] = t.rows[i][t.ncols];
  sol.values.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double v = lp.lower[j];
    if (col_of[j] >= 0) {
      const int k = col_of[j];
      const double x = t.flipped[k] ? t.ub[k] - work[k] : work[k];
      v += x;
    }
    v = std::clamp(v, lp.lower[j], lp.upper[j] + 0.0);
    sol.values[j] = v;
  }
  sol.objective_value = t.z[t.ncols];
  sol.status = Status::optimal;
  return sol;
}

void write_lp(const LinearProgram& lp, std::ostream& os) {
  auto term = [&](double c, int v, bool first) {
    if (first) {
      os << (c < 0 ? "- " : "");
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    os << std::abs(c) << " x" << v;
  };
  os << "Maximize\n obj:";
  bool first = true;
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (lp.objective[j] == 0.0) continue;
    os << ' ';
    term(lp.objective[j], j, first);
    first = false;
  }
  if (first) os << " 0 x0";
  os << "\nSubject To\n";
  int idx = 0;
  auto emit_row = [&](const Row& r, const char* rel) {
    os << " c" << idx++ << ":";
    bool f = true;
    for (auto [v, c] : r.coeffs) {
      if (c == 0.0) continue;
      os << ' ';
      term(c, v, f);
      f = false;
    }
    if (f) os << " 0 x0";
    os << ' ' << rel << ' ' << r.rhs << '\n';
  };
  for (const auto& r : lp.eq) emit_row(r, "=");
  for (const auto& r : lp.le) emit_row(r, "<=");
  os << "Bounds\n";
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (std::isinf(lp.upper[j])) {
      os << ' ' << lp.lower[j] << " <= x" << j << '\n';
    } else {
      os << ' ' << lp.lower[j] << " <= x" << j << " <= " << lp.upper[j] << '\n';
    }
  }
  os << "End\n";
}

}  // namespace capalloc::lp
