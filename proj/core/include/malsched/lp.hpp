#pragma once

#include <string>
#include <utility>
#include <vector>

#include "malsched/rat.hpp"

namespace malsched {

enum class Sense { maximize, minimize };
enum class Rel { le, ge, eq };

struct LpRow {
  std::string label;
  std::vector<std::pair<int, Rat>> coeffs;  // (column, value), columns unique
  Rel rel = Rel::le;
  Rat rhs;
};

/// Explicit LP over nonnegative variables. Rows and columns carry stable
/// labels so callers can map duals back to named constraints one-to-one;
/// there is no presolve.
class LinearProgram {
public:
  explicit LinearProgram(Sense sense) : sense_(sense) {}

  int add_column(std::string label, Rat objective);
  void add_row(std::string label, std::vector<std::pair<int, Rat>> coeffs, Rel rel, Rat rhs);

  Sense sense() const { return sense_; }
  int column_count() const { return static_cast<int>(objective_.size()); }
  int row_count() const { return static_cast<int>(rows_.size()); }
  const std::vector<Rat>& objective() const { return objective_; }
  const std::vector<LpRow>& rows() const { return rows_; }
  const std::string& column_label(int c) const { return col_labels_[static_cast<size_t>(c)]; }

private:
  Sense sense_;
  std::vector<std::string> col_labels_;
  std::vector<Rat> objective_;
  std::vector<LpRow> rows_;
};

enum class LpStatus { optimal, infeasible, unbounded };

/// Result of an exact solve. When optimal, the primal is a vertex of the
/// feasible region (at most row_count positive entries) and the duals satisfy,
/// exactly: strong duality, dual feasibility, and complementary slackness.
///
/// Dual sign convention. For a maximization problem: y_r >= 0 on <= rows,
/// y_r <= 0 on >= rows, free on = rows, and A^T y >= c componentwise.
/// For a minimization problem the signs flip and A^T y <= c. In both cases
/// the dual objective is Σ_r y_r b_r and equals the primal objective.
struct LpOutcome {
  LpStatus status = LpStatus::optimal;
  Rat objective;
  std::vector<Rat> primal;  // per column
  std::vector<Rat> dual;    // per row
};

/// Two-phase primal simplex with Bland's rule over exact rationals.
/// Statuses are reported, never thrown; the exactness invariants above are
/// asserted on every optimal outcome before returning.
LpOutcome solve(const LinearProgram& lp);

/// CPLEX-LP text of the program with every row scaled to integer
/// coefficients (scaling keeps the feasible set unchanged; the objective
/// scale factor is recorded in a leading comment).
std::string to_cplex_lp(const LinearProgram& lp);

}  // namespace malsched
