#include "malsched/lp.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "malsched/errors.hpp"

namespace malsched {

int LinearProgram::add_column(std::string label, Rat objective) {
  col_labels_.push_back(std::move(label));
  objective_.push_back(std::move(objective));
  return static_cast<int>(objective_.size()) - 1;
}

void LinearProgram::add_row(std::string label, std::vector<std::pair<int, Rat>> coeffs, Rel rel,
                            Rat rhs) {
  for (auto& [c, v] : coeffs)
    if (c < 0 || c >= column_count())
      throw ValidationError("row '" + label + "' references an unknown column");
  rows_.push_back(LpRow{std::move(label), std::move(coeffs), rel, std::move(rhs)});
}

namespace {

enum class ColKind { structural, slack, artificial };

/// Dense exact tableau. Internally everything is a maximization over
/// equality rows with nonnegative right-hand sides.
struct Tableau {
  int m = 0;
  int n = 0;  // total columns
  std::vector<std::vector<Rat>> a;  // m x n
  std::vector<Rat> rhs;             // per row
  std::vector<int> basis;           // per row: basic column
  std::vector<ColKind> kind;        // per column
  std::vector<Rat> cost;            // internal (max-form) phase-2 costs
  std::vector<int> init_col;        // per row: column that started as e_r
  std::vector<bool> negated;        // per original row
  std::vector<bool> inert;          // redundant row, frozen after phase 1

  void pivot(int prow, int pcol) {
    std::vector<Rat>& pr = a[static_cast<size_t>(prow)];
    const Rat piv = pr[static_cast<size_t>(pcol)];
    for (Rat& v : pr) v /= piv;
    rhs[static_cast<size_t>(prow)] /= piv;
    for (int r = 0; r < m; ++r) {
      if (r == prow) continue;
      Rat f = a[static_cast<size_t>(r)][static_cast<size_t>(pcol)];
      if (f.is_zero()) continue;
      std::vector<Rat>& row = a[static_cast<size_t>(r)];
      for (int c = 0; c < n; ++c) {
        if (pr[static_cast<size_t>(c)].is_zero()) continue;
        row[static_cast<size_t>(c)] -= f * pr[static_cast<size_t>(c)];
      }
      rhs[static_cast<size_t>(r)] -= f * rhs[static_cast<size_t>(prow)];
    }
    basis[static_cast<size_t>(prow)] = pcol;
  }

  /// Reduced costs z_j - c_j for a cost vector; basic columns come out 0.
  std::vector<Rat> reduced_costs(const std::vector<Rat>& c) const {
    std::vector<Rat> out(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) out[static_cast<size_t>(j)] = -c[static_cast<size_t>(j)];
    for (int r = 0; r < m; ++r) {
      const Rat& cb = c[static_cast<size_t>(basis[static_cast<size_t>(r)])];
      if (cb.is_zero()) continue;
      for (int j = 0; j < n; ++j) {
        const Rat& v = a[static_cast<size_t>(r)][static_cast<size_t>(j)];
        if (!v.is_zero()) out[static_cast<size_t>(j)] += cb * v;
      }
    }
    return out;
  }

  /// Bland: entering = lowest-index eligible column with negative reduced
  /// cost; leaving = min ratio, ties broken by lowest basic variable index.
  /// No cycling, hence guaranteed termination over exact rationals.
  /// Returns optimal | unbounded.
  LpStatus run(std::vector<Rat> red, bool allow_artificial) {
    while (true) {
      int enter = -1;
      for (int j = 0; j < n; ++j) {
        if (!allow_artificial && kind[static_cast<size_t>(j)] == ColKind::artificial) continue;
        if (red[static_cast<size_t>(j)].sign() < 0) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpStatus::optimal;
      int leave = -1;
      Rat best_ratio;
      for (int r = 0; r < m; ++r) {
        const Rat& arc = a[static_cast<size_t>(r)][static_cast<size_t>(enter)];
        if (arc.sign() <= 0) continue;
        Rat ratio = rhs[static_cast<size_t>(r)] / arc;
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio &&
             basis[static_cast<size_t>(r)] < basis[static_cast<size_t>(leave)])) {
          leave = r;
          best_ratio = ratio;
        }
      }
      if (leave < 0) return LpStatus::unbounded;
      pivot(leave, enter);
      // Update the reduced-cost row with the same elimination step.
      Rat f = red[static_cast<size_t>(enter)];
      if (!f.is_zero()) {
        const std::vector<Rat>& pr = a[static_cast<size_t>(leave)];
        for (int j = 0; j < n; ++j)
          if (!pr[static_cast<size_t>(j)].is_zero())
            red[static_cast<size_t>(j)] -= f * pr[static_cast<size_t>(j)];
      }
    }
  }
};

Rat row_activity(const LpRow& row, const std::vector<Rat>& x) {
  Rat v;
  for (const auto& [c, coef] : row.coeffs) v += coef * x[static_cast<size_t>(c)];
  return v;
}

void verify_outcome(const LinearProgram& lp, const LpOutcome& out) {
  const bool maxing = lp.sense() == Sense::maximize;
  Rat cx;
  int positives = 0;
  for (int j = 0; j < lp.column_count(); ++j) {
    const Rat& xj = out.primal[static_cast<size_t>(j)];
    MALSCHED_REQUIRE(xj.sign() >= 0, "lp: negative primal value");
    if (xj.sign() > 0) ++positives;
    cx += lp.objective()[static_cast<size_t>(j)] * xj;
  }
  MALSCHED_REQUIRE(cx == out.objective, "lp: objective does not match the primal point");
  MALSCHED_REQUIRE(positives <= lp.row_count(), "lp: returned point is not basic");

  Rat yb;
  std::vector<Rat> dual_slack(static_cast<size_t>(lp.column_count()));
  for (int j = 0; j < lp.column_count(); ++j)
    dual_slack[static_cast<size_t>(j)] = -lp.objective()[static_cast<size_t>(j)];
  for (int r = 0; r < lp.row_count(); ++r) {
    const LpRow& row = lp.rows()[static_cast<size_t>(r)];
    const Rat& yr = out.dual[static_cast<size_t>(r)];
    Rat act = row_activity(row, out.primal);
    switch (row.rel) {
      case Rel::le:
        MALSCHED_REQUIRE(act <= row.rhs, "lp: primal violates a <= row");
        MALSCHED_REQUIRE(maxing ? yr.sign() >= 0 : yr.sign() <= 0, "lp: dual sign on <= row");
        break;
      case Rel::ge:
        MALSCHED_REQUIRE(act >= row.rhs, "lp: primal violates a >= row");
        MALSCHED_REQUIRE(maxing ? yr.sign() <= 0 : yr.sign() >= 0, "lp: dual sign on >= row");
        break;
      case Rel::eq:
        MALSCHED_REQUIRE(act == row.rhs, "lp: primal violates an = row");
        break;
    }
    if (act != row.rhs)
      MALSCHED_REQUIRE(yr.is_zero(), "lp: complementary slackness (slack row, nonzero dual)");
    yb += yr * row.rhs;
    for (const auto& [c, coef] : row.coeffs) dual_slack[static_cast<size_t>(c)] += yr * coef;
  }
  MALSCHED_REQUIRE(yb == out.objective, "lp: strong duality fails");
  for (int j = 0; j < lp.column_count(); ++j) {
    const Rat& ds = dual_slack[static_cast<size_t>(j)];  // (A^T y - c)_j
    MALSCHED_REQUIRE(maxing ? ds.sign() >= 0 : ds.sign() <= 0, "lp: dual infeasible column");
    if (out.primal[static_cast<size_t>(j)].sign() > 0)
      MALSCHED_REQUIRE(ds.is_zero(), "lp: complementary slackness (positive column, slack dual)");
  }
}

}  // namespace

LpOutcome solve(const LinearProgram& lp) {
  const bool maxing = lp.sense() == Sense::maximize;
  const int m = lp.row_count();
  const int nstruct = lp.column_count();

  Tableau t;
  t.m = m;
  t.negated.assign(static_cast<size_t>(m), false);
  t.inert.assign(static_cast<size_t>(m), false);
  t.basis.assign(static_cast<size_t>(m), -1);
  t.init_col.assign(static_cast<size_t>(m), -1);
  t.rhs.resize(static_cast<size_t>(m));

  // Internal relation per row after rhs normalization.
  std::vector<Rel> rel(static_cast<size_t>(m));
  for (int r = 0; r < m; ++r) {
    const LpRow& row = lp.rows()[static_cast<size_t>(r)];
    bool neg = row.rhs.sign() < 0;
    t.negated[static_cast<size_t>(r)] = neg;
    t.rhs[static_cast<size_t>(r)] = neg ? -row.rhs : row.rhs;
    Rel rr = row.rel;
    if (neg && rr == Rel::le) rr = Rel::ge;
    else if (neg && rr == Rel::ge) rr = Rel::le;
    rel[static_cast<size_t>(r)] = rr;
  }

  int n = nstruct;
  std::vector<int> slack_of(static_cast<size_t>(m), -1), art_of(static_cast<size_t>(m), -1);
  for (int r = 0; r < m; ++r)
    if (rel[static_cast<size_t>(r)] != Rel::eq) slack_of[static_cast<size_t>(r)] = n++;
  for (int r = 0; r < m; ++r)
    if (rel[static_cast<size_t>(r)] != Rel::le) art_of[static_cast<size_t>(r)] = n++;
  t.n = n;
  t.kind.assign(static_cast<size_t>(n), ColKind::structural);
  t.a.assign(static_cast<size_t>(m), std::vector<Rat>(static_cast<size_t>(n)));
  t.cost.assign(static_cast<size_t>(n), Rat(0));

  for (int j = 0; j < nstruct; ++j)
    t.cost[static_cast<size_t>(j)] =
        maxing ? lp.objective()[static_cast<size_t>(j)] : -lp.objective()[static_cast<size_t>(j)];

  std::vector<Rat> phase1_cost(static_cast<size_t>(n));
  for (int r = 0; r < m; ++r) {
    const LpRow& row = lp.rows()[static_cast<size_t>(r)];
    for (const auto& [c, coef] : row.coeffs)
      t.a[static_cast<size_t>(r)][static_cast<size_t>(c)] =
          t.negated[static_cast<size_t>(r)] ? -coef : coef;
    if (int sc = slack_of[static_cast<size_t>(r)]; sc >= 0) {
      t.kind[static_cast<size_t>(sc)] = ColKind::slack;
      t.a[static_cast<size_t>(r)][static_cast<size_t>(sc)] =
          rel[static_cast<size_t>(r)] == Rel::le ? Rat(1) : Rat(-1);
    }
    if (int ac = art_of[static_cast<size_t>(r)]; ac >= 0) {
      t.kind[static_cast<size_t>(ac)] = ColKind::artificial;
      t.a[static_cast<size_t>(r)][static_cast<size_t>(ac)] = Rat(1);
      phase1_cost[static_cast<size_t>(ac)] = Rat(-1);
      t.basis[static_cast<size_t>(r)] = ac;
      t.init_col[static_cast<size_t>(r)] = ac;
    } else {
      t.basis[static_cast<size_t>(r)] = slack_of[static_cast<size_t>(r)];
      t.init_col[static_cast<size_t>(r)] = slack_of[static_cast<size_t>(r)];
    }
  }

  LpOutcome out;

  // Phase 1: drive the artificial variables to zero.
  bool have_artificials = false;
  for (int r = 0; r < m; ++r)
    if (art_of[static_cast<size_t>(r)] >= 0) have_artificials = true;
  if (have_artificials) {
    LpStatus st = t.run(t.reduced_costs(phase1_cost), true);
    MALSCHED_REQUIRE(st == LpStatus::optimal, "lp: phase 1 cannot be unbounded");
    Rat infeas;
    for (int r = 0; r < m; ++r)
      if (t.kind[static_cast<size_t>(t.basis[static_cast<size_t>(r)])] == ColKind::artificial)
        infeas += t.rhs[static_cast<size_t>(r)];
    if (infeas.sign() > 0) {
      out.status = LpStatus::infeasible;
      return out;
    }
    // Drive basic artificials (all at value zero) out of the basis; a row
    // with no real pivot entry is redundant and stays frozen with its
    // artificial, which no later pivot can touch.
    for (int r = 0; r < m; ++r) {
      if (t.kind[static_cast<size_t>(t.basis[static_cast<size_t>(r)])] != ColKind::artificial)
        continue;
      int pcol = -1;
      for (int j = 0; j < t.n && pcol < 0; ++j)
        if (t.kind[static_cast<size_t>(j)] != ColKind::artificial &&
            !t.a[static_cast<size_t>(r)][static_cast<size_t>(j)].is_zero())
          pcol = j;
      if (pcol >= 0)
        t.pivot(r, pcol);
      else
        t.inert[static_cast<size_t>(r)] = true;
    }
  }

  // Phase 2 with the real objective.
  LpStatus st = t.run(t.reduced_costs(t.cost), false);
  if (st == LpStatus::unbounded) {
    out.status = LpStatus::unbounded;
    return out;
  }

  out.status = LpStatus::optimal;
  out.primal.assign(static_cast<size_t>(nstruct), Rat(0));
  for (int r = 0; r < m; ++r)
    if (t.basis[static_cast<size_t>(r)] < nstruct)
      out.primal[static_cast<size_t>(t.basis[static_cast<size_t>(r)])] =
          t.rhs[static_cast<size_t>(r)];

  Rat internal_obj;
  for (int r = 0; r < m; ++r)
    internal_obj +=
        t.cost[static_cast<size_t>(t.basis[static_cast<size_t>(r)])] * t.rhs[static_cast<size_t>(r)];
  out.objective = maxing ? internal_obj : -internal_obj;

  out.dual.assign(static_cast<size_t>(m), Rat(0));
  for (int r = 0; r < m; ++r) {
    Rat y;
    const int ic = t.init_col[static_cast<size_t>(r)];
    for (int k = 0; k < m; ++k) {
      const Rat& cb = t.cost[static_cast<size_t>(t.basis[static_cast<size_t>(k)])];
      if (cb.is_zero()) continue;
      const Rat& v = t.a[static_cast<size_t>(k)][static_cast<size_t>(ic)];
      if (!v.is_zero()) y += cb * v;
    }
    if (t.negated[static_cast<size_t>(r)]) y = -y;
    if (!maxing) y = -y;
    out.dual[static_cast<size_t>(r)] = y;
  }

  verify_outcome(lp, out);
  return out;
}

namespace {

std::string lp_name(const std::string& label, int index, char fallback) {
  std::string s;
  for (char c : label)
    s += (std::isalnum(static_cast<unsigned char>(c)) != 0) ? c : '_';
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == 'e' || s[0] == 'E')
    s = std::string(1, fallback) + std::to_string(index) + "_" + s;
  return s;
}

mpz_class denominator_lcm(const std::vector<Rat>& vals) {
  mpz_class l = 1;
  for (const Rat& v : vals) {
    mpz_class d = v.raw().get_den();
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), l.get_mpz_t(), d.get_mpz_t());
    l = l / g * d;
  }
  return l;
}

}  // namespace

std::string to_cplex_lp(const LinearProgram& lp) {
  std::ostringstream os;
  std::vector<std::string> cols;
  for (int j = 0; j < lp.column_count(); ++j)
    cols.push_back(lp_name(lp.column_label(j), j, 'x'));

  std::vector<Rat> objvals = lp.objective();
  mpz_class oscale = denominator_lcm(objvals);
  os << "\\ exact model; every row scaled to integers; objective scaled by " << oscale.get_str()
     << "\n";
  os << (lp.sense() == Sense::maximize ? "Maximize" : "Minimize") << "\n obj:";
  Rat os_rat{mpq_class(oscale)};
  for (int j = 0; j < lp.column_count(); ++j) {
    Rat v = objvals[static_cast<size_t>(j)] * os_rat;
    if (v.is_zero()) continue;
    os << (v.sign() >= 0 ? " + " : " - ") << (v.sign() >= 0 ? v : -v).str() << " "
       << cols[static_cast<size_t>(j)];
  }
  os << "\nSubject To\n";
  for (int r = 0; r < lp.row_count(); ++r) {
    const LpRow& row = lp.rows()[static_cast<size_t>(r)];
    std::vector<Rat> vals;
    for (const auto& [c, v] : row.coeffs) vals.push_back(v);
    vals.push_back(row.rhs);
    Rat scale{mpq_class(denominator_lcm(vals))};
    os << " " << lp_name(row.label, r, 'c') << ":";
    for (const auto& [c, v] : row.coeffs) {
      Rat sv = v * scale;
      if (sv.is_zero()) continue;
      os << (sv.sign() >= 0 ? " + " : " - ") << (sv.sign() >= 0 ? sv : -sv).str() << " "
         << cols[static_cast<size_t>(c)];
    }
    const char* relstr = row.rel == Rel::le ? " <= " : (row.rel == Rel::ge ? " >= " : " = ");
    os << relstr << (row.rhs * scale).str() << "\n";
  }
  os << "Bounds\nEnd\n";
  return os.str();
}

}  // namespace malsched
