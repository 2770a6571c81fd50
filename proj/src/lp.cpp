#include "sepbody/lp.hpp"

#include <cmath>
#include <limits>

namespace sepbody::lp {

namespace {

constexpr double kCostEps = 1e-11;
constexpr double kPivotEps = 1e-11;
constexpr double kRatioTie = 1e-13;

// Row-major tableau with the objective (reduced cost) row stored last.
// Column `width - 1` holds the right-hand side; the cost row stores -z there.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), width_(cols + 1), data_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * width_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * width_ + c]; }
  double& rhs(std::size_t r) { return data_[r * width_ + width_ - 1]; }
  double& cost(std::size_t c) { return data_[rows_ * width_ + c]; }
  double& cost_rhs() { return data_[rows_ * width_ + width_ - 1]; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return width_ - 1; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    double* prow = &data_[r * width_];
    const double inv = 1.0 / prow[c];
    for (std::size_t j = 0; j < width_; ++j) prow[j] *= inv;
    prow[c] = 1.0;
    for (std::size_t i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      double* row = &data_[i * width_];
      const double f = row[c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) row[j] -= f * prow[j];
      row[c] = 0.0;
    }
    basis_[r] = c;
  }

  // Reset the cost row to c - c_B^T T for the given column costs.
  void load_costs(const std::vector<double>& c) {
    for (std::size_t j = 0; j < cols(); ++j) cost(j) = c[j];
    cost_rhs() = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) data_[rows_ * width_ + j] -= cb * at(i, j);
    }
  }

  void drop_row(std::size_t r) {
    data_.erase(data_.begin() + static_cast<std::ptrdiff_t>(r * width_),
                data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * width_));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --rows_;
  }

 private:
  std::size_t rows_;
  std::size_t width_;
  std::vector<double> data_;
  std::vector<std::size_t> basis_;
};

enum class Outcome { Optimal, Unbounded };

// Maximizes the loaded cost row over columns [0, allowed). Bland's rule:
// lowest-index improving column enters; ties in the ratio test go to the
// lowest-index basic variable.
Outcome run(Tableau& t, std::size_t allowed, std::size_t& pivots) {
  for (;;) {
    std::size_t enter = allowed;
    for (std::size_t j = 0; j < allowed; ++j) {
      if (t.cost(j) > kCostEps) {
        enter = j;
        break;
      }
    }
    if (enter == allowed) return Outcome::Optimal;

    std::size_t leave = t.rows();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.rows(); ++i) {
      const double a = t.at(i, enter);
      if (a <= kPivotEps) continue;
      const double ratio = t.rhs(i) / a;
      if (ratio < best - kRatioTie ||
          (std::abs(ratio - best) <= kRatioTie && t.basis()[i] < t.basis()[leave])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave == t.rows()) return Outcome::Unbounded;
    t.pivot(leave, enter);
    ++pivots;
  }
}

}  // namespace

Problem::Problem(std::size_t rows, std::size_t vars)
    : a(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(vars))),
      b(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows))),
      sense(rows, Sense::LessEqual),
      objective(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vars))),
      free(vars, false) {}

Solution solve(const Problem& p) {
  const std::size_t m = p.rows();
  const std::size_t n = p.vars();

  // Structural columns: one per variable, plus a negative part for free ones.
  std::vector<std::size_t> pos(n), neg(n, SIZE_MAX);
  std::size_t ncols = 0;
  for (std::size_t j = 0; j < n; ++j) {
    pos[j] = ncols++;
    if (p.free[j]) neg[j] = ncols++;
  }
  const std::size_t nstruct = ncols;

  std::vector<double> sign(m, 1.0);
  std::vector<Sense> sense(p.sense);
  for (std::size_t i = 0; i < m; ++i) {
    if (p.b(static_cast<Eigen::Index>(i)) < 0.0) {
      sign[i] = -1.0;
      if (sense[i] == Sense::LessEqual)
        sense[i] = Sense::GreaterEqual;
      else if (sense[i] == Sense::GreaterEqual)
        sense[i] = Sense::LessEqual;
    }
  }
  std::size_t nslack = 0, nart = 0;
  for (auto s : sense) {
    if (s != Sense::Equal) ++nslack;
    if (s != Sense::LessEqual) ++nart;
  }
  const std::size_t art_begin = nstruct + nslack;
  Tableau t(m, art_begin + nart);

  std::size_t slack = nstruct, art = art_begin;
  for (std::size_t i = 0; i < m; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double v = sign[i] * p.a(ii, static_cast<Eigen::Index>(j));
      t.at(i, pos[j]) = v;
      if (neg[j] != SIZE_MAX) t.at(i, neg[j]) = -v;
    }
    t.rhs(i) = sign[i] * p.b(ii);
    switch (sense[i]) {
      case Sense::LessEqual:
        t.at(i, slack) = 1.0;
        t.basis()[i] = slack++;
        break;
      case Sense::GreaterEqual:
        t.at(i, slack++) = -1.0;
        t.at(i, art) = 1.0;
        t.basis()[i] = art++;
        break;
      case Sense::Equal:
        t.at(i, art) = 1.0;
        t.basis()[i] = art++;
        break;
    }
  }

  Solution sol;
  const std::size_t total = art_begin + nart;
  if (nart > 0) {
    std::vector<double> c1(total, 0.0);
    for (std::size_t j = art_begin; j < total; ++j) c1[j] = -1.0;
    t.load_costs(c1);
    run(t, total, sol.pivots);
    const double scale = 1.0 + p.b.cwiseAbs().maxCoeff();
    if (t.cost_rhs() > 1e-9 * scale) {
      sol.status = Status::Infeasible;
      return sol;
    }
    // Drive remaining (zero-level) artificials out of the basis.
    for (std::size_t i = 0; i < t.rows();) {
      if (t.basis()[i] < art_begin) {
        ++i;
        continue;
      }
      std::size_t col = art_begin;
      for (std::size_t j = 0; j < art_begin; ++j) {
        if (std::abs(t.at(i, j)) > 1e-9) {
          col = j;
          break;
        }
      }
      if (col == art_begin) {
        t.drop_row(i);
      } else {
        t.pivot(i, col);
        ++sol.pivots;
        ++i;
      }
    }
  }

  std::vector<double> c2(total, 0.0);
  const double dir = p.maximize ? 1.0 : -1.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double c = dir * p.objective(static_cast<Eigen::Index>(j));
    c2[pos[j]] = c;
    if (neg[j] != SIZE_MAX) c2[neg[j]] = -c;
  }
  t.load_costs(c2);
  if (run(t, art_begin, sol.pivots) == Outcome::Unbounded) {
    sol.status = Status::Unbounded;
    return sol;
  }

  std::vector<double> y(total, 0.0);
  for (std::size_t i = 0; i < t.rows(); ++i) y[t.basis()[i]] = t.rhs(i);
  sol.x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    double v = y[pos[j]];
    if (neg[j] != SIZE_MAX) v -= y[neg[j]];
    sol.x(static_cast<Eigen::Index>(j)) = v;
  }
  sol.value = p.objective.dot(sol.x);
  sol.status = Status::Optimal;
  return sol;
}

}  // namespace sepbody::lp
