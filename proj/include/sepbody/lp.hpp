#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

/// Dense two-phase tableau simplex with Bland's anti-cycling rule, for the
/// small programs that arise here (a few hundred rows, a handful of free
/// variables plus one slack-like variable per atom).
namespace sepbody::lp {

enum class Sense { LessEqual, Equal, GreaterEqual };
enum class Status { Optimal, Infeasible, Unbounded };

struct Problem {
  /// Coefficient matrix, one row per constraint.
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  std::vector<Sense> sense;
  Eigen::VectorXd objective;
  bool maximize = true;
  /// Per variable: true if unrestricted in sign, false if x_j >= 0.
  std::vector<bool> free;

  Problem(std::size_t rows, std::size_t vars);
  std::size_t rows() const { return static_cast<std::size_t>(a.rows()); }
  std::size_t vars() const { return static_cast<std::size_t>(a.cols()); }
};

struct Solution {
  Status status = Status::Infeasible;
  double value = 0.0;
  Eigen::VectorXd x;
  std::size_t pivots = 0;
};

Solution solve(const Problem& problem);

}  // namespace sepbody::lp
