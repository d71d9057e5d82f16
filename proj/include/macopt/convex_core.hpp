#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "macopt/errors.hpp"

namespace macopt {

enum class SolveStatus { Optimal, MaxIterations, Infeasible };

const char* to_string(SolveStatus status) noexcept;

struct SolveReport {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;
  double stationarity_residual = std::numeric_limits<double>::infinity();
  double feasibility_residual = std::numeric_limits<double>::infinity();
  long iterations = 0;
};

/// Thrown when a solve ends without an Optimal status. Carries the report.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& message, SolveReport report)
      : Error(ErrorCode::SolverFailure, message), report_(report) {}
  const SolveReport& report() const noexcept { return report_; }

 private:
  SolveReport report_;
};

struct ScalarOptimum {
  double argmax = 0.0;
  double value = 0.0;
  SolveReport report;
};

/// Golden-section search for the maximum of a concave f on [lo, hi].
/// Both endpoints are kept as candidates. Throws EmptyInterval if lo > hi.
ScalarOptimum maximize_concave_1d(const std::function<double(double)>& f, double lo, double hi,
                                  double tol);

/// Sparse row of a.x <= bound.
struct LinearRow {
  std::vector<std::pair<int, double>> coeffs;
  double bound = 0.0;

  double dot(const Eigen::VectorXd& x) const;
};

/// Box bounds plus half-space rows a.x <= b.
class LinearConstraintSet {
 public:
  explicit LinearConstraintSet(int dimension);

  int dimension() const noexcept { return static_cast<int>(lower_.size()); }

  void set_bounds(int index, double lo, double hi);
  void set_lower(int index, double lo);
  void set_upper(int index, double hi);
  /// Adds sum(coeff * x[index]) <= bound and returns the row index.
  int add_row(std::vector<std::pair<int, double>> coeffs, double bound);

  const std::vector<double>& lower() const noexcept { return lower_; }
  const std::vector<double>& upper() const noexcept { return upper_; }
  const std::vector<LinearRow>& rows() const noexcept { return rows_; }

  /// Largest violation over bounds and rows; 0 when feasible.
  double violation(const Eigen::VectorXd& x) const;

  /// Throws InvalidParameters when a lower bound exceeds its upper bound.
  void validate() const;

  /// Euclidean projection by cyclic Dykstra sweeps over the box and each row.
  Eigen::VectorXd project(const Eigen::VectorXd& y, double tol = 1e-10,
                          int max_sweeps = 10000) const;

  /// Dense matrix of all inequality normals (finite bounds first, then rows)
  /// in the form A x <= b.
  void dense_form(Eigen::MatrixXd& a, Eigen::VectorXd& b) const;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<LinearRow> rows_;
};

struct SolverOptions {
  double tolerance = 1e-6;
  double feasibility_tolerance = 1e-9;
  long max_iter = 100000;
  double armijo = 1e-4;
  double projection_tolerance = 1e-10;
  int projection_sweeps = 10000;
};

struct VectorOptimum {
  Eigen::VectorXd x;
  SolveReport report;
};

/// Objective value at x; writes the gradient into grad (already sized).
using GradientObjective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

/// Projected-gradient ascent with Armijo backtracking along the projection arc.
/// Throws InfeasibleStart if x0 violates cons and NonFiniteObjective on
/// non-finite evaluations at feasible points.
VectorOptimum maximize_concave_linear(const GradientObjective& f, const LinearConstraintSet& cons,
                                      const Eigen::VectorXd& x0,
                                      const SolverOptions& options = {});

struct KktResidual {
  double stationarity = 0.0;
  double feasibility = 0.0;
};

/// Stationarity is the max-norm residual of a nonnegative least-squares fit
/// of the gradient by normals of constraints active within active_tol.
KktResidual kkt_residual(const Eigen::VectorXd& gradient, const LinearConstraintSet& cons,
                         const Eigen::VectorXd& x, double active_tol = 1e-7);

/// Same, with the active set given by index into dense_form() rows.
double nnls_stationarity(const Eigen::VectorXd& gradient, const Eigen::MatrixXd& normals);

/// Lawson-Hanson nonnegative least squares: argmin |A x - b| with x >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iter = 0);

/// Smooth concave function with optional gradient and Hessian output.
/// Returns -inf (or NaN) outside its domain.
using SmoothConcave =
    std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad, Eigen::MatrixXd* hess)>;

struct BarrierOptions {
  double gap_tolerance = 1e-10;
  double initial_weight = 1.0;
  double weight_growth = 10.0;
  double newton_tolerance = 1e-12;
  int max_newton_per_center = 200;
  double kkt_tolerance = 1e-6;
};

/// Log-barrier Newton method for max f(x) subject to the linear set and
/// c_j(x) >= 0 for concave c_j. x0 must be strictly feasible.
/// The report's stationarity residual is the NNLS KKT residual at the result.
VectorOptimum maximize_concave_barrier(const SmoothConcave& f, const LinearConstraintSet& cons,
                                       const std::vector<SmoothConcave>& concave_constraints,
                                       const Eigen::VectorXd& x0,
                                       const BarrierOptions& options = {});

/// Number of lattice points of simplex_grid: C(resolution + dim, dim).
std::uint64_t simplex_grid_size(int dim, int resolution);

/// Visits every vector with entries in {0, step, 2 step, ...} summing to at
/// most total, step = total / resolution. The first coordinate varies fastest.
void for_each_simplex_point(int dim, double total, int resolution,
                            const std::function<void(const std::vector<double>&)>& visit);

std::vector<std::vector<double>> simplex_grid(int dim, double total, int resolution);

}  // namespace macopt
