#include "macopt/convex_core.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

namespace macopt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

const char* to_string(SolveStatus status) noexcept {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::Infeasible: return "Infeasible";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// 1-D

ScalarOptimum maximize_concave_1d(const std::function<double(double)>& f, double lo, double hi,
                                  double tol) {
  if (!(lo <= hi)) {
    throw Error(ErrorCode::EmptyInterval,
                "[" + std::to_string(lo) + ", " + std::to_string(hi) + "] is empty");
  }
  ScalarOptimum out;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  long it = 0;
  while (b - a > tol && it < 400) {
    const double width = b - a;
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
    ++it;
    if (!(b - a < width)) break;  // no further shrinkage in floating point
  }
  double x = fc >= fd ? c : d;
  double fx = std::max(fc, fd);
  for (double e : {lo, hi}) {
    const double fe = f(e);
    if (fe > fx) {
      fx = fe;
      x = e;
    }
  }
  out.argmax = x;
  out.value = fx;
  out.report.status = std::isfinite(fx) ? SolveStatus::Optimal : SolveStatus::Infeasible;
  out.report.objective = fx;
  out.report.stationarity_residual = b - a;
  out.report.feasibility_residual = 0.0;
  out.report.iterations = it;
  return out;
}

// ---------------------------------------------------------------------------
// Linear constraint sets

double LinearRow::dot(const Eigen::VectorXd& x) const {
  double s = 0.0;
  for (const auto& [i, a] : coeffs) s += a * x[i];
  return s;
}

LinearConstraintSet::LinearConstraintSet(int dimension)
    : lower_(static_cast<std::size_t>(dimension), -kInf),
      upper_(static_cast<std::size_t>(dimension), kInf) {}

void LinearConstraintSet::set_bounds(int index, double lo, double hi) {
  lower_.at(static_cast<std::size_t>(index)) = lo;
  upper_.at(static_cast<std::size_t>(index)) = hi;
}

void LinearConstraintSet::set_lower(int index, double lo) {
  lower_.at(static_cast<std::size_t>(index)) = lo;
}

void LinearConstraintSet::set_upper(int index, double hi) {
  upper_.at(static_cast<std::size_t>(index)) = hi;
}

int LinearConstraintSet::add_row(std::vector<std::pair<int, double>> coeffs, double bound) {
  for (const auto& [i, a] : coeffs) {
    if (i < 0 || i >= dimension() || !std::isfinite(a)) {
      throw Error(ErrorCode::InvalidParameters, "bad constraint coefficient");
    }
  }
  rows_.push_back(LinearRow{std::move(coeffs), bound});
  return static_cast<int>(rows_.size()) - 1;
}

double LinearConstraintSet::violation(const Eigen::VectorXd& x) const {
  double v = 0.0;
  for (int i = 0; i < dimension(); ++i) {
    v = std::max(v, lower_[i] - x[i]);
    v = std::max(v, x[i] - upper_[i]);
  }
  for (const auto& row : rows_) v = std::max(v, row.dot(x) - row.bound);
  return v;
}

void LinearConstraintSet::validate() const {
  for (int i = 0; i < dimension(); ++i) {
    if (!(lower_[i] <= upper_[i])) {
      throw Error(ErrorCode::InvalidParameters,
                  "lower bound exceeds upper bound for variable " + std::to_string(i));
    }
  }
}

Eigen::VectorXd LinearConstraintSet::project(const Eigen::VectorXd& y, double tol,
                                             int max_sweeps) const {
  const int n = dimension();
  Eigen::VectorXd x = y;
  Eigen::VectorXd box_inc = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::VectorXd> row_inc(rows_.size(), Eigen::VectorXd::Zero(n));
  std::vector<double> row_norm2(rows_.size());
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    double s = 0.0;
    for (const auto& [i, a] : rows_[k].coeffs) s += a * a;
    row_norm2[k] = s;
  }

  Eigen::VectorXd prev(n);
  Eigen::VectorXd z(n);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    prev = x;
    z = x + box_inc;
    for (int i = 0; i < n; ++i) x[i] = std::clamp(z[i], lower_[i], upper_[i]);
    box_inc = z - x;
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      if (row_norm2[k] == 0.0) continue;
      z = x + row_inc[k];
      const double excess = rows_[k].dot(z) - rows_[k].bound;
      x = z;
      if (excess > 0.0) {
        const double scale = excess / row_norm2[k];
        for (const auto& [i, a] : rows_[k].coeffs) x[i] -= scale * a;
      }
      row_inc[k] = z - x;
    }
    if (inf_norm(x - prev) <= tol && violation(x) <= tol) break;
  }
  return x;
}

void LinearConstraintSet::dense_form(Eigen::MatrixXd& a, Eigen::VectorXd& b) const {
  const int n = dimension();
  int m = static_cast<int>(rows_.size());
  for (int i = 0; i < n; ++i) {
    m += std::isfinite(lower_[i]) ? 1 : 0;
    m += std::isfinite(upper_[i]) ? 1 : 0;
  }
  a = Eigen::MatrixXd::Zero(m, n);
  b = Eigen::VectorXd::Zero(m);
  int r = 0;
  for (int i = 0; i < n; ++i) {
    if (std::isfinite(lower_[i])) {
      a(r, i) = -1.0;
      b[r++] = -lower_[i];
    }
    if (std::isfinite(upper_[i])) {
      a(r, i) = 1.0;
      b[r++] = upper_[i];
    }
  }
  for (const auto& row : rows_) {
    for (const auto& [i, c] : row.coeffs) a(r, i) += c;
    b[r++] = row.bound;
  }
}

// ---------------------------------------------------------------------------
// NNLS and KKT residuals

Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iter) {
  const int n = static_cast<int>(a.cols());
  if (max_iter <= 0) max_iter = 3 * n + 30;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (n == 0) return x;
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  const double eps = 1e-14 * std::max(1.0, a.cwiseAbs().maxCoeff() * std::max(1.0, inf_norm(b)));

  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<int> idx;
    for (int j = 0; j < n; ++j)
      if (passive[j]) idx.push_back(j);
    Eigen::MatrixXd ap(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) ap.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
    const Eigen::VectorXd zp = ap.completeOrthogonalDecomposition().solve(b);
    z.setZero();
    for (std::size_t k = 0; k < idx.size(); ++k) z[idx[k]] = zp[static_cast<Eigen::Index>(k)];
  };

  Eigen::VectorXd w = a.transpose() * (b - a * x);
  Eigen::VectorXd z(n);
  for (int outer = 0; outer < max_iter; ++outer) {
    int best = -1;
    double wmax = eps;
    for (int j = 0; j < n; ++j) {
      if (!passive[j] && w[j] > wmax) {
        wmax = w[j];
        best = j;
      }
    }
    if (best < 0) break;
    passive[best] = true;
    for (int inner = 0; inner < 3 * n + 30; ++inner) {
      solve_passive(z);
      bool positive = true;
      for (int j = 0; j < n; ++j)
        if (passive[j] && z[j] <= 0.0) positive = false;
      if (positive) {
        x = z;
        break;
      }
      double alpha = kInf;
      for (int j = 0; j < n; ++j) {
        if (passive[j] && z[j] <= 0.0) alpha = std::min(alpha, x[j] / (x[j] - z[j]));
      }
      x += alpha * (z - x);
      for (int j = 0; j < n; ++j) {
        if (passive[j] && x[j] <= eps) {
          passive[j] = false;
          x[j] = 0.0;
        }
      }
    }
    w = a.transpose() * (b - a * x);
  }
  return x;
}

double nnls_stationarity(const Eigen::VectorXd& gradient, const Eigen::MatrixXd& normals) {
  if (normals.rows() == 0) return inf_norm(gradient);
  const Eigen::MatrixXd at = normals.transpose();
  const Eigen::VectorXd lambda = nnls(at, gradient);
  return inf_norm(gradient - at * lambda);
}

KktResidual kkt_residual(const Eigen::VectorXd& gradient, const LinearConstraintSet& cons,
                         const Eigen::VectorXd& x, double active_tol) {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  cons.dense_form(a, b);
  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < a.rows(); ++j) {
    if (b[j] - a.row(j).dot(x) <= active_tol) active.push_back(j);
  }
  Eigen::MatrixXd normals(static_cast<Eigen::Index>(active.size()), a.cols());
  for (std::size_t k = 0; k < active.size(); ++k) {
    normals.row(static_cast<Eigen::Index>(k)) = a.row(active[k]);
  }
  return {nnls_stationarity(gradient, normals), cons.violation(x)};
}

// ---------------------------------------------------------------------------
// Projected gradient

VectorOptimum maximize_concave_linear(const GradientObjective& f, const LinearConstraintSet& cons,
                                      const Eigen::VectorXd& x0, const SolverOptions& options) {
  cons.validate();
  if (x0.size() != cons.dimension()) {
    throw Error(ErrorCode::InvalidParameters, "start point has the wrong dimension");
  }
  if (!(cons.violation(x0) <= options.feasibility_tolerance) || !all_finite(x0)) {
    throw Error(ErrorCode::InfeasibleStart,
                "start point violates constraints by " + std::to_string(cons.violation(x0)));
  }
  const auto proj = [&](const Eigen::VectorXd& y) {
    return cons.project(y, options.projection_tolerance, options.projection_sweeps);
  };
  const auto eval = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    const double v = f(x, g);
    if (!std::isfinite(v) || !all_finite(g)) {
      throw Error(ErrorCode::NonFiniteObjective, "objective or gradient is not finite");
    }
    return v;
  };

  VectorOptimum out;
  Eigen::VectorXd x = x0;
  Eigen::VectorXd g(x.size()), gt(x.size());
  double fx = eval(x, g);
  double step = 1.0;
  long it = 0;
  double kkt = kInf;
  for (; it < options.max_iter; ++it) {
    Eigen::VectorXd xt;
    double ft = fx;
    bool accepted = false;
    while (step > 1e-20) {
      xt = proj(x + step * g);
      ft = eval(xt, gt);
      if (ft >= fx + options.armijo * g.dot(xt - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    assert(ft >= fx - 1e-12 * std::max(1.0, std::abs(fx)));
    const double mapping = inf_norm(xt - x) / step;
    x = std::move(xt);
    fx = ft;
    g = gt;
    // Capped so that step * g stays finite when g has zero entries.
    step = std::min(2.0 * step, 1e12);
    if (mapping <= 0.1 * options.tolerance) {
      kkt = kkt_residual(g, cons, x).stationarity;
      if (kkt <= options.tolerance) {
        ++it;
        break;
      }
    }
  }
  const KktResidual res = kkt_residual(g, cons, x);
  out.x = x;
  out.report.objective = fx;
  out.report.stationarity_residual = res.stationarity;
  out.report.feasibility_residual = res.feasibility;
  out.report.iterations = it;
  out.report.status = (res.stationarity <= options.tolerance &&
                       res.feasibility <= options.feasibility_tolerance)
                          ? SolveStatus::Optimal
                          : SolveStatus::MaxIterations;
  return out;
}

// ---------------------------------------------------------------------------
// Log-barrier Newton

VectorOptimum maximize_concave_barrier(const SmoothConcave& f, const LinearConstraintSet& cons,
                                       const std::vector<SmoothConcave>& concave_constraints,
                                       const Eigen::VectorXd& x0, const BarrierOptions& options) {
  cons.validate();
  const Eigen::Index n = x0.size();
  if (n != cons.dimension()) {
    throw Error(ErrorCode::InvalidParameters, "start point has the wrong dimension");
  }
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  cons.dense_form(a, b);
  const Eigen::Index m_lin = a.rows();
  const std::size_t m_con = concave_constraints.size();
  const double m = static_cast<double>(m_lin) + static_cast<double>(m_con);

  // Barrier value; -inf outside the strict interior.
  const auto barrier_value = [&](const Eigen::VectorXd& x, double t) {
    const Eigen::VectorXd s = b - a * x;
    if (m_lin > 0 && !(s.minCoeff() > 0.0)) return -kInf;
    double v = t * f(x, nullptr, nullptr);
    if (!std::isfinite(v)) return -kInf;
    v += s.array().log().sum();
    for (const auto& c : concave_constraints) {
      const double cv = c(x, nullptr, nullptr);
      if (!(cv > 0.0)) return -kInf;
      v += std::log(cv);
    }
    return v;
  };

  if (!std::isfinite(barrier_value(x0, options.initial_weight))) {
    throw Error(ErrorCode::InfeasibleStart, "barrier start point is not strictly feasible");
  }

  Eigen::VectorXd x = x0;
  Eigen::VectorXd g(n), cg(n), grad(n), dx(n);
  Eigen::MatrixXd h(n, n), ch(n, n), hess(n, n);
  double t = options.initial_weight;
  long newton = 0;
  const long max_outer = 200;
  for (long outer = 0; outer < max_outer; ++outer) {
    for (int inner = 0; inner < options.max_newton_per_center; ++inner) {
      g.setZero();
      h.setZero();
      f(x, &g, &h);
      const Eigen::VectorXd s = b - a * x;
      const Eigen::VectorXd inv_s = s.cwiseInverse();
      grad = t * g - a.transpose() * inv_s;
      hess = -t * h + a.transpose() * inv_s.cwiseAbs2().asDiagonal() * a;
      for (const auto& c : concave_constraints) {
        cg.setZero();
        ch.setZero();
        const double cv = c(x, &cg, &ch);
        grad += cg / cv;
        hess += cg * cg.transpose() / (cv * cv) - ch / cv;
      }
      ++newton;
      // hess holds the negated Hessian of the barrier objective.
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
      double reg = 0.0;
      const double scale = std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
      while (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
             (ldlt.vectorD().array() <= 0.0).any()) {
        reg = reg == 0.0 ? 1e-14 * scale : reg * 10.0;
        if (reg > scale) break;
        ldlt.compute(hess + reg * Eigen::MatrixXd::Identity(n, n));
      }
      dx = ldlt.solve(grad);
      const double lam2 = grad.dot(dx);
      if (!std::isfinite(lam2) || lam2 / 2.0 < options.newton_tolerance) break;

      double alpha = 1.0;
      if (m_lin > 0) {
        const Eigen::VectorXd ad = a * dx;
        for (Eigen::Index j = 0; j < m_lin; ++j) {
          if (ad[j] > 0.0) alpha = std::min(alpha, 0.99 * s[j] / ad[j]);
        }
      }
      const double phi0 = barrier_value(x, t);
      bool moved = false;
      while (alpha > 1e-16) {
        const Eigen::VectorXd xn = x + alpha * dx;
        const double phin = barrier_value(xn, t);
        if (std::isfinite(phin) && phin >= phi0 + 0.25 * alpha * lam2) {
          x = xn;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }
    if (m == 0.0 || m / t < options.gap_tolerance) break;
    t *= options.weight_growth;
  }

  // Certificate. A constraint counts as active for the NNLS fit when its
  // barrier multiplier 1/(t s) exceeds its slack s, or when s is below
  // sqrt(m / t). The second test catches active constraints with zero
  // multiplier, whose centred slack only shrinks like 1/sqrt(t). The barrier
  // multipliers themselves give a second certificate with gap m / t.
  const double near = std::sqrt(std::max(m, 1.0) / t);
  g.setZero();
  const double fx = f(x, &g, nullptr);
  const Eigen::VectorXd s = b - a * x;
  std::vector<Eigen::VectorXd> normals;
  Eigen::VectorXd fitted = Eigen::VectorXd::Zero(n);
  double feas = 0.0;
  for (Eigen::Index j = 0; j < m_lin; ++j) {
    feas = std::max(feas, -s[j]);
    const double lambda = 1.0 / (t * s[j]);
    fitted += lambda * a.row(j).transpose();
    if (lambda >= s[j] || s[j] <= near) normals.push_back(a.row(j).transpose());
  }
  for (const auto& c : concave_constraints) {
    cg.setZero();
    const double cv = c(x, &cg, nullptr);
    feas = std::max(feas, -cv);
    const double lambda = 1.0 / (t * cv);
    fitted -= lambda * cg;
    if (lambda >= cv || cv <= near) normals.push_back(-cg);
  }
  Eigen::MatrixXd active(static_cast<Eigen::Index>(normals.size()), n);
  for (std::size_t k = 0; k < normals.size(); ++k) {
    active.row(static_cast<Eigen::Index>(k)) = normals[k].transpose();
  }
  const double stat = std::min(nnls_stationarity(g, active), inf_norm(g - fitted));
  VectorOptimum out;
  out.x = x;
  out.report.objective = fx;
  out.report.stationarity_residual = stat;
  out.report.feasibility_residual = feas;
  out.report.iterations = newton;
  out.report.status = (std::isfinite(fx) && stat <= options.kkt_tolerance && feas <= 1e-9)
                          ? SolveStatus::Optimal
                          : SolveStatus::MaxIterations;
  return out;
}

// ---------------------------------------------------------------------------
// Simplex lattice

std::uint64_t simplex_grid_size(int dim, int resolution) {
  std::uint64_t c = 1;
  for (int k = 1; k <= dim; ++k) {
    c = c * static_cast<std::uint64_t>(resolution + k) / static_cast<std::uint64_t>(k);
  }
  return c;
}

void for_each_simplex_point(int dim, double total, int resolution,
                            const std::function<void(const std::vector<double>&)>& visit) {
  if (dim < 1 || resolution < 1) {
    throw Error(ErrorCode::InvalidParameters, "simplex grid needs dim >= 1 and resolution >= 1");
  }
  const double step = total / resolution;
  std::vector<int> k(static_cast<std::size_t>(dim), 0);
  std::vector<double> point(static_cast<std::size_t>(dim), 0.0);
  int sum = 0;
  while (true) {
    for (int i = 0; i < dim; ++i) point[i] = k[i] * step;
    visit(point);
    int i = 0;
    ++k[0];
    ++sum;
    while (sum > resolution) {
      sum -= k[i];
      k[i] = 0;
      if (++i == dim) return;
      ++k[i];
      ++sum;
    }
  }
}

std::vector<std::vector<double>> simplex_grid(int dim, double total, int resolution) {
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(simplex_grid_size(dim, resolution)));
  for_each_simplex_point(dim, total, resolution,
                         [&out](const std::vector<double>& p) { out.push_back(p); });
  return out;
}

}  // namespace macopt
