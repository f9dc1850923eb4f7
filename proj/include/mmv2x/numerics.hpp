#pragma once

#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmv2x/config.hpp"

namespace mmv2x {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;  // estimate, >= 0
  int evaluations = 0;
  bool converged = true;
};

/// Thrown by integrate() when the subdivision budget runs out; carries the
/// best estimate so callers can still report it.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, QuadResult best) : std::runtime_error(what), best_(best) {}
  const QuadResult& best() const { return best_; }

 private:
  QuadResult best_;
};

struct QuadOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;
  double scale = 1.0;  // length scale of the map x = lo + scale*t/(1-t) for infinite hi

  static QuadOptions from(const NumericsPolicy& p) { return {p.quad_rel_tol, p.quad_abs_tol, 2000, 1.0}; }
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (7/15) on [lo, hi]; hi may be +inf. Never throws
/// on non-convergence, check `converged`.
QuadResult try_integrate(const Integrand& f, double lo, double hi, const QuadOptions& opt);

/// As try_integrate, but throws QuadratureError when not converged.
QuadResult integrate(const Integrand& f, double lo, double hi, const QuadOptions& opt);
QuadResult integrate(const Integrand& f, double lo, double hi, const NumericsPolicy& policy);

/// Integrates over consecutive panels [pts[0], pts[1]], ..., the last point
/// may be +inf. The tolerance budget is shared across panels.
QuadResult integrate_panels(const Integrand& f, std::span<const double> pts, const QuadOptions& opt);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

/// Principal branch of Lambert W. Throws std::domain_error for y < -1/e.
double lambert_w0(double y, double tol = 1e-14);

/// W0(exp(log_y)) for arguments whose exponential would overflow.
double lambert_w0_exp(double log_y, double tol = 1e-14);

/// Poisson helpers, stable for large means.
double poisson_pmf(int k, double mu);
/// P(X >= n) for X ~ Poisson(mu); 1 for n <= 0.
double poisson_tail(int n, double mu);

struct SeriesResult {
  double value = 0.0;
  int truncated_at = 0;         // last n included
  double tail_mass_bound = 0.0; // probability mass left unsummed
  bool warning = false;         // tail still above 10x the tolerance at n_max
};

using StepFn = std::function<double(int n, int m)>;

/// Sums term(n,m)*weight(n,m) for n = 1.., m = 0..n-1, stopping at the first n
/// whose accumulated weight leaves less than series_tail_tol of `total_mass`
/// unaccounted for, or at series_max_steps.
SeriesResult sum_steps(const StepFn& term, const StepFn& weight, double total_mass, const NumericsPolicy& policy);

}  // namespace mmv2x
