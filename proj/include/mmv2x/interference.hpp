#pragma once

#include <array>
#include <memory>
#include <vector>

#include "mmv2x/config.hpp"
#include "mmv2x/numerics.hpp"
#include "mmv2x/propagation.hpp"

namespace mmv2x {

/// W_k(eta) = int_0^inf r P_k(r) / (1 + eta^-1 / l_k(r)) dr by adaptive
/// quadrature. Throws std::domain_error when the integral diverges
/// (unattenuated all-NLOS tail with alpha <= 2).
double w_integral(const TierParams& p, double eta, const QuadOptions& opt = {});

/// Same integrand restricted to [lo, hi].
double w_integral(const TierParams& p, double eta, double lo, double hi, const QuadOptions& opt = {});

/// eta dW/deta, same quadrature layout.
double w_integral_slope(const TierParams& p, double eta, const QuadOptions& opt = {});

/// ln W_k tabulated on a uniform ln(eta) grid with cubic Hermite
/// interpolation; linear in log-log outside the grid.
class WTable {
 public:
  static constexpr double kLo = -130.0;
  static constexpr double kHi = 130.0;
  static constexpr double kStep = 0.1;

  explicit WTable(const TierParams& p);
  double log_w(double log_eta) const;
  double operator()(double eta) const { return eta > 0.0 ? std::exp(log_w(std::log(eta))) : 0.0; }

 private:
  std::vector<double> y_;  // ln W
  std::vector<double> d_;  // d ln W / d ln eta
};

/// Shared table for the (alpha, zeta, a, los) combination of a tier; built
/// once per process.
std::shared_ptr<const WTable> w_table(const TierParams& p);

/// Laplace functional of the aggregate interference seen by the typical V-UE.
class InterferenceField {
 public:
  explicit InterferenceField(const ValidatedConfig& cfg);

  /// ln L_I(s); s >= 0.
  double log_laplace(double s) const;
  double laplace(double s) const { return std::exp(log_laplace(s)); }

  /// Laplace functional given the association outcome: tier i is empty
  /// inside radius[i] except for the V-UEs the walk skipped, each placed
  /// independently with density ~ r P_i(r). ln L = log_outside +
  /// m log_inside_los_vue + (n-1-m) log_inside_nlos_vue.
  struct Conditioned {
    double log_outside = 0.0;
    double log_inside_los_vue = 0.0;
    double log_inside_nlos_vue = 0.0;
  };
  Conditioned conditioned(double s, const std::array<double, 4>& radius, const QuadOptions& opt = {}) const;

  /// Same functional from fresh adaptive quadratures (reference route).
  double laplace_direct(double s, const QuadOptions& opt = {}) const;

 private:
  struct TierTerm {
    TierParams params;
    std::array<GainOutcome, 4> gains;
    std::shared_ptr<const WTable> table;
  };
  std::array<TierTerm, 4> terms_;
};

}  // namespace mmv2x
