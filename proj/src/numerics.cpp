#include "mmv2x/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>

namespace mmv2x {

namespace {

// 15-point Kronrod abscissae on [-1,1] (positive half, descending) with the
// embedded 7-point Gauss rule on the odd entries
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();

// a piece of the integration domain, in the variable the rule is applied to
struct Piece {
  double a, b;
  double value, err;
  int map;  // -1: identity, else index of the semi-infinite panel origin
  bool operator<(const Piece& o) const { return err < o.err; }
};

struct Mapped {
  const Integrand& f;
  std::vector<double> origins;
  double scale;

  double eval(double t, int map) const {
    if (map < 0) return f(t);
    // x = lo + scale * t / (1 - t)
    const double u = 1.0 - t;
    if (u <= 0.0) return 0.0;
    const double x = origins[map] + scale * t / u;
    if (!std::isfinite(x)) return 0.0;
    const double y = f(x);
    if (y == 0.0) return 0.0;
    return y * scale / (u * u);
  }
};

void apply_rule(const Mapped& m, Piece& p, int& evals) {
  const double c = 0.5 * (p.a + p.b);
  const double h = 0.5 * (p.b - p.a);
  const double fc = m.eval(c, p.map);
  double k = fc * kWgk[7];
  double g = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = m.eval(c - dx, p.map);
    const double f2 = m.eval(c + dx, p.map);
    k += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) g += kWg[j / 2] * (f1 + f2);
  }
  evals += 15;
  p.value = k * h;
  p.err = std::fabs((k - g) * h);
  if (!std::isfinite(p.value)) {
    p.err = kInf;
  }
}

QuadResult run(const Mapped& m, std::vector<Piece> pieces, const QuadOptions& opt) {
  QuadResult res;
  std::priority_queue<Piece> heap;
  double total = 0.0, err = 0.0;
  for (auto& p : pieces) {
    apply_rule(m, p, res.evaluations);
    total += p.value;
    err += p.err;
    heap.push(p);
  }
  std::vector<Piece> frozen;
  int splits = 0;
  auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::fabs(total)); };

  while (!heap.empty() && err > target()) {
    if (splits >= opt.max_subdivisions) break;
    Piece p = heap.top();
    heap.pop();
    const double mid = 0.5 * (p.a + p.b);
    const double width = p.b - p.a;
    if (width <= 100.0 * kEps * std::max({std::fabs(p.a), std::fabs(p.b), 1e-300}) || mid <= p.a || mid >= p.b) {
      frozen.push_back(p);  // cannot resolve further at double precision
      if (heap.empty()) break;
      continue;
    }
    Piece l{p.a, mid, 0, 0, p.map}, r{mid, p.b, 0, 0, p.map};
    apply_rule(m, l, res.evaluations);
    apply_rule(m, r, res.evaluations);
    ++splits;
    total += l.value + r.value - p.value;
    err += l.err + r.err - p.err;
    heap.push(l);
    heap.push(r);
  }

  // resum from scratch to shed accumulated cancellation
  total = 0.0;
  err = 0.0;
  auto add = [&](const Piece& p) {
    total += p.value;
    err += p.err;
  };
  for (const auto& p : frozen) add(p);
  while (!heap.empty()) {
    add(heap.top());
    heap.pop();
  }
  res.value = total;
  res.abs_error = err;
  res.converged = std::isfinite(total) && err <= std::max(opt.abs_tol, opt.rel_tol * std::fabs(total));
  // frozen pieces at round-off level still count as converged
  if (!res.converged && std::isfinite(total) && err <= 1e3 * kEps * std::fabs(total) + opt.abs_tol)
    res.converged = true;
  return res;
}

}  // namespace

QuadResult integrate_panels(const Integrand& f, std::span<const double> pts, const QuadOptions& opt) {
  if (pts.size() < 2) return {};
  Mapped m{f, {}, opt.scale};
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i], b = pts[i + 1];
    if (std::isnan(a) || std::isnan(b)) throw std::invalid_argument("integrate: NaN limit");
    if (std::isinf(a)) throw std::invalid_argument("integrate: lower limit must be finite");
    if (b < a) throw std::invalid_argument("integrate: limits out of order");
    if (b == a) continue;
    if (std::isinf(b)) {
      if (i + 2 != pts.size()) throw std::invalid_argument("integrate: only the last limit may be infinite");
      m.origins.push_back(a);
      pieces.push_back({0.0, 1.0, 0, 0, static_cast<int>(m.origins.size()) - 1});
    } else {
      pieces.push_back({a, b, 0, 0, -1});
    }
  }
  if (pieces.empty()) return {};
  return run(m, std::move(pieces), opt);
}

QuadResult try_integrate(const Integrand& f, double lo, double hi, const QuadOptions& opt) {
  if (hi < lo) {
    QuadResult r = try_integrate(f, hi, lo, opt);
    r.value = -r.value;
    return r;
  }
  const double pts[2] = {lo, hi};
  return integrate_panels(f, pts, opt);
}

QuadResult integrate(const Integrand& f, double lo, double hi, const QuadOptions& opt) {
  QuadResult r = try_integrate(f, lo, hi, opt);
  if (!r.converged)
    throw QuadratureError("integrate: no convergence within " + std::to_string(opt.max_subdivisions) +
                              " subdivisions (estimate " + std::to_string(r.value) + ", error " +
                              std::to_string(r.abs_error) + ")",
                          r);
  return r;
}

QuadResult integrate(const Integrand& f, double lo, double hi, const NumericsPolicy& policy) {
  return integrate(f, lo, hi, QuadOptions::from(policy));
}

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on P_n
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged root
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return cache.emplace(n, std::move(rule)).first->second;
}

double lambert_w0(double y, double tol) {
  constexpr double kBranch = -0.36787944117144232159552377016146;  // -1/e
  if (std::isnan(y)) return y;
  if (y < kBranch) {
    if (y > kBranch - 4.0 * kEps) return -1.0;
    throw std::domain_error("lambert_w0: argument below -1/e");
  }
  if (y == 0.0) return 0.0;
  if (std::isinf(y)) return y;

  double w;
  if (y < -0.25) {
    const double p = std::sqrt(std::max(0.0, 2.0 * (std::numbers::e * y + 1.0)));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    if (p < 1e-7) return w;
  } else if (y < 3.0) {
    const double l = std::log1p(y);
    w = l * (1.0 - std::log1p(l) / (2.0 + l));
  } else {
    const double l1 = std::log(y);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }
  for (int it = 0; it < 100; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - y;
    const double wp1 = w + 1.0;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double dw = f / denom;
    w -= dw;
    if (std::fabs(dw) <= tol * (1.0 + std::fabs(w))) break;
  }
  return w;
}

double lambert_w0_exp(double log_y, double tol) {
  if (log_y < 500.0) return lambert_w0(std::exp(log_y), tol);
  // w + ln w = log_y
  double w = log_y - std::log(log_y);
  for (int it = 0; it < 100; ++it) {
    const double g = w + std::log(w) - log_y;
    const double dw = g / (1.0 + 1.0 / w);
    w -= dw;
    if (std::fabs(dw) <= tol * w) break;
  }
  return w;
}

double poisson_pmf(int k, double mu) {
  if (k < 0) return 0.0;
  if (mu <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (k == 0) return std::exp(-mu);
  return std::exp(k * std::log(mu) - mu - std::lgamma(k + 1.0));
}

double poisson_tail(int n, double mu) {
  if (n <= 0) return 1.0;
  if (mu <= 0.0) return 0.0;
  if (mu < n) {
    // upward sum, terms decrease monotonically beyond the mode
    double t = poisson_pmf(n, mu);
    double s = t;
    for (int k = n; k < n + 2000 && t > 1e-17 * s; ++k) {
      t *= mu / (k + 1.0);
      s += t;
    }
    return std::min(1.0, s);
  }
  double head = 0.0;
  double t = std::exp(-mu);
  if (t > 0.0) {
    for (int k = 0; k < n; ++k) {
      head += t;
      t *= mu / (k + 1.0);
    }
  } else {
    for (int k = 0; k < n; ++k) head += poisson_pmf(k, mu);
  }
  return std::max(0.0, 1.0 - head);
}

SeriesResult sum_steps(const StepFn& term, const StepFn& weight, double total_mass, const NumericsPolicy& policy) {
  SeriesResult r;
  double acc = 0.0;
  for (int n = 1; n <= policy.series_max_steps; ++n) {
    for (int m = 0; m < n; ++m) {
      const double w = weight(n, m);
      if (w <= 0.0) continue;
      acc += w;
      r.value += w * term(n, m);
    }
    r.truncated_at = n;
    if (total_mass - acc < policy.series_tail_tol) break;
  }
  r.tail_mass_bound = std::max(0.0, total_mass - acc);
  r.warning = r.tail_mass_bound > 10.0 * policy.series_tail_tol;
  return r;
}

}  // namespace mmv2x
