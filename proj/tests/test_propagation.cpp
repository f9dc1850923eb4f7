#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mmv2x/numerics.hpp"
#include "mmv2x/propagation.hpp"

using namespace mmv2x;

namespace {

ValidatedConfig defaults() { return validate(SystemConfig{}); }

// bisection on the monotone path loss; independent of the Lambert W route
double bisect_inverse(double alpha, double zeta, double y) {
  double lo = 1e-9, hi = 1e9;
  for (int i = 0; i < 400; ++i) {
    const double mid = std::sqrt(lo * hi);
    (path_loss(alpha, zeta, mid) > y ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

}  // namespace

TEST_CASE("los probability") {
  const ValidatedConfig c = defaults();
  CHECK(los_probability(c, Node::Bs, 0.0) == 1.0);
  CHECK(los_probability(c, Node::Bs, 100.0) == doctest::Approx(std::exp(-1.49)).epsilon(1e-14));
  CHECK(los_probability(c, Node::Bs, 100.0) == doctest::Approx(0.2254).epsilon(1e-3));
  CHECK(los_probability(c, Node::Vue, 1e6) == doctest::Approx(0.0));
  for (double r : {0.0, 1.0, 33.3, 500.0, 1e4})
    for (Node n : {Node::Bs, Node::Vue}) CHECK(los_probability(c, n, r) + nlos_probability(c, n, r) == 1.0);
}

TEST_CASE("path loss") {
  CHECK(path_loss(2.0, 0.0, 1.0) == 1.0);
  CHECK(path_loss(2.0, 0.0, 10.0) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(path_loss(4.0, 0.00045, 100.0) == doctest::Approx(std::pow(100.0, -4.0) * std::exp(-0.045)).epsilon(1e-14));
  CHECK(path_loss(4.0, 0.00045, 100.0) == doctest::Approx(9.56e-9).epsilon(1e-3));
  CHECK_THROWS_AS(path_loss(2.0, 0.0, 0.0), std::domain_error);
  double prev = kInf;
  for (double r = 0.5; r < 5000.0; r *= 1.3) {
    const double l = path_loss(4.0, 0.00045, r);
    CHECK(l < prev);
    prev = l;
  }
}

TEST_CASE("inverse path loss") {
  CHECK(inverse_path_loss(2.0, 0.0, 0.01) == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(inverse_path_loss(2.0, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  const double r = inverse_path_loss(2.0, 0.00045, 1e-6);
  CHECK(r == doctest::Approx(bisect_inverse(2.0, 0.00045, 1e-6)).epsilon(1e-12));
  CHECK(r * r * std::exp(0.00045 * r) == doctest::Approx(1e6).epsilon(1e-12));
  CHECK_THROWS_AS(inverse_path_loss(2.0, 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(inverse_path_loss(2.0, 0.0, -1.0), std::domain_error);
}

TEST_CASE("inverse path loss round trip (property)") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> la(-60.0, 5.0), al(1.5, 5.0), ze(0.0, 0.01);
  for (int i = 0; i < 2000; ++i) {
    const double alpha = al(rng), zeta = ze(rng), y = std::exp(la(rng));
    const double r = inverse_path_loss(alpha, zeta, y);
    CHECK(std::abs(path_loss(alpha, zeta, r) - y) / y < 1e-9);
    CHECK(inverse_log_path_loss(alpha, zeta, std::log(y)) == doctest::Approx(r).epsilon(1e-12));
  }
  // ln y far below the double range of y
  const double r = inverse_log_path_loss(4.0, 0.00045, -5000.0);
  CHECK(log_path_loss(4.0, 0.00045, r) == doctest::Approx(-5000.0).epsilon(1e-12));
}

TEST_CASE("gain distribution partition of unity is exact") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> bw(1e-3, 2.0 * std::numbers::pi);
  for (int i = 0; i < 2000; ++i) {
    SystemConfig s;
    s.beamwidth_bs = bw(rng);
    s.beamwidth_vue = bw(rng);
    const ValidatedConfig c = validate(s);
    for (Node n : {Node::Bs, Node::Vue}) {
      const auto g = gain_distribution(c, n);
      double total = 0.0;
      for (const auto& o : g) {
        CHECK(o.prob >= 0.0);
        CHECK(o.gain > 0.0);
        total += o.prob;
      }
      CHECK(total == 1.0);
    }
  }
}

TEST_CASE("gain distribution values") {
  const auto g = gain_distribution(defaults(), Node::Bs);
  CHECK(g[0].prob == doctest::Approx((10.0 / 360.0) * (30.0 / 360.0)).epsilon(1e-12));
  CHECK(g[0].prob == doctest::Approx(2.3148e-3).epsilon(1e-4));
  CHECK(g[0].gain == doctest::Approx(db_to_linear(18.0) * db_to_linear(12.0)));
  CHECK(g[1].gain == doctest::Approx(db_to_linear(18.0) * db_to_linear(-10.0)));
  CHECK(g[2].gain == doctest::Approx(db_to_linear(-2.0) * db_to_linear(12.0)));
  CHECK(g[3].gain == doctest::Approx(db_to_linear(-2.0) * db_to_linear(-10.0)));
  CHECK(g[1].prob == doctest::Approx((10.0 / 360.0) * (1.0 - 30.0 / 360.0)));

  SystemConfig omni;
  omni.beamwidth_bs = omni.beamwidth_vue = 2.0 * std::numbers::pi;
  const auto go = gain_distribution(validate(omni), Node::Bs);
  CHECK(go[0].prob == 1.0);
  CHECK(go[1].prob + go[2].prob + go[3].prob == 0.0);
}

TEST_CASE("received power") {
  SystemConfig s;
  s.ptx_bs = 1.0;
  s.gain_main_bs = 1.0;
  s.gain_main_vue = 1.0;
  s.zeta = 0.0;
  CHECK(received_power(validate(s), Tier::LosBs, 1.0) == doctest::Approx(1.0));
  const ValidatedConfig c = defaults();
  const double expect = std::pow(10.0, 1.8) * 1e-4 * std::exp(-0.045);
  CHECK(received_power(c, Tier::LosBs, 100.0) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(received_power(c, Tier::LosBs, 100.0) == doctest::Approx(6.03e-3).epsilon(2e-3));
  for (Tier t : kTiers) CHECK(received_power(c, t, 10.0) > received_power(c, t, 11.0));
}

TEST_CASE("lambda map") {
  const ValidatedConfig c = defaults();
  for (Tier k : kTiers) CHECK(lambda_map(c, k, k, 37.5) == doctest::Approx(37.5).epsilon(1e-12));

  TierParams k{Tier::LosBs, Node::Bs, true, 2.0, 0.0, 0.0, 1.0, 1.0, 1e-5};
  TierParams i{Tier::NlosBs, Node::Bs, false, 4.0, 0.0, 0.0, 1.0, 1.0, 1e-5};
  CHECK(lambda_map(k, i, 10.0) == doctest::Approx(std::pow(0.01, -0.25)).epsilon(1e-12));
  CHECK(lambda_map(k, i, 10.0) == doctest::Approx(3.1623).epsilon(1e-4));
}

TEST_CASE("equal-power contour and monotone lambda map (property)") {
  const ValidatedConfig c = defaults();
  const auto tp = all_tier_params(c);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> lr(std::log(0.5), std::log(3000.0));
  for (int trial = 0; trial < 500; ++trial) {
    const double r = std::exp(lr(rng));
    for (Tier k : kTiers)
      for (Tier i : kTiers) {
        const double L = lambda_map(c, k, i, r);
        const TierParams& pk = tp[index(k)];
        const TierParams& pi = tp[index(i)];
        const double lhs = path_loss(pi.alpha, pi.zeta, L) * pi.ptx * pi.gain_main;
        const double rhs = path_loss(pk.alpha, pk.zeta, r) * pk.ptx * pk.gain_main;
        CHECK(std::abs(lhs - rhs) <= 1e-9 * rhs);
        CHECK(lambda_map(c, k, i, r * 1.01) > L);
      }
  }
}

TEST_CASE("tier probabilities split each parent process") {
  const auto tp = all_tier_params(defaults());
  for (double r : {0.0, 5.0, 50.0, 500.0}) {
    CHECK(tier_probability(tp[0], r) + tier_probability(tp[1], r) == doctest::Approx(1.0));
    CHECK(tier_probability(tp[2], r) + tier_probability(tp[3], r) == doctest::Approx(1.0));
  }
  CHECK(tp[0].alpha == 2.0);
  CHECK(tp[1].alpha == 4.0);
  CHECK(tp[2].density == doctest::Approx(200e-6));
  CHECK(tp[3].ptx == doctest::Approx(dbm_to_watt(23.0)));
}
