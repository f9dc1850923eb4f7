#include "mmv2x/montecarlo.hpp"

#include <algorithm>
#include <memory>
#include <cmath>
#include <numbers>
#include <ostream>

#include "mmv2x/coverage.hpp"
#include "mmv2x/propagation.hpp"

namespace mmv2x {

namespace {

constexpr double kPi = std::numbers::pi;

struct Rng {
  std::mt19937_64 eng;
  std::uniform_real_distribution<double> u01{0.0, 1.0};
  double uniform() { return u01(eng); }
  double open_uniform() { return 1.0 - u01(eng); }  // (0, 1]
  double exp1() { return -std::log(open_uniform()); }
  bool bernoulli(double p) { return uniform() < p; }
  long poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    return std::poisson_distribution<long>(mean)(eng);
  }
};

struct Point {
  double r;
  double x, y;      // only filled for empirical load counting
  double log_pl;    // ln path loss to the origin
  double log_rank;  // ln(P_t g_M l(r)), the association metric
  Tier tier;
  bool cached;      // caches the typical V-UE's request (V-UEs only)
};

struct GainTable {
  std::array<double, 4> gain;
  std::array<double, 4> cum;
};

GainTable gain_table(const ValidatedConfig& cfg, Node node) {
  const auto g = gain_distribution(cfg, node);
  GainTable t{};
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    acc += g[i].prob;
    t.gain[i] = g[i].gain;
    t.cum[i] = acc;
  }
  t.cum[3] = 1.0;
  return t;
}

double draw_gain(const GainTable& t, double u) {
  for (int i = 0; i < 3; ++i)
    if (u < t.cum[i]) return t.gain[i];
  return t.gain[3];
}

double cross(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

}  // namespace

std::mt19937_64 drop_engine(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

double wedge_exit_distance(double x, double h, double dir) {
  if (h >= kPi) return kInf;
  const double ux = std::cos(dir), uy = std::sin(dir);
  double best = kInf;
  for (double sgn : {1.0, -1.0}) {
    const double bx = std::cos(h), by = sgn * std::sin(h);
    const double den = cross(ux, uy, bx, by);
    if (den == 0.0) continue;
    const double t = cross(bx, by, x, 0.0) / den;
    const double s = cross(x, 0.0, ux, uy) / cross(bx, by, ux, uy);
    if (t > 0.0 && s >= 0.0) best = std::min(best, t);
  }
  return best;
}

Simulator::Simulator(const ValidatedConfig& cfg, const NumericsPolicy& policy, LoadFn load)
    : cfg_(cfg), policy_(policy), load_(std::move(load)) {
  if (!load_ && cfg_->load_mode == LoadMode::Analytic) {
    auto table = std::make_shared<const CaseTable>(case_probabilities(cfg_, policy_));
    ValidatedConfig c = cfg_;
    NumericsPolicy p = policy_;
    load_ = [table, c, p](Tier k, AssociationState s) { return mmv2x::load(c, *table, k, s, p); };
  }
}

namespace {

// 1 + number of other window V-UEs whose own walk ends at the server.
double empirical_load(const ValidatedConfig& cfg, const std::vector<Point>& pts, std::size_t server,
                      const std::array<TierParams, 4>& tp, Rng& rng) {
  const double p_h = cfg.hit_probability();
  const Point& s = pts[server];
  const bool server_vue = node_of(s.tier) == Node::Vue;
  auto log_power = [&](Node node, double dist, bool los) {
    const TierParams& t = tp[node == Node::Bs ? (los ? 0 : 1) : (los ? 2 : 3)];
    return std::log(t.ptx * t.gain_main) + log_path_loss(t.alpha, t.zeta, dist);
  };
  auto link_los = [&](Node node, double dist) { return rng.bernoulli(los_probability(cfg, node, dist)); };

  int count = 0;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (j == server || node_of(pts[j].tier) != Node::Vue) continue;
    if (rng.bernoulli(p_h)) continue;  // served from its own cache
    if (server_vue && !rng.bernoulli(p_h)) continue;
    const double dsx = s.x - pts[j].x, dsy = s.y - pts[j].y;
    const double ds = std::max(std::hypot(dsx, dsy), 1e-9);
    const Node sn = node_of(s.tier);
    const double target = log_power(sn, ds, link_los(sn, ds));
    bool beaten = false;
    // the typical V-UE at the origin is a candidate too
    {
      const double d0 = std::max(std::hypot(pts[j].x, pts[j].y), 1e-9);
      if (rng.bernoulli(p_h) && log_power(Node::Vue, d0, link_los(Node::Vue, d0)) > target) beaten = true;
    }
    for (std::size_t i = 0; i < pts.size() && !beaten; ++i) {
      if (i == j || i == server) continue;
      const Node in = node_of(pts[i].tier);
      if (in == Node::Vue && !rng.bernoulli(p_h)) continue;
      const double d = std::max(std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y), 1e-9);
      if (log_power(in, d, link_los(in, d)) > target) beaten = true;
    }
    if (!beaten) ++count;
  }
  return 1.0 + count;
}

}  // namespace

DropRecord Simulator::run_drop(std::uint64_t drop, const McOptions& opt) const {
  Rng rng{drop_engine(opt.seed, drop)};
  const SystemConfig& c = cfg_.params();
  DropRecord rec;

  const double p_h = cfg_.hit_probability();
  if (rng.bernoulli(p_h)) {
    rec.kind = CaseKind::Local;
    rec.state = {0, 0};
    rec.sinr = kInf;
    rec.sojourn = true;
    rec.conn_time = c.slot;
    rec.rate = c.local_rate;
    return rec;
  }

  const auto tp = all_tier_params(cfg_);
  const double R = opt.window_radius;
  const double area = kPi * R * R;
  const bool empirical = c.load_mode == LoadMode::Empirical && !opt.walk_only;

  std::vector<Point> pts;
  std::size_t server = 0;
  for (;;) {
    const long nb = rng.poisson(c.lambda_bs * area);
    const long nu = rng.poisson(c.lambda_vue * area);
    pts.clear();
    pts.reserve(static_cast<std::size_t>(nb + nu));
    for (long i = 0; i < nb + nu; ++i) {
      const Node node = i < nb ? Node::Bs : Node::Vue;
      Point p{};
      p.r = R * std::sqrt(rng.open_uniform());
      if (empirical) {
        const double phi = 2.0 * kPi * rng.uniform();
        p.x = p.r * std::cos(phi);
        p.y = p.r * std::sin(phi);
      }
      const bool los = rng.bernoulli(los_probability(cfg_, node, p.r));
      p.tier = node == Node::Bs ? (los ? Tier::LosBs : Tier::NlosBs) : (los ? Tier::LosVue : Tier::NlosVue);
      const TierParams& t = tp[index(p.tier)];
      p.log_pl = log_path_loss(t.alpha, t.zeta, p.r);
      p.log_rank = std::log(t.ptx * t.gain_main) + p.log_pl;
      p.cached = node == Node::Vue && rng.bernoulli(p_h);
      pts.push_back(p);
    }

    // strongest BS ends the walk; only V-UEs ranked above it are contacted
    std::size_t best_bs = pts.size();
    for (long i = 0; i < nb; ++i)
      if (best_bs == pts.size() || pts[i].log_rank > pts[best_bs].log_rank) best_bs = static_cast<std::size_t>(i);
    const double floor = best_bs == pts.size() ? -kInf : pts[best_bs].log_rank;
    std::vector<std::size_t> ahead;
    for (std::size_t i = static_cast<std::size_t>(nb); i < pts.size(); ++i)
      if (pts[i].log_rank > floor) ahead.push_back(i);
    std::sort(ahead.begin(), ahead.end(), [&](std::size_t a, std::size_t b) { return pts[a].log_rank > pts[b].log_rank; });

    int n = 0, m = 0;
    bool found = false;
    for (std::size_t i : ahead) {
      ++n;
      if (pts[i].cached) {
        server = i;
        found = true;
        break;
      }
      if (is_los(pts[i].tier)) ++m;
    }
    if (!found && best_bs != pts.size()) {
      ++n;
      server = best_bs;
      found = true;
    }
    if (found) {
      rec.state = {n, m};
      break;
    }
    ++rec.redraws;
  }

  const Point& sp = pts[server];
  rec.tier = sp.tier;
  rec.kind = case_of(sp.tier);
  rec.distance = sp.r;
  if (opt.walk_only) return rec;

  // SINR
  const GainTable g_bs = gain_table(cfg_, Node::Bs);
  const GainTable g_vue = gain_table(cfg_, Node::Vue);
  const Node snode = node_of(sp.tier);
  const double signal = tp[index(sp.tier)].ptx * aligned_gain(cfg_, snode) * std::exp(sp.log_pl) * rng.exp1();
  double interference = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i == server) continue;
    const Point& p = pts[i];
    const Node node = node_of(p.tier);
    const double gain = draw_gain(node == Node::Bs ? g_bs : g_vue, rng.uniform());
    interference += tp[index(p.tier)].ptx * gain * std::exp(p.log_pl) * rng.exp1();
  }
  rec.sinr = signal / (cfg_.noise_power() + interference);

  // motion relative to the serving beam; the V-UE starts on the bisector
  double travel_speed = c.speed;
  double dir = 0.0;  // direction of relative motion, radians from the bisector
  double h = 0.0;
  if (rec.kind == CaseKind::V2I) {
    h = c.beamwidth_bs / 2.0;
    dir = kPi - 2.0 * kPi * rng.uniform();
  } else {
    h = c.beamwidth_vue / 2.0;
    if (c.v2v_motion == V2vMotion::Paired) {
      const double a = 2.0 * kPi * rng.uniform();
      const double b = 2.0 * kPi * rng.uniform();
      const double wx = std::cos(a) - std::cos(b), wy = std::sin(a) - std::sin(b);
      travel_speed = c.speed * std::hypot(wx, wy);
      dir = std::atan2(wy, wx);
    } else {
      const double theta = kPi * (rng.uniform() + rng.uniform());
      const double beta = kPi * (rng.uniform() - rng.uniform());
      travel_speed = 2.0 * c.speed * std::fabs(std::cos(beta));
      dir = kPi - theta;
    }
  }
  const double travel = travel_speed * c.slot;
  if (travel > 0.0) {
    const double d = wedge_exit_distance(sp.r, h, dir);
    rec.sojourn = d > travel;
    rec.conn_time = rec.sojourn ? c.slot : d / travel_speed;
  } else {
    rec.sojourn = true;
    rec.conn_time = c.slot;
  }

  // rate
  if (c.load_mode == LoadMode::Empirical)
    rec.load = empirical_load(cfg_, pts, server, tp, rng);
  else
    rec.load = load_ ? load_(rec.tier, rec.state) : 1.0;
  rec.rate = c.bandwidth / rec.load * std::log2(1.0 + rec.sinr);
  return rec;
}

std::vector<DropRecord> Simulator::run(const McOptions& opt) const {
  std::vector<DropRecord> out(opt.drops);
  const long count = static_cast<long>(opt.drops);
#pragma omp parallel for schedule(dynamic, 64) if (opt.exec == Exec::Parallel)
  for (long i = 0; i < count; ++i) out[i] = run_drop(static_cast<std::uint64_t>(i), opt);
  return out;
}

std::vector<double> sample_nth_distance(const ValidatedConfig& cfg, Tier k, int n, std::size_t samples,
                                        std::uint64_t seed) {
  const TierParams p = tier_params(cfg, k);
  std::vector<double> out(samples);
  if (!(p.density > 0.0) || n < 1) {
    std::fill(out.begin(), out.end(), kInf);
    return out;
  }
  for (std::size_t i = 0; i < samples; ++i) {
    Rng rng{drop_engine(seed, i)};
    // parent points in increasing distance: pi lambda r_j^2 is a unit-rate Poisson process
    double area = 0.0;
    int kept = 0;
    double r = 0.0;
    while (kept < n) {
      area += rng.exp1();
      r = std::sqrt(area / (kPi * p.density));
      if (rng.bernoulli(tier_probability(p, r))) ++kept;
      // expected LOS count beyond r: 2 pi lambda e^{-ar} (1 + ar) / a^2
      const bool exhausted =
          p.los && p.a > 0.0 && kept < n &&
          2.0 * kPi * p.density * std::exp(-p.a * r) * (1.0 + p.a * r) / (p.a * p.a) < 1e-15;
      if (exhausted || r > 1e9) {
        r = kInf;
        break;
      }
    }
    out[i] = r;
  }
  return out;
}

void write_trace(std::ostream& os, std::span<const DropRecord> records) {
  os << "case tier n m distance sinr sojourn conn_time load rate redraws\n";
  for (const DropRecord& r : records) {
    os << to_string(r.kind) << ' ' << (r.kind == CaseKind::Local ? std::string_view("-") : to_string(r.tier)) << ' '
       << r.state.n << ' ' << r.state.m << ' ' << r.distance << ' ' << r.sinr << ' ' << (r.sojourn ? 1 : 0) << ' '
       << r.conn_time << ' ' << r.load << ' ' << r.rate << ' ' << r.redraws << '\n';
  }
}

}  // namespace mmv2x
