#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "support.hpp"

using namespace osgood;
using Catch::Approx;

namespace {

// Brute-force modulus: every offset in the torus ball of radius t, every node.
double brute_modulus(const GridField& v, double t) {
  const int n = v.n();
  const double r = t / v.cell();
  double best = 0.0;
  for (int dy = -n / 2; dy <= n / 2; ++dy)
    for (int dx = -n / 2; dx <= n / 2; ++dx) {
      if (dx * dx + dy * dy > r * r * (1.0 + 1e-12)) continue;
      for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix)
          best = std::max(best, std::abs(v.wrap(((ix + dx) % n + n) % n, ((iy + dy) % n + n) % n) - v.at(ix, iy)));
    }
  return best;
}

BandSequence random_sequence(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 12), start(-3, 6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BandSequence s;
  const int m = count(rng);
  int j = start(rng);
  for (int i = 0; i < m; ++i) {
    s.j.push_back(j);
    s.norm.push_back(u(rng) < 0.15 ? 0.0 : std::exp(4.0 * u(rng) - 2.0));
    j += 1 + (u(rng) < 0.3);
  }
  return s;
}

// Best cost found by random per-band splittings f_j = a f_j + (1 - a) f_j.
double random_split_search(const BandSequence& s, double s0, double s1, double t, std::mt19937_64& rng,
                           int trials = 2000) {
  std::uniform_real_distribution<double> a(-0.5, 1.5);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < trials; ++k) {
    double cost = 0.0;
    for (std::size_t i = 0; i < s.j.size(); ++i) {
      const double x = k < 2 ? static_cast<double>(k) : a(rng);
      cost += (std::exp2(s.j[i] * s0) * std::abs(x) + t * std::exp2(s.j[i] * s1) * std::abs(1.0 - x)) * s.norm[i];
    }
    best = std::min(best, cost);
  }
  return best;
}

GridField squared_log(int n) {
  examples::ExampleSpec s;
  s.n = n;
  return examples::build_example(s);
}

}  // namespace

TEST_CASE("K for (L^p0, L^inf) on simple fields", "[kfunc]") {
  const auto ts = geometric_grid(1e-4, 10.0, 40);
  const auto chi = k_lp_linf(testing::indicator(32, 256), 1.0, ts);
  CHECK_FALSE(chi.surrogate);
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(chi.k[i] == Approx(std::min(ts[i], 0.25)).epsilon(1e-13));

  const GridField c = GridField::sample(16, Domain::UnitizedTorus, [](double, double) { return 3.0; });
  for (double p0 : {1.0, 2.0, 4.0}) {
    const auto k = k_lp_linf(c, p0, ts);
    for (std::size_t i = 0; i < ts.size(); ++i)
      CHECK(k.k[i] == Approx(3.0 * std::pow(std::min(std::pow(ts[i], p0), 1.0), 1.0 / p0)).epsilon(1e-12));
  }
}

TEST_CASE("K of the squared log matches the radial oracle", "[kfunc]") {
  // f*(s) = log^2(pi/s)/4, so int_0^t f* = t (L^2 + 2L + 2)/4 with L = log(pi/t).
  auto oracle = [](double t) {
    const double L = std::log(std::numbers::pi / t);
    return 0.25 * t * (L * L + 2.0 * L + 2.0);
  };
  const auto ts = geometric_grid(1e-5, 1e-1, 30);
  const auto k = k_lp_linf(squared_log(1024), 1.0, ts);
  double lo = 1e300, hi = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    CHECK(k.k[i] == Approx(oracle(ts[i])).epsilon(0.03));
    const double q = k.k[i] / (ts[i] * std::pow(1.0 - std::log(ts[i]), 2.0));
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  CHECK(hi / lo < 3.0);
}

TEST_CASE("K for (L^1, L^inf) is the running integral of f*", "[kfunc][property]") {
  const GridField f = testing::noise(64, 2);
  const auto prof = rearrange(f);
  const auto ts = default_t_grid();
  const auto k = k_lp_linf(f, 1.0, ts);
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(k.k[i] == prof.integral(std::min(ts[i], 1.0)));
}

TEST_CASE("K for (L^p0, L^inf) is subadditive", "[kfunc][property]") {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const GridField f = testing::noise(32, seed), g = testing::noise(32, 50 + seed);
    for (double p0 : {1.0, 2.0}) {
      const auto kf = k_lp_linf(f, p0), kg = k_lp_linf(g, p0), ks = k_lp_linf(f + g, p0);
      for (std::size_t i = 0; i < ks.t.size(); ++i) CHECK(ks.k[i] <= (kf.k[i] + kg.k[i]) * (1.0 + 1e-13));
    }
  }
}

TEST_CASE("K for (L^p0, BMO) surrogate", "[kfunc][bmo]") {
  const GridField c = GridField::sample(16, Domain::UnitizedTorus, [](double, double) { return 2.0; });
  for (double v : k_lp_bmo(c, 2.0).k) CHECK(v == 0.0);

  GridField step(16);
  for (int iy = 0; iy < 16; ++iy)
    for (int ix = 0; ix < 8; ++ix) step.at(ix, iy) = 1.0;
  const double level = lp_norm(sharp_maximal(step, 0.25).result, 2.0);
  const auto k = k_lp_bmo(step, 2.0, 0.25);
  CHECK(k.surrogate);
  for (std::size_t i = 0; i < k.t.size(); ++i)
    if (k.t[i] >= 1.0) CHECK(k.k[i] == Approx(level).epsilon(1e-13));

  // BMO signature of |log|x||: K(t)/t stays bounded as t shrinks, uniformly in n.
  std::vector<double> sups;
  for (int n : {256, 512}) {
    examples::ExampleSpec s;
    s.kind = examples::Kind::BMOPrototype;
    s.n = n;
    const auto kb = k_lp_bmo(examples::build_example(s), 2.0, 0.25, geometric_grid(1e-3, 1.0, 30));
    double m = 0.0;
    for (std::size_t i = 0; i < kb.t.size(); ++i) m = std::max(m, kb.k[i] / kb.t[i]);
    sups.push_back(m);
  }
  INFO("sup K/t: " << sups[0] << " " << sups[1]);
  CHECK(sups[1] / sups[0] < 1.1);
}

TEST_CASE("grid modulus of continuity", "[kfunc][lip]") {
  const GridField c = GridField::sample(16, Domain::Torus2Pi, [](double, double) { return 1.0; });
  for (double v : k_linf_lip(c).k) CHECK(v == 0.0);

  const GridField saw = GridField::sample(32, Domain::Torus2Pi, [](double x, double) { return x; });
  const auto ts = geometric_grid(saw.cell(), std::numbers::pi, 24);
  const auto ks = k_linf_lip(saw, ts);
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(ks.k[i] == Approx(brute_modulus(saw, ts[i])).margin(1e-13));
  // Before the wrap edge is reached inside the ball, the jump dominates: K = 2 pi - h.
  CHECK(ks.k.front() == Approx(2.0 * std::numbers::pi - saw.cell()).epsilon(1e-12));

  const GridField s = GridField::sample(64, Domain::Torus2Pi, [](double x, double) { return std::sin(x); });
  const auto t2 = geometric_grid(s.cell(), std::numbers::pi, 20);
  const auto k2 = k_linf_lip(s, t2);
  for (std::size_t i = 0; i < t2.size(); ++i) CHECK(k2.k[i] == Approx(brute_modulus(s, t2[i])).margin(1e-12));

  const GridField rnd = testing::band_limited(32, 4);
  const auto t3 = geometric_grid(0.5 * rnd.cell(), 4.0, 16);
  const auto k3 = k_linf_lip(rnd, t3);
  for (std::size_t i = 0; i < t3.size(); ++i) CHECK(k3.k[i] == Approx(brute_modulus(rnd, t3[i])).margin(1e-12));
  CHECK(check_kcurve(k3).nondecreasing);
}

TEST_CASE("sequence K closed forms", "[kfunc][seq]") {
  BandSequence one{{0}, {1.0}};
  for (double t : {0.1, 0.5, 1.0, 3.0}) CHECK(k_seq(one, -1.0, 0.0, t) == Approx(std::min(1.0, t)));
  BandSequence three{{0, 1, 2}, {1.0, 1.0, 1.0}};
  CHECK(k_seq(three, -1.0, 0.0, 0.5) == Approx(1.25).epsilon(1e-15));
  CHECK_THROWS_AS(k_seq(BandSequence{}, -1.0, 0.0, 1.0), Error);
  CHECK_THROWS_AS(k_seq(one, 0.0, 0.0, 1.0), Error);
  // Both parametrizations agree: s0 = beta - kappa, s1 = beta.
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    const BandSequence s = random_sequence(rng);
    for (double t : {1e-3, 0.2, 7.0})
      CHECK(k_seq_kappa(s, 0.3, 0.7, t) == Approx(k_seq(s, 0.3 - 0.7, 0.3, t)).epsilon(1e-13));
  }
}

TEST_CASE("sequence K is never beaten by random splittings", "[kfunc][seq][property]") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const BandSequence s = random_sequence(rng);
    for (double t : {1e-3, 0.1, 1.0, 10.0}) {
      const double closed = k_seq(s, -0.5, 0.5, t);
      const double search = random_split_search(s, -0.5, 0.5, t, rng, 300);
      CHECK(search >= closed - 1e-12 * std::max(1.0, closed));
    }
  }
}

TEST_CASE("interpolation sums are comparable to the Besov sum uniformly in theta", "[kfunc][seq]") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const BandSequence s = random_sequence(rng);
    double total = 0.0;
    for (double v : s.norm) total += v;
    if (total == 0.0) continue;
    double lo = 1e300, hi = 0.0;
    for (int i = 1; i <= 9; ++i) {
      const double theta = 0.1 * i, s0 = -1.0, s1 = 0.5;
      const double mid = (1.0 - theta) * s0 + theta * s1;
      double besov = 0.0;
      for (std::size_t b = 0; b < s.j.size(); ++b) besov += std::exp2(s.j[b] * mid) * s.norm[b];
      const double q = theta_interpolation_sum(s, s0, s1, theta) / besov;
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    CHECK(hi / lo <= 2.0);
  }
}

TEST_CASE("K curves satisfy monotonicity and concavity", "[kfunc][property]") {
  const GridField f = testing::noise(64, 8);
  for (const auto& c : {k_lp_linf(f, 1.0), k_lp_linf(f, 2.0), k_lp_bmo(f, 1.0), k_lp_bmo(f, 3.0),
                        k_seq_curve(BandSequence{{0, 2, 3}, {1.0, 0.5, 2.0}}, -1.0, 0.0)}) {
    const auto chk = check_kcurve(c, 1e-12);
    INFO(c.describe());
    CHECK(chk.nondecreasing);
    CHECK(chk.slope_nonincreasing);
    CHECK(chk.concave);
  }
}

TEST_CASE("extrapolation sup", "[kfunc][extrapolation]") {
  KCurve zero;
  zero.t = {0.1, 1.0};
  zero.k = {0.0, 0.0};
  CHECK(extrapolation_sup(zero, GrowthFunction::constant(), 1.0) == 0.0);

  // Constant growth: comparable to ||f||_p0 + ||f||_inf.
  for (unsigned seed = 0; seed < 4; ++seed) {
    const GridField f = seed % 2 ? testing::noise(64, seed) : testing::indicator(64, 100 + 300 * seed);
    for (double p0 : {1.0, 2.0}) {
      const double e = extrapolation_sup(k_lp_linf(f, p0), GrowthFunction::constant(1.0, p0), p0);
      const double ref = lp_norm(f, p0) + f.max_abs();
      CHECK(e / ref > 0.25);
      CHECK(e / ref < 4.0);
    }
  }

  std::vector<double> quad, lin;
  // Small-t window [one cell, 1e-2]: the plateau at t >= 1 is the same for both growths.
  for (int n : {128, 256, 512}) {
    const auto k = k_lp_linf(squared_log(n), 1.0, geometric_grid(1.0 / (n * n), 1e-2, 40));
    quad.push_back(extrapolation_sup(k, GrowthFunction::power(2.0), 1.0));
    lin.push_back(extrapolation_sup(k, GrowthFunction::power(1.0), 1.0));
  }
  INFO("p^2: " << quad[0] << " " << quad[1] << " " << quad[2] << "  p: " << lin[0] << " " << lin[1] << " " << lin[2]);
  CHECK(std::abs(quad[2] / quad[1] - 1.0) < 0.05);
  CHECK(lin[1] > 1.05 * lin[0]);
  CHECK(lin[2] > 1.05 * lin[1]);
}

TEST_CASE("K curves serialize to csv", "[kfunc][io]") {
  const auto path = std::filesystem::temp_directory_path() / "osgood_kcurve.csv";
  k_lp_linf(testing::indicator(8, 16), 1.0, {0.1, 1.0}).write_csv(path.string());
  std::ifstream in(path);
  std::string comment, header, row;
  std::getline(in, comment);
  std::getline(in, header);
  std::getline(in, row);
  CHECK(comment.find("pair=Lp_Linf") != std::string::npos);
  CHECK(header == "t,K,K/t");
  CHECK(row.rfind("0.10000000000000001,", 0) == 0);
  std::filesystem::remove(path);
}
