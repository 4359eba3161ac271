#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "support.hpp"

using namespace osgood;
using Catch::Approx;

namespace {

// Brute-force cube value: minimize the (floor(lambda m)+1)-th largest |f - c| over
// c among all samples and pair midpoints.
double brute_sharp_cube(const std::vector<double>& s, double lambda) {
  const std::size_t m = s.size();
  const auto k = static_cast<std::size_t>(std::floor(lambda * m));
  std::vector<double> cs = s;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) cs.push_back(0.5 * (s[a] + s[b]));
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> dev(m);
  for (double c : cs) {
    for (std::size_t i = 0; i < m; ++i) dev[i] = std::abs(s[i] - c);
    std::nth_element(dev.begin(), dev.begin() + k, dev.end(), std::greater<>());
    best = std::min(best, dev[k]);
  }
  return best;
}

// Enumerates the dyadic cubes (with half shifts below the top) directly and
// applies `value` on each; pointwise max over cubes containing each node.
template <class V>
GridField brute_cube_max(const GridField& f, int min_side, V value) {
  const int n = f.n();
  GridField out(n, f.domain());
  for (int s = n; s >= min_side; s /= 2) {
    const int step = s == n ? n : s / 2;
    for (int y0 = 0; y0 < n; y0 += step)
      for (int x0 = 0; x0 < n; x0 += step) {
        std::vector<double> samples;
        for (int dy = 0; dy < s; ++dy)
          for (int dx = 0; dx < s; ++dx) samples.push_back(f.wrap((x0 + dx) % n, (y0 + dy) % n));
        const double v = value(samples);
        for (int dy = 0; dy < s; ++dy)
          for (int dx = 0; dx < s; ++dx) {
            double& o = out.at((x0 + dx) % n, (y0 + dy) % n);
            o = std::max(o, v);
          }
      }
  }
  return out;
}

GridField half_step(int n) {
  GridField f(n);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n / 2; ++ix) f.at(ix, iy) = 1.0;
  return f;
}

GridField log_power_field(int n, double alpha) {
  examples::ExampleSpec s;
  s.alpha = alpha;
  s.n = n;
  return examples::build_example(s);
}

// int over the unit square of |log|x||^q, in polar coordinates with r = e^{-s}.
double log_moment_oracle(double q) {
  auto inner = [&](double R) {
    // int_0^R |log r|^q r dr = int_{-log R}^inf s^q e^{-2s} ds
    const double a = -std::log(R);
    return quad::integrate_composite([&](double s) { return std::pow(s, q) * std::exp(-2.0 * s); }, a,
                                     a + 80.0 + 4.0 * q, 400);
  };
  const double pi = std::numbers::pi;
  return 8.0 * quad::integrate_composite([&](double th) { return inner(0.5 / std::cos(th)); }, 0.0, pi / 4, 16);
}

}  // namespace

TEST_CASE("grid fields validate their invariants", "[field]") {
  CHECK_THROWS_AS(GridField(12), Error);
  std::vector<double> bad(16, 0.0);
  bad[3] = std::nan("");
  CHECK_THROWS_AS(GridField(4, bad), Error);
  std::vector<double> offset(16, 1.0);
  CHECK_THROWS_AS(GridField(4, offset, Domain::UnitizedTorus, true), Error);
  const GridField f = testing::noise(8, 1);
  CHECK(std::abs(f.remove_mean().mean()) < 1e-15);
  CHECK(f.cell_measure() * f.size() == Approx(1.0));
  CHECK(f.with_domain(Domain::Torus2Pi).total_measure() == Approx(4.0 * std::numbers::pi * std::numbers::pi));
}

TEST_CASE("field io round trips", "[field][io]") {
  const auto dir = std::filesystem::temp_directory_path();
  const GridField f = testing::noise(16, 3, Domain::Torus2Pi);
  io::write_binary(f, (dir / "osgood_f.bin").string());
  io::write_csv(f, (dir / "osgood_f.csv").string());
  const GridField b = io::read_any((dir / "osgood_f.bin").string());
  const GridField c = io::read_any((dir / "osgood_f.csv").string());
  CHECK(b.values().size() == f.values().size());
  CHECK(std::equal(b.values().begin(), b.values().end(), f.values().begin()));
  CHECK(std::equal(c.values().begin(), c.values().end(), f.values().begin()));
  CHECK(b.domain() == Domain::Torus2Pi);
  CHECK(c.domain() == Domain::Torus2Pi);
  CHECK_THROWS_AS(io::read_any((dir / "osgood_missing.bin").string()), Error);
  std::filesystem::remove(dir / "osgood_f.bin");
  std::filesystem::remove(dir / "osgood_f.csv");
}

TEST_CASE("rearrangement examples", "[field][rearrange]") {
  const GridField c = GridField::sample(16, Domain::UnitizedTorus, [](double, double) { return -3.0; });
  const auto pc = rearrange(c);
  for (double t : {0.0, 0.01, 0.5, 0.999}) CHECK(pc.star(t) == 3.0);

  const int n = 32, count = 256;  // m = 1/4
  const auto pi = rearrange(testing::indicator(n, count));
  const double m = 0.25;
  for (double t : geometric_grid(1e-4, 0.99, 50)) {
    CHECK(pi.star(t) == (t < m ? 1.0 : 0.0));
    CHECK(pi.double_star(t) == Approx(std::min(1.0, m / t)).epsilon(1e-13));
  }
}

TEST_CASE("rearrangement of the log-power example tracks the claimed rate", "[field][rearrange]") {
  // Continuum oracle on the unit torus: {log^2(1/|x|) > s} is a disc, so f*(t) = log^2(pi/t)/4 for t < pi/4.
  auto exact = [](double t) { return 0.25 * std::pow(std::log(std::numbers::pi / t), 2.0); };
  const auto prof = rearrange(log_power_field(1024, 1.0));
  for (double t : geometric_grid(1e-4, 1e-1, 30)) CHECK(prof.star(t) == Approx(exact(t)).epsilon(0.02));
  double lo = 1e300, hi = 0.0;
  for (double t : geometric_grid(1e-6, 1e-1, 40)) {
    const double q = exact(t) / std::pow(-std::log(t), 2.0);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  CHECK(hi / lo < 3.0);
}

TEST_CASE("lp norm examples", "[field][lp]") {
  const GridField two = GridField::sample(16, Domain::UnitizedTorus, [](double, double) { return 2.0; });
  CHECK(lp_norm(two, 3.0) == Approx(2.0).epsilon(1e-14));
  CHECK(lp_norm(testing::indicator(32, 256), 2.0) == Approx(0.5).epsilon(1e-14));
  CHECK(lp_norm(two, std::numeric_limits<double>::infinity()) == 2.0);
  CHECK_THROWS_AS(lp_norm(two, 0.5), Error);
}

TEST_CASE("lp norms of the squared log grow like p squared", "[field][lp]") {
  const GridField f = log_power_field(512, 1.0);
  double lo = 1e300, hi = 0.0;
  for (double p : {2.0, 4.0, 8.0, 16.0}) {
    const double oracle = std::pow(log_moment_oracle(2.0 * p), 1.0 / p);
    const double grid = lp_norm(f, p);
    INFO("p = " << p << " grid " << grid << " oracle " << oracle);
    CHECK(grid <= oracle * 1.01);
    CHECK(grid >= 0.5 * oracle);
    lo = std::min(lo, oracle / (p * p));
    hi = std::max(hi, oracle / (p * p));
  }
  // The ratio decreases towards e^{-2} as p grows and is about 0.54 at p = 2.
  CHECK(lo > std::exp(-2.0));
  CHECK(hi / lo < 4.0);
}

TEST_CASE("equimeasurability and profile identities", "[field][rearrange][property]") {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const GridField f = testing::noise(64, seed);
    const auto prof = rearrange(f);
    // Direct long-double sums as the oracle.
    for (double p : {1.0, 2.0, 7.3}) {
      long double s = 0.0L;
      for (double v : f.values()) s += std::pow(static_cast<long double>(std::abs(v)), p);
      const double direct = static_cast<double>(std::pow(s * f.cell_measure(), 1.0L / p));
      CHECK(testing::rel_err(lp_norm(f, p), direct) < 1e-12);
      CHECK(testing::rel_err(prof.norm(p), direct) < 1e-12);
    }
    CHECK(prof.norm(std::numeric_limits<double>::infinity()) == f.max_abs());
    CHECK(testing::rel_err(prof.integral(prof.total_measure()), lp_norm(f, 1.0)) < 1e-12);
    CHECK(std::is_sorted(prof.values().rbegin(), prof.values().rend()));
    CHECK(prof.values().size() * prof.cell_measure() == Approx(f.total_measure()));

    double prev = std::numeric_limits<double>::infinity();
    for (double t : geometric_grid(1e-5, 1.0, 80)) {
      CHECK(prof.double_star(t) >= prof.star(t));
      CHECK(prof.double_star(t) <= prev * (1.0 + 1e-14));
      prev = prof.double_star(t);
    }
  }
}

TEST_CASE("rearrangement is a contraction", "[field][rearrange][property]") {
  for (unsigned seed = 0; seed < 6; ++seed) {
    const GridField f = testing::noise(32, seed), g = testing::noise(32, 100 + seed);
    const GridField h = f + 0.1 * g;
    const double dist = (f - h).max_abs();
    const auto pf = rearrange(f), ph = rearrange(h);
    for (double t : geometric_grid(1e-4, 0.999, 60)) CHECK(std::abs(pf.star(t) - ph.star(t)) <= dist * (1 + 1e-14));
  }
}

TEST_CASE("sharp maximal function examples", "[field][sharp]") {
  const GridField c = GridField::sample(16, Domain::UnitizedTorus, [](double, double) { return 4.0; });
  CHECK(sharp_maximal(c).result.max_abs() == 0.0);
  CHECK_THROWS_AS(sharp_maximal(c, 0.0), Error);
  CHECK_THROWS_AS(sharp_maximal(c, 0.6), Error);

  const GridField step = half_step(16);
  const auto m = sharp_maximal(step, 0.25);
  const GridField oracle = brute_cube_max(step, 4, [](const std::vector<double>& s) { return brute_sharp_cube(s, 0.25); });
  for (std::size_t i = 0; i < oracle.size(); ++i) CHECK(m.result.values()[i] == Approx(oracle.values()[i]).margin(1e-15));
  CHECK(m.result.max() == 0.5);
}

TEST_CASE("sharp maximal function matches brute force on random fields", "[field][sharp]") {
  for (unsigned seed = 0; seed < 3; ++seed) {
    const GridField f = testing::noise(16, seed);
    for (double lambda : {0.1, 0.25, 0.5}) {
      const auto m = sharp_maximal(f, lambda);
      const GridField oracle =
          brute_cube_max(f, 4, [lambda](const std::vector<double>& s) { return brute_sharp_cube(s, lambda); });
      for (std::size_t i = 0; i < oracle.size(); ++i)
        CHECK(m.result.values()[i] == Approx(oracle.values()[i]).epsilon(1e-13));
    }
  }
}

TEST_CASE("fefferman-stein sharp function", "[field][sharp]") {
  const GridField c = GridField::sample(16, Domain::UnitizedTorus, [](double, double) { return -1.0; });
  CHECK(fefferman_stein_sharp(c).max_abs() < 1e-15);
  const GridField step = half_step(16);
  const GridField fs = fefferman_stein_sharp(step);
  const GridField oracle = brute_cube_max(step, 4, [](const std::vector<double>& s) {
    double avg = 0.0;
    for (double v : s) avg += v;
    avg /= s.size();
    double o = 0.0;
    for (double v : s) o += std::abs(v - avg);
    return o / s.size();
  });
  for (std::size_t i = 0; i < oracle.size(); ++i) CHECK(fs.values()[i] == Approx(oracle.values()[i]).margin(1e-15));
  CHECK(dyadic_bmo_norm(step) == Approx(0.5));
}

TEST_CASE("sharp maximal invariants", "[field][sharp][property]") {
  for (unsigned seed = 0; seed < 4; ++seed) {
    const GridField f = testing::noise(32, seed);
    const auto a = sharp_maximal(f, 0.1), b = sharp_maximal(f, 0.4);
    const double osc = f.max() - f.min();
    for (std::size_t i = 0; i < f.size(); ++i) {
      CHECK(a.result.values()[i] >= 0.0);
      CHECK(a.result.values()[i] >= b.result.values()[i]);
      CHECK(a.result.values()[i] <= 0.5 * osc + 1e-15);
      CHECK(a.result.values()[i] <= 2.0 * f.max_abs());
    }
  }
}

TEST_CASE("sharp maximal output is independent of the thread count", "[field][sharp]") {
  const GridField f = testing::noise(64, 9);
  setenv("OSGOOD_THREADS", "1", 1);
  const auto one = sharp_maximal(f).result;
  setenv("OSGOOD_THREADS", "4", 1);
  const auto four = sharp_maximal(f).result;
  unsetenv("OSGOOD_THREADS");
  CHECK(std::equal(one.values().begin(), one.values().end(), four.values().begin()));
}

TEST_CASE("sharp maximal average of the squared log is logarithmic", "[field][sharp]") {
  std::vector<double> cs;
  for (int n : {256, 512}) {
    const auto prof = rearrange(sharp_maximal(log_power_field(n, 1.0), 0.25).result);
    double c = 0.0;
    for (double t : geometric_grid(1e-5, 1e-1, 40)) c = std::max(c, prof.double_star(t) / -std::log(t));
    cs.push_back(c);
  }
  INFO("C(256) = " << cs[0] << ", C(512) = " << cs[1]);
  CHECK(std::abs(cs[1] / cs[0] - 1.0) < 0.1);
}

TEST_CASE("fefferman-stein and sharp maximal rearrangements are comparable", "[field][sharp]") {
  std::vector<GridField> fields;
  for (auto kind : {examples::Kind::BMOPrototype, examples::Kind::YudovichPrototype, examples::Kind::LogPower}) {
    examples::ExampleSpec s;
    s.kind = kind;
    fields.push_back(examples::build_example(s));
  }
  fields.push_back(testing::noise(256, 4));
  fields.push_back(testing::band_limited(256, 5, 6, Domain::UnitizedTorus));
  for (const auto& f : fields) {
    const auto fs = rearrange(fefferman_stein_sharp(f));
    const auto ms = rearrange(sharp_maximal(f, 0.25).result);
    double lo = 1e300, hi = 0.0;
    for (double t : geometric_grid(1e-4, 1e-1, 30)) {
      const double q = fs.star(t) / ms.double_star(t);
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    INFO("band [" << lo << ", " << hi << "]");
    CHECK(lo > 0.1);
    CHECK(hi < 10.0);
  }
}
