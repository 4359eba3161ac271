#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "support.hpp"

using namespace osgood;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSide = 2 * kPi;

flow::VelocityProvider shear() {
  return flow::VelocityProvider::analytic([](double, const flow::Vec2& x) { return flow::Vec2{-std::sin(x[1]), 0.0}; },
                                          1.0, kSide);
}

GridField shear_vorticity(int n) {
  return GridField::sample(n, Domain::Torus2Pi, [](double, double y) { return std::cos(y); });
}

}  // namespace

TEST_CASE("zero velocity gives the identity map", "[flow]") {
  const auto v = flow::VelocityProvider::frozen(biot::biot_savart(GridField(32, Domain::Torus2Pi)));
  const auto m = flow::advance_flow(v, 1.0, 32);
  const auto id = flow::FlowMap::identity(32, kSide);
  for (std::size_t i = 0; i < id.positions.size(); ++i) CHECK(m.positions[i] == id.positions[i]);
  CHECK(m.t == 1.0);
  CHECK(m.mean_jacobian() == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("shear characteristics match the closed form", "[flow]") {
  const int n = 128;
  const GridField w = shear_vorticity(n);
  for (auto prov : {shear(), flow::VelocityProvider::frozen(biot::biot_savart(w))}) {
    const auto m = flow::advance_flow(prov, 1.0, n);
    const auto id = flow::FlowMap::identity(n, kSide);
    double err = 0.0;
    for (std::size_t i = 0; i < id.positions.size(); ++i) {
      const auto& x = id.positions[i];
      const flow::Vec2 exact{x[0] - std::sin(x[1]), x[1]};
      err = std::max(err, flow::torus_distance(m.positions[i], exact, kSide));
    }
    CHECK(err < 1e-8);
  }
}

TEST_CASE("flow maps compose", "[flow][property]") {
  const int n = 64;
  const GridField w = testing::band_limited(n, 11, 4);
  const auto prov = flow::VelocityProvider::frozen(biot::biot_savart(w));
  const auto whole = flow::advance_flow(prov, 0.5, n);
  const auto half = flow::advance_flow(prov, 0.25, n);
  const auto twice = flow::advance_flow(prov, 0.25, n, {}, &half);
  CHECK(twice.t == Approx(0.5));
  double err = 0.0;
  for (std::size_t i = 0; i < whole.positions.size(); ++i)
    err = std::max(err, flow::torus_distance(whole.positions[i], twice.positions[i], kSide));
  CHECK(err < 1e-8);
  CHECK(std::abs(whole.mean_jacobian() - 1.0) < 0.02);
}

TEST_CASE("transport of a field along the shear", "[flow]") {
  const int n = 128;
  const double t = 0.5;
  const auto m = flow::advance_flow(shear(), t, n);
  const GridField w0 = GridField::sample(n, Domain::Torus2Pi, [](double x, double) { return std::cos(x); });
  const GridField w = flow::push_forward(w0, m);
  const GridField exact = GridField::sample(n, Domain::Torus2Pi, [&](double x, double y) { return std::cos(x + t * std::sin(y)); });
  double err = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) err = std::max(err, std::abs(w[i] - exact[i]));
  CHECK(err < 1e-6);

  SECTION("distribution is preserved") {
    const GridField r0 = testing::band_limited(n, 2, 4);
    const auto mr = flow::advance_flow(flow::VelocityProvider::frozen(biot::biot_savart(r0)), 0.5, n);
    const GridField r = flow::push_forward(r0, mr);
    std::vector<double> a(r0.values().begin(), r0.values().end()), b(r.values().begin(), r.values().end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double diff = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      diff += std::abs(a[i] - b[i]);
      mass += std::abs(a[i]);
    }
    CHECK(diff / mass < 0.01);
    CHECK(r.max_abs() <= r0.max_abs() * 1.01);
  }
  SECTION("time zero is the identity") {
    const auto z = flow::FlowMap::identity(n, kSide);
    const GridField same = flow::push_forward(w0, z);
    for (std::size_t i = 0; i < w0.size(); ++i) CHECK(same[i] == w0[i]);
  }
}

TEST_CASE("oversized steps are rejected", "[flow]") {
  const auto fast = flow::VelocityProvider::analytic([](double, const flow::Vec2&) { return flow::Vec2{10.0, 0.0}; },
                                                     0.0, kSide);
  flow::Stepper st;
  st.dt_max = 1.0;
  try {
    flow::advance_flow(fast, 2.0, 8, st);
    FAIL("expected StepUnstable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StepUnstable);
  }
  CHECK_THROWS_AS(flow::advance_flow(shear(), 0.0, 8), Error);
}

TEST_CASE("twin flows", "[flow]") {
  SECTION("zero vorticity keeps the offset") {
    const auto tr = flow::twin_flow_experiment(GridField(32, Domain::Torus2Pi), 0.0, 1e-4, 1.0, GrowthFunction::power(1.0));
    for (double d : tr.delta) CHECK(d == Approx(1e-4).epsilon(1e-9));
    CHECK(tr.bound_holds);
  }
  SECTION("shear flow stays below the comparison curve") {
    const auto tr = flow::twin_flow_experiment(shear_vorticity(64), 0.0, 1e-4, 1.0, GrowthFunction::power(1.0));
    CHECK(tr.bound_holds);
    CHECK(tr.constant > 0.0);
    CHECK(tr.t.back() == Approx(1.0));
    // Separation in the shear grows at most linearly: |sin a - sin b| <= |a - b|.
    for (std::size_t i = 0; i < tr.t.size(); ++i) CHECK(tr.delta[i] <= 1e-4 * std::hypot(1.0, tr.t[i]) * (1 + 1e-6));
    for (std::size_t i = 1; i < tr.t.size(); ++i) CHECK(tr.osgood_bound[i] >= tr.osgood_bound[i - 1]);
  }
  SECTION("log singular vorticity over a range of offsets") {
    examples::ExampleSpec s;
    s.kind = examples::Kind::BMOPrototype;
    s.n = 64;
    const GridField w = examples::build_example(s);
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      const auto tr = flow::twin_flow_experiment(w, 0.0, eps, 0.2, GrowthFunction::power(1.0));
      INFO("eps " << eps);
      CHECK(tr.bound_holds);
      CHECK(tr.delta.front() == Approx(eps).epsilon(1e-6));
    }
  }
  SECTION("invalid parameters") {
    CHECK_THROWS_AS(flow::twin_flow_experiment(shear_vorticity(16), 0.0, 0.0, 1.0, GrowthFunction::constant()), Error);
    CHECK_THROWS_AS(flow::twin_flow_experiment(shear_vorticity(16), 0.0, 1e-3, -1.0, GrowthFunction::constant()), Error);
  }
}
