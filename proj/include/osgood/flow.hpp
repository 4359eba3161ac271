#pragma once

// Lagrangian flow maps on the torus, semi-Lagrangian push-forward, and the
// twin-flow separation experiment against the Osgood comparison ODE.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "osgood/biot_savart.hpp"
#include "osgood/csv.hpp"
#include "osgood/field.hpp"
#include "osgood/growth.hpp"
#include "osgood/parallel.hpp"
#include "osgood/spaces.hpp"

namespace osgood::flow {

using Vec2 = std::array<double, 2>;

enum class Interp { Bilinear, Cubic };

/// x wrapped into [-L/2, L/2).
inline double wrap_coord(double x, double side) {
  double y = std::fmod(x + 0.5 * side, side);
  if (y < 0.0) y += side;
  return y - 0.5 * side;
}

/// Signed minimal-image difference a - b.
inline double torus_diff(double a, double b, double side) { return wrap_coord(a - b, side); }

inline double torus_distance(const Vec2& a, const Vec2& b, double side) {
  return std::hypot(torus_diff(a[0], b[0], side), torus_diff(a[1], b[1], side));
}

/// Periodic interpolation of a grid field at a physical point.
inline double interpolate(const GridField& f, double x1, double x2, Interp mode = Interp::Cubic) {
  const double h = f.cell();
  const int n = f.n();
  const double u = (x1 + 0.5 * f.side()) / h, w = (x2 + 0.5 * f.side()) / h;
  const double iu = std::floor(u), iw = std::floor(w);
  const double s = u - iu, r = w - iw;
  const int i = static_cast<int>(iu), j = static_cast<int>(iw);
  auto at = [&](int a, int b) { return f.wrap(((a % n) + n) % n, ((b % n) + n) % n); };
  if (mode == Interp::Bilinear) {
    return (1 - r) * ((1 - s) * at(i, j) + s * at(i + 1, j)) + r * ((1 - s) * at(i, j + 1) + s * at(i + 1, j + 1));
  }
  // Four-point Lagrange weights for nodes -1, 0, 1, 2.
  auto weights = [](double t) {
    return std::array<double, 4>{-t * (t - 1) * (t - 2) / 6.0, (t + 1) * (t - 1) * (t - 2) / 2.0,
                                 -(t + 1) * t * (t - 2) / 2.0, (t + 1) * t * (t - 1) / 6.0};
  };
  const auto wx = weights(s), wy = weights(r);
  double sum = 0.0;
  for (int b = 0; b < 4; ++b) {
    double row = 0.0;
    for (int a = 0; a < 4; ++a) row += wx[a] * at(i - 1 + a, j - 1 + b);
    sum += wy[b] * row;
  }
  return sum;
}

/// Time-dependent velocity v(t, x) with a speed bound used for step selection.
struct VelocityProvider {
  std::function<Vec2(double, const Vec2&)> eval;
  double max_speed = 0.0;
  double side = 2.0 * std::numbers::pi;

  static VelocityProvider frozen(const biot::Velocity& v, Interp mode = Interp::Cubic) {
    VelocityProvider p;
    auto v1 = std::make_shared<GridField>(v.v1);
    auto v2 = std::make_shared<GridField>(v.v2);
    p.eval = [v1, v2, mode](double, const Vec2& x) {
      return Vec2{interpolate(*v1, x[0], x[1], mode), interpolate(*v2, x[0], x[1], mode)};
    };
    double m = 0.0;
    for (std::size_t i = 0; i < v.v1.size(); ++i) m = std::max(m, std::hypot(v.v1[i], v.v2[i]));
    p.max_speed = m;
    p.side = v.v1.side();
    return p;
  }

  static VelocityProvider analytic(std::function<Vec2(double, const Vec2&)> fn, double max_speed, double side) {
    return VelocityProvider{std::move(fn), max_speed, side};
  }

  /// v(t_end - s, x) negated: characteristics traced backward from t_end.
  VelocityProvider reversed(double t_end) const {
    VelocityProvider p = *this;
    p.eval = [f = eval, t_end](double s, const Vec2& x) {
      const Vec2 v = f(t_end - s, x);
      return Vec2{-v[0], -v[1]};
    };
    return p;
  }
};

struct Stepper {
  double dt_max = 0.01;
  double cfl = 0.25;
  Interp interp = Interp::Cubic;
};

struct FlowMap {
  int n = 0;
  double side = 2.0 * std::numbers::pi;
  double t = 0.0;
  std::vector<Vec2> positions;  // wrapped, row-major like GridField
  Stepper stepper;
  VelocityProvider provider;

  static FlowMap identity(int n, double side) {
    FlowMap m;
    m.n = n;
    m.side = side;
    m.positions.resize(static_cast<std::size_t>(n) * n);
    const double h = side / n;
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix)
        m.positions[static_cast<std::size_t>(iy) * n + ix] = {-0.5 * side + ix * h, -0.5 * side + iy * h};
    return m;
  }

  /// Mean finite-difference Jacobian determinant.
  double mean_jacobian() const {
    const double h = side / n;
    double sum = 0.0;
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        auto p = [&](int a, int b) { return positions[static_cast<std::size_t>(((b % n) + n) % n) * n + ((a % n) + n) % n]; };
        const Vec2 xp = p(ix + 1, iy), xm = p(ix - 1, iy), yp = p(ix, iy + 1), ym = p(ix, iy - 1);
        const double a11 = torus_diff(xp[0], xm[0], side) / (2 * h), a21 = torus_diff(xp[1], xm[1], side) / (2 * h);
        const double a12 = torus_diff(yp[0], ym[0], side) / (2 * h), a22 = torus_diff(yp[1], ym[1], side) / (2 * h);
        sum += a11 * a22 - a12 * a21;
      }
    return sum / (static_cast<double>(n) * n);
  }
};

/// dt = min(dt_max, cfl * cell / max|v|), shrunk so that steps tile the interval.
inline int step_count(const VelocityProvider& v, double duration, double cell, const Stepper& st) {
  double dt = st.dt_max;
  if (v.max_speed > 0.0) dt = std::min(dt, st.cfl * cell / v.max_speed);
  return std::max(1, static_cast<int>(std::ceil(duration / dt - 1e-9)));
}

namespace detail {

inline Vec2 rk4(const VelocityProvider& v, double t, double dt, const Vec2& x) {
  auto add = [](const Vec2& a, const Vec2& b, double c) { return Vec2{a[0] + c * b[0], a[1] + c * b[1]}; };
  const Vec2 k1 = v.eval(t, x);
  const Vec2 k2 = v.eval(t + 0.5 * dt, add(x, k1, 0.5 * dt));
  const Vec2 k3 = v.eval(t + 0.5 * dt, add(x, k2, 0.5 * dt));
  const Vec2 k4 = v.eval(t + dt, add(x, k3, dt));
  return {x[0] + dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
          x[1] + dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
}

/// Integrates the points over [t0, t0 + duration] with `steps` equal RK4 steps.
inline void integrate_points(const VelocityProvider& v, std::vector<Vec2>& pts, double t0, double duration, int steps,
                             double side) {
  const double dt = duration / steps;
  parallel_for(pts.size(), [&](std::size_t i) {
    Vec2 x = pts[i];
    for (int s = 0; s < steps; ++s) {
      const Vec2 y = rk4(v, t0 + s * dt, dt, x);
      if (std::hypot(y[0] - x[0], y[1] - x[1]) > 0.5 * side)
        throw Error(ErrorCode::StepUnstable, "displacement per step exceeds half a period");
      x = {wrap_coord(y[0], side), wrap_coord(y[1], side)};
    }
    pts[i] = x;
  });
}

}  // namespace detail

/// Advances `start` (identity when omitted) from start.t to start.t + duration.
inline FlowMap advance_flow(const VelocityProvider& v, double duration, int n, const Stepper& st = {},
                            const FlowMap* start = nullptr) {
  if (!(duration > 0.0)) throw Error(ErrorCode::ConfigError, "t_end must be positive");
  FlowMap m = start ? *start : FlowMap::identity(n, v.side);
  m.stepper = st;
  m.provider = v;
  const int steps = step_count(v, duration, m.side / m.n, st);
  detail::integrate_points(v, m.positions, m.t, duration, steps, m.side);
  m.t += duration;
  return m;
}

/// omega(t, x) = omega0(phi^{-1}(t, x)) by tracing characteristics backward
/// from the grid nodes and interpolating omega0 at their feet.
inline GridField push_forward(const GridField& omega0, const FlowMap& phi) {
  if (phi.t == 0.0) return omega0;
  const VelocityProvider back = phi.provider.reversed(phi.t);
  FlowMap feet = advance_flow(back, phi.t, omega0.n(), phi.stepper);
  GridField out(omega0.n(), omega0.domain());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = interpolate(omega0, feet.positions[i][0], feet.positions[i][1], phi.stepper.interp);
  return out;
}

// ---------------------------------------------------------------------------
// Twin-flow experiment

struct SeparationTrace {
  std::vector<double> t;
  std::vector<double> delta;
  std::vector<double> osgood_bound;
  double epsilon = 0.0;
  double constant = 0.0;    // C in d delta/dt = C ||w|| L(delta)
  double norm_value = 0.0;  // ||w||
  bool bound_holds = false;

  void write_csv(const std::string& path) const {
    CsvWriter w(path);
    w.comment("epsilon=" + std::to_string(epsilon) + " C=" + std::to_string(constant) +
              " norm=" + std::to_string(norm_value));
    w.header({"t", "delta", "osgood_bound"});
    for (std::size_t i = 0; i < t.size(); ++i) w.row({t[i], delta[i], osgood_bound[i]});
  }
};

struct TwinFlowOptions {
  double p0 = 4.0;
  double lambda = 0.25;
  Stepper stepper{};
  int records = 50;
};

/// Two flows of the frozen velocity biot_savart(omega0) started from x and
/// x + (0, epsilon), against the comparison ODE with L(r) = r y_{Theta_1}(1/r).
inline SeparationTrace twin_flow_experiment(const GridField& omega0, double beta, double epsilon, double t_end,
                                            const GrowthFunction& g, const TwinFlowOptions& opt = {}) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::ConfigError, "epsilon must be positive");
  if (!(t_end > 0.0)) throw Error(ErrorCode::ConfigError, "t_end must be positive");
  const GridField w = omega0.mean_removed() ? omega0 : omega0.remove_mean();
  const biot::Velocity v = biot::biot_savart(w, beta);
  const VelocityProvider prov = VelocityProvider::frozen(v, opt.stepper.interp);
  const int n = w.n();
  const double side = w.side(), cell = w.cell();

  // The comparison constant must cover both the grid-scale modulus and the
  // sub-cell Lipschitz regime of the interpolated field.
  biot::EnvelopeOptions eo;
  eo.norm = biot::NormChoice::SharpYudovich;
  eo.p0 = opt.p0;
  eo.lambda = opt.lambda;
  const biot::ModulusEnvelope env = biot::modulus_envelope(w, beta, g, eo);
  const GrowthFunction g1 = theta1(g.with_p0(opt.p0));
  SeparationTrace tr;
  tr.epsilon = epsilon;
  tr.norm_value = env.norm_value;
  if (env.norm_value > 0.0) {
    const double y_cell = yudovich_eval_log(g1, -std::log(cell)).value;
    tr.constant = std::max(env.fitted_C, env.lipschitz / (env.norm_value * y_cell));
  }

  std::vector<Vec2> a = FlowMap::identity(n, side).positions, b = a;
  for (auto& p : b) p[1] = wrap_coord(p[1] + epsilon, side);
  const int steps = step_count(prov, t_end, cell, opt.stepper);
  const double dt = t_end / steps;
  const int every = std::max(1, steps / std::max(1, opt.records));

  auto separation = [&]() {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, torus_distance(a[i], b[i], side));
    return m;
  };
  // log delta' = C ||w|| y(1/delta)
  const double rate = tr.constant * tr.norm_value;
  auto dz = [&](double z) { return rate * yudovich_eval_log(g1, -z).value; };
  double z = std::log(epsilon);

  tr.t.push_back(0.0);
  tr.delta.push_back(separation());
  tr.osgood_bound.push_back(epsilon);
  for (int s = 0; s < steps; ++s) {
    detail::integrate_points(prov, a, s * dt, dt, 1, side);
    detail::integrate_points(prov, b, s * dt, dt, 1, side);
    const double k1 = dz(z), k2 = dz(z + 0.5 * dt * k1), k3 = dz(z + 0.5 * dt * k2), k4 = dz(z + dt * k3);
    z += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    if ((s + 1) % every == 0 || s + 1 == steps) {
      tr.t.push_back((s + 1) * dt);
      tr.delta.push_back(separation());
      tr.osgood_bound.push_back(std::exp(z));
    }
  }
  // Rounding of the perturbed start positions is far below this slack.
  tr.bound_holds = true;
  for (std::size_t i = 0; i < tr.t.size(); ++i)
    if (tr.delta[i] > tr.osgood_bound[i] * (1.0 + 1e-9)) tr.bound_holds = false;
  return tr;
}

}  // namespace osgood::flow
