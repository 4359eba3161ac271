#pragma once

// Radial example vorticities with a logarithmic singularity at the origin.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "osgood/error.hpp"
#include "osgood/field.hpp"
#include "osgood/growth.hpp"
#include "osgood/spaces.hpp"
#include "osgood/spectral.hpp"

namespace osgood::examples {

enum class Kind { LogPower, LogLogProduct, BMOPrototype, YudovichPrototype };

inline std::string to_string(Kind k) {
  switch (k) {
    case Kind::LogPower: return "logpower";
    case Kind::LogLogProduct: return "loglog";
    case Kind::BMOPrototype: return "bmo";
    case Kind::YudovichPrototype: return "yudovich";
  }
  return "unknown";
}

inline Kind kind_from_string(const std::string& s) {
  if (s == "logpower") return Kind::LogPower;
  if (s == "loglog" || s == "loglogproduct") return Kind::LogLogProduct;
  if (s == "bmo" || s == "bmoprototype") return Kind::BMOPrototype;
  if (s == "yudovich" || s == "yudovichprototype") return Kind::YudovichPrototype;
  throw Error(ErrorCode::ConfigError, "unknown example kind " + s);
}

struct ExampleSpec {
  Kind kind = Kind::LogPower;
  double alpha = 1.0;  // LogPower exponent: |log|x||^{alpha + 1}
  int n = 256;
  bool centered = true;  // singularity at the origin node; otherwise at a cell corner
  bool mean_removed = false;
  Domain domain = Domain::UnitizedTorus;
};

/// Radial profile as a function of radius rho > 0.
inline double profile(const ExampleSpec& s, double rho) {
  const double l = std::abs(std::log(rho));
  switch (s.kind) {
    case Kind::LogPower: return std::pow(l, s.alpha + 1.0);
    case Kind::LogLogProduct: return (1.0 + l) * std::log1p(l);
    case Kind::BMOPrototype: return l;
    case Kind::YudovichPrototype: return std::log1p(l);
  }
  return 0.0;
}

/// Samples the profile on the centered fundamental domain; the origin node is
/// evaluated at radius half a cell.
inline GridField build_example(const ExampleSpec& s) {
  if (s.kind == Kind::LogPower && !(s.alpha > -1.0))
    throw Error(ErrorCode::ConfigError, "LogPower needs alpha > -1");
  GridField f(s.n, s.domain);
  const double h = f.cell();
  const double shift = s.centered ? 0.0 : 0.5 * h;
  for (int iy = 0; iy < s.n; ++iy)
    for (int ix = 0; ix < s.n; ++ix) {
      const double x = f.coord(ix) + shift, y = f.coord(iy) + shift;
      const double rho = std::max(std::hypot(x, y), 0.5 * h);
      f.at(ix, iy) = profile(s, rho);
    }
  return s.mean_removed ? f.remove_mean() : f;
}

// ---------------------------------------------------------------------------
// Asymptotics of rearrangements

enum class Quantity { f_star, grad_star, sharp_star, sharp_measured };

inline std::string to_string(Quantity q) {
  switch (q) {
    case Quantity::f_star: return "f_star";
    case Quantity::grad_star: return "grad_star";
    case Quantity::sharp_star: return "sharp_star";
    case Quantity::sharp_measured: return "sharp_measured";
  }
  return "unknown";
}

struct Window {
  double t_lo = 1e-4;
  double t_hi = 1e-1;
  int samples = 64;
};

struct AsymptoticsVerdict {
  Quantity quantity = Quantity::f_star;
  std::string claimed;  // human-readable reference map
  double band_min = 0.0, band_max = 0.0;
  double width = 0.0;   // band_max / band_min
  bool pass = false;
  std::vector<double> t, ratio;
};

struct AsymptoticsOptions {
  double max_width = 3.0;
  double r0 = 4.0;       // r = 2 r0 / (2 + r0)
  double lambda = 0.25;  // for the measured sharp-function row
  bool include_measured_sharp = false;
};

struct Claim {
  std::string label;
  std::function<double(double)> map;
};

/// Reference maps for f*, |grad f|* and the sharp-function bound.
inline std::array<Claim, 3> claims(const ExampleSpec& s) {
  auto L = [](double t) { return -std::log(t); };
  switch (s.kind) {
    case Kind::LogPower:
    case Kind::BMOPrototype: {
      const double a = s.kind == Kind::BMOPrototype ? 0.0 : s.alpha;
      return {Claim{"(-log t)^(a+1)", [=](double t) { return std::pow(L(t), a + 1.0); }},
              Claim{"t^(-1/2) (-log t)^a", [=](double t) { return std::pow(t, -0.5) * std::pow(L(t), a); }},
              Claim{"(-log t)^a", [=](double t) { return std::pow(L(t), a); }}};
    }
    case Kind::LogLogProduct:
      return {Claim{"(1-log t) log(1-log t)", [=](double t) { return (1.0 + L(t)) * std::log1p(L(t)); }},
              Claim{"t^(-1/2) (1+log(1-log t))", [=](double t) { return std::pow(t, -0.5) * (1.0 + std::log1p(L(t))); }},
              Claim{"log(1-log t)", [=](double t) { return std::log1p(L(t)); }}};
    case Kind::YudovichPrototype:
      return {Claim{"log(1-log t)", [=](double t) { return std::log1p(L(t)); }},
              Claim{"t^(-1/2) / (1-log t)", [=](double t) { return std::pow(t, -0.5) / (1.0 + L(t)); }},
              Claim{"1", [](double) { return 1.0; }}};
  }
  throw Error(ErrorCode::ConfigError, "no claims for this kind");
}

/// Right-hand side of the pointwise sharp-function bound, summed over the
/// profiles g_0 = f* and g_1 = |grad f|*:
///   t^{-1/r0} (int_0^t (xi^{1/r} g*(xi))^{r0} dxi / xi)^{1/r0} + sup_{t < xi < 1} xi^{1/2} g*(xi).
/// The integral is exact on the step profile: on a cell [a, b] it equals
/// g^{r0} (b^q - a^q) / q with q = r0 / r.
class SharpBound {
 public:
  SharpBound(std::vector<RearrangementProfile> profs, double r0) : profs_(std::move(profs)), r0_(r0) {
    const double r = 2.0 * r0 / (2.0 + r0);
    q_ = r0 / r;
    for (const auto& p : profs_) {
      const auto& v = p.values();
      const double c = p.cell_measure();
      std::vector<double> pre(v.size() + 1, 0.0);
      for (std::size_t k = 0; k < v.size(); ++k) {
        const double a = k * c, b = (k + 1) * c;
        pre[k + 1] = pre[k] + std::pow(v[k], r0) * (std::pow(b, q_) - std::pow(a, q_)) / q_;
      }
      prefix_.push_back(std::move(pre));
      // Suffix sup of sqrt(xi) g(xi) over cells below xi = 1; within a cell the
      // sup sits at its right end.
      const std::size_t kmax = std::min(v.size(), static_cast<std::size_t>(std::ceil(1.0 / c)));
      std::vector<double> suf(kmax + 1, 0.0);
      for (std::size_t k = kmax; k-- > 0;) suf[k] = std::max(suf[k + 1], std::sqrt(std::min((k + 1) * c, 1.0)) * v[k]);
      suffix_.push_back(std::move(suf));
    }
  }

  double operator()(double t) const {
    double total = 0.0;
    for (std::size_t i = 0; i < profs_.size(); ++i) {
      const auto& v = profs_[i].values();
      const double c = profs_[i].cell_measure();
      const double kf = std::floor(t / c);
      const auto k = std::min(static_cast<std::size_t>(kf), v.size() - 1);
      const double a = k * c;
      const double integral = prefix_[i][k] + std::pow(v[k], r0_) * (std::pow(t, q_) - std::pow(a, q_)) / q_;
      const double sup = k < suffix_[i].size() ? suffix_[i][k] : 0.0;
      total += std::pow(t, -1.0 / r0_) * std::pow(integral, 1.0 / r0_) + sup;
    }
    return total;
  }

 private:
  std::vector<RearrangementProfile> profs_;
  double r0_, q_;
  std::vector<std::vector<double>> prefix_, suffix_;
};

inline AsymptoticsVerdict band_verdict(Quantity q, const Claim& c, const std::vector<double>& ts,
                                       const std::function<double(double)>& measured, double max_width) {
  AsymptoticsVerdict v;
  v.quantity = q;
  v.claimed = c.label;
  v.band_min = std::numeric_limits<double>::infinity();
  for (double t : ts) {
    const double r = measured(t) / c.map(t);
    v.t.push_back(t);
    v.ratio.push_back(r);
    v.band_min = std::min(v.band_min, r);
    v.band_max = std::max(v.band_max, r);
  }
  v.width = v.band_min > 0.0 ? v.band_max / v.band_min : std::numeric_limits<double>::infinity();
  v.pass = v.band_min > 0.0 && std::isfinite(v.width) && v.width <= max_width;
  return v;
}

inline std::vector<AsymptoticsVerdict> verify_asymptotics(const GridField& f, const ExampleSpec& spec,
                                                          const Window& w = {}, const AsymptoticsOptions& opt = {}) {
  const double floor = 10.0 / (static_cast<double>(f.n()) * f.n()) * f.total_measure();
  if (w.t_lo < floor * (1.0 - 1e-12))
    throw Error(ErrorCode::WindowTooLow, "window starts below the resolution floor 10/n^2");
  if (!(w.t_hi > w.t_lo) || w.t_hi >= std::exp(-1.0) * f.total_measure())
    throw Error(ErrorCode::ConfigError, "window must lie inside (0, 1/e)");
  const std::vector<double> ts = geometric_grid(w.t_lo, w.t_hi, w.samples);
  const auto cl = claims(spec);
  const RearrangementProfile fs = rearrange(f);
  const RearrangementProfile gs = rearrange(spectral::gradient_magnitude(f));
  const SharpBound bound({fs, gs}, opt.r0);
  std::vector<AsymptoticsVerdict> out;
  out.push_back(band_verdict(Quantity::f_star, cl[0], ts, [&](double t) { return fs.star(t); }, opt.max_width));
  out.push_back(band_verdict(Quantity::grad_star, cl[1], ts, [&](double t) { return gs.star(t); }, opt.max_width));
  out.push_back(band_verdict(Quantity::sharp_star, cl[2], ts, bound, opt.max_width));
  if (opt.include_measured_sharp) {
    const RearrangementProfile ms = rearrange(sharp_maximal(f, opt.lambda).result);
    out.push_back(band_verdict(Quantity::sharp_measured, cl[2], ts, [&](double t) { return ms.double_star(t); },
                               opt.max_width));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Membership trends

struct MembershipVerdict {
  Trend in_plain = Trend::Plateau;
  Trend in_sharp = Trend::Plateau;
  std::vector<int> ns;
  std::vector<double> plain_values, sharp_values;
  std::vector<double> plain_factors, sharp_factors;  // per-doubling growth
  std::vector<EmbeddingGap> reports;
  double factor = 1.15;
};

inline std::vector<double> doubling_factors(const std::vector<double>& v) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) out.push_back(v[i] > 0.0 ? v[i + 1] / v[i] : 0.0);
  return out;
}

/// Direct-form norms across resolutions, classified by the per-doubling rule.
inline MembershipVerdict membership_verdict(const ExampleSpec& spec, const GrowthFunction& g, double p0,
                                            double lambda = 0.25, std::vector<int> ns = {128, 256, 512},
                                            double factor = 1.15) {
  MembershipVerdict m;
  m.ns = ns;
  m.factor = factor;
  for (int n : ns) {
    ExampleSpec s = spec;
    s.n = n;
    const GridField f = build_example(s);
    m.reports.push_back(embedding_gap_report(f, g, p0, lambda));
    m.plain_values.push_back(m.reports.back().plain.direct_value);
    m.sharp_values.push_back(m.reports.back().sharp.direct_value);
  }
  m.plain_factors = doubling_factors(m.plain_values);
  m.sharp_factors = doubling_factors(m.sharp_values);
  m.in_plain = classify_trend(m.plain_values, factor);
  m.in_sharp = classify_trend(m.sharp_values, factor);
  return m;
}

}  // namespace osgood::examples
