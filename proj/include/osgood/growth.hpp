#pragma once

// Growth functions, Yudovich functions y(r) = inf_{p > p0} g(p) r^{1/p},
// class-membership sampling checks and a heuristic Osgood integral test.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "osgood/error.hpp"
#include "osgood/quadrature.hpp"

namespace osgood {

enum class GrowthFamily { Constant, Power, LogPower, Custom };

inline std::string to_string(GrowthFamily f) {
  switch (f) {
    case GrowthFamily::Constant: return "constant";
    case GrowthFamily::Power: return "power";
    case GrowthFamily::LogPower: return "logpower";
    case GrowthFamily::Custom: return "custom";
  }
  return "unknown";
}

/// Log-spaced samples a = x_0 < ... < x_{count-1} = b.
inline std::vector<double> geometric_grid(double a, double b, int count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = a;
    return out;
  }
  const double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < count; ++i) out[i] = std::exp(la + (lb - la) * i / (count - 1));
  out.front() = a;
  out.back() = b;
  return out;
}

/// A nondecreasing doubling function of the integrability index p.
///
/// Analytic families evaluate scale * b(p)^alpha * prod_k l_k(p)^{alpha_k} where
/// plain families use b = p, l_1 = log p, l_{k+1} = log l_k and shifted ones use
/// b = p + 1, l_1 = log(p + e), l_{k+1} = 1 + log l_k (positive on [0, inf)).
class GrowthFunction {
 public:
  using Fn = std::function<double(double)>;

  static GrowthFunction constant(double c = 1.0, double p0 = 1.0) {
    GrowthFunction g("const", GrowthFamily::Constant, p0);
    g.scale_ = c;
    g.finish();
    return g;
  }

  static GrowthFunction power(double alpha, double p0 = 1.0, double scale = 1.0) {
    if (alpha == 0.0) return constant(scale, p0);
    GrowthFunction g("power:" + num(alpha), GrowthFamily::Power, p0);
    g.alpha_ = alpha;
    g.scale_ = scale;
    g.finish();
    return g;
  }

  static GrowthFunction log_power(double alpha, std::vector<double> log_alphas, double p0 = 1.0,
                                  double scale = 1.0) {
    std::string name = "log:" + num(alpha);
    for (double a : log_alphas) name += "," + num(a);
    GrowthFunction g(std::move(name), GrowthFamily::LogPower, p0);
    g.alpha_ = alpha;
    g.log_alphas_ = std::move(log_alphas);
    g.scale_ = scale;
    g.finish();
    return g;
  }

  /// (p+1)^alpha * prod_k l_k(p+e)^{alpha_k}; defined and positive on [0, inf).
  static GrowthFunction shifted(double alpha, std::vector<double> log_alphas = {}, double p0 = 1.0,
                                double scale = 1.0) {
    std::string name = "shifted:" + num(alpha);
    for (double a : log_alphas) name += "," + num(a);
    GrowthFunction g(std::move(name), log_alphas.empty() ? GrowthFamily::Power : GrowthFamily::LogPower,
                     p0);
    g.alpha_ = alpha;
    g.log_alphas_ = std::move(log_alphas);
    g.scale_ = scale;
    g.shifted_ = true;
    g.finish();
    return g;
  }

  static GrowthFunction custom(std::string name, Fn value, double p0 = 1.0, Fn log_value = {}) {
    GrowthFunction g(std::move(name), GrowthFamily::Custom, p0);
    g.custom_ = std::move(value);
    g.custom_log_ = std::move(log_value);
    g.finish();
    return g;
  }

  /// Piecewise log-log linear interpolation of (p_i, v_i), flat beyond the ends.
  static GrowthFunction tabulated(std::string name, std::vector<double> ps, std::vector<double> vs,
                                  double p0 = 1.0) {
    if (ps.size() < 2 || ps.size() != vs.size())
      throw Error(ErrorCode::ConfigError, "growth table needs at least two (p, value) rows");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (!(ps[i] > 0.0) || !(vs[i] > 0.0) || !std::isfinite(vs[i]))
        throw Error(ErrorCode::ConfigError, "growth table entries must be positive");
      if (i > 0 && !(ps[i] > ps[i - 1]))
        throw Error(ErrorCode::ConfigError, "growth table p column must be strictly increasing");
    }
    auto lp = std::make_shared<std::vector<double>>();
    auto lv = std::make_shared<std::vector<double>>();
    for (std::size_t i = 0; i < ps.size(); ++i) {
      lp->push_back(std::log(ps[i]));
      lv->push_back(std::log(vs[i]));
    }
    Fn log_fn = [lp, lv](double p) {
      const double x = std::log(p);
      if (!(x > lp->front())) return lv->front();
      if (x >= lp->back()) return lv->back();
      const auto it = std::upper_bound(lp->begin(), lp->end(), x);
      const std::size_t k = static_cast<std::size_t>(it - lp->begin());
      const double w = (x - (*lp)[k - 1]) / ((*lp)[k] - (*lp)[k - 1]);
      return (1.0 - w) * (*lv)[k - 1] + w * (*lv)[k];
    };
    return custom(std::move(name), [log_fn](double p) { return std::exp(log_fn(p)); }, p0, log_fn);
  }

  /// Two-column CSV (p, value); '#' comments and a non-numeric header are skipped.
  static GrowthFunction from_csv(const std::string& path, double p0 = 1.0) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open growth table " + path);
    std::vector<double> ps, vs;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream row(line);
      double p, v;
      if (!(row >> p >> v)) {
        if (ps.empty()) continue;
        throw Error(ErrorCode::ConfigError, "malformed growth table row: " + line);
      }
      ps.push_back(p);
      vs.push_back(v);
    }
    return tabulated("csv:" + path, std::move(ps), std::move(vs), p0);
  }

  const std::string& name() const noexcept { return name_; }
  GrowthFamily family() const noexcept { return family_; }
  double p0() const noexcept { return p0_; }
  double alpha() const noexcept { return alpha_; }
  const std::vector<double>& log_alphas() const noexcept { return log_alphas_; }
  bool is_shifted() const noexcept { return shifted_; }
  double scale() const noexcept { return scale_; }

  double operator()(double p) const {
    if (family_ == GrowthFamily::Custom) return custom_(p);
    double v = scale_;
    if (alpha_ != 0.0) v *= std::pow(shifted_ ? p + 1.0 : p, alpha_);
    if (!log_alphas_.empty()) {
      double l = shifted_ ? std::log(p + std::numbers::e) : std::log(p);
      for (std::size_t k = 0; k < log_alphas_.size(); ++k) {
        if (k > 0) l = shifted_ ? 1.0 + std::log(l) : std::log(l);
        if (log_alphas_[k] != 0.0) v *= std::pow(l, log_alphas_[k]);
      }
    }
    return v;
  }

  /// log g(p), computed without forming g(p) for analytic families.
  double log_value(double p) const {
    if (family_ == GrowthFamily::Custom) return custom_log_ ? custom_log_(p) : std::log(custom_(p));
    double v = std::log(scale_);
    if (alpha_ != 0.0) v += alpha_ * std::log(shifted_ ? p + 1.0 : p);
    if (!log_alphas_.empty()) {
      double l = shifted_ ? std::log(p + std::numbers::e) : std::log(p);
      for (std::size_t k = 0; k < log_alphas_.size(); ++k) {
        if (k > 0) l = shifted_ ? 1.0 + std::log(l) : std::log(l);
        if (log_alphas_[k] != 0.0) v += log_alphas_[k] * std::log(l);
      }
    }
    return v;
  }

  GrowthFunction with_p0(double p0) const {
    GrowthFunction g = *this;
    g.p0_ = p0;
    g.finish();
    return g;
  }

  GrowthFunction with_name(std::string name) const {
    GrowthFunction g = *this;
    g.name_ = std::move(name);
    return g;
  }

  /// max g(2p)/g(p) over a log grid of p in [p_lo, p_hi].
  double doubling_constant(double p_lo, double p_hi, int samples = 200) const {
    double worst = 0.0;
    for (double p : geometric_grid(p_lo, p_hi, samples)) {
      const double r = std::exp(log_value(2.0 * p) - log_value(p));
      if (!std::isfinite(r)) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, r);
    }
    return worst;
  }

  /// Doubling constant over the documented range (p0, 10^4].
  double doubling_constant() const { return doubling_constant(p0_ * (1.0 + 1e-6), 1e4); }

 private:
  GrowthFunction(std::string name, GrowthFamily family, double p0)
      : name_(std::move(name)), family_(family), p0_(p0) {}

  static std::string num(double x) {
    std::ostringstream s;
    s.precision(12);
    s << x;
    return s.str();
  }

  // Spot checks on (p0, 1e4]: positive, finite, nondecreasing.
  void finish() const {
    if (!(p0_ >= 1.0) || !std::isfinite(p0_))
      throw Error(ErrorCode::ConfigError, "growth p0 must be a finite real >= 1");
    if (family_ != GrowthFamily::Custom && !(scale_ > 0.0))
      throw Error(ErrorCode::ConfigError, "growth scale must be positive");
    double prev = -std::numeric_limits<double>::infinity();
    for (double p : geometric_grid(p0_ * (1.0 + 1e-6), 1e4, 160)) {
      const double lv = log_value(p);
      if (!std::isfinite(lv))
        throw Error(ErrorCode::ConfigError, "growth " + name_ + " is not positive at p=" + num(p));
      if (lv < prev - 1e-12 * (1.0 + std::abs(prev)))
        throw Error(ErrorCode::ConfigError, "growth " + name_ + " decreases near p=" + num(p));
      prev = lv;
    }
  }

  std::string name_;
  GrowthFamily family_;
  double p0_ = 1.0;
  double alpha_ = 0.0;
  std::vector<double> log_alphas_;
  double scale_ = 1.0;
  bool shifted_ = false;
  Fn custom_;
  Fn custom_log_;
};

/// p -> p g(p). Plain analytic families keep their family with alpha + 1.
inline GrowthFunction theta1(const GrowthFunction& g) {
  if (!g.is_shifted()) {
    switch (g.family()) {
      case GrowthFamily::Constant: return GrowthFunction::power(1.0, g.p0(), g.scale());
      case GrowthFamily::Power: return GrowthFunction::power(g.alpha() + 1.0, g.p0(), g.scale());
      case GrowthFamily::LogPower:
        return GrowthFunction::log_power(g.alpha() + 1.0, g.log_alphas(), g.p0(), g.scale());
      case GrowthFamily::Custom: break;
    }
  }
  return GrowthFunction::custom(
      "p*" + g.name(), [g](double p) { return p * g(p); }, g.p0(),
      [g](double p) { return std::log(p) + g.log_value(p); });
}

// ---------------------------------------------------------------------------
// Yudovich functions

struct YudovichEvaluation {
  double r = 0.0;
  double value = 0.0;
  double log_value = 0.0;
  double argmin_p = 0.0;
  bool closed_form = false;   // r <= 1 branch
  bool at_search_edge = false;  // minimum found at P_max
};

inline double yudovich_pmax(double log_r) { return std::max(1e3, 10.0 * std::max(log_r, 1.0)); }

namespace detail {

template <class F>
std::pair<double, double> golden_section(F&& h, double a, double b) {
  constexpr double inv_phi = 0.6180339887498949;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double hc = h(c), hd = h(d);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + std::abs(a)); ++it) {
    if (hc <= hd) {
      b = d;
      d = c;
      hd = hc;
      c = b - inv_phi * (b - a);
      hc = h(c);
    } else {
      a = c;
      c = d;
      hc = hd;
      d = a + inv_phi * (b - a);
      hd = h(d);
    }
  }
  return hc <= hd ? std::pair{c, hc} : std::pair{d, hd};
}

}  // namespace detail

/// y_g at r = exp(log_r). Large arguments (log_r ~ 1e300) are supported.
inline YudovichEvaluation yudovich_eval_log(const GrowthFunction& g, double log_r) {
  if (std::isnan(log_r)) throw Error(ErrorCode::NonPositiveArgument, "r is NaN");
  YudovichEvaluation out;
  out.r = std::exp(log_r);
  const double p0 = g.p0();
  if (log_r <= 0.0) {
    out.closed_form = true;
    out.argmin_p = p0;
    out.value = g(p0) * std::pow(out.r, 1.0 / p0);
    out.log_value = g.log_value(p0) + log_r / p0;
    if (log_r == -std::numeric_limits<double>::infinity()) out.value = 0.0;
    return out;
  }

  // Minimize log g(e^u) + log_r e^{-u} over u in (log p0, log P_max].
  const double pmax = yudovich_pmax(log_r);
  const double a = std::log(p0) + 1e-12, b = std::log(pmax);
  auto h = [&](double u) {
    const double v = g.log_value(std::exp(u)) + log_r * std::exp(-u);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  constexpr int scan = 64;
  std::vector<double> us(scan), hs(scan);
  int best = -1;
  for (int i = 0; i < scan; ++i) {
    us[i] = a + (b - a) * i / (scan - 1);
    hs[i] = h(us[i]);
    if (std::isfinite(hs[i]) && (best < 0 || hs[i] < hs[best])) best = i;
  }
  if (best < 0) throw Error(ErrorCode::SearchDivergence, "objective not finite on (p0, P_max] for " + g.name());

  bool unimodal = true;
  for (int i = 0; i + 1 < scan && unimodal; ++i) {
    const double tol = 1e-12 * (1.0 + std::abs(hs[i]));
    if (i < best && hs[i + 1] > hs[i] + tol) unimodal = false;
    if (i >= best && hs[i + 1] < hs[i] - tol) unimodal = false;
  }

  double lo = us[std::max(best - 1, 0)], hi = us[std::min(best + 1, scan - 1)];
  if (!unimodal) {
    // Dense fallback grid, then local refinement inside its best cell.
    constexpr int dense = 4096;
    double best_u = us[best], best_h = hs[best], step = (b - a) / (dense - 1);
    for (int i = 0; i < dense; ++i) {
      const double u = a + step * i, v = h(u);
      if (v < best_h) {
        best_h = v;
        best_u = u;
      }
    }
    lo = std::max(a, best_u - step);
    hi = std::min(b, best_u + step);
  }
  auto [u_star, h_star] = detail::golden_section(h, lo, hi);
  for (double u : {lo, hi}) {
    const double v = h(u);
    if (v < h_star) {
      h_star = v;
      u_star = u;
    }
  }
  out.argmin_p = std::exp(u_star);
  out.log_value = h_star;
  out.value = std::exp(h_star);
  out.at_search_edge = u_star >= b - 1e-9 * (1.0 + std::abs(b));
  return out;
}

inline YudovichEvaluation yudovich_eval(const GrowthFunction& g, double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::NonPositiveArgument, "yudovich_eval needs r > 0");
  YudovichEvaluation out = yudovich_eval_log(g, std::log(r));
  out.r = r;
  if (out.closed_form) out.value = g(g.p0()) * std::pow(r, 1.0 / g.p0());
  return out;
}

inline double yudovich(const GrowthFunction& g, double r) { return yudovich_eval(g, r).value; }

// ---------------------------------------------------------------------------
// Quasi-monotonicity and ratio scans

struct QuasiOptions {
  double slack = 1.05;   // allowed factor per pair
  double degree = 3.0;   // polynomial allowance (p2/p1)^degree; 0 is the literal rule
  int samples = 96;
};

struct QuasiCheck {
  bool ok = true;
  double worst = 0.0;  // max of f(p2)/f(p1) (p1/p2)^degree over sampled pairs p2 >= 2 p1
  double p1 = 0.0, p2 = 0.0;
};

/// Sampled check that f is quasi-decreasing modulo polynomial growth, from log f.
inline QuasiCheck quasi_decreasing_check(const std::function<double(double)>& log_f, double p_lo,
                                         double p_hi, const QuasiOptions& opt = {}) {
  const std::vector<double> ps = geometric_grid(p_lo, p_hi, opt.samples);
  std::vector<double> lf(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) lf[i] = log_f(ps[i]);
  QuasiCheck out;
  double worst_log = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      if (ps[j] < 2.0 * ps[i] * (1.0 - 1e-12)) continue;
      double l = lf[j] - lf[i] - opt.degree * std::log(ps[j] / ps[i]);
      if (std::isnan(l)) l = std::numeric_limits<double>::infinity();
      if (l > worst_log) {
        worst_log = l;
        out.p1 = ps[i];
        out.p2 = ps[j];
      }
    }
  }
  out.worst = std::exp(worst_log);
  out.ok = worst_log <= std::log(opt.slack);
  return out;
}

/// Samples the hypothesis that e^{p0/p} g(p) is quasi-decreasing on [p0, 1e4].
inline QuasiCheck hyp_theta_check(const GrowthFunction& g, const QuasiOptions& opt = {}) {
  const double p0 = g.p0();
  return quasi_decreasing_check([&](double p) { return p0 / p + g.log_value(p); }, p0 * (1.0 + 1e-6),
                                1e4, opt);
}

struct YudovichRatioScan {
  std::vector<double> r;
  std::vector<double> ratio;  // y_g(r) / g(log r)
  double c1 = 0.0, c2 = 0.0;
  double band = 0.0;  // c2 / c1
  QuasiCheck hypothesis;
};

inline YudovichRatioScan lemma1_ratio_scan(const GrowthFunction& g, const std::vector<double>& r_grid,
                                    const QuasiOptions& opt = {}) {
  YudovichRatioScan out;
  out.hypothesis = hyp_theta_check(g, opt);
  if (!out.hypothesis.ok)
    throw Error(ErrorCode::HypothesisViolated,
                "e^{p0/p} g(p) is not quasi-decreasing for " + g.name() + " (worst factor " +
                    std::to_string(out.hypothesis.worst) + ")");
  const double floor = 2.0 * g.p0();
  out.c1 = std::numeric_limits<double>::infinity();
  for (double r : r_grid) {
    if (!(r > 0.0)) throw Error(ErrorCode::NonPositiveArgument, "r must be positive");
    if (std::log(r) < floor * (1.0 - 1e-12))
      throw Error(ErrorCode::ConfigError, "ratio scan needs r >= e^{2 p0}");
    const double lr = std::log(r);
    const double q = std::exp(yudovich_eval_log(g, lr).log_value - g.log_value(lr));
    out.r.push_back(r);
    out.ratio.push_back(q);
    out.c1 = std::min(out.c1, q);
    out.c2 = std::max(out.c2, q);
  }
  out.band = out.c2 / out.c1;
  return out;
}

struct AveragedYudovichScan {
  std::vector<double> t;
  std::vector<double> ratio;  // (1/t) int_0^t y(1/s)^{p0} ds / y(1/t)^{p0}
  double c_min = 0.0, c_max = 0.0;
};

/// Averaged-Yudovich check; s = t e^{-u} turns the average into a weighted integral
/// over u in (0, inf).
inline AveragedYudovichScan averaged_yudovich_scan(const GrowthFunction& g, const std::vector<double>& ts) {
  AveragedYudovichScan out;
  const double p0 = g.p0();
  out.c_min = std::numeric_limits<double>::infinity();
  for (double t : ts) {
    if (!(t > 0.0 && t < 1.0)) throw Error(ErrorCode::NonPositiveArgument, "t must lie in (0,1)");
    const double ly = yudovich_eval_log(g, -std::log(t)).log_value;
    auto f = [&](double u) {
      return std::exp(p0 * (yudovich_eval_log(g, u - std::log(t)).log_value - ly) - u);
    };
    const double q = quad::integrate_composite(f, 0.0, 80.0, 80);
    out.t.push_back(t);
    out.ratio.push_back(q);
    out.c_min = std::min(out.c_min, q);
    out.c_max = std::max(out.c_max, q);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Class P_kappa

struct GrowthClassReport {
  double kappa = 1.0;
  bool passes[4] = {false, false, false, false};
  std::string witness[4];
  double doubling_constant = 0.0;
  double quasi_worst = 0.0;
  double tail_ratio = std::numeric_limits<double>::infinity();  // sup_N S_N / (2^{-N kappa} g(N))
  bool all() const { return passes[0] && passes[1] && passes[2] && passes[3]; }
};

struct PClassOptions {
  double max_doubling = 64.0;
  QuasiOptions quasi{};
  int tail_terms = 10000;
};

inline GrowthClassReport pclass_check(const GrowthFunction& g, double kappa, const PClassOptions& opt = {}) {
  GrowthClassReport rep;
  rep.kappa = kappa;
  auto fmt = [](const char* what, double p, double v) {
    std::ostringstream s;
    s.precision(10);
    s << what << " at p=" << p << " (value " << v << ")";
    return s.str();
  };

  // (i) positive, finite, nondecreasing on {0} and a log grid of [1e-3, 1e4].
  std::vector<double> grid{0.0};
  for (double p : geometric_grid(1e-3, 1e4, 200)) grid.push_back(p);
  rep.passes[0] = true;
  double prev = -std::numeric_limits<double>::infinity();
  for (double p : grid) {
    const double lv = g.log_value(p);
    if (!std::isfinite(lv)) {
      rep.passes[0] = false;
      rep.witness[0] = fmt("not positive", p, g(p));
      break;
    }
    if (lv < prev - 1e-12 * (1.0 + std::abs(prev))) {
      rep.passes[0] = false;
      rep.witness[0] = fmt("decreasing", p, g(p));
      break;
    }
    prev = lv;
  }

  // (ii) doubling.
  rep.doubling_constant = g.doubling_constant(1e-3, 5e3);
  const double at0 = std::exp(g.log_value(0.0) - g.log_value(0.0));  // NaN when g(0) = 0
  rep.passes[1] = std::isfinite(rep.doubling_constant) && rep.doubling_constant <= opt.max_doubling &&
                  std::isfinite(at0);
  if (!rep.passes[1]) rep.witness[1] = fmt("doubling ratio", 0.0, rep.doubling_constant);

  // (iii) e^{1/p} g(p) quasi-decreasing.
  const QuasiCheck q = quasi_decreasing_check([&](double p) { return 1.0 / p + g.log_value(p); }, 1e-2, 1e4,
                                              opt.quasi);
  rep.quasi_worst = q.worst;
  rep.passes[2] = q.ok;
  if (!q.ok) rep.witness[2] = fmt("quasi-decrease factor between p1 and p2", q.p1, q.worst) +
                              " p2=" + std::to_string(q.p2);

  // (iv) tail sums, accumulated from the far end in log-scaled form.
  const int J = opt.tail_terms;
  std::vector<double> lt(J + 1);
  for (int j = 0; j <= J; ++j) lt[j] = -j * kappa * std::numbers::ln2 + g.log_value(static_cast<double>(j));
  bool finite = std::all_of(lt.begin(), lt.end(), [](double x) { return std::isfinite(x); });
  if (!finite) {
    rep.passes[3] = false;
    rep.witness[3] = "terms not finite";
    return rep;
  }
  // S_N / t_N = 1 + (t_{N+1}/t_N) (S_{N+1}/t_{N+1}).
  std::vector<double> ratio(J + 1);
  ratio[J] = 1.0;
  for (int j = J - 1; j >= 0; --j) ratio[j] = 1.0 + std::exp(lt[j + 1] - lt[j]) * ratio[j + 1];
  double sup = 0.0;
  for (int j = 0; j <= J / 2; ++j) sup = std::max(sup, ratio[j]);
  // t_J / S_0 = exp(lt_J - lt_0) / ratio_0.
  const double last_share = std::exp(lt[J] - lt[0]) / ratio[0];
  rep.tail_ratio = sup;
  rep.passes[3] = std::isfinite(sup) && last_share < 1e-12;
  if (!rep.passes[3]) {
    std::ostringstream s;
    s << "tail not summable: last term share " << last_share << " at j=" << J;
    rep.witness[3] = s.str();
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Osgood test

enum class OsgoodOrientation { ZeroEnd, InfinityEnd };
enum class OsgoodVerdict { Divergent, Convergent, Inconclusive };

inline std::string to_string(OsgoodVerdict v) {
  switch (v) {
    case OsgoodVerdict::Divergent: return "Divergent";
    case OsgoodVerdict::Convergent: return "Convergent";
    case OsgoodVerdict::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

inline std::string to_string(OsgoodOrientation o) {
  return o == OsgoodOrientation::ZeroEnd ? "zero" : "infinity";
}

/// Modulus for the Osgood test, given in log form: log r -> log L(r) on
/// (0, epsilon_L) for ZeroEnd, or log r -> log y(r) on (1, inf) for InfinityEnd.
struct OsgoodSpec {
  std::function<double(double)> log_modulus;
  double epsilon_L = 0.1;
  OsgoodOrientation orientation = OsgoodOrientation::ZeroEnd;
  std::string label;
  // Largest distance from the regular end at which log_modulus stays representable.
  double sample_reach = 1e6;

  static OsgoodSpec from_modulus(std::function<double(double)> modulus, double eps,
                                 OsgoodOrientation orient, std::string label = "custom") {
    OsgoodSpec s;
    s.log_modulus = [m = std::move(modulus)](double lr) { return std::log(m(std::exp(lr))); };
    s.epsilon_L = eps;
    s.orientation = orient;
    s.label = std::move(label);
    s.sample_reach = 600.0;
    return s;
  }

  /// L(r) = r^a.
  static OsgoodSpec power(double a, double eps = 0.1) {
    OsgoodSpec s;
    s.log_modulus = [a](double lr) { return a * lr; };
    s.epsilon_L = eps;
    s.label = "r^" + std::to_string(a);
    return s;
  }

  /// L(r) = r log(1/r)^k, requires eps < 1.
  static OsgoodSpec r_log_power(double k, double eps = 0.1) {
    OsgoodSpec s;
    s.log_modulus = [k](double lr) { return lr + k * std::log(-lr); };
    s.epsilon_L = eps;
    s.label = "r*log(1/r)^" + std::to_string(k);
    return s;
  }

  /// L(r) = r y_g(1/r) near zero.
  static OsgoodSpec yudovich_zero(const GrowthFunction& g, double eps = 0.1) {
    OsgoodSpec s;
    s.log_modulus = [g](double lr) { return lr + yudovich_eval_log(g, -lr).log_value; };
    s.epsilon_L = eps;
    s.label = "r*y[" + g.name() + "](1/r)";
    return s;
  }

  /// y = y_g at infinity.
  static OsgoodSpec yudovich_infinity(const GrowthFunction& g) {
    OsgoodSpec s;
    s.log_modulus = [g](double lr) { return yudovich_eval_log(g, lr).log_value; };
    s.epsilon_L = 1.0;
    s.orientation = OsgoodOrientation::InfinityEnd;
    s.label = "y[" + g.name() + "]";
    return s;
  }
};

struct OsgoodBudget {
  int max_decades = 300;
  int panels_per_decade = 8;
  double cauchy_tol = 1e-9;         // relative increment for stabilization
  int cauchy_run = 3;               // consecutive stabilized decades
  double divergence_threshold = 50.0;
  double min_decade_increment = 0.01;
};

struct OsgoodResult {
  OsgoodVerdict verdict = OsgoodVerdict::Inconclusive;
  std::vector<double> decade_end;  // distance from the regular end in log r
  std::vector<double> partial;     // partial integral up to decade_end
  std::string reason;
  bool heuristic = true;
};

/// Partial Osgood integrals over geometric decades of s = |log r - log r_regular|.
inline OsgoodResult osgood_test(const OsgoodSpec& spec, const OsgoodBudget& budget = {}) {
  if (!spec.log_modulus) throw Error(ErrorCode::InvalidModulus, "modulus not set");
  const bool zero = spec.orientation == OsgoodOrientation::ZeroEnd;
  if (zero && !(spec.epsilon_L > 0.0)) throw Error(ErrorCode::InvalidModulus, "epsilon_L must be positive");
  const double l_reg = zero ? std::log(spec.epsilon_L) : 0.0;
  auto log_r = [&](double s) { return zero ? l_reg - s : s; };

  // Sampled validity: finite and monotone in r.
  {
    std::vector<double> ss{0.0};
    for (double s : geometric_grid(1e-2, spec.sample_reach, 200)) ss.push_back(s);
    double prev = 0.0;
    for (std::size_t i = 0; i < ss.size(); ++i) {
      const double lv = spec.log_modulus(log_r(ss[i]));
      if (!std::isfinite(lv))
        throw Error(ErrorCode::InvalidModulus, "modulus not positive/finite at log r=" + std::to_string(log_r(ss[i])));
      if (i > 0) {
        const double tol = 1e-9 * (1.0 + std::abs(prev));
        const bool bad = zero ? lv > prev + tol : lv < prev - tol;
        if (bad) throw Error(ErrorCode::InvalidModulus, "modulus not monotone near log r=" + std::to_string(log_r(ss[i])));
      }
      prev = lv;
    }
  }

  auto integrand = [&](double s) {
    const double lr = log_r(s);
    const double lv = spec.log_modulus(lr);
    return zero ? std::exp(lr - lv) : std::exp(-lv);
  };

  OsgoodResult out;
  double sum = 0.0;
  int stable = 0;
  for (int k = 0; k <= budget.max_decades; ++k) {
    const double a = k == 0 ? 0.0 : std::pow(10.0, k - 1), b = std::pow(10.0, k);
    double inc = 0.0;
    for (int m = 0; m < budget.panels_per_decade; ++m) {
      double lo, hi;
      if (k == 0) {
        lo = a + (b - a) * m / budget.panels_per_decade;
        hi = a + (b - a) * (m + 1) / budget.panels_per_decade;
      } else {
        lo = a * std::pow(10.0, static_cast<double>(m) / budget.panels_per_decade);
        hi = a * std::pow(10.0, static_cast<double>(m + 1) / budget.panels_per_decade);
      }
      inc += quad::integrate(integrand, lo, hi);
    }
    if (!std::isfinite(inc)) {
      out.reason = "integrand not representable beyond s=" + std::to_string(a);
      return out;
    }
    sum += inc;
    out.decade_end.push_back(b);
    out.partial.push_back(sum);
    if (sum > budget.divergence_threshold && inc >= budget.min_decade_increment) {
      out.verdict = OsgoodVerdict::Divergent;
      out.reason = "partial integral exceeded threshold while still growing";
      return out;
    }
    if (inc <= budget.cauchy_tol * std::max(sum, 1e-300)) {
      if (++stable >= budget.cauchy_run) {
        out.verdict = OsgoodVerdict::Convergent;
        out.reason = "partial integrals stabilized";
        return out;
      }
    } else {
      stable = 0;
    }
  }
  out.reason = "decade budget exhausted";
  return out;
}

}  // namespace osgood
