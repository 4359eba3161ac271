#pragma once

// Sampled K-functionals for (L^p0, L^inf), (L^p0, BMO), (L^inf, W^{1,inf})
// and the weighted l^1 sequence pair.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "osgood/csv.hpp"
#include "osgood/error.hpp"
#include "osgood/field.hpp"
#include "osgood/growth.hpp"
#include "osgood/parallel.hpp"

namespace osgood {

enum class KPair { Lp_Linf, Lp_BMO, Linf_W1inf, Seq };

inline std::string to_string(KPair p) {
  switch (p) {
    case KPair::Lp_Linf: return "Lp_Linf";
    case KPair::Lp_BMO: return "Lp_BMO";
    case KPair::Linf_W1inf: return "Linf_W1inf";
    case KPair::Seq: return "Seq";
  }
  return "unknown";
}

struct KCurve {
  KPair pair = KPair::Lp_Linf;
  double p0 = 1.0;
  double lambda = 0.0;       // Lp_BMO
  double s0 = 0.0, s1 = 0.0;  // Seq
  bool surrogate = false;    // equivalent to K rather than equal to it
  std::vector<double> t;
  std::vector<double> k;

  std::string describe() const {
    std::ostringstream s;
    s.precision(12);
    s << "pair=" << to_string(pair);
    if (pair == KPair::Lp_Linf || pair == KPair::Lp_BMO) s << " p0=" << p0;
    if (pair == KPair::Lp_BMO) s << " lambda=" << lambda;
    if (pair == KPair::Seq) s << " s0=" << s0 << " s1=" << s1;
    s << (surrogate ? " form=surrogate" : " form=exact");
    return s.str();
  }

  void write_csv(const std::string& path) const {
    CsvWriter w(path);
    w.comment(describe());
    w.header({"t", "K", "K/t"});
    for (std::size_t i = 0; i < t.size(); ++i) w.row({t[i], k[i], k[i] / t[i]});
  }
};

/// 64 geometric samples on [1e-6, 1e3].
inline std::vector<double> default_t_grid() { return geometric_grid(1e-6, 1e3, 64); }

struct KCurveChecks {
  bool nondecreasing = true;
  bool slope_nonincreasing = true;
  bool concave = true;
  bool all() const { return nondecreasing && slope_nonincreasing && concave; }
};

/// Type invariants with absolute slack rel_tol * max K. Concavity compares
/// K at the middle of consecutive triples with the chord through the outer two.
inline KCurveChecks check_kcurve(const KCurve& c, double rel_tol = 1e-12) {
  KCurveChecks out;
  double scale = 0.0;
  for (double v : c.k) scale = std::max(scale, std::abs(v));
  const double tol = rel_tol * std::max(scale, 1e-300);
  for (std::size_t i = 0; i + 1 < c.t.size(); ++i) {
    if (c.k[i + 1] < c.k[i] - tol) out.nondecreasing = false;
    if (c.k[i + 1] / c.t[i + 1] > c.k[i] / c.t[i] + tol / c.t[i + 1]) out.slope_nonincreasing = false;
  }
  for (std::size_t i = 0; i + 2 < c.t.size(); ++i) {
    const double l = c.t[i], m = c.t[i + 1], r = c.t[i + 2];
    const double chord = ((r - m) * c.k[i] + (m - l) * c.k[i + 2]) / (r - l);
    if (c.k[i + 1] < chord - tol) out.concave = false;
  }
  return out;
}

namespace detail {

inline KCurve lp_curve_from_profile(const RearrangementProfile& prof, double p0, const std::vector<double>& ts) {
  if (!(p0 >= 1.0)) throw Error(ErrorCode::InvalidExponent, "p0 must be >= 1");
  KCurve c;
  c.p0 = p0;
  c.t = ts;
  c.k.resize(ts.size());
  const PowerPrefix pp(prof, p0);
  const double total = prof.total_measure();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (p0 == 1.0) {
      c.k[i] = prof.integral(std::min(ts[i], total));
      continue;
    }
    c.k[i] = pp.root_integral(std::min(std::pow(ts[i], p0), total));
  }
  return c;
}

}  // namespace detail

/// K(t) = (int_0^{t^p0} (f*)^p0)^{1/p0}.
inline KCurve k_lp_linf(const GridField& f, double p0, const std::vector<double>& ts = default_t_grid()) {
  KCurve c = detail::lp_curve_from_profile(rearrange(f), p0, ts);
  c.pair = KPair::Lp_Linf;
  c.surrogate = p0 != 1.0;
  return c;
}

/// Jawerth-Torchinsky surrogate: the (L^p0, L^inf) formula applied to M#f.
inline KCurve k_lp_bmo(const SharpMaximalField& m, double p0, const std::vector<double>& ts = default_t_grid()) {
  KCurve c = detail::lp_curve_from_profile(rearrange(m.result), p0, ts);
  c.pair = KPair::Lp_BMO;
  c.lambda = m.lambda;
  c.surrogate = true;
  return c;
}

inline KCurve k_lp_bmo(const GridField& f, double p0, double lambda = 0.25,
                       const std::vector<double>& ts = default_t_grid()) {
  return k_lp_bmo(sharp_maximal(f, lambda), p0, ts);
}

namespace detail {

/// sup over node pairs at torus distance <= t of |v(x) - v(y)|, as
/// max_x (max over the offset ball of v) - v(x). The ball maximum is assembled
/// row by row from horizontal running maxima of growing half-width.
inline double grid_modulus(const GridField& v, double t) {
  const int n = v.n();
  const double r = t / v.cell();
  if (r < 1.0) return 0.0;
  const int half = n / 2;
  const int ry = std::min(half, static_cast<int>(std::floor(r + 1e-12)));
  // half-width for row offset dy, capped where the row is covered.
  auto width = [&](int dy) {
    const double w2 = r * r - static_cast<double>(dy) * dy;
    return std::min(half, static_cast<int>(std::floor(std::sqrt(std::max(w2, 0.0)) + 1e-12)));
  };
  const std::size_t N = v.size();
  std::vector<double> h(v.data()), ball(N, -std::numeric_limits<double>::infinity());
  auto absorb = [&](int dy) {
    for (int iy = 0; iy < n; ++iy) {
      const int sy = ((iy + dy) % n + n) % n;
      const double* src = &h[static_cast<std::size_t>(sy) * n];
      double* dst = &ball[static_cast<std::size_t>(iy) * n];
      for (int ix = 0; ix < n; ++ix) dst[ix] = std::max(dst[ix], src[ix]);
    }
  };
  int w = 0;
  // Rows in order of decreasing |dy| need increasing width.
  for (int a = ry; a >= 0; --a) {
    const int target = width(a);
    for (; w < target; ++w) {
      // h_{w+1}(x) = max(h_w(x), v(x - w - 1), v(x + w + 1))
      for (int iy = 0; iy < n; ++iy) {
        const double* row = &v.data()[static_cast<std::size_t>(iy) * n];
        double* out = &h[static_cast<std::size_t>(iy) * n];
        for (int ix = 0; ix < n; ++ix) {
          int lft = ix - w - 1, rgt = ix + w + 1;
          if (lft < 0) lft += n;
          if (rgt >= n) rgt -= n;
          out[ix] = std::max({out[ix], row[lft], row[rgt]});
        }
      }
    }
    absorb(a);
    if (a != 0 && !(n % 2 == 0 && a == half)) absorb(-a);
  }
  double best = 0.0;
  for (std::size_t i = 0; i < N; ++i) best = std::max(best, ball[i] - v[i]);
  return best;
}

}  // namespace detail

/// Exact grid modulus of continuity, max over the supplied components.
inline KCurve k_linf_lip(std::span<const GridField> components, const std::vector<double>& ts = default_t_grid()) {
  if (components.empty()) throw Error(ErrorCode::InvalidField, "k_linf_lip needs at least one component");
  for (const auto& c : components) c.validate();
  KCurve c;
  c.pair = KPair::Linf_W1inf;
  c.surrogate = true;
  c.t = ts;
  c.k.assign(ts.size(), 0.0);
  parallel_for(ts.size(), [&](std::size_t i) {
    double m = 0.0;
    for (const auto& comp : components) m = std::max(m, detail::grid_modulus(comp, ts[i]));
    c.k[i] = m;
  });
  return c;
}

inline KCurve k_linf_lip(const GridField& v, const std::vector<double>& ts = default_t_grid()) {
  return k_linf_lip(std::span<const GridField>(&v, 1), ts);
}

// ---------------------------------------------------------------------------
// Sequence pair

struct BandSequence {
  std::vector<int> j;
  std::vector<double> norm;

  void validate() const {
    if (j.empty()) throw Error(ErrorCode::EmptySequence, "band sequence is empty");
    if (j.size() != norm.size()) throw Error(ErrorCode::InvalidField, "band index/norm length mismatch");
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!(norm[i] >= 0.0)) throw Error(ErrorCode::InvalidField, "band norms must be nonnegative");
      if (i > 0 && j[i] <= j[i - 1]) throw Error(ErrorCode::InvalidField, "band indices must increase");
    }
  }
};

/// sum_j min(2^{j s0}, t 2^{j s1}) ||f_j||.
inline double k_seq(const BandSequence& seq, double s0, double s1, double t) {
  seq.validate();
  if (!(s0 < s1)) throw Error(ErrorCode::ConfigError, "k_seq needs s0 < s1");
  double s = 0.0;
  for (std::size_t i = 0; i < seq.j.size(); ++i)
    s += std::min(std::exp2(seq.j[i] * s0), t * std::exp2(seq.j[i] * s1)) * seq.norm[i];
  return s;
}

/// Same functional written as sum_j min(1, 2^{j kappa} t) 2^{j(beta - kappa)} ||f_j||.
inline double k_seq_kappa(const BandSequence& seq, double beta, double kappa, double t) {
  seq.validate();
  if (!(kappa > 0.0)) throw Error(ErrorCode::ConfigError, "kappa must be positive");
  double s = 0.0;
  for (std::size_t i = 0; i < seq.j.size(); ++i)
    s += std::min(1.0, std::exp2(seq.j[i] * kappa) * t) * std::exp2(seq.j[i] * (beta - kappa)) * seq.norm[i];
  return s;
}

inline KCurve k_seq_curve(const BandSequence& seq, double s0, double s1,
                          const std::vector<double>& ts = default_t_grid()) {
  KCurve c;
  c.pair = KPair::Seq;
  c.s0 = s0;
  c.s1 = s1;
  c.t = ts;
  for (double t : ts) c.k.push_back(k_seq(seq, s0, s1, t));
  return c;
}

/// theta (1 - theta) sum_nu 2^{-theta nu d} K(2^{nu d}), d = s1 - s0: the discrete
/// (theta, 1) interpolation norm, truncated once the geometric tails drop below 1e-17.
inline double theta_interpolation_sum(const BandSequence& seq, double s0, double s1, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw Error(ErrorCode::ConfigError, "theta must lie in (0, 1)");
  const double d = s1 - s0;
  const int span = static_cast<int>(std::ceil(60.0 / (std::min(theta, 1.0 - theta) * d))) +
                   std::abs(seq.j.front()) + std::abs(seq.j.back());
  std::vector<double> terms;
  terms.reserve(2 * span + 1);
  for (int nu = -span; nu <= span; ++nu)
    terms.push_back(std::exp2(-theta * nu * d) * k_seq(seq, s0, s1, std::exp2(nu * d)));
  return theta * (1.0 - theta) * pairwise_sum(terms);
}

/// sup over samples tau of K(tau) / (tau y_g(tau^{-p0})), i.e. the universal
/// K-form with t = tau^{p0}.
inline double extrapolation_sup(const KCurve& c, const GrowthFunction& g, double p0) {
  double best = 0.0;
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    if (c.k[i] == 0.0) continue;
    const double tau = c.t[i];
    const double ly = yudovich_eval_log(g, -p0 * std::log(tau)).log_value;
    best = std::max(best, std::exp(std::log(c.k[i]) - std::log(tau) - ly));
  }
  return best;
}

}  // namespace osgood
