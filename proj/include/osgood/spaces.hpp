#pragma once

// Yudovich and sharp Yudovich norms in their direct, K-functional and
// rearrangement forms.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "osgood/csv.hpp"
#include "osgood/field.hpp"
#include "osgood/growth.hpp"
#include "osgood/kfunc.hpp"

namespace osgood {

enum class Space { Yudovich, SharpYudovich, MarcinkiewiczSurrogate };

inline std::string to_string(Space s) {
  switch (s) {
    case Space::Yudovich: return "Yudovich";
    case Space::SharpYudovich: return "SharpYudovich";
    case Space::MarcinkiewiczSurrogate: return "Marcinkiewicz-surrogate";
  }
  return "unknown";
}

struct NormReport {
  Space space = Space::Yudovich;
  std::string growth;
  double p0 = 1.0;
  double lambda = 0.0;
  int n = 0;
  double direct_value = 0.0;    // sup_p ||h||_p / g(p)
  double char_k = 0.0;          // universal K-form
  double char_rearr = 0.0;      // f** / y(1/t), or (M#f)*(t) / g(-log t) for the sharp space
  double char_rearr_star = 0.0;  // f* / y(1/t)
  double ratio_direct_k = 0.0;
  double ratio_direct_rearr = 0.0;
  double ratio_k_rearr = 0.0;

  void fill_ratios() {
    auto q = [](double a, double b) { return b == 0.0 ? (a == 0.0 ? 1.0 : std::numeric_limits<double>::infinity()) : a / b; };
    ratio_direct_k = q(direct_value, char_k);
    ratio_direct_rearr = q(direct_value, char_rearr);
    ratio_k_rearr = q(char_k, char_rearr);
  }
};

/// 24 geometric points in (p0, 512].
inline std::vector<double> default_p_grid(double p0) {
  std::vector<double> ps;
  for (int i = 1; i <= 24; ++i) ps.push_back(p0 * std::pow(512.0 / p0, i / 24.0));
  return ps;
}

namespace detail {

inline double direct_sup(const RearrangementProfile& prof, const GrowthFunction& g, const std::vector<double>& ps) {
  double best = 0.0;
  for (double p : ps) best = std::max(best, prof.norm(p) / g(p));
  return best;
}

/// t-samples in [cell, t_hi) for the rearrangement forms.
inline std::vector<double> rearr_t_grid(const RearrangementProfile& prof, double t_hi, int count = 200) {
  const double lo = prof.cell_measure();
  std::vector<double> ts = geometric_grid(lo, t_hi, count + 1);
  ts.pop_back();
  return ts;
}

}  // namespace detail

inline NormReport yudovich_norm(const GridField& f, const GrowthFunction& g, double p0,
                                const std::vector<double>& p_grid) {
  const GrowthFunction gp = g.with_p0(p0);
  const RearrangementProfile prof = rearrange(f);
  NormReport r;
  r.space = Space::Yudovich;
  r.growth = g.name();
  r.p0 = p0;
  r.n = f.n();
  r.direct_value = detail::direct_sup(prof, gp, p_grid);
  for (double t : detail::rearr_t_grid(prof, std::min(1.0, prof.total_measure()))) {
    const double y = yudovich_eval_log(gp, -std::log(t)).value;
    r.char_rearr = std::max(r.char_rearr, prof.double_star(t) / y);
    r.char_rearr_star = std::max(r.char_rearr_star, prof.star(t) / y);
  }
  KCurve kc = detail::lp_curve_from_profile(prof, p0, default_t_grid());
  r.char_k = extrapolation_sup(kc, gp, p0);
  r.fill_ratios();
  return r;
}

inline NormReport yudovich_norm(const GridField& f, const GrowthFunction& g, double p0) {
  return yudovich_norm(f, g, p0, default_p_grid(p0));
}

/// Sharp form from a precomputed M#f.
inline NormReport sharp_yudovich_norm(const SharpMaximalField& m, const GrowthFunction& g, double p0,
                                      const std::vector<double>& p_grid) {
  const GrowthFunction gp = g.with_p0(p0);
  const RearrangementProfile prof = rearrange(m.result);
  NormReport r;
  r.space = Space::SharpYudovich;
  r.growth = g.name();
  r.p0 = p0;
  r.lambda = m.lambda;
  r.n = m.result.n();
  r.direct_value = detail::direct_sup(prof, gp, p_grid);
  for (double t : detail::rearr_t_grid(prof, std::exp(-1.0))) {
    const double theta = g(-std::log(t));
    r.char_rearr = std::max(r.char_rearr, prof.star(t) / theta);
  }
  for (double t : detail::rearr_t_grid(prof, std::min(1.0, prof.total_measure())))
    r.char_rearr_star = std::max(r.char_rearr_star, prof.double_star(t) / yudovich_eval_log(gp, -std::log(t)).value);
  KCurve kc = detail::lp_curve_from_profile(prof, p0, default_t_grid());
  r.char_k = extrapolation_sup(kc, gp, p0);
  r.fill_ratios();
  return r;
}

inline NormReport sharp_yudovich_norm(const GridField& f, const GrowthFunction& g, double p0, double lambda,
                                      const std::vector<double>& p_grid) {
  return sharp_yudovich_norm(sharp_maximal(f, lambda), g, p0, p_grid);
}

inline NormReport sharp_yudovich_norm(const GridField& f, const GrowthFunction& g, double p0, double lambda = 0.25) {
  return sharp_yudovich_norm(f, g, p0, lambda, default_p_grid(p0));
}

struct EmbeddingGap {
  NormReport plain;
  NormReport sharp;
  double ratio = 0.0;     // sharp.direct / plain.direct
  double constant = 0.0;  // embedding constant used for the verdict
  bool embedding_holds = false;
};

/// Checks ||M#f||-norm <= (2 / lambda) ||f||-norm on the direct forms.
inline EmbeddingGap embedding_gap_report(const GridField& f, const GrowthFunction& g, double p0, double lambda = 0.25) {
  EmbeddingGap e;
  e.plain = yudovich_norm(f, g, p0);
  e.sharp = sharp_yudovich_norm(f, g, p0, lambda);
  e.constant = 2.0 / lambda;
  e.ratio = e.plain.direct_value == 0.0 ? 0.0 : e.sharp.direct_value / e.plain.direct_value;
  e.embedding_holds = e.sharp.direct_value <= e.constant * e.plain.direct_value * (1.0 + 1e-12);
  return e;
}

enum class Trend { Plateau, Growth };

inline std::string to_string(Trend t) { return t == Trend::Growth ? "Growth" : "Plateau"; }

/// Growth when every consecutive resolution doubling raises the value by at
/// least `factor`.
inline Trend classify_trend(const std::vector<double>& values, double factor = 1.15) {
  if (values.size() < 2) return Trend::Plateau;
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    if (!(values[i + 1] >= factor * values[i]) || values[i] <= 0.0) return Trend::Plateau;
  return Trend::Growth;
}

inline void write_norm_reports_csv(const std::vector<NormReport>& reps, const std::string& path) {
  CsvWriter w(path);
  w.header({"space", "growth", "n", "p0", "lambda", "direct", "char_k", "char_rearr", "char_rearr_star",
            "ratio_direct_k", "ratio_direct_rearr", "ratio_k_rearr"});
  for (const auto& r : reps)
    w.row({to_string(r.space), r.growth, std::to_string(r.n)},
          {r.p0, r.lambda, r.direct_value, r.char_k, r.char_rearr, r.char_rearr_star, r.ratio_direct_k,
           r.ratio_direct_rearr, r.ratio_k_rearr});
}

}  // namespace osgood
