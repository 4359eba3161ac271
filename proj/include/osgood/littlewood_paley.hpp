#pragma once

// Littlewood-Paley bands on the torus, Besov (infinity, 1) and Vishik norms,
// the three-way Vishik equivalence report, and per-band Nikolskii/Bernstein
// constants.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "osgood/csv.hpp"
#include "osgood/fft.hpp"
#include "osgood/field.hpp"
#include "osgood/growth.hpp"
#include "osgood/kfunc.hpp"
#include "osgood/parallel.hpp"
#include "osgood/spectral.hpp"

namespace osgood::lp {

/// Radial cutoff supported in (3/4, 7/4), equal to 1 on [7/8, 9/8], normalized
/// so that its dyadic dilates sum to one.
struct BandFilter {
  static constexpr double support_lo = 0.75, plateau_lo = 0.875, plateau_hi = 1.125, support_hi = 1.75;

  /// e^{-1/x} / (e^{-1/x} + e^{-1/(1-x)}) on [0, 1].
  static double smooth_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
  }

  static double raw(double rho) {
    if (rho <= support_lo || rho >= support_hi) return 0.0;
    if (rho < plateau_lo) return smooth_step((rho - support_lo) / (plateau_lo - support_lo));
    if (rho <= plateau_hi) return 1.0;
    return smooth_step((support_hi - rho) / (support_hi - plateau_hi));
  }

  /// phi(rho) = raw(rho) / sum_j raw(2^{-j} rho). At most two dilates overlap.
  static double phi(double rho) {
    const double r = raw(rho);
    if (r == 0.0) return 0.0;
    if (rho >= plateau_lo && rho <= plateau_hi) return 1.0;
    const double other = rho < 1.0 ? raw(2.0 * rho) : raw(0.5 * rho);
    return r / (r + other);
  }

  /// Multiplier of band j at integer radius rho.
  static double band(int j, double rho) { return phi(std::ldexp(rho, -j)); }
};

struct DyadicDecomposition {
  std::vector<int> j;
  std::vector<GridField> bands;
  double mean = 0.0;
  bool alias_risk = false;  // top band reaches the Nyquist frequency

  GridField reconstruct() const {
    GridField s = bands.front();
    for (std::size_t i = 1; i < bands.size(); ++i) s += bands[i];
    for (double& v : s.data()) v += mean;
    return s;
  }

  /// Inhomogeneous low band: f minus the bands j >= 1.
  GridField low_band() const {
    GridField s = bands.front();
    for (double& v : s.data()) v += mean;
    return s;
  }

  BandSequence sup_norms() const {
    BandSequence seq;
    for (std::size_t i = 0; i < bands.size(); ++i) {
      seq.j.push_back(j[i]);
      seq.norm.push_back(bands[i].max_abs());
    }
    return seq;
  }
};

/// Largest band index whose annulus meets the grid frequencies.
inline int top_band(int n) {
  const double kmax = std::sqrt(2.0) * (n / 2);
  int j = 0;
  while (BandFilter::support_lo * std::ldexp(1.0, j + 1) < kmax) ++j;
  return j;
}

inline DyadicDecomposition decompose(const GridField& f) {
  f.validate();
  const int n = f.n();
  const fft::Spectrum c = fft::forward(f.values(), n);
  DyadicDecomposition d;
  d.mean = c[0].real();
  const int jmax = top_band(n);
  d.alias_risk = BandFilter::support_hi * std::ldexp(1.0, jmax) > n / 2;
  for (int j = 0; j <= jmax; ++j) d.j.push_back(j);
  d.bands.resize(d.j.size());
  parallel_for(d.j.size(), [&](std::size_t b) {
    fft::Spectrum cb(c.size());
    for (int iy = 0; iy < n; ++iy) {
      const int ky = fft::wavenumber(iy, n);
      for (int ix = 0; ix < n; ++ix) {
        const int kx = fft::wavenumber(ix, n);
        const std::size_t idx = static_cast<std::size_t>(iy) * n + ix;
        const double rho = std::sqrt(static_cast<double>(kx) * kx + static_cast<double>(ky) * ky);
        const double m = rho == 0.0 ? 0.0 : BandFilter::band(d.j[b], rho);
        cb[idx] = c[idx] * m;
      }
    }
    d.bands[b] = GridField(n, fft::inverse_real(cb, n), f.domain());
  });
  return d;
}

/// sum_j 2^{j beta} ||f_j||.
inline double besov_norm(const BandSequence& s, double beta) {
  s.validate();
  double sum = 0.0;
  for (std::size_t i = 0; i < s.j.size(); ++i) sum += std::exp2(s.j[i] * beta) * s.norm[i];
  return sum;
}

inline double besov_norm(const DyadicDecomposition& d, double beta) { return besov_norm(d.sup_norms(), beta); }

/// sup_{N >= 0} Pi(N)^{-1} sum_{0 <= j <= N} 2^{j beta} ||f_j||.
inline double vishik_norm(const BandSequence& s, const GrowthFunction& pi, double beta) {
  s.validate();
  double best = 0.0, partial = 0.0;
  std::size_t i = 0;
  const int jmax = s.j.back();
  for (int N = 0; N <= std::max(jmax, 0); ++N) {
    while (i < s.j.size() && s.j[i] <= N) {
      if (s.j[i] >= 0) partial += std::exp2(s.j[i] * beta) * s.norm[i];
      ++i;
    }
    best = std::max(best, partial / pi(static_cast<double>(N)));
  }
  return best;
}

inline double vishik_norm(const DyadicDecomposition& d, const GrowthFunction& pi, double beta) {
  return vishik_norm(d.sup_norms(), pi, beta);
}

struct VishikEquivalence {
  double vishik_plus_besov = 0.0;  // ||f||_{B_Pi^beta} + ||f||_{B^{beta-kappa}}
  double k_form = 0.0;             // sup_t K(t) / (t y_Pi(1/t))
  double alpha_form = 0.0;         // sup_alpha ||f||_{B^alpha} / Pi(1/(beta - alpha))
  double ratio_ab = 0.0, ratio_ac = 0.0, ratio_bc = 0.0;
  GrowthClassReport pclass;
};

inline std::vector<double> equivalence_alpha_grid(double beta, double kappa) {
  std::vector<double> out;
  const double lo = beta - kappa + 0.02 * kappa, hi = beta - 0.02 * kappa;
  for (int i = 0; i < 32; ++i) out.push_back(lo + (hi - lo) * i / 31.0);
  return out;
}

inline VishikEquivalence thmve_equivalence_report(const BandSequence& s, const GrowthFunction& pi, double beta,
                                                  double kappa) {
  VishikEquivalence r;
  r.pclass = pclass_check(pi, kappa);
  if (!r.pclass.all())
    throw Error(ErrorCode::HypothesisViolated, "growth " + pi.name() + " fails the P_kappa sampling checks");
  const GrowthFunction y_growth = pi.with_p0(1.0);
  r.vishik_plus_besov = vishik_norm(s, pi, beta) + besov_norm(s, beta - kappa);
  // t-grid wide enough that every band switches branch inside it.
  const double lo = std::exp2(-kappa * (s.j.back() + 30)), hi = std::exp2(-kappa * (s.j.front() - 30));
  for (double t : geometric_grid(lo, hi, 600)) {
    const double k = k_seq(s, beta - kappa, beta, t);
    if (k == 0.0) continue;
    r.k_form = std::max(r.k_form, k / (t * yudovich_eval_log(y_growth, -std::log(t)).value));
  }
  for (double a : equivalence_alpha_grid(beta, kappa)) r.alpha_form = std::max(r.alpha_form, besov_norm(s, a) / pi(1.0 / (beta - a)));
  auto q = [](double a, double b) { return b == 0.0 ? (a == 0.0 ? 1.0 : std::numeric_limits<double>::infinity()) : a / b; };
  r.ratio_ab = q(r.vishik_plus_besov, r.k_form);
  r.ratio_ac = q(r.vishik_plus_besov, r.alpha_form);
  r.ratio_bc = q(r.k_form, r.alpha_form);
  return r;
}

inline VishikEquivalence thmve_equivalence_report(const GridField& f, const GrowthFunction& pi, double beta,
                                                  double kappa) {
  return thmve_equivalence_report(decompose(f).sup_norms(), pi, beta, kappa);
}

struct BandRow {
  int j = 0;
  double sup_norm = 0.0;
  double p0_norm = 0.0;
  double bernstein = 0.0;   // ||grad f_j||_inf / (2^j (2 pi / L) ||f_j||_inf)
  double nikolskii = 0.0;   // ||f_j||_inf / (2^{2 j / p0} ||f_j||_p0)
};

struct BandReport {
  double p0 = 2.0;
  std::vector<BandRow> rows;
  double max_bernstein = 0.0, max_nikolskii = 0.0;

  void write_csv(const std::string& path) const {
    CsvWriter w(path);
    w.comment("p0=" + std::to_string(p0) + " d=2");
    w.header({"j", "sup_norm", "p0_norm", "bernstein_const", "nikolskii_const"});
    for (const auto& r : rows) w.row({static_cast<double>(r.j), r.sup_norm, r.p0_norm, r.bernstein, r.nikolskii});
  }
};

/// Bands whose sup norm is below `floor` times the largest are skipped.
inline BandReport band_inequality_checks(const DyadicDecomposition& d, double p0, double floor = 1e-12) {
  BandReport rep;
  rep.p0 = p0;
  double top = 0.0;
  for (const auto& b : d.bands) top = std::max(top, b.max_abs());
  std::vector<BandRow> rows(d.bands.size());
  std::vector<char> keep(d.bands.size(), 0);
  parallel_for(d.bands.size(), [&](std::size_t i) {
    const GridField& b = d.bands[i];
    BandRow r;
    r.j = d.j[i];
    r.sup_norm = b.max_abs();
    if (top == 0.0 || r.sup_norm <= floor * top) return;
    r.p0_norm = lp_norm(b, p0);
    const double freq = std::ldexp(2.0 * std::numbers::pi / b.side(), r.j);
    r.bernstein = spectral::gradient_magnitude(b).max() / (freq * r.sup_norm);
    r.nikolskii = r.sup_norm / (std::exp2(2.0 * r.j / p0) * r.p0_norm);
    rows[i] = r;
    keep[i] = 1;
  });
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!keep[i]) continue;
    rep.rows.push_back(rows[i]);
    rep.max_bernstein = std::max(rep.max_bernstein, rows[i].bernstein);
    rep.max_nikolskii = std::max(rep.max_nikolskii, rows[i].nikolskii);
  }
  return rep;
}

/// sup_j ||f_j||_inf / dyadic BMO norm (empirical surrogate for bmo into B^0_{inf,inf}).
inline double bmo_band_ratio(const DyadicDecomposition& d, const GridField& f) {
  double top = 0.0;
  for (const auto& b : d.bands) top = std::max(top, b.max_abs());
  const double bmo = dyadic_bmo_norm(f);
  return bmo == 0.0 ? 0.0 : top / bmo;
}

}  // namespace osgood::lp
