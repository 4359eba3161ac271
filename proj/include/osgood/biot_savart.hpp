#pragma once

// Velocity from vorticity through the multiplier v^ = -i xi_perp |xi|^{beta-2} w^,
// xi_perp = (-xi_2, xi_1). beta = 0 is the 2D Euler Biot-Savart law, beta = 1
// the SQG law.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "osgood/csv.hpp"
#include "osgood/fft.hpp"
#include "osgood/field.hpp"
#include "osgood/growth.hpp"
#include "osgood/kfunc.hpp"
#include "osgood/littlewood_paley.hpp"
#include "osgood/spaces.hpp"

namespace osgood::biot {

using fft::Complex;

struct SpectralOperator {
  double beta = 0.0;
  double side = 2.0 * std::numbers::pi;

  /// Multiplier pair at integer frequency (kx, ky) != 0.
  std::array<Complex, 2> symbol(int kx, int ky) const {
    const double x1 = spectral::physical(kx, side), x2 = spectral::physical(ky, side);
    const double m = std::pow(x1 * x1 + x2 * x2, 0.5 * (beta - 2.0));
    return {Complex(0.0, x2 * m), Complex(0.0, -x1 * m)};
  }

  /// |xi|^{beta - 2} at the largest grid frequency; large when beta > 2.
  double top_band_amplification(int n) const {
    const double k = spectral::physical(n / 2, side) * std::sqrt(2.0);
    return std::pow(k, beta - 2.0);
  }
};

struct Velocity {
  GridField v1, v2;
  double top_band_amplification = 1.0;
  bool singular_regime = false;  // beta > 2
};

namespace detail {

inline void check_mean(const GridField& w) {
  w.validate();
  const double m = w.mean(), scale = w.max_abs();
  if (std::abs(m) > 1e-10 * scale) throw Error(ErrorCode::NonZeroMean, "vorticity must have zero mean");
}

/// Spectral velocity coefficients; Nyquist rows/columns are dropped.
inline std::array<fft::Spectrum, 2> velocity_coeffs(const GridField& w, const SpectralOperator& op) {
  const int n = w.n();
  const fft::Spectrum c = fft::forward(w.values(), n);
  std::array<fft::Spectrum, 2> v{fft::Spectrum(c.size()), fft::Spectrum(c.size())};
  for (int iy = 0; iy < n; ++iy) {
    const int ky = fft::wavenumber(iy, n);
    for (int ix = 0; ix < n; ++ix) {
      const int kx = fft::wavenumber(ix, n);
      if ((kx == 0 && ky == 0) || kx == -n / 2 || ky == -n / 2) continue;
      const std::size_t i = static_cast<std::size_t>(iy) * n + ix;
      const auto s = op.symbol(kx, ky);
      v[0][i] = s[0] * c[i];
      v[1][i] = s[1] * c[i];
    }
  }
  return v;
}

}  // namespace detail

inline Velocity biot_savart(const GridField& omega, double beta = 0.0) {
  detail::check_mean(omega);
  const SpectralOperator op{beta, omega.side()};
  const int n = omega.n();
  const auto vc = detail::velocity_coeffs(omega, op);
  Velocity v{GridField(n, fft::inverse_real(vc[0], n), omega.domain()),
             GridField(n, fft::inverse_real(vc[1], n), omega.domain()), op.top_band_amplification(n), beta > 2.0};
  return v;
}

/// Entries d[a][b] = partial_a v_b (a, b in {0, 1}).
struct VelocityGradient {
  std::array<std::array<GridField, 2>, 2> d;
  GridField curl() const { return d[0][1] - d[1][0]; }
  GridField divergence() const { return d[0][0] + d[1][1]; }
  double max_abs() const {
    double m = 0.0;
    for (const auto& row : d)
      for (const auto& f : row) m = std::max(m, f.max_abs());
    return m;
  }
};

inline VelocityGradient czo_gradient(const GridField& omega, double beta = 0.0) {
  detail::check_mean(omega);
  const SpectralOperator op{beta, omega.side()};
  const int n = omega.n();
  const auto vc = detail::velocity_coeffs(omega, op);
  VelocityGradient g;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      fft::Spectrum s(vc[b].size());
      for (int iy = 0; iy < n; ++iy) {
        const int ky = fft::wavenumber(iy, n);
        for (int ix = 0; ix < n; ++ix) {
          const int kx = fft::wavenumber(ix, n);
          const std::size_t i = static_cast<std::size_t>(iy) * n + ix;
          const double xi = spectral::physical(a == 0 ? kx : ky, omega.side());
          s[i] = Complex(0.0, xi) * vc[b][i];
        }
      }
      g.d[a][b] = GridField(n, fft::inverse_real(s, n), omega.domain());
    }
  return g;
}

/// max over frequencies of |xi . v^(xi)| relative to max |v^|.
inline double spectral_divergence(const GridField& omega, double beta = 0.0) {
  detail::check_mean(omega);
  const SpectralOperator op{beta, omega.side()};
  const int n = omega.n();
  const auto vc = detail::velocity_coeffs(omega, op);
  double worst = 0.0;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const std::size_t i = static_cast<std::size_t>(iy) * n + ix;
      const double x1 = spectral::physical(fft::wavenumber(ix, n), op.side);
      const double x2 = spectral::physical(fft::wavenumber(iy, n), op.side);
      worst = std::max(worst, std::abs(x1 * vc[0][i] + x2 * vc[1][i]));
    }
  return worst;
}

// ---------------------------------------------------------------------------
// Modulus-of-continuity envelopes

enum class NormChoice { SharpYudovich, Vishik, Classical };

inline std::string to_string(NormChoice c) {
  switch (c) {
    case NormChoice::SharpYudovich: return "sharp-yudovich";
    case NormChoice::Vishik: return "vishik";
    case NormChoice::Classical: return "classical";
  }
  return "unknown";
}

struct EnvelopeOptions {
  NormChoice norm = NormChoice::SharpYudovich;
  double p0 = 4.0;
  double lambda = 0.25;
  int samples = 48;
};

struct ModulusEnvelope {
  NormChoice norm = NormChoice::SharpYudovich;
  std::string growth;
  int n = 0;
  double norm_value = 0.0;
  std::vector<double> h;
  std::vector<double> measured;
  std::vector<double> envelope;
  std::vector<double> ratio;
  double fitted_C = 0.0;
  double lipschitz = 0.0;  // max |grad v|
  double top_band_amplification = 1.0;

  void write_csv(const std::string& path) const {
    CsvWriter w(path);
    w.comment("norm=" + to_string(norm) + " growth=" + growth + " n=" + std::to_string(n));
    w.header({"h", "measured", "envelope", "ratio"});
    for (std::size_t i = 0; i < h.size(); ++i) w.row({h[i], measured[i], envelope[i], ratio[i]});
  }
};

/// 48 geometric separations in [cell, L/2].
inline std::vector<double> envelope_h_grid(const GridField& f, int samples = 48) {
  return geometric_grid(f.cell(), 0.5 * f.side(), samples);
}

/// Norm of omega multiplying the envelope.
inline double envelope_norm(const GridField& omega, double beta, const GrowthFunction& g, const EnvelopeOptions& opt) {
  switch (opt.norm) {
    case NormChoice::SharpYudovich: return sharp_yudovich_norm(omega, g, opt.p0, opt.lambda).direct_value;
    case NormChoice::Vishik: {
      const auto d = lp::decompose(omega);
      return lp::vishik_norm(d, g, beta) + lp::besov_norm(d, beta - 1.0);
    }
    case NormChoice::Classical: return omega.max_abs();
  }
  return 0.0;
}

/// Envelope shape h y(1/h): y_{Theta_1} for the sharp Yudovich norm, y_Pi (p0 = 1)
/// for the Vishik norm, and h (1 + |log h|) for the classical bound.
inline double envelope_shape(double h, const GrowthFunction& g, const EnvelopeOptions& opt) {
  switch (opt.norm) {
    case NormChoice::SharpYudovich:
      return h * yudovich_eval_log(theta1(g.with_p0(opt.p0)), -std::log(h)).value;
    case NormChoice::Vishik: return h * yudovich_eval_log(g.with_p0(1.0), -std::log(h)).value;
    case NormChoice::Classical: return h * (1.0 + std::abs(std::log(h)));
  }
  return 0.0;
}

inline ModulusEnvelope modulus_envelope(const GridField& omega, double beta, const GrowthFunction& g,
                                        const EnvelopeOptions& opt = {}) {
  const Velocity v = biot_savart(omega, beta);
  ModulusEnvelope e;
  e.norm = opt.norm;
  e.growth = opt.norm == NormChoice::Classical ? std::string("classical") : g.name();
  e.n = omega.n();
  e.top_band_amplification = v.top_band_amplification;
  e.h = envelope_h_grid(omega, opt.samples);
  const GridField comps[2] = {v.v1, v.v2};
  e.measured = k_linf_lip(std::span<const GridField>(comps, 2), e.h).k;
  e.norm_value = envelope_norm(omega, beta, g, opt);
  {
    const auto gr = czo_gradient(omega, beta);
    e.lipschitz = gr.max_abs();
  }
  for (std::size_t i = 0; i < e.h.size(); ++i) {
    const double env = envelope_shape(e.h[i], g, opt) * e.norm_value;
    e.envelope.push_back(env);
    e.ratio.push_back(env > 0.0 ? e.measured[i] / env : 0.0);
    e.fitted_C = std::max(e.fitted_C, e.ratio.back());
  }
  return e;
}

}  // namespace osgood::biot
