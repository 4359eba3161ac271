#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "osgood/fft.hpp"
#include "osgood/field.hpp"

namespace osgood::spectral {

/// Applies the Fourier multiplier m(kx, ky) (integer wavenumbers) to f.
/// The result is real; the imaginary residue of non-Hermitian symbols is dropped.
template <class Symbol>
GridField apply(const GridField& f, Symbol&& m) {
  const int n = f.n();
  fft::Spectrum c = fft::forward(f.values(), n);
  for (int iy = 0; iy < n; ++iy) {
    const int ky = fft::wavenumber(iy, n);
    for (int ix = 0; ix < n; ++ix) c[static_cast<std::size_t>(iy) * n + ix] *= m(fft::wavenumber(ix, n), ky);
  }
  return GridField(n, fft::inverse_real(c, n), f.domain());
}

/// Physical angular wavenumber of integer mode k on a square of side L.
inline double physical(int k, double side) { return 2.0 * std::numbers::pi * k / side; }

/// Spectral partial derivative along axis 0 (x1) or 1 (x2). The Nyquist mode of
/// the differentiated axis is zeroed (odd multiplier).
inline GridField derivative(const GridField& f, int axis) {
  const int n = f.n();
  const double L = f.side();
  return apply(f, [&](int kx, int ky) {
    const int k = axis == 0 ? kx : ky;
    if (k == -n / 2) return std::complex<double>(0.0, 0.0);
    return std::complex<double>(0.0, physical(k, L));
  });
}

inline std::array<GridField, 2> gradient(const GridField& f) { return {derivative(f, 0), derivative(f, 1)}; }

inline GridField gradient_magnitude(const GridField& f) {
  const auto g = gradient(f);
  return magnitude(g);
}

}  // namespace osgood::spectral
