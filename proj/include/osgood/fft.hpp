#pragma once

// Thin RAII layer over FFTW for square periodic grids. Plans are created once
// per size under a lock (the FFTW planner is not re-entrant) and then executed
// concurrently through the new-array interface.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace osgood::fft {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

/// Signed wavenumber of FFT index `idx` on an n-point axis. The Nyquist index
/// n/2 maps to -n/2.
constexpr int wavenumber(int idx, int n) noexcept { return idx < n / 2 ? idx : idx - n; }

namespace detail {

struct Buffer {
  explicit Buffer(std::size_t count)
      : ptr(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * count))) {
    if (!ptr) throw std::bad_alloc();
  }
  ~Buffer() { fftw_free(ptr); }
  Buffer(const Buffer&) = delete;
  Buffer& operator=(const Buffer&) = delete;
  fftw_complex* ptr;
};

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

inline const PlanPair& plans_for(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Buffer in(static_cast<std::size_t>(n) * n), out(static_cast<std::size_t>(n) * n);
  PlanPair p;
  p.forward = fftw_plan_dft_2d(n, n, in.ptr, out.ptr, FFTW_FORWARD, FFTW_ESTIMATE);
  p.backward = fftw_plan_dft_2d(n, n, in.ptr, out.ptr, FFTW_BACKWARD, FFTW_ESTIMATE);
  return cache.emplace(n, p).first->second;
}

inline void execute(fftw_plan plan, std::span<const Complex> in, std::span<Complex> out) {
  Buffer a(in.size()), b(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    a.ptr[i][0] = in[i].real();
    a.ptr[i][1] = in[i].imag();
  }
  fftw_execute_dft(plan, a.ptr, b.ptr);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = Complex(b.ptr[i][0], b.ptr[i][1]);
}

}  // namespace detail

/// Fourier coefficients c_k = n^{-2} sum_x f(x) e^{-i k.x}; row-major layout
/// with the row index along the second axis, matching GridField.
inline Spectrum forward(std::span<const double> samples, int n) {
  Spectrum in(samples.begin(), samples.end());
  Spectrum out(in.size());
  detail::execute(detail::plans_for(n).forward, in, out);
  const double scale = 1.0 / (static_cast<double>(n) * n);
  for (auto& c : out) c *= scale;
  return out;
}

inline Spectrum inverse(std::span<const Complex> coeffs, int n) {
  Spectrum out(coeffs.size());
  detail::execute(detail::plans_for(n).backward, coeffs, out);
  return out;
}

/// Inverse transform keeping the real part. Callers are responsible for
/// Hermitian symmetry of the coefficients.
inline std::vector<double> inverse_real(std::span<const Complex> coeffs, int n) {
  const Spectrum z = inverse(coeffs, n);
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i].real();
  return out;
}

}  // namespace osgood::fft
