#pragma once

// Periodic grid fields, decreasing rearrangements, L^p norms, and the two
// sharp maximal operators over a dyadic cube hierarchy.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "osgood/error.hpp"
#include "osgood/parallel.hpp"

namespace osgood {

enum class Domain : std::uint32_t { Torus2Pi = 0, UnitizedTorus = 1 };

inline std::string to_string(Domain d) { return d == Domain::Torus2Pi ? "torus2pi" : "unit"; }

inline Domain domain_from_string(const std::string& s) {
  if (s == "torus2pi" || s == "0") return Domain::Torus2Pi;
  if (s == "unit" || s == "1") return Domain::UnitizedTorus;
  throw Error(ErrorCode::ConfigError, "unknown domain tag " + s);
}

inline double domain_side(Domain d) { return d == Domain::Torus2Pi ? 2.0 * std::numbers::pi : 1.0; }

/// n x n samples on a periodic square of side L. Sample (ix, iy) sits at
/// x = (-L/2 + ix h, -L/2 + iy h) with h = L/n, so the origin is node (n/2, n/2).
/// Storage is row-major, data[iy * n + ix].
class GridField {
 public:
  GridField() = default;

  GridField(int n, Domain domain = Domain::UnitizedTorus)
      : n_(n), domain_(domain), data_(static_cast<std::size_t>(n) * n, 0.0) {
    check_size();
  }

  GridField(int n, std::vector<double> data, Domain domain = Domain::UnitizedTorus, bool mean_removed = false)
      : n_(n), domain_(domain), mean_removed_(mean_removed), data_(std::move(data)) {
    check_size();
    if (data_.size() != static_cast<std::size_t>(n) * n)
      throw Error(ErrorCode::InvalidField, "data length does not match n*n");
    validate();
  }

  /// Samples fn(x1, x2) at the grid nodes.
  template <class F>
  static GridField sample(int n, Domain domain, F&& fn) {
    GridField f(n, domain);
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) f.at(ix, iy) = fn(f.coord(ix), f.coord(iy));
    f.validate();
    return f;
  }

  int n() const noexcept { return n_; }
  Domain domain() const noexcept { return domain_; }
  bool mean_removed() const noexcept { return mean_removed_; }
  double side() const noexcept { return domain_side(domain_); }
  double cell() const noexcept { return side() / n_; }
  double cell_measure() const noexcept { return cell() * cell(); }
  double total_measure() const noexcept { return side() * side(); }
  std::size_t size() const noexcept { return data_.size(); }

  double coord(int i) const noexcept { return -0.5 * side() + i * cell(); }

  double& at(int ix, int iy) { return data_[static_cast<std::size_t>(iy) * n_ + ix]; }
  double at(int ix, int iy) const { return data_[static_cast<std::size_t>(iy) * n_ + ix]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  /// Periodic access with arbitrary integer indices.
  double wrap(int ix, int iy) const {
    ix %= n_;
    iy %= n_;
    if (ix < 0) ix += n_;
    if (iy < 0) iy += n_;
    return at(ix, iy);
  }

  std::span<const double> values() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  double mean() const { return pairwise_sum(data_) / static_cast<double>(data_.size()); }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  double max() const { return *std::max_element(data_.begin(), data_.end()); }
  double min() const { return *std::min_element(data_.begin(), data_.end()); }

  GridField remove_mean() const {
    GridField g = *this;
    const double m = mean();
    for (double& v : g.data_) v -= m;
    g.mean_removed_ = true;
    return g;
  }

  /// Same samples on the other square; only the cell measure changes.
  GridField with_domain(Domain d) const {
    GridField g = *this;
    g.domain_ = d;
    return g;
  }

  GridField& set_mean_removed(bool flag) {
    mean_removed_ = flag;
    if (flag) validate();
    return *this;
  }

  void validate() const {
    for (double v : data_)
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidField, "non-finite sample");
    if (mean_removed_) {
      const double m = mean();
      if (std::abs(m) > 1e-12 * std::max(max_abs(), std::numeric_limits<double>::min()))
        throw Error(ErrorCode::InvalidField, "field flagged mean-removed has nonzero mean");
    }
  }

  GridField& operator+=(const GridField& o) {
    same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    mean_removed_ = false;
    return *this;
  }
  GridField& operator-=(const GridField& o) {
    same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    mean_removed_ = false;
    return *this;
  }
  GridField& operator*=(double c) {
    for (double& v : data_) v *= c;
    return *this;
  }
  friend GridField operator+(GridField a, const GridField& b) { return a += b; }
  friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
  friend GridField operator*(double c, GridField a) { return a *= c; }

  GridField abs() const {
    GridField g = *this;
    for (double& v : g.data_) v = std::abs(v);
    g.mean_removed_ = false;
    return g;
  }

 private:
  void check_size() const {
    if (n_ < 2 || !std::has_single_bit(static_cast<unsigned>(n_)))
      throw Error(ErrorCode::InvalidField, "grid size must be a power of two >= 2");
  }
  void same_shape(const GridField& o) const {
    if (o.n_ != n_) throw Error(ErrorCode::InvalidField, "grid size mismatch");
  }

  int n_ = 0;
  Domain domain_ = Domain::UnitizedTorus;
  bool mean_removed_ = false;
  std::vector<double> data_;
};

/// Pointwise Euclidean magnitude of a list of same-shape fields.
inline GridField magnitude(std::span<const GridField> parts) {
  GridField out(parts.front().n(), parts.front().domain());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (const auto& p : parts) s += p[i] * p[i];
    out[i] = std::sqrt(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// I/O

namespace io {

inline void write_binary(const GridField& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  static_assert(std::endian::native == std::endian::little, "little-endian host expected");
  const std::uint32_t header[4] = {0x4647534Fu /* "OSGF" */, static_cast<std::uint32_t>(f.n()),
                                   static_cast<std::uint32_t>(f.domain()), f.mean_removed() ? 1u : 0u};
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  out.write(reinterpret_cast<const char*>(f.data().data()), static_cast<std::streamsize>(f.size() * 8));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path);
}

inline GridField read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::uint32_t header[4];
  in.read(reinterpret_cast<char*>(header), sizeof header);
  if (!in || std::memcmp(header, "OSGF", 4) != 0) throw Error(ErrorCode::IoError, path + ": bad header");
  const int n = static_cast<int>(header[1]);
  if (header[2] > 1) throw Error(ErrorCode::IoError, path + ": unknown domain tag");
  std::vector<double> data(static_cast<std::size_t>(n) * n);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * 8));
  if (!in) throw Error(ErrorCode::IoError, path + ": truncated data");
  GridField f(n, std::move(data), static_cast<Domain>(header[2]));
  if (header[3] & 1u) f.set_mean_removed(true);
  return f;
}

inline void write_csv(const GridField& f, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw Error(ErrorCode::IoError, "cannot write " + path);
  std::fprintf(fp, "# n=%d domain=%s\n", f.n(), to_string(f.domain()).c_str());
  for (int iy = 0; iy < f.n(); ++iy)
    for (int ix = 0; ix < f.n(); ++ix)
      std::fprintf(fp, "%.17g%c", f.at(ix, iy), ix + 1 == f.n() ? '\n' : ',');
  std::fclose(fp);
}

inline GridField read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::string line;
  std::getline(in, line);
  int n = 0;
  char tag[32] = {0};
  if (std::sscanf(line.c_str(), "# n=%d domain=%31s", &n, tag) != 2)
    throw Error(ErrorCode::IoError, path + ": missing '# n=<n> domain=<tag>' header");
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(n) * n);
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double v;
    while (row >> v) data.push_back(v);
  }
  return GridField(n, std::move(data), domain_from_string(tag));
}

/// Binary when the file starts with the OSGF magic, CSV otherwise.
inline GridField read_any(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  char magic[4] = {0};
  in.read(magic, 4);
  return std::memcmp(magic, "OSGF", 4) == 0 ? read_binary(path) : read_csv(path);
}

}  // namespace io

// ---------------------------------------------------------------------------
// Rearrangements

/// Step-function decreasing rearrangement: f*(t) = values[k] on [k c, (k+1) c).
class RearrangementProfile {
 public:
  RearrangementProfile(std::vector<double> sorted_desc, double cell_measure)
      : values_(std::move(sorted_desc)), cell_(cell_measure), prefix_(values_.size() + 1, 0.0) {
    for (std::size_t k = 0; k < values_.size(); ++k) prefix_[k + 1] = prefix_[k] + values_[k];
  }

  const std::vector<double>& values() const noexcept { return values_; }
  double cell_measure() const noexcept { return cell_; }
  double total_measure() const noexcept { return cell_ * values_.size(); }

  double star(double t) const {
    if (!(t >= 0.0)) return values_.front();
    const double k = std::floor(t / cell_);
    if (k >= static_cast<double>(values_.size())) return 0.0;
    return values_[static_cast<std::size_t>(k)];
  }

  /// int_0^t f*(s) ds with exact partial cells.
  double integral(double t) const {
    if (t <= 0.0) return 0.0;
    const double kf = std::floor(t / cell_);
    if (kf >= static_cast<double>(values_.size())) return prefix_.back() * cell_;
    const auto k = static_cast<std::size_t>(kf);
    return prefix_[k] * cell_ + (t - kf * cell_) * values_[k];
  }

  double double_star(double t) const { return t > cell_ ? integral(t) / t : values_.front(); }

  /// (int_0^T (f*)^p)^{1/p}, scaled by the maximum to avoid overflow.
  double norm(double p) const {
    if (p < 1.0) throw Error(ErrorCode::InvalidExponent, "p must be >= 1");
    const double m = values_.empty() ? 0.0 : values_.front();
    if (std::isinf(p) || m == 0.0) return m;
    std::vector<double> terms(values_.size());
    for (std::size_t k = 0; k < values_.size(); ++k) terms[k] = std::pow(values_[k] / m, p);
    return m * std::pow(pairwise_sum(terms) * cell_, 1.0 / p);
  }

 private:
  std::vector<double> values_;
  double cell_;
  std::vector<double> prefix_;
};

/// Prefix sums of (f*)^p for repeated evaluations of int_0^t (f*)^p.
class PowerPrefix {
 public:
  PowerPrefix(const RearrangementProfile& prof, double p)
      : prof_(&prof), p_(p), scale_(prof.values().empty() ? 0.0 : prof.values().front()),
        prefix_(prof.values().size() + 1, 0.0) {
    const auto& v = prof.values();
    for (std::size_t k = 0; k < v.size(); ++k)
      prefix_[k + 1] = prefix_[k] + (scale_ > 0.0 ? std::pow(v[k] / scale_, p) : 0.0);
  }

  /// (int_0^t (f*)^p)^{1/p}
  double root_integral(double t) const {
    if (t <= 0.0 || scale_ == 0.0) return 0.0;
    const double c = prof_->cell_measure();
    const auto& v = prof_->values();
    const double kf = std::floor(t / c);
    double s;
    if (kf >= static_cast<double>(v.size())) {
      s = prefix_.back() * c;
    } else {
      const auto k = static_cast<std::size_t>(kf);
      s = prefix_[k] * c + (t - kf * c) * std::pow(v[k] / scale_, p_);
    }
    return scale_ * std::pow(s, 1.0 / p_);
  }

 private:
  const RearrangementProfile* prof_;
  double p_;
  double scale_;
  std::vector<double> prefix_;
};

inline RearrangementProfile rearrange(const GridField& f) {
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::abs(f[i]);
  std::sort(v.begin(), v.end(), std::greater<>());
  return RearrangementProfile(std::move(v), f.cell_measure());
}

inline double lp_norm(const GridField& f, double p) {
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidExponent, "p must be >= 1");
  const double m = f.max_abs();
  if (std::isinf(p) || m == 0.0) return m;
  std::vector<double> terms(f.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = std::pow(std::abs(f[i]) / m, p);
  return m * std::pow(pairwise_sum(terms) * f.cell_measure(), 1.0 / p);
}

// ---------------------------------------------------------------------------
// Sharp maximal operators

/// One cube of side `side` cells whose lower corner is (x0, y0), wrapped.
struct Cube {
  int x0, y0, side;
};

/// Dyadic sides n, n/2, ..., min_side. Below the top level every cube also
/// appears shifted by half its side along each axis, wrapping around the torus.
inline std::vector<Cube> cube_hierarchy(int n, int min_side = 4) {
  std::vector<Cube> cubes;
  for (int s = n; s >= std::min(min_side, n); s /= 2) {
    const int per = n / s;
    const bool top = s == n;
    for (int sy : {0, s / 2}) {
      for (int sx : {0, s / 2}) {
        if (top && (sx || sy)) continue;
        for (int b = 0; b < per; ++b)
          for (int a = 0; a < per; ++a) cubes.push_back({sx + a * s, sy + b * s, s});
      }
    }
    if (s == 1) break;
  }
  return cubes;
}

namespace detail {

template <class CubeValue>
GridField cube_max(const GridField& f, int min_side, CubeValue&& value) {
  const std::vector<Cube> cubes = cube_hierarchy(f.n(), min_side);
  std::vector<double> vals(cubes.size());
  parallel_for(cubes.size(), [&](std::size_t c) {
    const Cube q = cubes[c];
    std::vector<double> buf;
    buf.reserve(static_cast<std::size_t>(q.side) * q.side);
    for (int dy = 0; dy < q.side; ++dy)
      for (int dx = 0; dx < q.side; ++dx) buf.push_back(f.wrap(q.x0 + dx, q.y0 + dy));
    vals[c] = value(buf);
  });
  GridField out(f.n(), f.domain());
  const int n = f.n();
  for (std::size_t c = 0; c < cubes.size(); ++c) {
    const Cube q = cubes[c];
    for (int dy = 0; dy < q.side; ++dy) {
      const int iy = (q.y0 + dy) % n;
      for (int dx = 0; dx < q.side; ++dx) {
        double& o = out.at((q.x0 + dx) % n, iy);
        o = std::max(o, vals[c]);
      }
    }
  }
  return out;
}

/// inf_c ((f - c) on the cube)^*(lambda |Q|): half the shortest window holding
/// m - floor(lambda m) of the m samples.
inline double sharp_cube_value(std::vector<double>& buf, double lambda) {
  std::sort(buf.begin(), buf.end());
  const std::size_t m = buf.size();
  const std::size_t k = m - static_cast<std::size_t>(std::floor(lambda * static_cast<double>(m)));
  if (k <= 1) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + k <= m; ++i) best = std::min(best, buf[i + k - 1] - buf[i]);
  return 0.5 * best;
}

inline double mean_oscillation(std::vector<double>& buf) {
  const double avg = pairwise_sum(buf) / static_cast<double>(buf.size());
  for (double& v : buf) v = std::abs(v - avg);
  return pairwise_sum(buf) / static_cast<double>(buf.size());
}

}  // namespace detail

struct SharpMaximalField {
  GridField base;
  double lambda = 0.25;
  int min_side = 4;
  GridField result;
};

inline SharpMaximalField sharp_maximal(const GridField& f, double lambda = 0.25, int min_side = 4) {
  if (!(lambda > 0.0 && lambda <= 0.5)) throw Error(ErrorCode::InvalidLambda, "lambda must lie in (0, 1/2]");
  f.validate();
  GridField r = detail::cube_max(f, min_side, [lambda](std::vector<double>& b) {
    return detail::sharp_cube_value(b, lambda);
  });
  return SharpMaximalField{f, lambda, min_side, std::move(r)};
}

/// Dyadic Fefferman-Stein sharp function sup_{Q containing x} |Q|^{-1} int_Q |f - f_Q|.
inline GridField fefferman_stein_sharp(const GridField& f, int min_side = 4) {
  f.validate();
  return detail::cube_max(f, min_side, [](std::vector<double>& b) { return detail::mean_oscillation(b); });
}

/// Dyadic BMO norm: the global maximum of the sharp function.
inline double dyadic_bmo_norm(const GridField& f, int min_side = 4) {
  return fefferman_stein_sharp(f, min_side).max();
}

}  // namespace osgood
