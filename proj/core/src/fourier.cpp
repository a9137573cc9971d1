// Copyright 2026 The Kamlab Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kamlab/fourier.hpp"

#include <map>
#include <random>
#include <stdexcept>

namespace kamlab {

namespace fft {

namespace {

// Twiddle table e^{-2 pi i j/M}, j < M/2, cached per (size, precision).
const std::vector<Complex>& twiddles(std::size_t m) {
  static std::map<std::pair<std::size_t, long>, std::vector<Complex>> cache;
  auto key = std::make_pair(m, working_precision());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<Complex> tw(m / 2);
  Real step = Real::two_pi() / Real(static_cast<long>(m));
  for (std::size_t j = 0; j < m / 2; ++j) {
    Real s(0L), c(0L);
    sin_cos(s, c, step * Real(static_cast<long>(j)));
    tw[j] = Complex(c, -s);
  }
  return cache.emplace(key, std::move(tw)).first->second;
}

}  // namespace

void transform(std::vector<Complex>& data, bool inverse) {
  const std::size_t m = data.size();
  if (m == 0 || (m & (m - 1)) != 0)
    throw std::invalid_argument("fft size must be a power of two");
  // Bit reversal permutation.
  for (std::size_t i = 1, j = 0; i < m; ++i) {
    std::size_t bit = m >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  const std::vector<Complex>& tw = twiddles(m);
  for (std::size_t len = 2; len <= m; len <<= 1) {
    std::size_t stride = m / len;
    for (std::size_t i = 0; i < m; i += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        Complex w = tw[j * stride];
        if (inverse) w.im = -w.im;
        Complex u = data[i + j];
        Complex v = data[i + j + len / 2] * w;
        data[i + j] = u + v;
        data[i + j + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    Real inv = Real(1L) / Real(static_cast<long>(m));
    for (auto& c : data) {
      c.re *= inv;
      c.im *= inv;
    }
  }
}

}  // namespace fft

AlgebraMap AlgebraMap::zero(long half_band, bool half_lattice) {
  AlgebraMap f;
  f.half_band_ = half_band;
  f.half_lattice_ = half_lattice;
  f.t_.assign(2 * half_band + 1, Complex::zero());
  f.z_.assign(2 * half_band + 1, Complex::zero());
  return f;
}

Complex AlgebraMap::t_coeff(long h) const {
  if (std::labs(h) > half_band_) return Complex::zero();
  return t_[h + half_band_];
}

Complex AlgebraMap::z_coeff(long h) const {
  if (std::labs(h) > half_band_) return Complex::zero();
  return z_[h + half_band_];
}

void AlgebraMap::ensure_band(long h) {
  long need = std::labs(h);
  if (need <= half_band_) return;
  std::vector<Complex> t(2 * need + 1, Complex::zero());
  std::vector<Complex> z(2 * need + 1, Complex::zero());
  for (long i = -half_band_; i <= half_band_; ++i) {
    t[i + need] = t_[i + half_band_];
    z[i + need] = z_[i + half_band_];
  }
  t_ = std::move(t);
  z_ = std::move(z);
  half_band_ = need;
}

void AlgebraMap::set_t(long h, const Complex& c) {
  if ((h & 1) != 0 && !c.is_zero()) half_lattice_ = true;
  ensure_band(h);
  t_[h + half_band_] = c;
}

void AlgebraMap::set_z(long h, const Complex& c) {
  if ((h & 1) != 0 && !c.is_zero()) half_lattice_ = true;
  ensure_band(h);
  z_[h + half_band_] = c;
}

void AlgebraMap::set_t_hermitian(long h, const Complex& c) {
  set_t(h, c);
  if (h != 0) set_t(-h, conj(c));
}

Real AlgebraMap::symmetrize_t() {
  Real worst(0L);
  for (long h = 0; h <= half_band_; ++h) {
    Complex a = t_[h + half_band_];
    Complex b = t_[-h + half_band_];
    Complex sym = Complex((a.re + b.re) / Real(2L), (a.im - b.im) / Real(2L));
    Real corr = max(abs(a - sym), abs(b - conj(sym)));
    if (corr > worst) worst = corr;
    t_[h + half_band_] = sym;
    t_[-h + half_band_] = conj(sym);
  }
  return worst;
}

bool AlgebraMap::is_integer_lattice(const Real& tol) const {
  for (long h = -half_band_; h <= half_band_; ++h) {
    if ((h & 1) == 0) continue;
    if (abs(t_[h + half_band_]) > tol || abs(z_[h + half_band_]) > tol)
      return false;
  }
  return true;
}

AlgebraMap operator+(const AlgebraMap& a, const AlgebraMap& b) {
  AlgebraMap r = AlgebraMap::zero(std::max(a.half_band_, b.half_band_),
                                  a.half_lattice_ || b.half_lattice_);
  for (long h = -r.half_band_; h <= r.half_band_; ++h) {
    r.t_[h + r.half_band_] = a.t_coeff(h) + b.t_coeff(h);
    r.z_[h + r.half_band_] = a.z_coeff(h) + b.z_coeff(h);
  }
  r.aliasing_bound_ = a.aliasing_bound_ + b.aliasing_bound_;
  return r;
}

AlgebraMap operator-(const AlgebraMap& a, const AlgebraMap& b) {
  return a + (-b);
}

AlgebraMap AlgebraMap::operator-() const {
  AlgebraMap r = *this;
  for (auto& c : r.t_) c = -c;
  for (auto& c : r.z_) c = -c;
  return r;
}

AlgebraMap operator*(const Real& s, const AlgebraMap& f) {
  AlgebraMap r = f;
  for (auto& c : r.t_) c = s * c;
  for (auto& c : r.z_) c = s * c;
  r.aliasing_bound_ = abs(s) * f.aliasing_bound_;
  return r;
}

void AlgebraMap::drop_small(const Real& tol) {
  Real dropped(0L);
  for (long h = -half_band_; h <= half_band_; ++h) {
    for (auto* ch : {&t_, &z_}) {
      Complex& c = (*ch)[h + half_band_];
      if (!c.is_zero() && abs(c) <= tol) {
        dropped += abs(c);
        c = Complex::zero();
      }
    }
  }
  aliasing_bound_ += dropped;
  // Shrink the band to the support.
  long need = 0;
  for (long h = -half_band_; h <= half_band_; ++h) {
    if (!t_[h + half_band_].is_zero() || !z_[h + half_band_].is_zero())
      need = std::max(need, std::labs(h));
  }
  if (need < half_band_) {
    AlgebraMap r = zero(need, half_lattice_);
    for (long h = -need; h <= need; ++h) {
      r.t_[h + need] = t_[h + half_band_];
      r.z_[h + need] = z_[h + half_band_];
    }
    r.aliasing_bound_ = aliasing_bound_;
    *this = std::move(r);
  }
}

AlgebraElement AlgebraMap::evaluate(const Real& x) const {
  // e^{i pi h x} by iterated multiplication from the h=1 phase.
  Complex base = Complex::unit(x / Real(2L));  // e^{i pi x}
  Complex tsum = Complex::zero(), zsum = Complex::zero();
  Complex ph = Complex::one();
  // h = 0 term
  tsum += t_coeff(0);
  zsum += z_coeff(0);
  for (long h = 1; h <= half_band_; ++h) {
    ph = ph * base;
    Complex phm = conj(ph);
    tsum += t_coeff(h) * ph + t_coeff(-h) * phm;
    zsum += z_coeff(h) * ph + z_coeff(-h) * phm;
  }
  return AlgebraElement(tsum.re, zsum);
}

std::vector<AlgebraElement> AlgebraMap::sample_grid(std::size_t m) const {
  if (m == 0 || (m & (m - 1)) != 0)
    throw std::invalid_argument("sample_grid size must be a power of two");
  if (static_cast<long>(m) <= 2 * half_band_)
    throw std::invalid_argument("sample_grid: grid too small for band");
  std::vector<Complex> tbins(m, Complex::zero()), zbins(m, Complex::zero());
  for (long h = -half_band_; h <= half_band_; ++h) {
    std::size_t bin = static_cast<std::size_t>((h % static_cast<long>(m) +
                                                static_cast<long>(m)) %
                                               static_cast<long>(m));
    tbins[bin] += t_coeff(h);
    zbins[bin] += z_coeff(h);
  }
  fft::transform(tbins, true);
  fft::transform(zbins, true);
  Real scale(static_cast<long>(m));
  std::vector<AlgebraElement> out;
  out.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    out.emplace_back(scale * tbins[j].re, scale * zbins[j]);
  }
  return out;
}

AlgebraMap AlgebraMap::derivative(int order) const {
  AlgebraMap r = *this;
  Real pi = Real::pi();
  for (long h = -half_band_; h <= half_band_; ++h) {
    // d/dx e^{i pi h x} = (i pi h) e^{i pi h x}
    Complex factor = Complex::one();
    for (int o = 0; o < order; ++o)
      factor = factor * Complex(Real(0L), pi * Real(h));
    r.t_[h + half_band_] = factor * t_coeff(h);
    r.z_[h + half_band_] = factor * z_coeff(h);
  }
  return r;
}

bool AlgebraMap::is_zero() const {
  for (const auto& c : t_)
    if (!c.is_zero()) return false;
  for (const auto& c : z_)
    if (!c.is_zero()) return false;
  return true;
}

namespace {

template <typename PredT, typename PredZ>
AlgebraMap filter(const AlgebraMap& f, PredT keep_t, PredZ keep_z) {
  AlgebraMap r = AlgebraMap::zero(f.half_band(), f.half_lattice());
  for (long h = -f.half_band(); h <= f.half_band(); ++h) {
    if (keep_t(h)) r.set_t(h, f.t_coeff(h));
    if (keep_z(h)) r.set_z(h, f.z_coeff(h));
  }
  r.set_aliasing_bound(f.aliasing_bound());
  return r;
}

}  // namespace

AlgebraMap truncate(const AlgebraMap& f, long n) {
  auto keep = [n](long h) { return std::labs(h) <= 2 * n; };
  return filter(f, keep, keep);
}

AlgebraMap truncate_zero_mean(const AlgebraMap& f, long n) {
  auto keep = [n](long h) { return h != 0 && std::labs(h) <= 2 * n; };
  return filter(f, keep, keep);
}

AlgebraMap tail(const AlgebraMap& f, long n) {
  auto keep = [n](long h) { return std::labs(h) > 2 * n; };
  return filter(f, keep, keep);
}

AlgebraMap window_z(const AlgebraMap& f, long n, long k1) {
  auto no = [](long) { return false; };
  auto keep = [n, k1](long h) {
    long d = std::labs(h - 2 * k1);
    return d > 0 && d <= 4 * n;
  };
  return filter(f, no, keep);
}

AlgebraMap mode_z(const AlgebraMap& f, long k1) {
  auto no = [](long) { return false; };
  auto keep = [k1](long h) { return h == 2 * k1; };
  return filter(f, no, keep);
}

AlgebraMap discentered_rest_z(const AlgebraMap& f, long n, long k1) {
  auto no = [](long) { return false; };
  auto keep = [n, k1](long h) { return std::labs(h - 2 * k1) > 4 * n; };
  return filter(f, no, keep);
}

Real norm_h(const AlgebraMap& f, const Real& s) {
  Real acc(0L);
  Real quarter(0.25);
  for (long h = -f.half_band(); h <= f.half_band(); ++h) {
    Real k2 = quarter * Real(h) * Real(h);  // k^2 = (h/2)^2
    Real wgt = pow(Real(1L) + k2, s);
    acc += wgt * (norm2(f.t_coeff(h)) + norm2(f.z_coeff(h)));
  }
  return sqrt(acc);
}

Real norm_c0(const AlgebraMap& f, std::size_t grid) {
  std::size_t m = 1;
  while (m < grid || static_cast<long>(m) <= 2 * f.half_band()) m <<= 1;
  auto samples = f.sample_grid(m);
  Real best(0L);
  for (const auto& v : samples) {
    Real n = norm(v);
    if (n > best) best = n;
  }
  return best;
}

CNormEstimate norm_c_estimate(const AlgebraMap& f, int s, std::size_t grid) {
  CNormEstimate est;
  est.order = s;
  std::size_t m = 1;
  while (m < grid || static_cast<long>(m) <= 2 * f.half_band()) m <<= 1;
  est.grid_size = m;
  Real best(0L);
  for (int sigma = 0; sigma <= s; ++sigma) {
    AlgebraMap d = f.derivative(sigma);
    auto samples = d.sample_grid(m);
    for (const auto& v : samples) {
      Real n = norm(v);
      if (n > best) best = n;
    }
  }
  est.value = best;
  return est;
}

AlgebraMap algebra_map_from_samples(const std::vector<AlgebraElement>& samples,
                                    long keep_half_band, bool half_lattice) {
  const std::size_t m = samples.size();
  if (m == 0 || (m & (m - 1)) != 0)
    throw std::invalid_argument("sample count must be a power of two");
  if (keep_half_band >= static_cast<long>(m) / 2)
    throw std::invalid_argument("keep_half_band too large for sample count");
  std::vector<Complex> t(m), z(m);
  for (std::size_t j = 0; j < m; ++j) {
    t[j] = Complex(samples[j].t);
    z[j] = samples[j].u;
  }
  fft::transform(t, false);
  fft::transform(z, false);
  Real inv = Real(1L) / Real(static_cast<long>(m));
  AlgebraMap out = AlgebraMap::zero(keep_half_band, half_lattice);
  Real discarded(0L);
  long half_m = static_cast<long>(m) / 2;
  for (long h = -half_m + 1; h <= half_m; ++h) {
    std::size_t bin = static_cast<std::size_t>((h % static_cast<long>(m) +
                                                static_cast<long>(m)) %
                                               static_cast<long>(m));
    Complex tc = inv * t[bin];
    Complex zc = inv * z[bin];
    bool keep = std::labs(h) <= keep_half_band && (half_lattice || (h & 1) == 0);
    if (keep) {
      out.set_t(h, tc);
      out.set_z(h, zc);
    } else {
      // Discarded mass: out-of-band content plus, for integer-lattice maps,
      // whatever leaked onto odd bins.
      Real mag = max(abs(tc), abs(zc));
      if (mag > discarded) discarded = mag;
    }
  }
  out.symmetrize_t();
  out.set_aliasing_bound(discarded);
  return out;
}

AlgebraMap random_algebra_map(unsigned long seed, long band, const Real& c0_norm,
                              std::size_t norm_grid) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  AlgebraMap f = AlgebraMap::zero(2 * band, false);
  for (long k = 1; k <= band; ++k) {
    f.set_t_hermitian(2 * k, Complex(Real(uni(rng)), Real(uni(rng))));
  }
  f.set_t(0, Complex(Real(uni(rng))));
  for (long k = -band; k <= band; ++k) {
    f.set_z_at(k, Complex(Real(uni(rng)), Real(uni(rng))));
  }
  Real n = norm_c0(f, norm_grid);
  if (n.is_zero()) return f;
  return (c0_norm / n) * f;
}

}  // namespace kamlab
