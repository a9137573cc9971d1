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

#ifndef KAMLAB_FOURIER_HPP
#define KAMLAB_FOURIER_HPP

#include <functional>
#include <vector>

#include "kamlab/precision.hpp"
#include "kamlab/su2.hpp"

namespace kamlab {

namespace fft {
/// In-place radix-2 FFT. Size must be a power of two.
/// forward:  X_k = sum_j x_j e^{-2 pi i jk/M}
/// inverse:  x_j = (1/M) sum_k X_k e^{+2 pi i jk/M}
void transform(std::vector<Complex>& data, bool inverse);
}  // namespace fft

/// Finite Fourier series of a map T -> su(2) on the half-integer frequency
/// lattice: channel coefficients are indexed by h with frequency k = h/2,
/// |h| <= half_band. Maps flagged integer-lattice must have all odd-h
/// coefficients equal to zero (the 1-periodic case). The t channel is
/// real-valued, so t(-h) = conj(t(h)).
class AlgebraMap {
 public:
  AlgebraMap()
      : t_(1, Complex::zero()), z_(1, Complex::zero()), aliasing_bound_(0L) {}
  static AlgebraMap zero(long half_band, bool half_lattice = false);

  long half_band() const { return half_band_; }
  bool half_lattice() const { return half_lattice_; }
  const Real& aliasing_bound() const { return aliasing_bound_; }
  void set_aliasing_bound(Real b) { aliasing_bound_ = std::move(b); }
  void add_aliasing_bound(const Real& b) { aliasing_bound_ += b; }

  /// Coefficient of e^{i pi h x} in the t / z channel (zero outside band).
  Complex t_coeff(long h) const;
  Complex z_coeff(long h) const;
  /// Integer-frequency accessors (h = 2k).
  Complex t_at(long k) const { return t_coeff(2 * k); }
  Complex z_at(long k) const { return z_coeff(2 * k); }

  void set_t(long h, const Complex& c);
  void set_z(long h, const Complex& c);
  /// Sets t(h) = c and t(-h) = conj(c) (reality of the t channel).
  void set_t_hermitian(long h, const Complex& c);
  void set_t_at(long k, const Complex& c) { set_t(2 * k, c); }
  void set_z_at(long k, const Complex& c) { set_z(2 * k, c); }

  /// Enforces exact t-channel reality by Hermitian averaging; returns the
  /// largest correction applied.
  Real symmetrize_t();

  bool is_integer_lattice(const Real& tol) const;

  friend AlgebraMap operator+(const AlgebraMap& a, const AlgebraMap& b);
  friend AlgebraMap operator-(const AlgebraMap& a, const AlgebraMap& b);
  AlgebraMap operator-() const;
  friend AlgebraMap operator*(const Real& s, const AlgebraMap& f);

  /// Zeroes every coefficient of absolute value <= tol, shrinks the band,
  /// and accumulates the dropped mass into the aliasing bound.
  void drop_small(const Real& tol);

  AlgebraElement evaluate(const Real& x) const;
  /// Samples on the uniform grid x_j = 2j/M over one 2-periodic cycle
  /// (computed by inverse FFT; M must be a power of two > half_band).
  std::vector<AlgebraElement> sample_grid(std::size_t m) const;

  /// Spectral derivative of given order.
  AlgebraMap derivative(int order) const;

  bool is_zero() const;

 private:
  void ensure_band(long h);
  long half_band_ = 0;
  bool half_lattice_ = false;
  std::vector<Complex> t_, z_;  // size 2*half_band_+1, index h + half_band_
  Real aliasing_bound_;
};

/// T_N: keeps frequencies |k| <= N (h in [-2N, 2N]).
AlgebraMap truncate(const AlgebraMap& f, long n);
/// T_N - mean: additionally zeroes the k = 0 coefficient.
AlgebraMap truncate_zero_mean(const AlgebraMap& f, long n);
/// R_N: keeps |k| > N. truncate + tail == identity, coefficientwise.
AlgebraMap tail(const AlgebraMap& f, long n);

/// z-channel window operators around a resonant frequency k1 (t channel is
/// zero in all three): solved window 0 < |k - k1| <= 2N, the single mode
/// k = k1, and the dis-centered rest |k - k1| > 2N.
AlgebraMap window_z(const AlgebraMap& f, long n, long k1);
AlgebraMap mode_z(const AlgebraMap& f, long k1);
AlgebraMap discentered_rest_z(const AlgebraMap& f, long n, long k1);

/// Sobolev norm from coefficients: sqrt(sum (1+k^2)^s |f^(k)|^2).
Real norm_h(const AlgebraMap& f, const Real& s);
/// C^s norm estimate: max over the grid of |d^sigma f| for 0 <= sigma <= s,
/// derivatives computed spectrally. Reported together with the grid used.
struct CNormEstimate {
  Real value;
  std::size_t grid_size;
  int order;
};
CNormEstimate norm_c_estimate(const AlgebraMap& f, int s, std::size_t grid);
/// Plain sup-norm estimate on a grid (s = 0).
Real norm_c0(const AlgebraMap& f, std::size_t grid);

/// Forward grid transform: builds the band-limited map from samples on
/// x_j = 2j/M. Retains |h| <= keep_half_band and records the largest
/// discarded coefficient as the aliasing certificate.
AlgebraMap algebra_map_from_samples(const std::vector<AlgebraElement>& samples,
                                    long keep_half_band, bool half_lattice);

/// Random band-limited test map: coefficients uniform in the unit disc on
/// integer frequencies |k| <= band, then rescaled to sup-norm `c0_norm`.
AlgebraMap random_algebra_map(unsigned long seed, long band, const Real& c0_norm,
                              std::size_t norm_grid = 256);

}  // namespace kamlab

#endif  // KAMLAB_FOURIER_HPP
