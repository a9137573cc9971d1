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
//
// Test-only oracles, kept independent of the library code paths they check:
// plain 2x2 complex matrix algebra, a truncated matrix exponential, a dense
// Gaussian-elimination solver, and direct Fourier summation.

#ifndef KAMLAB_TESTS_ORACLES_HPP
#define KAMLAB_TESTS_ORACLES_HPP

#include <array>
#include <vector>

#include "kamlab/precision.hpp"
#include "kamlab/su2.hpp"

namespace kamlab::oracle {

// Row-major 2x2 complex matrix.
using Mat2 = std::array<Complex, 4>;

inline Mat2 mat_of_group(const GroupElement& g) {
  return {g.z, g.w, -conj(g.w), conj(g.z)};
}

inline Mat2 mat_of_algebra(const AlgebraElement& s) {
  Complex it(Real(0L), s.t);
  return {it, s.u, -conj(s.u), -it};
}

inline Mat2 mat_mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

inline Mat2 mat_add(const Mat2& a, const Mat2& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}

inline Mat2 mat_scale(const Real& s, const Mat2& a) {
  return {s * a[0], s * a[1], s * a[2], s * a[3]};
}

inline Real mat_dist(const Mat2& a, const Mat2& b) {
  Real acc(0L);
  for (int i = 0; i < 4; ++i) acc += norm2(a[i] - b[i]);
  return sqrt(acc);
}

// Truncated series exp(M) = sum M^k / k!, run until the term norm falls
// below 2^-(working_precision() - 8).
inline Mat2 mat_exp_series(const Mat2& m) {
  Mat2 acc = {Complex::one(), Complex::zero(), Complex::zero(), Complex::one()};
  Mat2 term = acc;
  Real floor_mag = Real::pow2(-(working_precision() - 8));
  for (int k = 1; k < 1000; ++k) {
    term = mat_mul(term, m);
    term = mat_scale(Real(1L) / Real(static_cast<long>(k)), term);
    acc = mat_add(acc, term);
    Real mag(0L);
    for (int i = 0; i < 4; ++i) mag += norm2(term[i]);
    if (sqrt(mag) < floor_mag) break;
  }
  return acc;
}

// Dense complex linear solve by Gaussian elimination with partial pivoting.
// a is n x n row-major, b length n; returns x with a x = b.
inline std::vector<Complex> dense_solve(std::vector<Complex> a,
                                        std::vector<Complex> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    Real best = norm2(a[col * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      Real m = norm2(a[r * n + col]);
      if (m > best) { best = m; piv = r; }
    }
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
      std::swap(b[col], b[piv]);
    }
    Complex d = a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      Complex f = a[r * n + col] / d;
      if (f.is_zero()) continue;
      for (std::size_t c = col; c < n; ++c)
        a[r * n + c] = a[r * n + c] - f * a[col * n + c];
      b[r] = b[r] - f * b[col];
    }
  }
  std::vector<Complex> x(n, Complex::zero());
  for (std::size_t ri = n; ri-- > 0;) {
    Complex acc = b[ri];
    for (std::size_t c = ri + 1; c < n; ++c)
      acc = acc - a[ri * n + c] * x[c];
    x[ri] = acc / a[ri * n + ri];
  }
  return x;
}

// Overdetermined least squares via normal equations; rows*cols matrix a.
inline std::vector<Complex> dense_lstsq(const std::vector<Complex>& a,
                                        std::size_t rows, std::size_t cols,
                                        const std::vector<Complex>& b) {
  std::vector<Complex> ata(cols * cols, Complex::zero());
  std::vector<Complex> atb(cols, Complex::zero());
  for (std::size_t i = 0; i < cols; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      Complex acc = Complex::zero();
      for (std::size_t r = 0; r < rows; ++r)
        acc += conj(a[r * cols + i]) * a[r * cols + j];
      ata[i * cols + j] = acc;
    }
    Complex acc = Complex::zero();
    for (std::size_t r = 0; r < rows; ++r) acc += conj(a[r * cols + i]) * b[r];
    atb[i] = acc;
  }
  return dense_solve(std::move(ata), std::move(atb));
}

}  // namespace kamlab::oracle

#endif  // KAMLAB_TESTS_ORACLES_HPP
