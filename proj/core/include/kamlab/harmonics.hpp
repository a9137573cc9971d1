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

#ifndef KAMLAB_HARMONICS_HPP
#define KAMLAB_HARMONICS_HPP

#include <vector>

#include "kamlab/cocycle.hpp"

namespace kamlab {

/// Normalized monomial basis of the degree-m homogeneous polynomials:
/// psi_{l,m}(zeta, omega) = sqrt((m+1)!/(l!(m-l)!)) zeta^l omega^{m-l}.
Complex harmonic_monomial(long l, long m, const Complex& zeta,
                          const Complex& omega);

/// Row-major (m+1)x(m+1) complex matrix.
struct RepMatrix {
  long m = 0;
  std::vector<Complex> e;  // e[p*(m+1)+j] = <S.psi_j, psi_p>
  Complex at(long p, long j) const { return e[p * (m + 1) + j]; }
};

/// Representation matrix of S on the degree-m space in the psi basis,
/// computed by exact binomial expansion. It is a unitary homomorphism:
/// rep(S1 S2) = rep(S1) rep(S2); a diagonal S = {e^{2 pi i a},0} gives
/// diagonal entries e^{-2 pi i (m-2j) a}.
RepMatrix representation_matrix(const GroupElement& s, long m);

/// The factor by which conjugating the frame scales the zero-weight
/// harmonic: p_l = sum_i (-1)^i C(l,i)^2 |z|^{2(l-i)} |w|^{2i} with l = m/2.
/// Equals 1 exactly on the normalizer of the diagonal torus and is < 1 away
/// from it. Throws PreconditionError for odd m.
Real legendre_projection(const GroupElement& d, long m);

/// Element of L^2(T) x E_m with frequencies |k| <= n_trunc: coefficients
/// f^k_{j,p} on the orthonormal basis e^{2 pi i k x} pi_m^{j,p}.
class FiberFunction {
 public:
  FiberFunction(long m, long n_trunc);
  static FiberFunction basis(long m, long n_trunc, long k, long j, long p);

  long degree() const { return m_; }
  long band() const { return n_trunc_; }

  Complex coeff(long k, long j, long p) const;
  void set_coeff(long k, long j, long p, const Complex& c);

  /// H^0 norm (orthonormal basis): sqrt(sum |f^k_{j,p}|^2).
  Real norm() const;

 private:
  long m_, n_trunc_;
  std::vector<Complex> c_;
  std::size_t idx(long k, long j, long p) const {
    return (static_cast<std::size_t>(k + n_trunc_) * (m_ + 1) + j) * (m_ + 1) +
           p;
  }
};

/// Matrix-valued Fourier series of x -> rep(A(x)^{-1}, m) (or rep(A(x), m)
/// under the inverse convention), with the recorded aliasing certificate.
struct RepSeries {
  long m = 0;
  long band = 0;                 // frequencies |nu| <= band
  std::vector<RepMatrix> coeff;  // index nu + band
  Real aliasing;
};
RepSeries transfer_rep_series(const Cocycle& c, long m, const Real& tol,
                              bool inverse_convention = false);

struct KoopmanOptions {
  /// Paper convention: (Uf)(x,S) = f(x - alpha, A(x)^{-1} S). The flag
  /// switches to the transposed convention f(x + alpha, A(x) S) for
  /// cross-checking (eigenvalues conjugate).
  bool inverse_convention = false;
  Real series_tol;  // aliasing tolerance for the transfer expansion
};

struct KoopmanResult {
  FiberFunction value;
  Real leaked_mass;  // L2 mass pushed beyond the truncation band
};

/// One application of the truncated Koopman operator on L^2(T) x E_m.
KoopmanResult koopman_apply(const Cocycle& c, const FiberFunction& f,
                            long n_trunc, const KoopmanOptions& opts = {});

/// Eigenvalues of the constant-cocycle Koopman operator on the basis
/// elements: e^{-2 pi i (k alpha + (m-2p) a)}, |k| <= n_trunc, 0 <= p <= m.
std::vector<Complex> constant_eigenvalue_seeds(const Real& alpha, const Real& a,
                                               long m, long n_trunc);

struct EigenPoint {
  Complex lambda;
  Real sigma_min;
};

struct EigenSearchOptions {
  std::size_t circle_grid = 1000;  // uniform lambda grid on the circle
  Real series_tol;
  int power_iterations = 40;
};

/// Smallest singular value of (U_trunc - lambda) on L^2(T) x E_m for each
/// grid lambda (the Lemma seeds of the nearest constant plus a uniform
/// circle grid). The operator splits over the second lower index p; constant
/// transfers reduce to a diagonal scan, general ones go through dense
/// inverse iteration per block (sized for desk-scale truncations).
std::vector<EigenPoint> eigen_search(const Cocycle& c, long m, long n_trunc,
                                     const std::vector<Complex>& extra_lambdas,
                                     const EigenSearchOptions& opts = {});

struct CorrelationPoint {
  long n = 0;
  Complex correlation;  // <U^n f, g> by grid quadrature
  Real cesaro;          // (1/n) sum_{j<=n} |<U^j f, g>|^2
};

/// Correlation sequence of the Koopman iterates along fiber observables,
/// inner products estimated by grid quadrature over x.
std::vector<CorrelationPoint> correlation_trace(const Cocycle& c,
                                                const FiberFunction& f,
                                                const FiberFunction& g,
                                                long t_max,
                                                std::size_t grid = 32);

}  // namespace kamlab

#endif  // KAMLAB_HARMONICS_HPP
