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

#ifndef KAMLAB_SU2_HPP
#define KAMLAB_SU2_HPP

#include <utility>

#include "kamlab/precision.hpp"

namespace kamlab {

/// A point of SU(2) in {z,w} coordinates: the unitary matrix
///   [  z   w ]
///   [ -w~  z~]
/// with |z|^2 + |w|^2 = 1 (~ is complex conjugation). Products renormalize
/// so the unit constraint cannot drift over long orbits.
struct GroupElement {
  Complex z, w;

  GroupElement() : z(Complex::one()), w(Complex::zero()) {}
  GroupElement(Complex zz, Complex ww) : z(std::move(zz)), w(std::move(ww)) {}

  static GroupElement identity() { return GroupElement(); }
  static GroupElement minus_identity() {
    return GroupElement(Complex(Real(-1L)), Complex::zero());
  }
  /// Diagonal element {e^{2*pi*i*a}, 0}.
  static GroupElement diagonal(const Real& a) {
    return GroupElement(Complex::unit(a), Complex::zero());
  }

  friend GroupElement operator*(const GroupElement& a, const GroupElement& b) {
    GroupElement r(a.z * b.z - a.w * conj(b.w), a.z * b.w + a.w * conj(b.z));
    r.renormalize();
    return r;
  }

  /// Conjugate transpose (= inverse).
  GroupElement inverse() const { return GroupElement(conj(z), -w); }

  void renormalize() {
    Real n = sqrt(norm2(z) + norm2(w));
    z.re /= n; z.im /= n; w.re /= n; w.im /= n;
  }

  /// Frobenius-type distance sqrt(|z1-z2|^2 + |w1-w2|^2).
  friend Real distance(const GroupElement& a, const GroupElement& b) {
    return sqrt(norm2(a.z - b.z) + norm2(a.w - b.w));
  }
  friend Real distance_to_identity(const GroupElement& a) {
    return distance(a, identity());
  }
};

/// A point of su(2) in {t,u} coordinates: the matrix
///   [  i t    u  ]
///   [ -u~   -i t ]
/// with t real. |{t,u}|^2 = t^2 + |u|^2.
struct AlgebraElement {
  Real t;
  Complex u;

  AlgebraElement() : t(0L) {}
  AlgebraElement(Real tt, Complex uu) : t(std::move(tt)), u(std::move(uu)) {}

  static AlgebraElement zero() { return AlgebraElement(); }

  friend AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
    return {a.t + b.t, a.u + b.u};
  }
  friend AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
    return {a.t - b.t, a.u - b.u};
  }
  AlgebraElement operator-() const { return {-t, -u}; }
  friend AlgebraElement operator*(const Real& s, const AlgebraElement& a) {
    return {s * a.t, s * a.u};
  }

  friend Real scalar_product(const AlgebraElement& a, const AlgebraElement& b) {
    return a.t * b.t + a.u.re * b.u.re + a.u.im * b.u.im;
  }
  friend Real norm(const AlgebraElement& a) {
    return sqrt(a.t * a.t + norm2(a.u));
  }
};

/// exp: su(2) -> SU(2). With r = |{t,u}|, returns
/// {cos r + i t sinc r, u sinc r}, sinc r = sin(r)/r (sinc 0 = 1).
GroupElement exp_map(const AlgebraElement& s);

/// Principal logarithm, defined for r < pi. Throws PreconditionError at or
/// near the antipode {-1, 0}.
AlgebraElement log_map(const GroupElement& g);

/// Ad(S).v = S v S^* pushed to {t,u} coordinates. For diagonal
/// S = {e^{2*pi*i*s},0} this is {t, e^{4*pi*i*s} u}.
AlgebraElement adjoint(const GroupElement& s, const AlgebraElement& v);
/// Adjoint of a diagonal element given by its parameter (in turns).
AlgebraElement adjoint_diagonal(const Real& s_turns, const AlgebraElement& v);

/// Eigenframe decomposition: returns (D, a) with D A D^* = {e^{2*pi*i*a}, 0}
/// and a canonical in [0, 1/2].
struct Diagonalization {
  GroupElement frame;  // D
  Real angle;          // a in [0, 1/2]
};
Diagonalization diagonalize(const GroupElement& g);

/// exp(t log D): the minimal-length one-parameter path from Id to D.
GroupElement one_parameter_path(const GroupElement& d, const Real& t);

}  // namespace kamlab

#endif  // KAMLAB_SU2_HPP
