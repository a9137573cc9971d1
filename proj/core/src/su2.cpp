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

#include "kamlab/su2.hpp"

namespace kamlab {

namespace {

Real sinc(const Real& r) {
  if (r.is_zero()) return Real(1L);
  return sin(r) / r;
}

}  // namespace

GroupElement exp_map(const AlgebraElement& s) {
  Real r = norm(s);
  Real sc = sinc(r);
  return GroupElement(Complex(cos(r), s.t * sc), sc * s.u);
}

AlgebraElement log_map(const GroupElement& g) {
  Real c = g.z.re;
  if (c < Real(-1L)) c = Real(-1L);
  if (c > Real(1L)) c = Real(1L);
  Real r = acos(c);  // in [0, pi]
  // Branch guard: keep a precision-aware margin from the antipode where
  // sinc vanishes and {t,u} blow up.
  Real margin = Real::pow2(-(working_precision() / 8));
  if (Real::pi() - r <= margin) {
    throw PreconditionError("log_map: element at or near the antipode {-1,0}");
  }
  Real sc = sinc(r);
  return AlgebraElement(g.z.im / sc, Complex(g.w.re / sc, g.w.im / sc));
}

AlgebraElement adjoint_diagonal(const Real& s_turns, const AlgebraElement& v) {
  return AlgebraElement(v.t, Complex::unit(s_turns + s_turns) * v.u);
}

AlgebraElement adjoint(const GroupElement& s, const AlgebraElement& v) {
  // S M S^* with M = [[i t, u], [-u~, -i t]].
  Complex it = Complex(Real(0L), v.t);
  Complex m00 = it, m01 = v.u, m10 = -conj(v.u), m11 = -it;
  const Complex &z = s.z, &w = s.w;
  // First S*M.
  Complex a00 = z * m00 + w * m10;
  Complex a01 = z * m01 + w * m11;
  // Then (S*M)*S^*; S^* = [[z~, -w], [w~, z]].
  Complex r00 = a00 * conj(z) + a01 * conj(w);
  Complex r01 = -(a00 * w) + a01 * z;
  return AlgebraElement(r00.im, r01);
}

Diagonalization diagonalize(const GroupElement& g) {
  Real c = g.z.re;
  if (c < Real(-1L)) c = Real(-1L);
  if (c > Real(1L)) c = Real(1L);
  Real two_pi_a = acos(c);  // eigenphase in [0, pi]
  Real a = two_pi_a / Real::two_pi();
  Real s = sin(two_pi_a);  // >= 0

  Real wn = norm2(g.w);
  Real tiny = Real::pow2(-(2 * working_precision() / 3));
  Diagonalization out;
  out.angle = a;
  if (wn <= tiny * tiny) {
    if (g.z.im >= Real(0L)) {
      out.frame = GroupElement::identity();
    } else {
      // Weyl flip {0,1}: conjugates {z,0} to {z~,0}.
      out.frame = GroupElement(Complex::zero(), Complex::one());
    }
    return out;
  }
  // Eigenvector of the eigenvalue c + i s: v = (w, i(s - Im z)).
  Complex v1 = g.w;
  Complex v2 = Complex(Real(0L), s - g.z.im);
  Real n = sqrt(norm2(v1) + norm2(v2));
  Complex zd = Complex(v1.re / n, v1.im / n);
  // -wd~ = v2/n  =>  wd = -(v2/n)~
  Complex wd = -conj(Complex(v2.re / n, v2.im / n));
  GroupElement dstar(zd, wd);
  out.frame = dstar.inverse();
  return out;
}

GroupElement one_parameter_path(const GroupElement& d, const Real& t) {
  return exp_map(t * log_map(d));
}

}  // namespace kamlab
