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

#include "kamlab/group_map.hpp"

#include <algorithm>

namespace kamlab {

GroupMap GroupMap::morphism(long half_degree, Real phase_turns) {
  GroupMap g;
  g.factors_.push_back(Morphism{half_degree, std::move(phase_turns)});
  return g;
}

GroupMap GroupMap::constant(GroupElement e) {
  GroupMap g;
  g.factors_.push_back(Const{std::move(e)});
  return g;
}

GroupMap GroupMap::exponential(AlgebraMap y) {
  GroupMap g;
  g.factors_.push_back(Exp{std::move(y)});
  return g;
}

bool GroupMap::is_exact() const {
  for (const auto& f : factors_)
    if (std::holds_alternative<Exp>(f)) return false;
  return true;
}

GroupMap& GroupMap::compose(const GroupMap& other) {
  factors_.insert(factors_.end(), other.factors_.begin(), other.factors_.end());
  return *this;
}

GroupMap operator*(const GroupMap& a, const GroupMap& b) {
  GroupMap r = a;
  r.compose(b);
  return r;
}

GroupMap GroupMap::inverse() const {
  GroupMap r;
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
    if (const auto* m = std::get_if<Morphism>(&*it)) {
      r.factors_.push_back(Morphism{-m->half_degree, -m->phase_turns});
    } else if (const auto* c = std::get_if<Const>(&*it)) {
      r.factors_.push_back(Const{c->value.inverse()});
    } else {
      const auto& e = std::get<Exp>(*it);
      r.factors_.push_back(Exp{-e.generator});
    }
  }
  return r;
}

GroupMap GroupMap::shifted(const Real& delta) const {
  GroupMap r;
  for (const auto& f : factors_) {
    if (const auto* m = std::get_if<Morphism>(&f)) {
      Real shift = Real(m->half_degree) * delta / Real(2L);
      r.factors_.push_back(Morphism{m->half_degree, m->phase_turns + shift});
    } else if (const auto* c = std::get_if<Const>(&f)) {
      r.factors_.push_back(*c);
    } else {
      const auto& e = std::get<Exp>(f);
      r.factors_.push_back(Exp{shift_argument(e.generator, delta)});
    }
  }
  return r;
}

GroupElement GroupMap::evaluate(const Real& x) const {
  GroupElement acc = GroupElement::identity();
  for (const auto& f : factors_) {
    if (const auto* m = std::get_if<Morphism>(&f)) {
      Real a = Real(m->half_degree) * x / Real(2L) + m->phase_turns;
      acc = acc * GroupElement::diagonal(a);
    } else if (const auto* c = std::get_if<Const>(&f)) {
      acc = acc * c->value;
    } else {
      acc = acc * exp_map(std::get<Exp>(f).generator.evaluate(x));
    }
  }
  return acc;
}

long GroupMap::morphism_half_degree_sum() const {
  long s = 0;
  for (const auto& f : factors_)
    if (const auto* m = std::get_if<Morphism>(&f)) s += m->half_degree;
  return s;
}

bool GroupMap::is_one_periodic(const Real& tol) const {
  if (morphism_half_degree_sum() % 2 != 0) return false;
  for (const auto& f : factors_) {
    if (const auto* e = std::get_if<Exp>(&f)) {
      if (!e->generator.is_integer_lattice(tol)) return false;
    }
  }
  return true;
}

std::vector<GroupElement> GroupMap::sample_grid(std::size_t m) const {
  std::vector<GroupElement> acc(m, GroupElement::identity());
  Real inv_m = Real(1L) / Real(static_cast<long>(m));
  for (const auto& f : factors_) {
    if (const auto* mo = std::get_if<Morphism>(&f)) {
      for (std::size_t j = 0; j < m; ++j) {
        // x_j = 2j/m, angle = (h/2) x_j + c = h j/m + c.
        Real a = Real(mo->half_degree) * Real(static_cast<long>(j)) * inv_m +
                 mo->phase_turns;
        acc[j] = acc[j] * GroupElement::diagonal(a);
      }
    } else if (const auto* c = std::get_if<Const>(&f)) {
      for (std::size_t j = 0; j < m; ++j) acc[j] = acc[j] * c->value;
    } else {
      auto ys = std::get<Exp>(f).generator.sample_grid(m);
      for (std::size_t j = 0; j < m; ++j) acc[j] = acc[j] * exp_map(ys[j]);
    }
  }
  return acc;
}

AlgebraMap shift_argument(const AlgebraMap& f, const Real& delta) {
  AlgebraMap r = AlgebraMap::zero(f.half_band(), f.half_lattice());
  Real half_delta = delta / Real(2L);
  for (long h = -f.half_band(); h <= f.half_band(); ++h) {
    Complex ph = Complex::unit(Real(h) * half_delta);  // e^{i pi h delta}
    r.set_t(h, ph * f.t_coeff(h));
    r.set_z(h, ph * f.z_coeff(h));
  }
  r.set_aliasing_bound(f.aliasing_bound());
  return r;
}

AlgebraMap conjugate_map_constant(const GroupElement& c, const AlgebraMap& f) {
  AlgebraElement et = adjoint(c, AlgebraElement(Real(1L), Complex::zero()));
  AlgebraElement ep = adjoint(c, AlgebraElement(Real(0L), Complex::one()));
  AlgebraElement eq = adjoint(c, AlgebraElement(Real(0L), Complex::i()));
  AlgebraMap r = AlgebraMap::zero(f.half_band(), f.half_lattice());
  Complex half(Real(0.5));
  Complex minus_half_i(Real(0L), Real(-0.5));
  for (long h = -f.half_band(); h <= f.half_band(); ++h) {
    Complex th = f.t_coeff(h);
    Complex zh = f.z_coeff(h);
    Complex zmh_c = conj(f.z_coeff(-h));
    Complex ph = half * (zh + zmh_c);
    Complex qh = minus_half_i * (zh - zmh_c);
    Complex tp = et.t * th + ep.t * ph + eq.t * qh;
    Complex pp = et.u.re * th + ep.u.re * ph + eq.u.re * qh;
    Complex qp = et.u.im * th + ep.u.im * ph + eq.u.im * qh;
    r.set_t(h, tp);
    r.set_z(h, pp + Complex::i() * qp);
  }
  r.set_aliasing_bound(f.aliasing_bound());
  return r;
}

namespace {

AlgebraMap conjugate_map_morphism(const GroupMap::Morphism& m,
                                  const AlgebraMap& f) {
  // Ad({e^{2 pi i ((h0/2)x + c)},0}): u -> e^{2 pi i h0 x} e^{4 pi i c} u,
  // i.e. a shift of the z channel by 2*h0 half-units and a constant phase.
  long shift = 2 * m.half_degree;
  Complex phase = Complex::unit(m.phase_turns + m.phase_turns);
  AlgebraMap r = AlgebraMap::zero(f.half_band() + std::labs(shift),
                                  f.half_lattice());
  for (long h = -f.half_band(); h <= f.half_band(); ++h) {
    r.set_t(h, f.t_coeff(h));
    r.set_z(h + shift, phase * f.z_coeff(h));
  }
  r.set_aliasing_bound(f.aliasing_bound());
  return r;
}

AlgebraMap conjugate_map_exp(const AlgebraMap& y, const AlgebraMap& f,
                             const Real& tol) {
  bool half = f.half_lattice() || y.half_lattice();
  long content = f.half_band() + 2 * y.half_band() + 8;
  std::size_t m = 64;
  while (static_cast<long>(m) < 4 * content) m <<= 1;
  for (int attempt = 0; attempt < 12; ++attempt, m <<= 1) {
    auto ys = y.sample_grid(m);
    auto fs = f.sample_grid(m);
    std::vector<AlgebraElement> out(m);
    for (std::size_t j = 0; j < m; ++j) {
      out[j] = adjoint(exp_map(ys[j]), fs[j]);
    }
    AlgebraMap r = algebra_map_from_samples(out, static_cast<long>(m) / 2 - 1,
                                            half);
    if (r.aliasing_bound() <= tol) {
      r.drop_small(tol * Real::pow2(-12));
      r.add_aliasing_bound(f.aliasing_bound());
      return r;
    }
  }
  throw EstimateViolation("conjugate_map: aliasing bound not reached");
}

}  // namespace

AlgebraMap conjugate_map(const GroupMap& g, const AlgebraMap& f,
                         const Real& tol) {
  AlgebraMap cur = f;
  const auto& fs = g.factors();
  for (auto it = fs.rbegin(); it != fs.rend(); ++it) {
    if (const auto* m = std::get_if<GroupMap::Morphism>(&*it)) {
      cur = conjugate_map_morphism(*m, cur);
    } else if (const auto* c = std::get_if<GroupMap::Const>(&*it)) {
      cur = conjugate_map_constant(c->value, cur);
    } else {
      cur = conjugate_map_exp(std::get<GroupMap::Exp>(*it).generator, cur, tol);
    }
  }
  return cur;
}

AlgebraMap log_map_from_samples(const std::vector<GroupElement>& samples,
                                long keep_half_band, bool half_lattice) {
  std::vector<AlgebraElement> logs;
  logs.reserve(samples.size());
  for (const auto& s : samples) logs.push_back(log_map(s));
  return algebra_map_from_samples(logs, keep_half_band, half_lattice);
}

}  // namespace kamlab
