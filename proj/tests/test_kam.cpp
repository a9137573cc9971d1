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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kamlab/kam.hpp"
#include "oracles.hpp"

using namespace kamlab;

namespace {

Real tol2(int e) { return Real::pow2(e); }

Real golden_alpha() { return RotationNumber::golden_mean().value(); }

// Canonical representative of x mod (1/2)Z in [0, 1/2).
Real mod_half(const Real& x) {
  Real two_x = x + x;
  return fractional(two_x) / Real(2L);
}

// Collocation residual of the diagonal equation on a grid.
Real diagonal_residual(const AlgebraMap& y, const AlgebraMap& f, long n,
                       const Real& alpha, std::size_t grid) {
  AlgebraMap rhs = truncate_zero_mean(f, n);
  Real worst(0L);
  for (std::size_t j = 0; j < grid; ++j) {
    Real x = Real(static_cast<long>(j)) / Real(static_cast<long>(grid));
    Real r = y.evaluate(x + alpha).t - y.evaluate(x).t + rhs.evaluate(x).t;
    if (abs(r) > worst) worst = abs(r);
  }
  return worst;
}

}  // namespace

TEST_CASE("detect_resonance: exact, absent, planted") {
  Real alpha = golden_alpha();

  // a = alpha/2: k1 = 1 with epsilon = 0.
  auto hit = detect_resonance(alpha / Real(2L), alpha, 8,
                              pow(Real(8L), Real(3.75)));
  REQUIRE(hit.has_value());
  CHECK(hit->k1 == 1);
  CHECK(abs(hit->epsilon) < tol2(-240));

  // a = 1/4, N = 16, nu = 3 (K = 4096): no resonance for the golden mean.
  CHECK_FALSE(detect_resonance(Real(0.25), alpha, 16, Real(4096L)).has_value());

  // a = 5 alpha / 2 + 1e-9 (canonical): k1 = 5, eps ~ 1e-9.
  Real a = mod_half(Real(5L) * alpha / Real(2L)) + Real(1e-9);
  auto hit5 = detect_resonance(a, alpha, 8, pow(Real(8L), Real(3.75)));
  REQUIRE(hit5.has_value());
  CHECK(hit5->k1 == 5);
  CHECK(abs(hit5->epsilon - Real(1e-9)) < Real(1e-18));
}

TEST_CASE("mean twist blockage") {
  CHECK(mean_twist_blocked(Real(0L), Real(100L)));
  CHECK(mean_twist_blocked(Real(0.5), Real(100L)));
  CHECK(mean_twist_blocked(Real(1e-4), Real(100L)));
  CHECK_FALSE(mean_twist_blocked(Real(0.26), Real(100L)));
}

TEST_CASE("solve_diagonal: single cosine and residual") {
  Real alpha = golden_alpha();
  // F_t = cos(2 pi x): coefficients 1/2 at k = +-1.
  AlgebraMap f = AlgebraMap::zero(2);
  f.set_t_hermitian(2, Complex(Real(0.5)));
  AlgebraMap y = solve_diagonal(f, alpha, 8, Real(3L), Real(2.5));
  Complex expected =
      -(Complex(Real(0.5)) / (Complex::unit(alpha) - Complex::one()));
  CHECK(abs(y.t_at(1) - expected) < tol2(-240));
  CHECK(abs(y.t_at(-1) - conj(expected)) < tol2(-240));
  CHECK(diagonal_residual(y, f, 8, alpha, 64) < tol2(-230));
}

TEST_CASE("solve_diagonal and solve_twisted match a dense collocation solve") {
  Real alpha = golden_alpha();
  long n = 16;
  AlgebraMap f = random_algebra_map(77, n, Real(1e-3));

  // Diagonal channel: unknowns Y(k), 0 < |k| <= n, overdetermined
  // collocation solved by least squares.
  {
    std::vector<long> ks;
    for (long k = -n; k <= n; ++k)
      if (k != 0) ks.push_back(k);
    std::size_t dim = ks.size();
    std::size_t rows = 2 * dim + 1;
    std::vector<Complex> mat(rows * dim), rhs(rows);
    AlgebraMap fdot = truncate_zero_mean(f, n);
    for (std::size_t r = 0; r < rows; ++r) {
      Real x = (Real(static_cast<long>(r)) + Real(0.37)) /
               Real(static_cast<long>(rows));
      for (std::size_t cidx = 0; cidx < dim; ++cidx) {
        long k = ks[cidx];
        mat[r * dim + cidx] = Complex::unit(Real(k) * (x + alpha)) -
                              Complex::unit(Real(k) * x);
      }
      rhs[r] = -Complex(fdot.evaluate(x).t);
    }
    auto sol = oracle::dense_lstsq(mat, rows, dim, rhs);
    AlgebraMap y = solve_diagonal(f, alpha, n, Real(3L), Real(2.5));
    Real scale(0L);
    for (std::size_t i = 0; i < dim; ++i) scale = max(scale, abs(sol[i]));
    for (std::size_t i = 0; i < dim; ++i) {
      CHECK(abs(y.t_at(ks[i]) - sol[i]) < Real(1e-25) * scale);
    }
  }

  // Twisted channel at a nonresonant angle.
  {
    Real a(0.26);
    std::vector<long> ks;
    for (long k = -n; k <= n; ++k) ks.push_back(k);
    std::size_t dim = ks.size();
    std::size_t rows = 2 * dim + 1;
    std::vector<Complex> mat(rows * dim), rhs(rows);
    Complex twist_const = Complex::unit(-(a + a));
    for (std::size_t r = 0; r < rows; ++r) {
      Real x = (Real(static_cast<long>(r)) + Real(0.21)) /
               Real(static_cast<long>(rows));
      for (std::size_t cidx = 0; cidx < dim; ++cidx) {
        long k = ks[cidx];
        mat[r * dim + cidx] = twist_const * Complex::unit(Real(k) * (x + alpha)) -
                              Complex::unit(Real(k) * x);
      }
      Complex fz = Complex::zero();
      for (long k = -n; k <= n; ++k)
        fz += f.z_at(k) * Complex::unit(Real(k) * x);
      rhs[r] = -fz;
    }
    auto sol = oracle::dense_lstsq(mat, rows, dim, rhs);
    AlgebraMap y = solve_twisted(f, a, alpha, n, std::nullopt,
                                 pow(Real(n), Real(3.75)));
    Real scale(0L);
    for (std::size_t i = 0; i < dim; ++i) scale = max(scale, abs(sol[i]));
    for (std::size_t i = 0; i < dim; ++i) {
      CHECK(abs(y.z_at(ks[i]) - sol[i]) < Real(1e-25) * scale);
    }
  }
}

TEST_CASE("solve_twisted: formula value and resonant exclusion") {
  Real alpha = golden_alpha();
  // F_z = eps e^{2 pi i x}, a = 0: Y(1) = -eps/(e^{2 pi i alpha} - 1).
  AlgebraMap f = AlgebraMap::zero(2);
  Real eps(1e-6);
  f.set_z_at(1, Complex(eps));
  AlgebraMap y = solve_twisted(f, Real(0L), alpha, 8, std::nullopt,
                               pow(Real(8L), Real(3.75)));
  Complex expected = -(Complex(eps) / (Complex::unit(alpha) - Complex::one()));
  CHECK(abs(y.z_at(1) - expected) < tol2(-240));

  // A single resonant mode is excluded: the solution is zero.
  AlgebraMap g = AlgebraMap::zero(6);
  g.set_z_at(3, Complex(eps));
  AlgebraMap y3 = solve_twisted(g, mod_half(Real(3L) * alpha / Real(2L)), alpha,
                                8, std::optional<long>(3),
                                pow(Real(8L), Real(3.75)));
  CHECK(y3.is_zero());
}

TEST_CASE("kam_step: zero perturbation is a fixed point") {
  Real alpha = golden_alpha();
  KamParams p;
  p.max_steps = 1;
  AlgebraMap f = AlgebraMap::zero(4);
  Real a(0.26);
  auto res = kam_step(a, f, alpha, 8, p.threshold_k(8), p, false);
  CHECK(res.y.is_zero());
  CHECK_FALSE(res.resonance.has_value());
  CHECK_FALSE(res.mean_blocked);
  CHECK(distance(res.a_next, GroupElement::diagonal(a)) < tol2(-240));
  CHECK(res.eps0_out < tol2(-200));
  CHECK(res.residual < Real(1e-20));
}

TEST_CASE("kam_step: exactly resonant single mode") {
  Real alpha = golden_alpha();
  KamParams p;
  Real a = alpha / Real(2L);  // exact 1-resonance
  Real eps(1e-6);
  AlgebraMap f = AlgebraMap::zero(2);
  f.set_z_at(1, Complex(eps));
  auto res = kam_step(a, f, alpha, 8, p.threshold_k(8), p, false);
  REQUIRE(res.resonance.has_value());
  CHECK(res.resonance->k1 == 1);
  CHECK(abs(res.resonance->epsilon) < tol2(-240));
  CHECK(res.y.is_zero());  // everything is obstruction
  REQUIRE(res.b_half_degree.has_value());
  CHECK(*res.b_half_degree == -1);
  CHECK(res.pending_half_lattice_out);  // odd reduction leaves parity debt
  // A_next is the exact resonance image: Id here.
  CHECK(distance(res.a_next, GroupElement::identity()) < tol2(-230));
  // F_next carries the obstruction as a z-mean, up to quadratic terms.
  CHECK(abs(res.f_next.z_at(0) - Complex(eps)) < Real(100L) * eps * eps);
  CHECK(abs(res.f_next.t_at(0)) < Real(100L) * eps * eps);
  AlgebraMap stripped = res.f_next;
  stripped.set_z_at(0, Complex::zero());
  stripped.set_t_at(0, Complex::zero());
  CHECK(norm_c0(stripped, 128) < Real(100L) * eps * eps);
}

TEST_CASE("kam_step: nonresonant contraction and estimate shape") {
  Real alpha = golden_alpha();
  KamParams p;
  long n = 32;
  Real big_k = p.threshold_k(n);
  Real eps(1e-5);
  AlgebraMap f = random_algebra_map(555, 16, eps);
  Real a(0.26);
  auto res = kam_step(a, f, alpha, n, big_k, p, false);
  CHECK_FALSE(res.resonance.has_value());
  // Quadratic-type contraction.
  CHECK(res.eps0_out < pow(res.eps0_in, Real(1.4)));
  // Paper-shaped bound K^2 N^{2 tau + 1} eps^2 with the constant fitted.
  Real shape = big_k * big_k * pow(Real(n), Real(2L) * p.tau + Real(1L)) *
               res.eps0_in * res.eps0_in;
  CHECK(res.eps0_out <= shape);
  // Conjugation identity verified on the grid.
  CHECK(res.residual < Real(1e-20));
  // Partition bookkeeping: obstruction of a nonresonant step is the t-mean.
  CHECK(abs(res.f_next.t_at(0)) < res.eps0_in * res.eps0_in * Real(100L));
}

TEST_CASE("kam_step smallness refusal") {
  Real alpha = golden_alpha();
  KamParams p;
  AlgebraMap f = random_algebra_map(556, 8, Real(0.5));
  CHECK_THROWS_AS(
      kam_step(Real(0.26), f, alpha, 32, p.threshold_k(32), p, false),
      PreconditionError);
}

TEST_CASE("run_scheme on a constant cocycle") {
  Cocycle c = Cocycle::constant(RotationNumber::golden_mean(),
                                GroupElement::diagonal(Real(0.3)));
  KamParams p;
  p.max_steps = 4;
  p.n1 = 8;
  auto trace = run_scheme(c, p);
  CHECK(trace.status == "converged");
  for (const auto& s : trace.steps) CHECK_FALSE(s.resonance.has_value());
  CHECK(norm_c0(trace.f_final, 64) < tol2(-150));
}

TEST_CASE("run_scheme contracts a generic small perturbation") {
  AlgebraMap f = random_algebra_map(1001, 8, Real(1e-5));
  GroupMap t = GroupMap::constant(GroupElement::diagonal(Real(0.26)));
  t.compose(GroupMap::exponential(f));
  Cocycle c(RotationNumber::golden_mean(), t);
  KamParams p;
  p.n1 = 8;
  p.max_steps = 3;
  auto trace = run_scheme(c, p);
  REQUIRE(trace.steps.size() >= 2);
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    if (s.eps0_in > tol2(-150)) {
      CHECK(s.eps0_out < pow(s.eps0_in, Real(1.4)));
    }
    CHECK(s.residual < Real(1e-20));
  }
}

TEST_CASE("odd resonance: periodicity debt is repaid at the next step") {
  auto freq = RotationNumber::golden_mean();
  Real alpha = freq.value();
  long k1 = 3;
  Real eps1(1e-4);
  Real a1 = mod_half(Real(k1) * alpha / Real(2L)) + eps1;
  Real amp(3e-5);
  AlgebraMap mode = AlgebraMap::zero(2 * k1);
  mode.set_z_at(k1, Complex(amp));
  GroupMap t = GroupMap::constant(GroupElement::diagonal(a1));
  t.compose(GroupMap::exponential(mode));
  Cocycle c(freq, t);

  KamParams p;
  p.n1 = 8;
  p.max_steps = 3;
  auto trace = run_scheme(c, p);
  REQUIRE(trace.steps.size() >= 2);
  REQUIRE(trace.steps[0].resonance.has_value());
  CHECK(trace.steps[0].resonance->k1 == k1);
  CHECK(abs(trace.steps[0].resonance->epsilon - eps1) < Real(1e-12));
  CHECK(abs(abs(trace.steps[0].resonant_mode) - amp) < Real(1e-12));
  CHECK(trace.steps[0].pending_half_lattice_out);

  // The next step absorbs the constants and applies the restoration.
  CHECK(trace.steps[1].mean_blocked);
  CHECK(trace.steps[1].c_fix.has_value());
  CHECK_FALSE(trace.steps[1].pending_half_lattice_out);
  GroupMap h2 = trace.accumulated_conjugation(2);
  CHECK(h2.is_one_periodic(Real(1e-40)));

  // Conjugating the original cocycle by H reproduces (A_n, F_n) pointwise.
  std::size_t upto = trace.steps.size();
  GroupMap h = trace.accumulated_conjugation(upto);
  Cocycle reduced = conjugate(h, c);
  const auto& last = trace.steps[upto - 1];
  for (double xv : {0.13, 0.71}) {
    Real x(xv);
    GroupElement lhs = reduced.transfer.evaluate(x);
    GroupElement rhs = last.a_next * exp_map(last.f_next.evaluate(x));
    CHECK(distance(lhs, rhs) < Real(1e-18));
  }
}
