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

#include <random>

#include "kamlab/arithmetic.hpp"

using namespace kamlab;

namespace {
Real tol2(int e) { return Real::pow2(e); }
}

TEST_CASE("gauss map fixed points and rational values") {
  Real golden = (sqrt(Real(5L)) - Real(1L)) / Real(2L);
  CHECK(abs(gauss_map(golden) - golden) < tol2(-240));

  Real s2m1 = sqrt(Real(2L)) - Real(1L);
  CHECK(abs(gauss_map(s2m1) - s2m1) < tol2(-240));

  // 1/0.3 = 10/3; fractional part 1/3 (exact rational oracle).
  Real x(mpq_class(3, 10));
  Real expected(mpq_class(1, 3));
  CHECK(abs(gauss_map(x) - expected) < tol2(-240));

  CHECK_THROWS_AS(gauss_map(Real(0L)), PreconditionError);
  CHECK_THROWS_AS(gauss_map(Real(-2L)), PreconditionError);
}

TEST_CASE("continued fraction expansion: golden mean") {
  auto alpha = RotationNumber::golden_mean();
  auto e = alpha.expand(5);
  REQUIRE(e.quotients.size() == 5);
  for (auto q : e.quotients) CHECK(q == 1);
  // Fibonacci convergents 1/1, 1/2, 2/3, 3/5, 5/8.
  long ps[] = {1, 1, 2, 3, 5};
  long qs[] = {1, 2, 3, 5, 8};
  for (int i = 0; i < 5; ++i) {
    CHECK(e.convergents[i].first == ps[i]);
    CHECK(e.convergents[i].second == qs[i]);
  }
  CHECK_FALSE(e.terminated);
}

TEST_CASE("continued fraction expansion: sqrt2 - 1 and rational") {
  auto a = RotationNumber::sqrt2_minus_one();
  auto e = a.expand(4);
  REQUIRE(e.quotients.size() == 4);
  for (auto q : e.quotients) CHECK(q == 2);

  // 7/10 terminates as [0; 1, 2, 3]; Euclidean-algorithm oracle.
  auto r = RotationNumber::from_rational(mpq_class(7, 10));
  auto er = r.expand(10);
  REQUIRE(er.quotients.size() == 3);
  CHECK(er.quotients[0] == 1);
  CHECK(er.quotients[1] == 2);
  CHECK(er.quotients[2] == 3);
  CHECK(er.terminated);
  CHECK(r.known_rational());
  // Final convergent reproduces the value exactly.
  CHECK(mpq_class(er.convergents.back().first, er.convergents.back().second) ==
        mpq_class(7, 10));
}

TEST_CASE("convergent recurrence invariant |p_n q_{n-1} - p_{n-1} q_n| = 1") {
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<unsigned long> dq(1, 12);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<unsigned long> init;
    for (int i = 0; i < 12; ++i) init.push_back(dq(rng));
    auto a = RotationNumber::from_quotients(init, {1, 2});
    auto e = a.expand(14);
    for (std::size_t n = 1; n < e.convergents.size(); ++n) {
      mpz_class det = e.convergents[n].first * e.convergents[n - 1].second -
                      e.convergents[n - 1].first * e.convergents[n].second;
      CHECK(abs(det) == 1);
    }
  }
}

TEST_CASE("convergent quality |alpha - p/q| < 1/(q q')") {
  auto alpha = RotationNumber::golden_mean();
  Real a = alpha.evaluate(300);
  auto e = alpha.expand(12);
  for (std::size_t n = 0; n + 1 < e.convergents.size(); ++n) {
    Real p(e.convergents[n].first), q(e.convergents[n].second);
    Real qn(e.convergents[n + 1].second);
    CHECK(abs(a - p / q) < Real(1L) / (q * qn));
  }
}

TEST_CASE("evaluation is monotone refining") {
  auto alpha = RotationNumber::golden_mean();
  Real a64 = alpha.evaluate(64);
  Real a128 = alpha.evaluate(128);
  Real a256 = alpha.evaluate(256);
  CHECK(abs(a64 - a128) < tol2(-60));
  CHECK(abs(a128 - a256) < tol2(-124));
  // Agreement with the closed form (sqrt5 - 1)/2.
  Real closed = (sqrt(Real(5L)) - Real(1L)) / Real(2L);
  CHECK(abs(a256 - closed) < tol2(-250));
}

TEST_CASE("gauss shift matches the Gauss map on evaluations") {
  auto alpha = RotationNumber::from_quotients({3, 1, 4, 1, 5}, {2, 6});
  Real direct = gauss_map(alpha.evaluate(256));
  Real shifted = alpha.gauss_shift(1).evaluate(256);
  CHECK(abs(direct - shifted) < tol2(-240));
}

TEST_CASE("dist_z basics") {
  CHECK(abs(dist_z(Real(1.25)) - Real(0.25)) < tol2(-250));
  CHECK(abs(dist_z(Real(-0.4)) - Real(0.4)) < tol2(-250));
  CHECK(dist_z(Real(3L)).is_zero());
}

TEST_CASE("literal sources certify quotients only as far as they can") {
  auto a = RotationNumber::from_literal("0.61");
  CHECK_THROWS_AS(a.expand(12), PrecisionError);
  // A long literal of the golden mean certifies plenty of quotients.
  auto g = RotationNumber::from_literal("0.6180339887498948482045868343656381177");
  auto e = g.expand(20);
  for (auto q : e.quotients) CHECK(q == 1);
}

TEST_CASE("check_dc: golden mean holds at tau=2, gamma=3 up to 10^4") {
  auto alpha = RotationNumber::golden_mean();
  auto rep = check_dc(alpha, Real(3L), Real(2L), 10000);
  CHECK(rep.holds);
  CHECK(rep.worst_margin >= Real(1L));
}

TEST_CASE("check_dc: rational 3/5 fails at k = 5 with margin 0") {
  auto alpha = RotationNumber::from_rational(mpq_class(3, 5));
  auto rep = check_dc(alpha, Real(3L), Real(2L), 10);
  CHECK_FALSE(rep.holds);
  CHECK(rep.worst_k == 5);
  CHECK(rep.worst_margin < tol2(-200));
}

TEST_CASE("check_dc: golden mean fails at gamma=1 on a Fibonacci denominator") {
  auto alpha = RotationNumber::golden_mean();
  auto rep = check_dc(alpha, Real(1L), Real(2L), 100);
  CHECK_FALSE(rep.holds);
  std::vector<long> fib = {1, 2, 3, 5, 8, 13, 21, 34, 55, 89};
  bool is_fib = false;
  for (long f : fib) is_fib = is_fib || rep.worst_k == f;
  CHECK(is_fib);
}

TEST_CASE("check_dc monotone in the horizon") {
  auto alpha = RotationNumber::golden_mean();
  auto r100 = check_dc(alpha, Real(1L), Real(2L), 100);
  auto r200 = check_dc(alpha, Real(1L), Real(2L), 200);
  REQUIRE_FALSE(r100.holds);
  CHECK_FALSE(r200.holds);
  CHECK(r200.worst_margin <= r100.worst_margin);
}

TEST_CASE("check_dc_alpha: brute-force agreement at a = 1/2") {
  auto alpha = RotationNumber::golden_mean();
  Real a(0.5);
  long kmax = 40;
  auto rep = check_dc_alpha(a, alpha, Real(3L), Real(2.5), kmax);
  // Direct high-precision scan as oracle.
  Real av = alpha.evaluate(320);
  Real worst;
  long worst_k = 0;
  bool first = true;
  for (long k = 1; k <= kmax; ++k) {
    for (int sg : {1, -1}) {
      Real m = dist_z(a - Real(sg * k) * av) * Real(3L) * pow(Real(k), Real(2.5));
      if (first || m < worst) { worst = m; worst_k = sg * k; first = false; }
    }
  }
  CHECK(abs(rep.worst_margin - worst) < tol2(-100));
  CHECK(std::labs(rep.worst_k) == std::labs(worst_k));
}

TEST_CASE("check_dc_alpha: a on the alpha-orbit fails at that k") {
  auto alpha = RotationNumber::golden_mean();
  Real a = fractional(Real(3L) * alpha.evaluate(300));
  auto rep = check_dc_alpha(a, alpha, Real(3L), Real(2.5), 10);
  CHECK_FALSE(rep.holds);
  CHECK(rep.worst_k == 3);
  CHECK(rep.worst_margin < tol2(-200));
}

TEST_CASE("check_dc_alpha: a = 0 reduces to check_dc") {
  auto alpha = RotationNumber::golden_mean();
  auto ra = check_dc_alpha(Real(0L), alpha, Real(3L), Real(2.5), 50);
  auto rd = check_dc(alpha, Real(3L), Real(2.5), 50);
  CHECK(abs(ra.worst_margin - rd.worst_margin) < tol2(-100));
  CHECK(std::labs(ra.worst_k) == rd.worst_k);
}

TEST_CASE("RDC finite window on a periodic expansion") {
  auto alpha = RotationNumber::golden_mean();
  auto rep = check_rdc_window(alpha, Real(3L), Real(2L), 200, 0, 4);
  CHECK(rep.all_hold);
  REQUIRE(rep.per_iterate.size() == 5);
}
