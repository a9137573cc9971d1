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

#include "design_helpers.hpp"
#include "kamlab/normal_form.hpp"

using namespace kamlab;
using kamlab::testing::desk_params;

namespace {

Real tol2(int e) { return Real::pow2(e); }

NormalFormLedger synthetic_ledger(const std::vector<double>& thetas,
                                  long gap, long quiet_tail) {
  NormalFormLedger led(RotationNumber::golden_mean());
  led.params = desk_params();
  long horizon = gap * static_cast<long>(thetas.size()) + quiet_tail;
  led.params.max_steps = static_cast<int>(horizon);
  // Hand-made geometric schedule; only the values at the resonant steps
  // matter for the weighted sums.
  for (long n = 1; n <= horizon; ++n) led.schedule.push_back(4L << n);
  led.horizon = horizon;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    ResonantStep s;
    s.n = gap * static_cast<long>(i + 1);
    s.k = 5 + static_cast<long>(i);
    s.a = Real(0.1);
    s.eps = Real(1e-6);
    s.theta = Real(thetas[i]);
    s.amp = abs(s.eps) * tan(s.theta);
    s.phi = Real(0.5);
    led.steps.push_back(s);
  }
  led.limiting_constant = GroupElement::diagonal(Real(0.26));
  return led;
}

}  // namespace

TEST_CASE("resonance angle") {
  CHECK(abs(resonance_angle(Real(1e-5), Real(1e-5)) - Real::pi() / Real(4L)) <
        tol2(-240));
  CHECK(resonance_angle(Real(0L), Real(1e-3)).is_zero());
  CHECK(abs(resonance_angle(Real(1e-3), Real(0L)) - Real::pi() / Real(2L)) <
        tol2(-240));
  CHECK(abs(resonance_angle(Real(1e-8), Real(1e-6)) -
            atan(Real(1e-8) / Real(1e-6))) < tol2(-240));
  CHECK_THROWS_AS(resonance_angle(Real(-1L), Real(0L)), PreconditionError);
}

TEST_CASE("synthesize: empty plant and refusals") {
  KamParams p = desk_params();
  auto freq = RotationNumber::golden_mean();
  Cocycle c = synthesize(Plant{}, freq, p);
  CHECK(distance(c.transfer.evaluate(Real(0.3)), GroupElement::identity()) <
        tol2(-240));

  // Window violation: k = 50 cannot fire at step 2 (N_2 = 6).
  Plant bad;
  bad.steps.push_back({2, 50, Real(1e-3), Real(1e-4), Real(0.5)});
  CHECK_THROWS_AS(synthesize(bad, freq, p), PreconditionError);

  // Chain inconsistency: two steps with unrelated epsilons.
  Plant incons;
  incons.steps.push_back({2, 5, Real(0.004), Real(1e-3), Real(0.5)});
  incons.steps.push_back({5, 35, Real(1e-5), Real(1e-5), Real(0.5)});
  CHECK_THROWS_AS(synthesize(incons, freq, p), PreconditionError);
}

TEST_CASE("one-resonance round trip") {
  KamParams p = desk_params();
  p.max_steps = 5;
  auto freq = RotationNumber::golden_mean();
  Plant plant;
  plant.steps.push_back(
      {2, 5, Real(-0.004), Real(0.0015), Real(1.2)});
  Cocycle c = synthesize(plant, freq, p);
  CHECK(c.transfer.is_one_periodic(Real(1e-40)));

  auto trace = run_scheme(c, p);
  auto ledger = extract(trace);
  REQUIRE(ledger.steps.size() == 1);
  const auto& s = ledger.steps[0];
  CHECK(s.n == 2);
  CHECK(s.k == 5);
  CHECK(abs(s.eps - Real(-0.004)) < Real(1e-12));
  CHECK(abs(s.amp - Real(0.0015)) < Real(1e-12));
  CHECK(abs(s.phi - Real(1.2)) < Real(1e-10));
  Real theta_plant = resonance_angle(Real(0.0015), Real(-0.004));
  CHECK(abs(s.theta - theta_plant) < Real(1e-10));
  CHECK(ledger.d_in_v_class);
  CHECK(ledger.verification_residual < Real(1e-18));
}

TEST_CASE("two-resonance round trip") {
  KamParams p = desk_params();
  auto freq = RotationNumber::golden_mean();
  Plant plant = testing::golden_two_resonance_plant(
      Real(0.3), Real(0.25), Real(1.1), Real(2.0), p);
  REQUIRE(plant.steps.size() == 2);
  Cocycle c = synthesize(plant, freq, p);
  auto trace = run_scheme(c, p);
  auto ledger = extract(trace);
  REQUIRE(ledger.steps.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& rec = ledger.steps[i];
    const auto& pl = plant.steps[i];
    CHECK(rec.n == pl.n);
    CHECK(rec.k == pl.k);
    CHECK(abs(rec.eps - pl.eps) < Real(1e-9));
    CHECK(abs(rec.amp - pl.amp) < Real(1e-9));
    Real theta_plant = resonance_angle(pl.amp, pl.eps);
    CHECK(abs(rec.theta - theta_plant) < Real(1e-8));
  }
  CHECK(ledger.d_in_v_class);
}

TEST_CASE("extract on a resonance-free cocycle") {
  KamParams p = desk_params();
  p.max_steps = 4;
  AlgebraMap f = random_algebra_map(2027, 3, Real(1e-4));
  GroupMap t = GroupMap::constant(GroupElement::diagonal(Real(0.466)));
  t.compose(GroupMap::exponential(f));
  Cocycle c(RotationNumber::golden_mean(), t);
  auto trace = run_scheme(c, p);
  auto ledger = extract(trace);
  CHECK(ledger.steps.empty());
  CHECK(ledger.d_in_v_class);
  CHECK(ledger.verification_residual < Real(1e-18));
  auto diag = diagnose(ledger, {Real(0L), Real(2L)});
  CHECK(diag.verdict == Diagnosis::Verdict::FinitelyResonant);
  REQUIRE(diag.limiting_dc.has_value());
}

TEST_CASE("diagnose synthetic ledgers") {
  std::vector<Real> sigmas = {Real(0L), Real(2L)};

  // theta_i = 2^-i: geometric, square-summable.
  {
    std::vector<double> th;
    for (int i = 1; i <= 10; ++i) th.push_back(std::pow(2.0, -i));
    auto led = synthetic_ledger(th, 2, 1);
    auto d = diagnose(led, sigmas);
    CHECK(d.verdict == Diagnosis::Verdict::AngleSquareSummable);
    // Per-sigma split: summable at 0, not at 2 (weights N^2 grow fast).
    CHECK(d.h_sigma[0].summable_evidence);
    CHECK_FALSE(d.h_sigma[1].summable_evidence);
  }

  // theta_i = 1/sqrt(i): harmonic partial sums, not summable.
  {
    std::vector<double> th;
    for (int i = 1; i <= 12; ++i) th.push_back(1.0 / std::sqrt(double(i)));
    auto d = diagnose(synthetic_ledger(th, 2, 1), sigmas);
    CHECK(d.verdict == Diagnosis::Verdict::NotSummable);
  }

  // Constant angles: not summable.
  {
    std::vector<double> th(8, 0.3);
    auto d = diagnose(synthetic_ledger(th, 2, 1), sigmas);
    CHECK(d.verdict == Diagnosis::Verdict::NotSummable);
    REQUIRE(d.gaps.size() == 7);
    CHECK(d.gaps[0] == 2);
  }

  // Long quiet tail: finitely resonant with a DC_alpha report.
  {
    std::vector<double> th(3, 0.2);
    auto d = diagnose(synthetic_ledger(th, 2, 9), sigmas);
    CHECK(d.verdict == Diagnosis::Verdict::FinitelyResonant);
    CHECK(d.limiting_dc.has_value());
  }
}

TEST_CASE("classify_pair verdicts") {
  KamParams p = desk_params();
  auto freq = RotationNumber::golden_mean();
  Plant plant = testing::golden_two_resonance_plant(
      Real(0.3), Real(0.25), Real(1.1), Real(2.0), p);
  Cocycle c = synthesize(plant, freq, p);
  auto ledger = extract(run_scheme(c, p));
  REQUIRE(ledger.steps.size() == 2);

  // Identical ledgers are equivalent.
  auto rep_same = classify_pair(ledger, ledger, Real(0L));
  CHECK(rep_same.verdict == ClassificationReport::Verdict::Equivalent);

  // Far-conjugation action: conjugating by the torus morphism
  // {e^{-2 pi i x}, 0} translates the first resonance by -2 and its
  // rotation number by -alpha; the ledgers stay equivalent.
  {
    Cocycle c2 = conjugate(GroupMap::morphism(-2), c);
    auto ledger2 = extract(run_scheme(c2, p));
    REQUIRE(ledger2.steps.size() == 2);
    auto rep = classify_pair(ledger, ledger2, Real(0L));
    CHECK(rep.verdict == ClassificationReport::Verdict::Equivalent);
    REQUIRE(rep.k_tilde.size() == 2);
    CHECK(rep.k_tilde[0] == 2);
    CHECK(rep.k_tilde[1] == 0);
  }

  // Theta perturbed by ten tolerances: decisively inequivalent.
  {
    NormalFormLedger perturbed = ledger;
    long n_prev = ledger.steps[0].n;
    Real tol = pow(Real(ledger.schedule[n_prev - 1]), Real(-8L));
    perturbed.steps[1].theta += Real(11L) * tol;
    auto rep = classify_pair(ledger, perturbed, Real(0L));
    CHECK(rep.verdict == ClassificationReport::Verdict::Inequivalent);
    CHECK_FALSE(rep.angles.pass);
  }

  // Mismatched frequencies are a usage error.
  NormalFormLedger other(RotationNumber::sqrt2_minus_one());
  CHECK_THROWS_AS(classify_pair(ledger, other, Real(0L)), PreconditionError);
}

TEST_CASE("deform endpoints and continuity") {
  KamParams p = desk_params();
  auto freq = RotationNumber::golden_mean();
  Plant src_plant = testing::golden_two_resonance_plant(
      Real(0.3), Real(0.25), Real(1.1), Real(2.0), p);
  Plant tgt_plant = testing::golden_two_resonance_plant(
      Real(0.2), Real(0.35), Real(0.7), Real(2.9), p);
  Cocycle src_c = synthesize(src_plant, freq, p);
  Cocycle tgt_c = synthesize(tgt_plant, freq, p);
  auto src = extract(run_scheme(src_c, p));
  auto tgt = extract(run_scheme(tgt_c, p));

  // Endpoints.
  Cocycle d0 = deform(src, tgt, Real(0L), p);
  Cocycle d1 = deform(src, tgt, Real(1L), p);
  for (double xv : {0.2, 0.8}) {
    Real x(xv);
    CHECK(distance(d0.transfer.evaluate(x), src_c.transfer.evaluate(x)) <
          Real(1e-9));
    CHECK(distance(d1.transfer.evaluate(x), tgt_c.transfer.evaluate(x)) <
          Real(1e-9));
  }

  // Continuity within a dyadic interval (same-frequency family): the H0
  // grid distance vanishes with |t - t'|.
  Real prev_dist;
  bool first = true;
  Real t0(0.2);
  for (double dt : {0.05, 0.01, 0.002}) {
    Cocycle a = deform(src, tgt, t0, p);
    Cocycle b = deform(src, tgt, t0 + Real(dt), p);
    Real worst(0L);
    for (int g = 0; g < 32; ++g) {
      Real x = Real(g) / Real(32L);
      Real d = distance(a.transfer.evaluate(x), b.transfer.evaluate(x));
      if (d > worst) worst = d;
    }
    if (!first) CHECK(worst < prev_dist);
    prev_dist = worst;
    first = false;
  }
  CHECK(prev_dist < Real(1e-3));
}

TEST_CASE("class-V invariance of the recovered ledger (smoke)") {
  KamParams p = desk_params();
  auto freq = RotationNumber::golden_mean();
  Plant plant = testing::golden_two_resonance_plant(
      Real(0.3), Real(0.25), Real(1.1), Real(2.0), p);
  Cocycle c = synthesize(plant, freq, p);
  auto base = extract(run_scheme(c, p));

  AlgebraMap y0 = random_algebra_map(4242, 2, Real(1e-3));
  Cocycle conj = conjugate(GroupMap::exponential(y0), c);
  auto led = extract(run_scheme(conj, p));
  REQUIRE(led.steps.size() == base.steps.size());
  for (std::size_t i = 0; i < led.steps.size(); ++i) {
    CHECK(led.steps[i].n == base.steps[i].n);
    CHECK(led.steps[i].k == base.steps[i].k);
    Real dtheta = abs(led.steps[i].theta - base.steps[i].theta);
    MESSAGE("step ", i, " |dtheta| = ", dtheta.to_decimal(6));
    CHECK(dtheta < Real(1e-3));
  }
}
