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

#ifndef KAMLAB_NORMAL_FORM_HPP
#define KAMLAB_NORMAL_FORM_HPP

#include <optional>
#include <string>
#include <vector>

#include "kamlab/kam.hpp"

namespace kamlab {

/// arctan(amp/|eps|); pi/2 at eps = 0 (amp > 0), 0 at amp = 0.
Real resonance_angle(const Real& amp, const Real& eps);

/// One resonant reduction in the scheme, with the parameters that define the
/// normal form: frequency k, distance to the exact resonance eps, modulus
/// and argument of the resonant mode, and the angle theta.
struct ResonantStep {
  long n = 0;        // scheme step where the reduction fired
  long k = 0;        // resonant frequency (signed)
  Real a;            // canonical constant angle at firing
  Real eps;
  Real amp;
  Real phi;          // in [0, 2 pi)
  Real theta;        // arctan(amp/|eps|)
  bool c_fix = false;          // parity restoration followed this reduction
  bool window_violation = false;  // |k| outside (N_{n-1}, N_n]
};

struct NormalFormLedger {
  RotationNumber frequency;
  Real alpha;
  KamParams params;
  std::vector<long> schedule;  // N_1..N_horizon
  long horizon = 0;            // scheme steps covered
  std::vector<ResonantStep> steps;
  GroupMap d;                  // close-to-identity conjugation (Exp factors)
  Real d_log_norm_sum;         // sum ||Y~_j||_0, the class-V certificate
  bool d_in_v_class = false;
  GroupElement limiting_constant;
  Real verification_residual;

  explicit NormalFormLedger(RotationNumber freq)
      : frequency(std::move(freq)), alpha(frequency.value()) {}
};

/// Rearranges the scheme's conjugation product into far x close parts,
/// accumulates D = ... e^{Y~_2} e^{Y~_1}, and verifies on a grid that
/// Conj_D(original) equals the far-reduced cocycle at the horizon.
NormalFormLedger extract(const SchemeTrace& trace);

struct DiagnoseOptions {
  int quiet_steps = 5;          // J: no resonance in the last J steps
  double summable_exponent = 1.1;  // power-law exponent threshold on theta^2
  long dc_alpha_horizon = 100;  // DC_alpha check of the limiting constant
  std::size_t grid = 64;
};

struct Diagnosis {
  enum class Verdict { FinitelyResonant, AngleSquareSummable, NotSummable };
  Verdict verdict = Verdict::FinitelyResonant;
  std::vector<Real> theta;
  std::vector<Real> partial_sums;  // running sums of theta_i^2
  struct SigmaRow {
    Real sigma;
    std::vector<Real> partial_sums;  // running sums of (N_{n_i}^sigma theta_i)^2
    bool summable_evidence = false;
    double fitted_exponent = 0.0;
  };
  std::vector<SigmaRow> h_sigma;
  std::vector<long> gaps;  // n_{i+1} - n_i
  int steps_since_last_resonance = 0;
  double fitted_exponent = 0.0;  // power-law fit of theta_i^2
  double confidence = 0.0;       // R^2 of the log-log fit
  std::optional<DiophantineReport> limiting_dc;
  std::string summary;  // labeled EVIDENCE, never proof
};

/// Decision rule: finitely-resonant when no resonance fired in the last
/// `quiet_steps` scheme steps (then the limiting constant is checked against
/// DC_alpha); otherwise a power-law fit of theta_i^2 decides summable vs not.
Diagnosis diagnose(const NormalFormLedger& ledger,
                   const std::vector<Real>& sigmas,
                   const DiagnoseOptions& opts = {});

struct ClassifyOptions {
  Real sigma_star = Real(8L);  // finite stand-in for the O(N^-inf) tolerances
  int allowed_step_exceptions = 2;
  std::vector<int> summability_powers = {1, 2, 4, 8};
  Real window_slack = Real(2L);
  Real decisive_factor = Real(10L);  // margin that flips pass to inequivalent
};

struct ClassificationReport {
  enum class Verdict { Equivalent, Inequivalent, Inconclusive };
  struct Item {
    bool pass = true;
    bool decisive_fail = false;
    Real worst_margin;  // worst (value / tolerance) over the steps
    std::string detail;
  };
  Verdict verdict = Verdict::Inconclusive;
  Item resonant_steps;   // item 1
  Item angles;           // item 2
  Item rotation_numbers; // item 3
  Item arguments;        // item 4
  std::vector<long> k_tilde;
  std::vector<std::pair<int, Real>> k_tilde_weighted_sums;  // per power s
};

/// Thm-style comparator of two ledgers over the same frequency and schedule.
/// `sigma` <= 0 selects the C^inf tolerances N^{-sigma_star}.
ClassificationReport classify_pair(const NormalFormLedger& lhs,
                                   const NormalFormLedger& rhs,
                                   const Real& sigma,
                                   const ClassifyOptions& opts = {});

/// A planted resonance ledger for synthesis.
struct PlantStep {
  long n = 0;
  long k = 0;
  Real eps;
  Real amp;
  Real phi;
};
struct Plant {
  std::vector<PlantStep> steps;
};

struct SynthesizeOptions {
  Real smallness_w = Real(2L);     // amp_i, |eps_i| <= C N_{n_i-1}^{-w}
  Real smallness_const = Real(1L);
  Real chain_tol = Real(1e-25);    // consistency tolerance along the chain
  bool check_spurious = true;      // simulate quiet steps for stray firings
};

/// Builds the cocycle whose scheme run fires exactly the planted reductions.
/// The plant must be chain-consistent: the constant that remains after
/// reduction i must sit at the planted distance eps_{i+1} from the resonance
/// k_{i+1} (use design_consistent_plant to produce such plants). Violations
/// are refused with the violated constraint named.
Cocycle synthesize(const Plant& plant, const RotationNumber& frequency,
                   const KamParams& params, const SynthesizeOptions& opts = {});

/// Free design parameters of a consistent plant: firing steps, frequencies,
/// angles and arguments, plus the scale of the first resonance. The eps/amp
/// chain is derived exactly by the forward recursion.
struct PlantDesign {
  std::vector<long> n;
  std::vector<long> k;
  std::vector<Real> theta;
  std::vector<Real> phi;
  Real eps1;
};
Plant design_consistent_plant(const PlantDesign& design,
                              const RotationNumber& frequency,
                              const KamParams& params);

/// Non-throwing variant: derives the eps/amp chain and reports the firing
/// margins |2 eps_i| against 1/K_{n_i} so callers can tune a design.
struct PlantProbe {
  Plant plant;
  std::vector<Real> two_eps_abs;
  std::vector<Real> thresholds;  // 1/K_{n_i}
  bool fires = false;
};
PlantProbe probe_plant(const PlantDesign& design,
                       const RotationNumber& frequency,
                       const KamParams& params);

Plant plant_of(const NormalFormLedger& ledger);

/// Plant with the eps chain re-derived exactly from the first step's value
/// (extraction leaves quadratic-tail noise on the recorded epsilons that the
/// strict chain-consistency check of synthesize would reject).
Plant rederived_plant(const NormalFormLedger& ledger, const KamParams& params);

/// Dyadic deformation between two normal forms over the same frequency and
/// schedule: for t in [1-2^{1-i}, 1-2^{-i}) steps below i carry the target
/// parameters, step i interpolates (theta decays to zero, then the
/// frequency/argument switch at the midpoint where the mode is absent, then
/// theta grows to the target), steps above i carry the source parameters.
/// The eps chain is re-derived so the plant stays consistent.
Cocycle deform(const NormalFormLedger& source, const NormalFormLedger& target,
               const Real& t, const KamParams& params,
               const SynthesizeOptions& opts = {});

}  // namespace kamlab

#endif  // KAMLAB_NORMAL_FORM_HPP
