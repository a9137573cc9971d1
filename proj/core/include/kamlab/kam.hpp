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

#ifndef KAMLAB_KAM_HPP
#define KAMLAB_KAM_HPP

#include <optional>
#include <string>
#include <vector>

#include "kamlab/cocycle.hpp"

namespace kamlab {

/// Scheme parameters. The truncation schedule is N_{n+1} = round(N_n^{1+sigma})
/// and the resonance threshold K_n = N_n^nu. The paper-style smallness gate
/// c0 * K * N^{s0_check} * eps_0 < 1 is checked at every step with the
/// configured constants; the solved conjugation additionally has to satisfy
/// the hard cap ||Y||_0 <= y_norm_cap.
struct KamParams {
  long n1 = 8;
  Real sigma = Real(0.5);
  Real nu = Real(3.75);  // 3*tau/2
  Real tau = Real(2.5);
  Real gamma = Real(3L);
  int s0 = 2;                  // regularity tracked in the ledger / entry gate
  int s0_check = 0;            // regularity inside the smallness product
  Real c0 = Real(0.01);
  Real entry_eps = Real(0.05);  // entry gate on ||F||_0
  int max_steps = 8;
  long precision_bits = 256;
  Real y_norm_cap = Real(0.25);
  std::size_t verify_grid = 1024;
  Real residual_tol = Real(1e-20);
  Real aliasing_tol = Real(1e-45);
  Real drop_tol = Real(0L);     // 0: derive from precision
  long dc_certify_horizon = 4096;

  std::vector<long> schedule(int steps) const;
  Real threshold_k(long big_n) const;  // K = N^nu
};

struct ResonanceHit {
  long k1 = 0;    // resonant frequency (signed); never 0 here
  Real epsilon;   // canonical residue of a - k1 alpha/2 mod (1/2)Z
};

/// Scans 0 < |k| <= N for ||| k alpha - 2a ||| < 1/K and verifies the hit is
/// unique in the window |k - k1| <= 2N (a second hit raises
/// EstimateViolation). Returns nullopt when no mode is resonant.
std::optional<ResonanceHit> detect_resonance(const Real& a, const Real& alpha,
                                             long big_n, const Real& big_k);

/// ||| 2a ||| < 1/K: the zero-mode twist degenerates and the z mean becomes
/// an obstruction to absorb into the constant.
bool mean_twist_blocked(const Real& a, const Real& big_k);

/// Y_t(.+alpha) - Y_t(.) + T'_N F_t(.) = 0 solved coefficientwise:
/// Y_t(k) = -F_t(k) / (e^{2 pi i k alpha} - 1) on 0 < |k| <= N. Divisors are
/// guarded by the Diophantine floor gamma^-1 k^-tau (EstimateViolation).
AlgebraMap solve_diagonal(const AlgebraMap& f, const Real& alpha, long big_n,
                          const Real& gamma, const Real& tau);

/// (e^{2 pi i (k alpha - 2a)} - 1) Y_z(k) = -F_z(k) on the solved window:
/// 0 < |k - k1| <= 2N when a resonant (or blocked-mean, k1 = 0) mode is
/// present, |k| <= N otherwise. Divisors below 1/K raise EstimateViolation
/// (the resonance scan should have caught them).
AlgebraMap solve_twisted(const AlgebraMap& f, const Real& a, const Real& alpha,
                         long big_n, std::optional<long> k1, const Real& big_k);

/// One step of the local conjugation lemma.
struct KamStepResult {
  long n = 0;        // scheme step index (1-based)
  long big_n = 0;    // N_n
  Real big_k;        // K_n
  Real angle_in;     // canonical angle of the (diagonal) input constant

  GroupElement frame;  // diagonalizing rotation applied before the step
  AlgebraMap y;        // close-to-identity generator
  std::optional<long> b_half_degree;  // far reduction B = morphism(-k1)
  std::optional<GroupMap> c_fix;      // periodicity restoration, when applied

  GroupElement a_next;
  AlgebraMap f_next;

  std::optional<ResonanceHit> resonance;  // k1 != 0 reduction at this step
  Complex resonant_mode;                  // F_z(k1) when resonant
  bool mean_blocked = false;
  bool pending_half_lattice_out = false;

  // Norm ledger.
  Real eps0_in, eps_s0_in, eps0_out, eps_s0_out;
  Real y_norm0, y_norm_s0;
  Real y_scaling_ratio;  // ||Y||_0 / (N^{nu+1/2} eps0_in)
  Real residual;         // sup grid residual of the conjugation identity

  /// The full conjugation of this step, W(x) = C(x) B(x) e^{Y(x)} D with D
  /// the diagonalizing frame.
  GroupMap step_conjugation() const;
};

/// Applies one step to (alpha, {e^{2 pi i a},0} e^{F(.)}). The input constant
/// must already be diagonal with canonical angle a. `pending_half_lattice`
/// carries the parity debt of an odd far-from-identity reduction from the
/// previous step; the restoration C is applied at the next constant
/// absorption. Throws PreconditionError when the smallness gate fails and
/// EstimateViolation on internal guarantees.
KamStepResult kam_step(const Real& a, const AlgebraMap& f, const Real& alpha,
                       long big_n, const Real& big_k, const KamParams& params,
                       bool pending_half_lattice);

struct SchemeTrace {
  KamParams params;
  RotationNumber frequency;
  Real alpha;
  GroupMap original_transfer;
  GroupElement a0;       // initial constant split off the transfer
  AlgebraMap f0;         // initial perturbation
  Real entry_eps0, entry_eps_s0;
  std::vector<KamStepResult> steps;
  GroupElement a_final;
  AlgebraMap f_final;
  std::string status;    // completed | converged | truncated:...
  bool dc_certified = false;
  long dc_horizon = 0;

  SchemeTrace(RotationNumber freq, Real al, GroupMap transfer)
      : frequency(std::move(freq)), alpha(std::move(al)),
        original_transfer(std::move(transfer)) {}

  /// Product of all step conjugations H_n = W_n ... W_1.
  GroupMap accumulated_conjugation(std::size_t upto_steps) const;
};

/// Iterates kam_step over the schedule until max_steps, convergence of the
/// perturbation below the precision floor, or a mid-scheme violation (the
/// trace is then truncated with the diagnostic in `status`; entry failures
/// throw PreconditionError).
SchemeTrace run_scheme(const Cocycle& c, const KamParams& params);

/// Splits a transfer map into a constant and a log-perturbation:
/// T(x) = A0 e^{F0(x)}.
struct ConstantSplit {
  GroupElement a0;
  AlgebraMap f0;
};
ConstantSplit split_constant(const GroupMap& transfer, const Real& aliasing_tol);

}  // namespace kamlab

#endif  // KAMLAB_KAM_HPP
