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

#include "kamlab/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kamlab {

namespace {

// Representative of x mod (1/2)Z in [0, 1/2).
Real mod_half(const Real& x) {
  Real two = x + x;
  return fractional(two) / Real(2L);
}

// Canonical residue of x mod (1/2)Z in (-1/4, 1/4].
Real residue_half(const Real& x) {
  return x - round_nearest(x + x) / Real(2L);
}

Real circle_distance(const Real& phi1, const Real& phi2) {
  // Distance of arguments on [0, 2 pi).
  Real d = abs(phi1 - phi2);
  Real two_pi = Real::two_pi();
  while (d > two_pi) d -= two_pi;
  return min(d, two_pi - d);
}

Real canonical_arg(const Complex& c) {
  Real a = arg(c);
  if (a < Real(0L)) a += Real::two_pi();
  return a;
}

struct ChainRecord {
  Real a_in;       // canonical angle at firing
  Real eps;        // exact residue used by the chain
  GroupMap q;      // far conjugation to the next firing frame
  Real a_out;      // canonical angle after absorption/restoration/rotation
  bool c_fixed = false;
};

// Exact forward step of the reduction chain for a pure normal-form plant.
ChainRecord advance_chain(const Real& a_in, long k, const Real& eps,
                          const Complex& c, const Real& alpha) {
  ChainRecord rec;
  rec.a_in = a_in;
  rec.eps = eps;
  Real delta = a_in - Real(k) * alpha / Real(2L);
  Real resonant_part = round_nearest(delta + delta) / Real(2L);
  GroupElement a_fire = GroupElement::diagonal(resonant_part);
  // Absorption at the blocked step: A2 = A_fire {e^{2 pi i eps},0} e^{{0,c}}.
  GroupElement a2 = a_fire * GroupElement::diagonal(eps) *
                    exp_map(AlgebraElement(Real(0L), c));
  GroupMap q;
  GroupElement a3 = a2;
  if ((k & 1L) != 0) {
    rec.c_fixed = true;
    auto d2 = diagonalize(a2);
    GroupMap cfix = GroupMap::constant(d2.frame.inverse());
    cfix.compose(GroupMap::morphism(1));
    cfix.compose(GroupMap::constant(d2.frame));
    GroupElement c_alpha = d2.frame.inverse() *
                           GroupElement::diagonal(alpha / Real(2L)) * d2.frame;
    a3 = a2 * c_alpha;
    q = cfix;
  }
  q.compose(GroupMap::morphism(-k));
  auto d3 = diagonalize(a3);
  GroupMap full = GroupMap::constant(d3.frame);
  full.compose(q);
  rec.q = full;
  rec.a_out = d3.angle;
  return rec;
}

}  // namespace

Real resonance_angle(const Real& amp, const Real& eps) {
  if (amp.sign() < 0) throw PreconditionError("resonance_angle: amp < 0");
  if (eps.is_zero()) {
    if (amp.is_zero()) return Real(0L);
    return Real::pi() / Real(2L);
  }
  return atan(amp / abs(eps));
}

NormalFormLedger extract(const SchemeTrace& trace) {
  NormalFormLedger ledger(trace.frequency);
  ledger.alpha = trace.alpha;
  ledger.params = trace.params;
  ledger.horizon = static_cast<long>(trace.steps.size());
  for (const auto& s : trace.steps) ledger.schedule.push_back(s.big_n);

  const Real conj_tol = Real::pow2(-(2 * working_precision() / 3));
  GroupMap far;  // P_j
  Real y_sum(0L);
  Real prev_norm(0L);
  int growth_streak = 0;
  for (std::size_t j = 0; j < trace.steps.size(); ++j) {
    const auto& s = trace.steps[j];
    // Close part in the pre-step frame: Z = Ad(D*).Y.
    AlgebraMap z = conjugate_map_constant(s.frame.inverse(), s.y);
    AlgebraMap y_tilde = conjugate_map(far.inverse(), z, conj_tol);
    Real nb = norm_c0(y_tilde, 128);
    if (!y_tilde.is_zero()) {
      GroupMap e = GroupMap::exponential(y_tilde);
      e.compose(ledger.d);
      ledger.d = std::move(e);
    }
    if (j > 0 && nb > prev_norm * Real(2L) && nb > Real(1e-25)) {
      if (++growth_streak >= 2) {
        throw EstimateViolation(
            "extract: close-to-identity tail is not decaying");
      }
    } else {
      growth_streak = 0;
    }
    prev_norm = nb;
    y_sum += nb;

    GroupMap v;
    if (s.c_fix) v.compose(*s.c_fix);
    if (s.b_half_degree) v.compose(GroupMap::morphism(*s.b_half_degree));
    v.compose(GroupMap::constant(s.frame));
    v.compose(far);
    far = std::move(v);

    if (s.resonance) {
      ResonantStep r;
      r.n = s.n;
      r.k = s.resonance->k1;
      r.a = s.angle_in;
      r.eps = s.resonance->epsilon;
      r.amp = abs(s.resonant_mode);
      r.phi = canonical_arg(s.resonant_mode);
      r.theta = resonance_angle(r.amp, r.eps);
      r.c_fix = (r.k & 1L) != 0;
      long upper = s.big_n;
      long lower = (s.n >= 2) ? trace.steps[s.n - 2].big_n : 0;
      r.window_violation = !(std::labs(r.k) > lower && std::labs(r.k) <= upper);
      ledger.steps.push_back(std::move(r));
    }
  }
  ledger.d_log_norm_sum = y_sum;
  ledger.d_in_v_class = y_sum < Real(1L);
  ledger.limiting_constant = trace.a_final;

  // Verify Conj_D(original) against the far-reduced cocycle on a grid.
  Cocycle original(trace.frequency, trace.original_transfer);
  Cocycle lhs = conjugate(ledger.d, original);
  GroupMap final_transfer = GroupMap::constant(trace.a_final);
  final_transfer.compose(GroupMap::exponential(trace.f_final));
  Cocycle rhs = conjugate(far.inverse(),
                          Cocycle(trace.frequency, final_transfer));
  Real worst(0L);
  const int grid = 32;
  for (int g = 0; g < grid; ++g) {
    Real x = Real(g) / Real(grid);
    Real d = distance(lhs.transfer.evaluate(x), rhs.transfer.evaluate(x));
    if (d > worst) worst = d;
  }
  ledger.verification_residual = worst;
  if (worst > Real(1e-9)) {
    throw EstimateViolation("extract: normal-form verification residual " +
                            worst.to_decimal(6));
  }
  return ledger;
}

namespace {

struct PowerFit {
  double exponent = 0.0;
  double r2 = 0.0;
  int points = 0;
};

// Least-squares fit of log w_i against log i; returns the decay exponent p
// in w_i ~ C i^-p.
PowerFit fit_power_law(const std::vector<double>& w) {
  PowerFit fit;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] > 0.0) pts.emplace_back(std::log(double(i + 1)), std::log(w[i]));
  }
  fit.points = static_cast<int>(pts.size());
  if (pts.size() < 2) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (auto [x, y] : pts) {
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
  }
  double n = double(pts.size());
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) {
    // All abscissae equal (at most one usable point).
    return fit;
  }
  double slope = (n * sxy - sx * sy) / denom;
  fit.exponent = -slope;
  double ybar = sy / n;
  double ss_tot = 0, ss_res = 0;
  double intercept = (sy - slope * sx) / n;
  for (auto [x, y] : pts) {
    double pred = intercept + slope * x;
    ss_res += (y - pred) * (y - pred);
    ss_tot += (y - ybar) * (y - ybar);
  }
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace

Diagnosis diagnose(const NormalFormLedger& ledger,
                   const std::vector<Real>& sigmas,
                   const DiagnoseOptions& opts) {
  Diagnosis d;
  Real acc(0L);
  std::vector<double> theta2;
  for (const auto& s : ledger.steps) {
    d.theta.push_back(s.theta);
    acc += s.theta * s.theta;
    d.partial_sums.push_back(acc);
    theta2.push_back(std::pow(s.theta.to_double(), 2));
  }
  for (std::size_t i = 0; i + 1 < ledger.steps.size(); ++i) {
    d.gaps.push_back(ledger.steps[i + 1].n - ledger.steps[i].n);
  }
  for (const auto& sigma : sigmas) {
    Diagnosis::SigmaRow row;
    row.sigma = sigma;
    Real racc(0L);
    std::vector<double> w;
    for (const auto& s : ledger.steps) {
      long big_n = (s.n >= 1 && s.n <= static_cast<long>(ledger.schedule.size()))
                       ? ledger.schedule[s.n - 1]
                       : (ledger.schedule.empty() ? 1 : ledger.schedule.back());
      Real weighted = pow(Real(big_n), sigma) * s.theta;
      racc += weighted * weighted;
      row.partial_sums.push_back(racc);
      w.push_back(std::pow(weighted.to_double(), 2));
    }
    auto fit = fit_power_law(w);
    row.fitted_exponent = fit.exponent;
    row.summable_evidence = fit.points >= 2 && fit.exponent > opts.summable_exponent;
    d.h_sigma.push_back(std::move(row));
  }

  long last_n = ledger.steps.empty() ? 0 : ledger.steps.back().n;
  d.steps_since_last_resonance = static_cast<int>(ledger.horizon - last_n);

  auto fit = fit_power_law(theta2);
  d.fitted_exponent = fit.exponent;
  d.confidence = fit.r2;

  std::ostringstream summary;
  if (ledger.steps.empty() ||
      d.steps_since_last_resonance >= opts.quiet_steps) {
    d.verdict = Diagnosis::Verdict::FinitelyResonant;
    Real a_lim = diagonalize(ledger.limiting_constant).angle;
    d.limiting_dc = check_dc_alpha(a_lim, ledger.frequency,
                                   ledger.params.gamma, ledger.params.tau,
                                   opts.dc_alpha_horizon);
    summary << "EVIDENCE: finitely resonant (" << ledger.steps.size()
            << " reductions, quiet for " << d.steps_since_last_resonance
            << " steps); limiting constant "
            << (d.limiting_dc->holds ? "passes" : "fails")
            << " DC_alpha at horizon " << opts.dc_alpha_horizon;
  } else if (theta2.size() < 2) {
    d.verdict = Diagnosis::Verdict::NotSummable;
    d.confidence = 0.25;
    summary << "EVIDENCE: resonances ongoing with too few angles to fit; "
               "treated as not summable";
  } else if (fit.exponent > opts.summable_exponent) {
    d.verdict = Diagnosis::Verdict::AngleSquareSummable;
    summary << "EVIDENCE: theta_i^2 decays like i^-" << fit.exponent
            << " (R^2 = " << fit.r2 << "), square-summable";
  } else {
    d.verdict = Diagnosis::Verdict::NotSummable;
    summary << "EVIDENCE: theta_i^2 decays like i^-" << fit.exponent
            << " (R^2 = " << fit.r2 << "), not square-summable";
  }
  d.summary = summary.str();
  return d;
}

ClassificationReport classify_pair(const NormalFormLedger& lhs,
                                   const NormalFormLedger& rhs,
                                   const Real& sigma,
                                   const ClassifyOptions& opts) {
  if (abs(lhs.alpha - rhs.alpha) > Real::pow2(-(working_precision() / 2))) {
    throw PreconditionError("classify_pair: ledgers over different frequencies");
  }
  std::size_t shared = std::min(lhs.schedule.size(), rhs.schedule.size());
  for (std::size_t i = 0; i < shared; ++i) {
    if (lhs.schedule[i] != rhs.schedule[i]) {
      throw PreconditionError("classify_pair: ledgers over different schedules");
    }
  }
  ClassificationReport rep;
  Real sigma_eff = (sigma.sign() > 0) ? sigma : opts.sigma_star;

  std::size_t n_steps = std::min(lhs.steps.size(), rhs.steps.size());
  // Item 1: resonant steps coincide up to finitely many exceptions.
  {
    int mismatches = static_cast<int>(
        std::max(lhs.steps.size(), rhs.steps.size()) - n_steps);
    for (std::size_t i = 0; i < n_steps; ++i) {
      if (lhs.steps[i].n != rhs.steps[i].n) ++mismatches;
    }
    rep.resonant_steps.pass = mismatches <= opts.allowed_step_exceptions;
    rep.resonant_steps.decisive_fail =
        mismatches > 2 * opts.allowed_step_exceptions;
    rep.resonant_steps.worst_margin = Real(mismatches);
    rep.resonant_steps.detail =
        std::to_string(mismatches) + " step mismatches";
  }

  auto tol_at = [&](std::size_t i) {
    // N_{i-1}^{-sigma}: the schedule value at the previous resonant step.
    long big_n = 1;
    if (i >= 1 && i - 1 < lhs.steps.size()) {
      long n_prev = lhs.steps[i - 1].n;
      if (n_prev >= 1 && n_prev <= static_cast<long>(lhs.schedule.size()))
        big_n = lhs.schedule[n_prev - 1];
    } else if (!lhs.schedule.empty()) {
      big_n = lhs.schedule[0];
    }
    return pow(Real(big_n), -sigma_eff);
  };

  // Item 2: angles match within N_{i-1}^{-sigma}.
  {
    Real worst(0L);
    bool pass = true, decisive = false;
    for (std::size_t i = 0; i < n_steps; ++i) {
      Real tol = tol_at(i);
      Real diff = abs(lhs.steps[i].theta - rhs.steps[i].theta);
      Real margin = diff / tol;
      if (margin > worst) worst = margin;
      if (diff > tol) pass = false;
      if (diff > opts.decisive_factor * tol) decisive = true;
    }
    rep.angles.pass = pass;
    rep.angles.decisive_fail = decisive;
    rep.angles.worst_margin = worst;
    rep.angles.detail = "max |theta1-theta2|/tol = " + worst.to_decimal(4);
  }

  // Item 3: rotation numbers differ by k~ alpha with matching frequency
  // shifts, and the weighted sums |k~|^s theta_{i-1} stay bounded. The
  // canonical chamber identifies (k, a) with (-k, -a) (Weyl gauge), so each
  // step resolves the orientation that satisfies the relation.
  std::vector<int> orientation(n_steps, +1);
  {
    Real worst(0L);
    bool pass = true, decisive = false;
    for (std::size_t i = 0; i < n_steps; ++i) {
      Real two_a1 = lhs.steps[i].a + lhs.steps[i].a;
      Real two_a2 = rhs.steps[i].a + rhs.steps[i].a;
      long kt_plus = lhs.steps[i].k - rhs.steps[i].k;
      long kt_minus = lhs.steps[i].k + rhs.steps[i].k;
      Real mism_plus = dist_z(two_a1 - two_a2 - Real(kt_plus) * lhs.alpha);
      Real mism_minus = dist_z(two_a1 + two_a2 - Real(kt_minus) * lhs.alpha);
      long ktilde;
      Real mism;
      if (mism_plus <= mism_minus) {
        ktilde = kt_plus;
        mism = mism_plus;
        orientation[i] = +1;
      } else {
        ktilde = kt_minus;
        mism = mism_minus;
        orientation[i] = -1;
      }
      rep.k_tilde.push_back(ktilde);
      Real tol = tol_at(i);
      Real margin = mism / tol;
      if (margin > worst) worst = margin;
      if (mism > tol) pass = false;
      if (mism > opts.decisive_factor * tol) decisive = true;
    }
    for (int s : opts.summability_powers) {
      Real acc(0L);
      for (std::size_t i = 1; i < rep.k_tilde.size(); ++i) {
        Real term = pow(Real(std::labs(rep.k_tilde[i])), Real(s)) *
                    lhs.steps[i - 1].theta;
        acc += term * term;
      }
      rep.k_tilde_weighted_sums.emplace_back(s, acc);
    }
    rep.rotation_numbers.pass = pass;
    rep.rotation_numbers.decisive_fail = decisive;
    rep.rotation_numbers.worst_margin = worst;
    rep.rotation_numbers.detail =
        "max |||2(a1-a2)-k~ alpha|||/tol = " + worst.to_decimal(4);
  }

  // Item 4: arguments match within tolerance; the Weyl gauge conjugates the
  // resonant mode (phi -> -phi), and steps whose parity restoration
  // conventions differ are excluded from the comparison.
  {
    Real worst(0L);
    bool pass = true, decisive = false;
    for (std::size_t i = 0; i < n_steps; ++i) {
      if (lhs.steps[i].c_fix != rhs.steps[i].c_fix) continue;
      Real tol = tol_at(i);
      Real phi2 = rhs.steps[i].phi;
      if (orientation[i] < 0) phi2 = Real::two_pi() - phi2;
      Real diff = circle_distance(lhs.steps[i].phi, phi2);
      Real margin = diff / tol;
      if (margin > worst) worst = margin;
      if (diff > tol) pass = false;
      if (diff > opts.decisive_factor * tol) decisive = true;
    }
    rep.arguments.pass = pass;
    rep.arguments.decisive_fail = decisive;
    rep.arguments.worst_margin = worst;
    rep.arguments.detail = "max dphi/tol = " + worst.to_decimal(4);
  }

  bool all_pass = rep.resonant_steps.pass && rep.angles.pass &&
                  rep.rotation_numbers.pass && rep.arguments.pass;
  bool any_decisive = rep.resonant_steps.decisive_fail ||
                      rep.angles.decisive_fail ||
                      rep.rotation_numbers.decisive_fail ||
                      rep.arguments.decisive_fail;
  if (all_pass) rep.verdict = ClassificationReport::Verdict::Equivalent;
  else if (any_decisive) rep.verdict = ClassificationReport::Verdict::Inequivalent;
  else rep.verdict = ClassificationReport::Verdict::Inconclusive;
  return rep;
}

namespace {

struct ChainPlan {
  std::vector<ChainRecord> records;
  std::vector<long> schedule;
};

// Runs the exact chain over a plant, validating windows, firing thresholds,
// smallness and chain consistency. Used by synthesize and the designer.
ChainPlan run_chain(const Plant& plant, const Real& alpha,
                    const KamParams& params, const SynthesizeOptions& opts,
                    bool strict_eps) {
  if (plant.steps.empty()) return {};
  long max_n = 0;
  for (const auto& s : plant.steps) {
    if (s.n < 1) throw PreconditionError("synthesize: plant step index < 1");
    max_n = std::max(max_n, s.n);
  }
  for (std::size_t i = 0; i + 1 < plant.steps.size(); ++i) {
    if (plant.steps[i + 1].n <= plant.steps[i].n + 1) {
      throw PreconditionError(
          "synthesize: resonant steps must be separated by at least one "
          "absorption step");
    }
  }
  ChainPlan plan;
  plan.schedule = params.schedule(static_cast<int>(max_n));

  Real a_cur = mod_half(Real(plant.steps[0].k) * alpha / Real(2L) +
                        plant.steps[0].eps);
  for (std::size_t i = 0; i < plant.steps.size(); ++i) {
    const auto& s = plant.steps[i];
    long big_n = plan.schedule[s.n - 1];
    long lower = (s.n >= 2) ? plan.schedule[s.n - 2] : 0;
    Real big_k = params.threshold_k(big_n);
    if (!(std::labs(s.k) > lower && std::labs(s.k) <= big_n)) {
      throw PreconditionError(
          "synthesize: plant violates the schedule window at step " +
          std::to_string(s.n) + ": |k| = " + std::to_string(std::labs(s.k)) +
          " not in (" + std::to_string(lower) + ", " + std::to_string(big_n) +
          "]");
    }
    Real eps_derived = residue_half(a_cur - Real(s.k) * alpha / Real(2L));
    if (abs(eps_derived - s.eps) > opts.chain_tol) {
      throw PreconditionError(
          "synthesize: plant chain inconsistent at step " +
          std::to_string(s.n) + ": derived eps " + eps_derived.to_decimal(8) +
          " vs planted " + s.eps.to_decimal(8));
    }
    if (!(abs(eps_derived + eps_derived) < Real(1L) / big_k)) {
      throw PreconditionError(
          "synthesize: resonance does not fire at step " + std::to_string(s.n) +
          ": |2 eps| = " + abs(eps_derived + eps_derived).to_decimal(8) +
          " >= 1/K = " + (Real(1L) / big_k).to_decimal(8));
    }
    Real small_bound = opts.smallness_const *
                       pow(Real(lower > 0 ? lower : plan.schedule[0]),
                           -opts.smallness_w);
    if (s.amp > small_bound ||
        abs(s.eps) * Real::two_pi() > small_bound) {
      throw PreconditionError(
          "synthesize: plant violates smallness at step " + std::to_string(s.n) +
          ": amp/eps above N^{-w} bound " + small_bound.to_decimal(8));
    }
    Complex mode(s.amp * cos(s.phi), s.amp * sin(s.phi));
    ChainRecord rec =
        advance_chain(a_cur, s.k, strict_eps ? eps_derived : s.eps, mode, alpha);
    a_cur = rec.a_out;
    plan.records.push_back(std::move(rec));

    // Spurious-firing scan over the quiet steps that follow.
    if (opts.check_spurious) {
      long next_n = (i + 1 < plant.steps.size()) ? plant.steps[i + 1].n
                                                 : std::min<long>(max_n + 1,
                                                                  s.n + 2);
      for (long n = s.n + 2; n < next_n; ++n) {
        long nn = params.schedule(static_cast<int>(n))[n - 1];
        if (nn > 8192) break;  // advisory scan only at moderate horizons
        auto stray = detect_resonance(a_cur, alpha, nn, params.threshold_k(nn));
        if (stray) {
          throw PreconditionError(
              "synthesize: plant creates a stray resonance k=" +
              std::to_string(stray->k1) + " at quiet step " +
              std::to_string(n));
        }
      }
    }
  }
  return plan;
}

}  // namespace

Cocycle synthesize(const Plant& plant, const RotationNumber& frequency,
                   const KamParams& params, const SynthesizeOptions& opts) {
  PrecisionGuard guard(params.precision_bits);
  Real alpha = frequency.evaluate(params.precision_bits);
  if (plant.steps.empty()) {
    return Cocycle::constant(frequency, GroupElement::identity());
  }
  ChainPlan plan = run_chain(plant, alpha, params, opts, /*strict_eps=*/true);

  // Transfer in the first firing frame: M_R = diag(a_R) e^{{0, c_R e_k_R}}
  // conjugated back through the accumulated far maps.
  const auto& last = plant.steps.back();
  const auto& last_rec = plan.records.back();
  AlgebraMap mode = AlgebraMap::zero(2 * std::labs(last.k));
  mode.set_z_at(last.k,
                Complex(last.amp * cos(last.phi), last.amp * sin(last.phi)));
  GroupMap m_r = GroupMap::constant(GroupElement::diagonal(last_rec.a_in));
  m_r.compose(GroupMap::exponential(mode));

  GroupMap p;  // Q_{R-1} ... Q_1
  for (std::size_t i = 0; i + 1 < plan.records.size(); ++i) {
    GroupMap q = plan.records[i].q;
    q.compose(p);
    p = std::move(q);
  }
  Cocycle inner(frequency, m_r);
  return conjugate(p.inverse(), inner);
}

PlantProbe probe_plant(const PlantDesign& design,
                       const RotationNumber& frequency,
                       const KamParams& params) {
  PrecisionGuard guard(params.precision_bits);
  std::size_t r = design.n.size();
  if (design.k.size() != r || design.theta.size() != r ||
      design.phi.size() != r || r == 0) {
    throw PreconditionError("plant design: inconsistent lengths");
  }
  Real alpha = frequency.evaluate(params.precision_bits);
  PlantProbe probe;
  probe.fires = true;
  Real a_cur;
  for (std::size_t i = 0; i < r; ++i) {
    PlantStep step;
    step.n = design.n[i];
    long big_n = params.schedule(static_cast<int>(step.n))[step.n - 1];
    Real big_k = params.threshold_k(big_n);
    if (i == 0) {
      step.k = design.k[0];
      step.eps = design.eps1;
      a_cur = mod_half(Real(step.k) * alpha / Real(2L) + step.eps);
    } else {
      // Resolve the sign of k from the chain.
      Real ep = residue_half(a_cur - Real(std::labs(design.k[i])) * alpha / Real(2L));
      Real em = residue_half(a_cur + Real(std::labs(design.k[i])) * alpha / Real(2L));
      if (abs(ep) <= abs(em)) {
        step.k = std::labs(design.k[i]);
        step.eps = ep;
      } else {
        step.k = -std::labs(design.k[i]);
        step.eps = em;
      }
    }
    probe.two_eps_abs.push_back(abs(step.eps + step.eps));
    probe.thresholds.push_back(Real(1L) / big_k);
    if (!(probe.two_eps_abs.back() < probe.thresholds.back())) {
      probe.fires = false;
    }
    step.amp = abs(step.eps) * tan(design.theta[i]);
    step.phi = design.phi[i];
    probe.plant.steps.push_back(step);
    Complex mode(step.amp * cos(step.phi), step.amp * sin(step.phi));
    ChainRecord rec = advance_chain(a_cur, step.k, step.eps, mode, alpha);
    a_cur = rec.a_out;
  }
  return probe;
}

Plant design_consistent_plant(const PlantDesign& design,
                              const RotationNumber& frequency,
                              const KamParams& params) {
  PlantProbe probe = probe_plant(design, frequency, params);
  if (!probe.fires) {
    std::ostringstream os;
    os << "plant design infeasible:";
    for (std::size_t i = 0; i < probe.two_eps_abs.size(); ++i) {
      if (probe.two_eps_abs[i] < probe.thresholds[i]) continue;
      os << " step " << design.n[i] << ": |2 eps| = "
         << probe.two_eps_abs[i].to_decimal(8)
         << " >= 1/K = " << probe.thresholds[i].to_decimal(8) << ";";
    }
    os << " pick frequencies closer to the resonances";
    throw PreconditionError(os.str());
  }
  return probe.plant;
}

Plant plant_of(const NormalFormLedger& ledger) {
  Plant p;
  for (const auto& s : ledger.steps) {
    p.steps.push_back({s.n, s.k, s.eps, s.amp, s.phi});
  }
  return p;
}

Plant rederived_plant(const NormalFormLedger& ledger, const KamParams& params) {
  PrecisionGuard guard(params.precision_bits);
  Plant raw = plant_of(ledger);
  if (raw.steps.empty()) return raw;
  Real alpha = ledger.frequency.evaluate(params.precision_bits);
  Real a_cur = mod_half(Real(raw.steps[0].k) * alpha / Real(2L) +
                        raw.steps[0].eps);
  for (std::size_t i = 0; i < raw.steps.size(); ++i) {
    PlantStep& s = raw.steps[i];
    if (i > 0) {
      Real derived = residue_half(a_cur - Real(s.k) * alpha / Real(2L));
      // Preserve the recorded angle; amp follows the re-derived eps.
      Real theta = resonance_angle(s.amp, s.eps);
      s.eps = derived;
      s.amp = abs(derived) * tan(theta);
    }
    Complex mode(s.amp * cos(s.phi), s.amp * sin(s.phi));
    ChainRecord rec = advance_chain(a_cur, s.k, s.eps, mode, alpha);
    a_cur = rec.a_out;
  }
  return raw;
}

Cocycle deform(const NormalFormLedger& source, const NormalFormLedger& target,
               const Real& t, const KamParams& params,
               const SynthesizeOptions& opts) {
  if (t < Real(0L) || t > Real(1L))
    throw PreconditionError("deform: t outside [0,1]");
  Plant src = rederived_plant(source, params);
  Plant tgt = rederived_plant(target, params);
  if (t.is_zero()) return synthesize(src, source.frequency, params, opts);
  if (t == Real(1L)) return synthesize(tgt, target.frequency, params, opts);
  if (abs(source.alpha - target.alpha) >
      Real::pow2(-(working_precision() / 2))) {
    throw PreconditionError("deform: ledgers over different frequencies");
  }

  // Dyadic interval index: t in [1 - 2^{1-i}, 1 - 2^{-i}).
  Real rem = Real(1L) - t;
  int i = 1;
  Real width(0.5);
  while (rem <= width && i < 60) {
    width = width / Real(2L);
    ++i;
  }
  Real lo = Real(1L) - (width + width);
  Real s = (t - lo) / width;  // in [0, 1)

  std::size_t idx = static_cast<std::size_t>(i - 1);  // 0-based step index
  std::size_t len = std::max(src.steps.size(), tgt.steps.size());
  Plant mixed;
  Real alpha = source.frequency.evaluate(params.precision_bits);

  auto push_step = [&](const PlantStep& proto, const Real& theta) {
    mixed.steps.push_back(proto);
    mixed.steps.back().amp = abs(proto.eps) * tan(theta);
  };

  Real a_cur;
  bool started = false;
  for (std::size_t j = 0; j < len; ++j) {
    const PlantStep* owner = nullptr;
    Real theta;
    if (j < idx) {
      if (j >= tgt.steps.size()) continue;
      owner = &tgt.steps[j];
      theta = target.steps[j].theta;
    } else if (j > idx) {
      if (j >= src.steps.size()) continue;
      owner = &src.steps[j];
      theta = source.steps[j].theta;
    } else {
      // The interpolated step: theta shrinks to zero on the source side,
      // the frequency/argument switch happens at the midpoint where the
      // mode is absent, then theta grows on the target side.
      bool first_half = s < Real(0.5);
      if (first_half) {
        if (j >= src.steps.size()) continue;
        owner = &src.steps[j];
        theta = (Real(1L) - (s + s)) * source.steps[j].theta;
      } else {
        if (j >= tgt.steps.size()) continue;
        owner = &tgt.steps[j];
        theta = (s + s - Real(1L)) * target.steps[j].theta;
      }
    }
    PlantStep step = *owner;
    if (!started) {
      a_cur = mod_half(Real(step.k) * alpha / Real(2L) + step.eps);
      started = true;
    } else {
      step.eps = residue_half(a_cur - Real(step.k) * alpha / Real(2L));
    }
    push_step(step, theta);
    const PlantStep& st = mixed.steps.back();
    Complex mode(st.amp * cos(st.phi), st.amp * sin(st.phi));
    ChainRecord rec = advance_chain(a_cur, st.k, st.eps, mode, alpha);
    a_cur = rec.a_out;
  }
  return synthesize(mixed, source.frequency, params, opts);
}

}  // namespace kamlab
