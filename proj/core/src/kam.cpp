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

#include "kamlab/kam.hpp"

#include <algorithm>
#include <sstream>

namespace kamlab {

namespace {

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

Real default_aliasing_tol(long bits) { return Real::pow2(-(5 * bits / 8)); }
Real default_drop_tol(long bits) { return Real::pow2(-(bits - 12)); }
Real default_residual_tol(long bits) {
  Real floor = Real::pow2(-(5 * bits / 8));
  Real spec(1e-20);
  return max(spec, floor);
}

std::string real_str(const Real& r) { return r.to_decimal(6); }

}  // namespace

std::vector<long> KamParams::schedule(int steps) const {
  std::vector<long> out;
  Real nr(n1);
  Real one_plus_sigma = Real(1L) + sigma;
  for (int i = 0; i < steps; ++i) {
    Real rounded = round_nearest(nr);
    if (rounded > Real(static_cast<long>(1L << 40)))
      throw PreconditionError("truncation schedule overflows");
    out.push_back(rounded.to_long());
    nr = pow(rounded, one_plus_sigma);
  }
  return out;
}

Real KamParams::threshold_k(long big_n) const { return pow(Real(big_n), nu); }

std::optional<ResonanceHit> detect_resonance(const Real& a, const Real& alpha,
                                             long big_n, const Real& big_k) {
  Real thr = Real(1L) / big_k;
  Real two_a = a + a;
  std::optional<long> found;
  for (long k = 1; k <= big_n; ++k) {
    for (int sgn : {+1, -1}) {
      long ks = sgn * k;
      Real d = dist_z(Real(ks) * alpha - two_a);
      if (d < thr) {
        if (found) {
          throw EstimateViolation(
              "resonance uniqueness violated: modes " + std::to_string(*found) +
              " and " + std::to_string(ks) + " both within 1/K");
        }
        found = ks;
      }
    }
  }
  if (!found) return std::nullopt;
  long k1 = *found;
  // Uniqueness across the full dis-centered window |k - k1| <= 2N.
  for (long k = k1 - 2 * big_n; k <= k1 + 2 * big_n; ++k) {
    if (k == k1 || k == 0 || std::labs(k) <= big_n) continue;
    Real d = dist_z(Real(k) * alpha - two_a);
    if (d < thr) {
      throw EstimateViolation("resonance uniqueness violated in window: " +
                              std::to_string(k1) + " vs " + std::to_string(k));
    }
  }
  ResonanceHit hit;
  hit.k1 = k1;
  Real delta = a - Real(k1) * alpha / Real(2L);
  hit.epsilon = delta - round_nearest(delta + delta) / Real(2L);
  return hit;
}

bool mean_twist_blocked(const Real& a, const Real& big_k) {
  return dist_z(a + a) < Real(1L) / big_k;
}

AlgebraMap solve_diagonal(const AlgebraMap& f, const Real& alpha, long big_n,
                          const Real& gamma, const Real& tau) {
  AlgebraMap y;
  long band = std::min(big_n, f.half_band() / 2);
  for (long k = -band; k <= band; ++k) {
    if (k == 0) continue;
    Complex fk = f.t_at(k);
    if (fk.is_zero()) continue;
    Real floor = Real(1L) / (gamma * pow(Real(std::labs(k)), tau));
    Real d = dist_z(Real(k) * alpha);
    if (d < floor) {
      throw EstimateViolation("diagonal divisor below the Diophantine floor at k=" +
                              std::to_string(k));
    }
    Complex div = Complex::unit(Real(k) * alpha) - Complex::one();
    y.set_t_at(k, -(fk / div));
  }
  return y;
}

AlgebraMap solve_twisted(const AlgebraMap& f, const Real& a, const Real& alpha,
                         long big_n, std::optional<long> k1,
                         const Real& big_k) {
  long lo, hi;
  if (k1) {
    lo = *k1 - 2 * big_n;
    hi = *k1 + 2 * big_n;
  } else {
    lo = -big_n;
    hi = big_n;
  }
  // Only the actual spectral support matters.
  lo = std::max(lo, -f.half_band() / 2);
  hi = std::min(hi, f.half_band() / 2);
  Real thr = Real(1L) / big_k;
  Real two_a = a + a;
  AlgebraMap y;
  for (long k = lo; k <= hi; ++k) {
    if (k1 && k == *k1) continue;  // the obstructed mode
    Complex fk = f.z_at(k);
    if (fk.is_zero()) continue;
    Real twist = Real(k) * alpha - two_a;
    if (dist_z(twist) < thr) {
      throw EstimateViolation("twisted divisor below 1/K at k=" +
                              std::to_string(k) + " (missed resonance)");
    }
    Complex div = Complex::unit(twist) - Complex::one();
    y.set_z_at(k, -(fk / div));
  }
  return y;
}

GroupMap KamStepResult::step_conjugation() const {
  GroupMap w;
  if (c_fix) w.compose(*c_fix);
  if (b_half_degree) w.compose(GroupMap::morphism(*b_half_degree));
  if (!y.is_zero()) w.compose(GroupMap::exponential(y));
  w.compose(GroupMap::constant(frame));
  return w;
}

KamStepResult kam_step(const Real& a, const AlgebraMap& f, const Real& alpha,
                       long big_n, const Real& big_k, const KamParams& params,
                       bool pending_half_lattice) {
  const long bits = working_precision();
  const Real drop_tol =
      params.drop_tol.is_zero() ? default_drop_tol(bits) : params.drop_tol;
  const Real alias_tol = params.aliasing_tol.is_zero()
                             ? default_aliasing_tol(bits)
                             : params.aliasing_tol;
  const Real residual_tol = params.residual_tol.is_zero()
                                ? default_residual_tol(bits)
                               : params.residual_tol;

  KamStepResult res;
  res.big_n = big_n;
  res.big_k = big_k;
  res.angle_in = a;
  res.frame = GroupElement::identity();

  res.eps0_in = norm_c0(f, 512);
  res.eps_s0_in = norm_c_estimate(f, params.s0, 512).value;

  // Smallness gate of the local lemma.
  Real gate = params.c0 * big_k * pow(Real(big_n), Real(params.s0_check)) *
              res.eps0_in;
  if (!(gate < Real(1L))) {
    throw PreconditionError("kam_step smallness gate failed: c0*K*N^s0*eps0 = " +
                            real_str(gate) + " >= 1 (N=" + std::to_string(big_n) +
                            ", eps0=" + real_str(res.eps0_in) + ")");
  }

  res.resonance = detect_resonance(a, alpha, big_n, big_k);
  res.mean_blocked = !res.resonance && mean_twist_blocked(a, big_k);
  if (res.resonance && mean_twist_blocked(a, big_k)) {
    throw EstimateViolation(
        "resonant mode and blocked mean twist at the same step");
  }

  // Close-to-identity generator.
  std::optional<long> k1_for_z;
  if (res.resonance) k1_for_z = res.resonance->k1;
  else if (res.mean_blocked) k1_for_z = 0;
  AlgebraMap y = solve_diagonal(f, alpha, big_n, params.gamma, params.tau) +
                 solve_twisted(f, a, alpha, big_n, k1_for_z, big_k);
  y.drop_small(drop_tol);
  res.y = y;
  res.y_norm0 = norm_c0(y, 512);
  res.y_norm_s0 = norm_c_estimate(y, params.s0, 512).value;
  if (res.y_norm0 > params.y_norm_cap) {
    throw EstimateViolation("||Y||_0 = " + real_str(res.y_norm0) +
                            " exceeds the sanity cap");
  }
  if (res.eps0_in.is_zero()) {
    res.y_scaling_ratio = Real(0L);
  } else {
    res.y_scaling_ratio =
        res.y_norm0 /
        (pow(Real(big_n), params.nu + Real(0.5)) * res.eps0_in);
  }

  // Reduction maps and the next constant.
  GroupMap g;
  bool half_out = pending_half_lattice;
  GroupElement a_in_elt = GroupElement::diagonal(a);
  if (res.resonance) {
    long k1 = res.resonance->k1;
    res.resonant_mode = f.z_at(k1);
    res.b_half_degree = -k1;
    g = GroupMap::morphism(-k1);
    if (!y.is_zero()) g.compose(GroupMap::exponential(y));
    // Exact-resonance constant: a - k1 alpha/2 - eps1 in (1/2)Z.
    Real delta = a - Real(k1) * alpha / Real(2L);
    Real resonant_part = round_nearest(delta + delta) / Real(2L);
    res.a_next = GroupElement::diagonal(resonant_part);
    if ((k1 & 1L) != 0) half_out = !half_out;
  } else {
    if (!y.is_zero()) g = GroupMap::exponential(y);
    Real tbar = f.t_at(0).re;
    if (res.mean_blocked) {
      AlgebraElement obstruction(tbar, f.z_at(0));
      GroupElement a2 = a_in_elt * exp_map(obstruction);
      if (pending_half_lattice) {
        auto dg = diagonalize(a2);
        GroupMap cfix = GroupMap::constant(dg.frame.inverse());
        cfix.compose(GroupMap::morphism(1));
        cfix.compose(GroupMap::constant(dg.frame));
        res.c_fix = cfix;
        GroupMap composed = cfix;
        composed.compose(g);
        g = composed;
        // C(x+alpha) A2 C(x)^* = A2 D^* {e^{i pi alpha}} D.
        GroupElement c_alpha = dg.frame.inverse() *
                               GroupElement::diagonal(alpha / Real(2L)) *
                               dg.frame;
        res.a_next = a2 * c_alpha;
        half_out = false;
      } else {
        res.a_next = a2;
      }
    } else {
      res.a_next = GroupElement::diagonal(a + tbar / Real::two_pi());
    }
  }
  res.pending_half_lattice_out = half_out;

  // Exact recomputation of the next perturbation:
  // F_next = log(A_next^-1 G(.+alpha) A e^{F} G(.)^-1), re-expanded.
  long k1_abs = res.resonance ? std::labs(res.resonance->k1) : 0;
  long content = f.half_band() + 2 * y.half_band() + 2 * k1_abs + 16;
  std::size_t m = next_pow2(std::max<std::size_t>(
      {static_cast<std::size_t>(2 * content + 64), params.verify_grid, 256}));
  GroupElement a_next_inv = res.a_next.inverse();
  AlgebraMap f_next;
  Real worst_residual(0L);
  const std::size_t m_cap = 1u << 16;
  for (;; m <<= 1) {
    if (m > m_cap)
      throw EstimateViolation("kam_step: lattice growth exhausted at " +
                              std::to_string(m_cap));
    GroupMap g_shift = g.shifted(alpha);
    auto gs = g_shift.sample_grid(m);
    auto gg = g.sample_grid(m);
    auto fsamp = f.sample_grid(m);
    std::vector<GroupElement> conj(m);
    for (std::size_t j = 0; j < m; ++j) {
      conj[j] = gs[j] * (a_in_elt * exp_map(fsamp[j])) * gg[j].inverse();
    }
    std::vector<AlgebraElement> logs(m);
    bool log_ok = true;
    try {
      for (std::size_t j = 0; j < m; ++j)
        logs[j] = log_map(a_next_inv * conj[j]);
    } catch (const PreconditionError&) {
      log_ok = false;
    }
    if (!log_ok)
      throw EstimateViolation("kam_step: conjugated transfer far from A_next");
    f_next = algebra_map_from_samples(logs, static_cast<long>(m) / 2 - 1,
                                      false);
    if (f_next.aliasing_bound() > alias_tol) continue;
    f_next.drop_small(drop_tol);
    // Verify the conjugation identity on this grid.
    auto fn_samp = f_next.sample_grid(m);
    worst_residual = Real(0L);
    for (std::size_t j = 0; j < m; ++j) {
      Real d = distance(conj[j], res.a_next * exp_map(fn_samp[j]));
      if (d > worst_residual) worst_residual = d;
    }
    break;
  }
  res.residual = worst_residual;
  if (res.residual > residual_tol) {
    throw EstimateViolation("conjugation identity residual " +
                            real_str(res.residual) + " above tolerance");
  }
  res.f_next = std::move(f_next);
  res.eps0_out = norm_c0(res.f_next, 512);
  res.eps_s0_out = norm_c_estimate(res.f_next, params.s0, 512).value;
  return res;
}

GroupMap SchemeTrace::accumulated_conjugation(std::size_t upto_steps) const {
  GroupMap h;
  for (std::size_t i = 0; i < std::min(upto_steps, steps.size()); ++i) {
    GroupMap w = steps[i].step_conjugation();
    w.compose(h);
    h = std::move(w);
  }
  return h;
}

ConstantSplit split_constant(const GroupMap& transfer, const Real& alias_tol) {
  long content = 16;
  for (const auto& fac : transfer.factors()) {
    if (const auto* mo = std::get_if<GroupMap::Morphism>(&fac)) {
      content += std::labs(mo->half_degree);
    } else if (const auto* e = std::get_if<GroupMap::Exp>(&fac)) {
      content += 2 * e->generator.half_band();
    }
  }
  std::size_t m = next_pow2(static_cast<std::size_t>(2 * content + 64));
  if (m < 128) m = 128;
  const std::size_t m_cap = 1u << 16;
  for (;; m <<= 1) {
    if (m > m_cap)
      throw EstimateViolation("split_constant: lattice growth exhausted");
    auto samples = transfer.sample_grid(m);
    Complex zsum = Complex::zero(), wsum = Complex::zero();
    for (const auto& s : samples) {
      zsum += s.z;
      wsum += s.w;
    }
    Real inv(1L);
    inv = inv / Real(static_cast<long>(m));
    GroupElement a0(inv * zsum, inv * wsum);
    Real mass = sqrt(norm2(a0.z) + norm2(a0.w));
    if (mass < Real(0.5)) {
      throw PreconditionError(
          "transfer map is far from constant (mean nearly singular)");
    }
    a0.renormalize();
    GroupElement a0_inv = a0.inverse();
    std::vector<AlgebraElement> logs(m);
    try {
      for (std::size_t j = 0; j < m; ++j) logs[j] = log_map(a0_inv * samples[j]);
    } catch (const PreconditionError&) {
      throw PreconditionError("transfer map is far from constant (log branch)");
    }
    AlgebraMap f0 = algebra_map_from_samples(
        logs, static_cast<long>(m) / 2 - 1, false);
    if (f0.aliasing_bound() > alias_tol) continue;
    return {a0, f0};
  }
}

SchemeTrace run_scheme(const Cocycle& c, const KamParams& params) {
  PrecisionGuard guard(params.precision_bits);
  const long bits = params.precision_bits;
  const Real drop_tol =
      params.drop_tol.is_zero() ? default_drop_tol(bits) : params.drop_tol;
  const Real alias_tol = params.aliasing_tol.is_zero()
                             ? default_aliasing_tol(bits)
                             : params.aliasing_tol;

  Real alpha = c.frequency.evaluate(bits);
  SchemeTrace trace(c.frequency, alpha, c.transfer);
  trace.params = params;

  if (!c.transfer.is_one_periodic(alias_tol)) {
    throw PreconditionError("cocycle transfer must be 1-periodic");
  }

  // Entry smallness (Theorem-style gate).
  ConstantSplit split = split_constant(c.transfer, alias_tol);
  trace.a0 = split.a0;
  trace.f0 = split.f0;
  trace.f0.drop_small(drop_tol);
  trace.entry_eps0 = norm_c0(trace.f0, 512);
  trace.entry_eps_s0 = norm_c_estimate(trace.f0, params.s0, 512).value;
  if (!(trace.entry_eps0 < params.entry_eps)) {
    throw PreconditionError("entry smallness ||F||_0 = " +
                            trace.entry_eps0.to_decimal(6) + " >= " +
                            params.entry_eps.to_decimal(6));
  }
  if (!(trace.entry_eps_s0 < Real(1L))) {
    throw PreconditionError("entry smallness ||F||_{s0} >= 1");
  }

  // Diophantine certification of the frequency at a capped horizon.
  auto ns = params.schedule(params.max_steps);
  long horizon = std::min(params.dc_certify_horizon,
                          3 * ns.back());
  horizon = std::max(horizon, 8L);
  auto dc = check_dc(c.frequency, params.gamma, params.tau, horizon);
  trace.dc_certified = dc.holds;
  trace.dc_horizon = horizon;
  if (!dc.holds) {
    throw PreconditionError("frequency fails DC(gamma,tau) at horizon " +
                            std::to_string(horizon) + " (worst k = " +
                            std::to_string(dc.worst_k) + ")");
  }

  GroupElement a_cur = trace.a0;
  AlgebraMap f_cur = trace.f0;
  bool pending_half = false;
  Real eps_floor = Real::pow2(-(3 * bits / 4));
  trace.status = "completed";
  for (int n = 1; n <= params.max_steps; ++n) {
    long big_n = ns[n - 1];
    Real big_k = params.threshold_k(big_n);
    Diagonalization dg = diagonalize(a_cur);
    AlgebraMap f_rot = conjugate_map_constant(dg.frame, f_cur);
    try {
      KamStepResult step = kam_step(dg.angle, f_rot, alpha, big_n, big_k,
                                    params, pending_half);
      step.n = n;
      step.frame = dg.frame;
      pending_half = step.pending_half_lattice_out;
      a_cur = step.a_next;
      f_cur = step.f_next;
      trace.steps.push_back(std::move(step));
    } catch (const std::exception& e) {
      if (n == 1) throw;
      trace.status = std::string("truncated: ") + e.what();
      break;
    }
    if (trace.steps.back().eps0_out < eps_floor) {
      trace.status = "converged";
      break;
    }
  }
  trace.a_final = a_cur;
  trace.f_final = f_cur;
  return trace;
}

}  // namespace kamlab
