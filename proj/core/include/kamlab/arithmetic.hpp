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

#ifndef KAMLAB_ARITHMETIC_HPP
#define KAMLAB_ARITHMETIC_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kamlab/precision.hpp"

namespace kamlab {

/// Gauss map x -> {1/x}. Throws PreconditionError at x <= 0.
Real gauss_map(const Real& x);

/// Exact rational interval, lo <= hi.
struct QInterval {
  mpq_class lo, hi;
  mpq_class width() const { return hi - lo; }
};

/// A rotation number in (0,1) represented through its continued-fraction
/// expansion. Quotients come from one of three sources: an explicit list
/// with an optional repeating tail, an exact rational, or a certified
/// rational interval (e.g. a decimal literal with its quantum of
/// uncertainty). All downstream small-divisor computations go through the
/// exact convergent bracketing, never through a floating-point alpha.
class RotationNumber {
 public:
  /// [0; a1, a2, ...] with `period` repeated forever after `initial`.
  /// An empty period makes the number rational (terminating expansion).
  static RotationNumber from_quotients(std::vector<unsigned long> initial,
                                       std::vector<unsigned long> period = {});
  static RotationNumber golden_mean();     // [0; 1, 1, 1, ...]
  static RotationNumber sqrt2_minus_one(); // [0; 2, 2, 2, ...]
  static RotationNumber from_rational(const mpq_class& value);
  /// Certified interval source. Quotients are extracted only while the whole
  /// interval agrees on them; beyond that PrecisionError is thrown.
  static RotationNumber from_interval(const mpq_class& lo, const mpq_class& hi);
  /// Decimal literal "0.dddd"; the certified interval is value +- 10^-digits.
  static RotationNumber from_literal(const std::string& decimal);

  /// First n partial quotients (may throw PrecisionError; returns fewer only
  /// when the number is rational and the expansion terminates).
  struct Expansion {
    std::vector<unsigned long> quotients;
    std::vector<std::pair<mpz_class, mpz_class>> convergents;  // (p_n, q_n)
    bool terminated = false;  // rational, full expansion reached
  };
  Expansion expand(std::size_t n) const;

  /// Number of quotients obtainable up to `want` (< want only if rational).
  std::size_t available(std::size_t want) const;
  bool known_rational() const;

  /// Exact bracketing of alpha by two consecutive convergents (or the exact
  /// value twice when rational and fully expanded). `level` is the depth of
  /// the first convergent used; the bracket tightens as level grows.
  QInterval bracket(std::size_t level) const;

  /// Evaluation to `bits` mantissa bits; monotone-refining.
  Real evaluate(long bits) const;
  /// Evaluation at the working precision.
  Real value() const { return evaluate(working_precision()); }

  /// Drops the first n partial quotients (n applications of the Gauss map).
  RotationNumber gauss_shift(std::size_t n) const;

  /// Certified interval for ||| k*alpha |||, refined until width <= 2^-bits
  /// or the source precision is exhausted.
  QInterval dist_z_interval(const mpz_class& k, long bits) const;

  /// A short human-readable description of the source.
  std::string describe() const;

 private:
  RotationNumber() = default;
  void ensure(std::size_t n) const;

  enum class Kind { Quotients, Interval };
  Kind kind_ = Kind::Quotients;
  std::vector<unsigned long> initial_;
  std::vector<unsigned long> period_;
  mpq_class lo0_, hi0_;  // Interval kind: original certified interval

  // Lazy expansion cache.
  mutable std::vector<unsigned long> a_;
  mutable std::vector<mpz_class> p_, q_;  // indexed 0..; seeds handled inside
  mutable mpq_class rem_lo_, rem_hi_;     // Interval kind: remainder state
  mutable bool terminated_ = false;
  mutable std::size_t consumed_ = 0;      // quotients drawn from the source
};

/// dist(x, Z) at working precision.
inline Real dist_z(const Real& x) { return dist_to_integers(x); }

/// Finite-horizon certificate for a Diophantine condition.
struct DiophantineReport {
  Real gamma;
  Real tau;
  long horizon = 0;
  long worst_k = 0;       // signed for the DC_alpha variant
  Real worst_margin;      // min over the scan of |||.||| * gamma * |k|^tau
  bool holds = false;     // every comparison certified >= threshold
  long precision_bits = 0;
};

/// Certified scan of |||k*alpha||| >= gamma^-1 |k|^-tau for k = 1..k_max.
DiophantineReport check_dc(const RotationNumber& alpha, const Real& gamma,
                           const Real& tau, long k_max);

/// Certified scan of |||a - k*alpha||| >= gamma^-1 |k|^-tau over
/// 0 < |k| <= k_max. `a` is taken as exact (dyadic value of the Real).
DiophantineReport check_dc_alpha(const Real& a, const RotationNumber& alpha,
                                 const Real& gamma, const Real& tau,
                                 long k_max);

/// Finite form of the recurrent-Diophantine check: DC(gamma,tau) at horizon
/// k_max for each Gauss iterate G^n(alpha), n in [n_begin, n_end].
struct RdcWindowReport {
  long n_begin = 0, n_end = 0;
  std::vector<DiophantineReport> per_iterate;
  bool all_hold = false;
};
RdcWindowReport check_rdc_window(const RotationNumber& alpha, const Real& gamma,
                                 const Real& tau, long k_max, long n_begin,
                                 long n_end);

}  // namespace kamlab

#endif  // KAMLAB_ARITHMETIC_HPP
