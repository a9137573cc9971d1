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

#include "kamlab/arithmetic.hpp"

#include <algorithm>
#include <sstream>

namespace kamlab {

Real gauss_map(const Real& x) {
  if (x.sign() <= 0) {
    throw PreconditionError("gauss_map requires x > 0");
  }
  return fractional(Real(1L) / x);
}

RotationNumber RotationNumber::from_quotients(std::vector<unsigned long> initial,
                                              std::vector<unsigned long> period) {
  for (unsigned long a : initial)
    if (a == 0) throw PreconditionError("partial quotients must be positive");
  for (unsigned long a : period)
    if (a == 0) throw PreconditionError("partial quotients must be positive");
  if (initial.empty() && period.empty())
    throw PreconditionError("empty continued fraction");
  RotationNumber r;
  r.kind_ = Kind::Quotients;
  r.initial_ = std::move(initial);
  r.period_ = std::move(period);
  return r;
}

RotationNumber RotationNumber::golden_mean() { return from_quotients({}, {1}); }
RotationNumber RotationNumber::sqrt2_minus_one() { return from_quotients({}, {2}); }

RotationNumber RotationNumber::from_rational(const mpq_class& value) {
  if (value <= 0 || value >= 1)
    throw PreconditionError("rotation number must lie in (0,1)");
  // Euclidean expansion, exact.
  std::vector<unsigned long> qs;
  mpq_class x = value;
  while (x != 0) {
    mpq_class inv = 1 / x;
    mpz_class fl = inv.get_num() / inv.get_den();  // floor (positive args)
    if (!fl.fits_ulong_p())
      throw PrecisionError("partial quotient exceeds unsigned long");
    qs.push_back(fl.get_ui());
    x = inv - mpq_class(fl);
  }
  return from_quotients(std::move(qs), {});
}

RotationNumber RotationNumber::from_interval(const mpq_class& lo,
                                             const mpq_class& hi) {
  if (!(lo <= hi) || lo <= 0 || hi >= 1)
    throw PreconditionError("interval must satisfy 0 < lo <= hi < 1");
  if (lo == hi) return from_rational(lo);
  RotationNumber r;
  r.kind_ = Kind::Interval;
  r.lo0_ = lo;
  r.hi0_ = hi;
  r.rem_lo_ = lo;
  r.rem_hi_ = hi;
  return r;
}

RotationNumber RotationNumber::from_literal(const std::string& decimal) {
  // "0.dddd..." -> exact rational with radius one unit in the last place.
  auto dot = decimal.find('.');
  std::string digits = decimal;
  std::size_t frac_len = 0;
  if (dot != std::string::npos) {
    frac_len = decimal.size() - dot - 1;
    digits = decimal.substr(0, dot) + decimal.substr(dot + 1);
  }
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
    throw PreconditionError("bad decimal literal: '" + decimal + "'");
  mpz_class num(digits, 10);
  mpz_class den = 1;
  for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
  mpq_class v(num, den);
  v.canonicalize();
  mpq_class u(1, 1);
  u /= den;
  return from_interval(v - u, v + u);
}

void RotationNumber::ensure(std::size_t n) const {
  auto push_quotient = [this](unsigned long a) {
    // Seeds p_{-1}/q_{-1} = 1/0, p_0/q_0 = 0/1.
    mpz_class pm1, qm1, pm2, qm2;
    if (a_.empty()) {
      pm1 = 0; qm1 = 1; pm2 = 1; qm2 = 0;
    } else if (a_.size() == 1) {
      pm1 = p_[0]; qm1 = q_[0]; pm2 = 0; qm2 = 1;
    } else {
      pm1 = p_.back(); qm1 = q_.back();
      pm2 = p_[a_.size() - 2]; qm2 = q_[a_.size() - 2];
    }
    a_.push_back(a);
    p_.push_back(mpz_class(a) * pm1 + pm2);
    q_.push_back(mpz_class(a) * qm1 + qm2);
  };

  while (a_.size() < n && !terminated_) {
    if (kind_ == Kind::Quotients) {
      if (consumed_ < initial_.size()) {
        push_quotient(initial_[consumed_++]);
      } else if (!period_.empty()) {
        push_quotient(period_[(consumed_ - initial_.size()) % period_.size()]);
        ++consumed_;
      } else {
        terminated_ = true;
      }
    } else {
      // Interval source: certified quotient extraction.
      if (rem_lo_ == rem_hi_) {
        if (rem_lo_ == 0) { terminated_ = true; continue; }
        mpq_class inv = 1 / rem_lo_;
        mpz_class fl = inv.get_num() / inv.get_den();
        if (!fl.fits_ulong_p())
          throw PrecisionError("partial quotient exceeds unsigned long");
        push_quotient(fl.get_ui());
        rem_lo_ = rem_hi_ = inv - mpq_class(fl);
        continue;
      }
      if (rem_lo_ <= 0) {
        throw PrecisionError(
            "interval source cannot certify partial quotient " +
            std::to_string(a_.size() + 1) + " (interval touches 0)");
      }
      mpq_class inv_hi = 1 / rem_lo_;  // upper bound of 1/x
      mpq_class inv_lo = 1 / rem_hi_;  // lower bound of 1/x
      mpz_class fl_lo = inv_lo.get_num() / inv_lo.get_den();
      mpz_class fl_hi = inv_hi.get_num() / inv_hi.get_den();
      if (fl_lo != fl_hi) {
        throw PrecisionError(
            "interval source cannot certify partial quotient " +
            std::to_string(a_.size() + 1));
      }
      if (!fl_lo.fits_ulong_p())
        throw PrecisionError("partial quotient exceeds unsigned long");
      push_quotient(fl_lo.get_ui());
      rem_lo_ = inv_lo - mpq_class(fl_lo);
      rem_hi_ = inv_hi - mpq_class(fl_lo);
    }
  }
}

std::size_t RotationNumber::available(std::size_t want) const {
  ensure(want);
  return std::min(want, a_.size());
}

bool RotationNumber::known_rational() const {
  if (kind_ == Kind::Quotients) return period_.empty();
  return terminated_;
}

RotationNumber::Expansion RotationNumber::expand(std::size_t n) const {
  ensure(n);
  Expansion e;
  std::size_t m = std::min(n, a_.size());
  e.quotients.assign(a_.begin(), a_.begin() + m);
  for (std::size_t i = 0; i < m; ++i) e.convergents.emplace_back(p_[i], q_[i]);
  e.terminated = terminated_ && m == a_.size();
  return e;
}

QInterval RotationNumber::bracket(std::size_t level) const {
  ensure(level + 2);
  if (terminated_ && a_.size() <= level + 1) {
    // Exact rational value.
    mpq_class v(p_.back(), q_.back());
    v.canonicalize();
    return {v, v};
  }
  mpq_class c1 = (level == 0) ? mpq_class(0) : mpq_class(p_[level - 1], q_[level - 1]);
  mpq_class c2(p_[level], q_[level]);
  c1.canonicalize();
  c2.canonicalize();
  if (c1 <= c2) return {c1, c2};
  return {c2, c1};
}

Real RotationNumber::evaluate(long bits) const {
  PrecisionGuard guard(bits + 16);
  // Find a bracket of width below 2^-(bits+2).
  mpz_class bound = 1;
  mpz_mul_2exp(bound.get_mpz_t(), bound.get_mpz_t(), bits + 2);
  std::size_t level = 1;
  for (;;) {
    ensure(level + 2);
    if (terminated_ && a_.size() <= level + 1) {
      mpq_class v(p_.back(), q_.back());
      return Real(v);
    }
    if (q_[level - 1] * q_[level] >= bound) {
      return Real(mpq_class(p_[level], q_[level]));
    }
    ++level;
  }
}

RotationNumber RotationNumber::gauss_shift(std::size_t n) const {
  if (n == 0) return *this;
  if (kind_ == Kind::Quotients) {
    if (n < initial_.size()) {
      std::vector<unsigned long> init(initial_.begin() + n, initial_.end());
      return from_quotients(std::move(init), period_);
    }
    if (period_.empty()) {
      throw PreconditionError("Gauss shift exceeds a terminating expansion");
    }
    std::size_t k = (n - initial_.size()) % period_.size();
    std::vector<unsigned long> rot(period_.begin() + k, period_.end());
    rot.insert(rot.end(), period_.begin(), period_.begin() + k);
    return from_quotients({}, std::move(rot));
  }
  // Interval: replay n extraction steps from the original interval.
  mpq_class lo = lo0_, hi = hi0_;
  for (std::size_t i = 0; i < n; ++i) {
    if (lo == hi) {
      if (lo == 0) throw PreconditionError("Gauss shift exceeds expansion");
      mpq_class inv = 1 / lo;
      mpz_class fl = inv.get_num() / inv.get_den();
      lo = hi = inv - mpq_class(fl);
      continue;
    }
    if (lo <= 0) throw PrecisionError("Gauss shift: interval touches 0");
    mpq_class inv_hi = 1 / lo, inv_lo = 1 / hi;
    mpz_class fl_lo = inv_lo.get_num() / inv_lo.get_den();
    mpz_class fl_hi = inv_hi.get_num() / inv_hi.get_den();
    if (fl_lo != fl_hi)
      throw PrecisionError("Gauss shift: cannot certify quotient");
    lo = inv_lo - mpq_class(fl_lo);
    hi = inv_hi - mpq_class(fl_lo);
  }
  if (lo == hi) return from_rational(lo);
  return from_interval(lo, hi);
}

namespace {

// dist(x, Z) bounds for an exact interval of width < 1/2.
QInterval dist_interval(const mpq_class& lo, const mpq_class& hi) {
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
  mpq_class a = lo - mpq_class(fl);
  mpq_class b = hi - mpq_class(fl);  // 0 <= a <= b < 1.5 for width < 1/2
  auto dist_point = [](const mpq_class& x) {
    mpq_class best = abs(x);
    for (int m = 1; m <= 2; ++m) {
      mpq_class d = abs(x - m);
      if (d < best) best = d;
    }
    return best;
  };
  mpq_class da = dist_point(a), db = dist_point(b);
  QInterval out;
  bool contains_int = (a <= 1 && 1 <= b);
  out.lo = contains_int ? mpq_class(0) : std::min(da, db);
  out.hi = std::max(da, db);
  mpq_class half(1, 2), threehalf(3, 2);
  if ((a <= half && half <= b) || (a <= threehalf && threehalf <= b)) {
    out.hi = half;
  }
  return out;
}

}  // namespace

QInterval RotationNumber::dist_z_interval(const mpz_class& k, long bits) const {
  if (k == 0) return {mpq_class(0), mpq_class(0)};
  mpz_class ka = abs(k);
  mpq_class target(1);
  {
    mpz_class d = 1;
    mpz_mul_2exp(d.get_mpz_t(), d.get_mpz_t(), bits);
    target /= mpq_class(d);
  }
  std::size_t level = 2;
  for (;;) {
    QInterval br = bracket(level);
    mpq_class lo = mpq_class(ka) * br.lo;
    mpq_class hi = mpq_class(ka) * br.hi;
    if (hi - lo < mpq_class(1, 2)) {
      QInterval d = dist_interval(lo, hi);
      if (d.hi - d.lo <= target || br.lo == br.hi) return d;
    }
    if (br.lo == br.hi) return dist_interval(lo, hi);
    level += 4;
    if (level > 100000)
      throw PrecisionError("dist_z_interval: refinement diverged");
  }
}

std::string RotationNumber::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::Quotients) {
    os << "[0;";
    for (std::size_t i = 0; i < initial_.size(); ++i)
      os << (i ? "," : " ") << initial_[i];
    if (!period_.empty()) {
      os << " (";
      for (std::size_t i = 0; i < period_.size(); ++i)
        os << (i ? "," : "") << period_[i];
      os << ")*";
    }
    os << "]";
  } else {
    os << "interval [" << lo0_.get_str() << ", " << hi0_.get_str() << "]";
  }
  return os.str();
}

namespace {

struct Threshold {
  Real lo, hi;  // certified bounds of gamma^-1 |k|^-tau
};

Threshold threshold_bounds(const Real& gamma, const Real& tau, long k_abs) {
  // t = 1/(gamma * k^tau), with directed rounding in both directions.
  Threshold t;
  mpfr_t kt, den;
  mpfr_init2(kt, working_precision());
  mpfr_init2(den, working_precision());
  // Upper bound of t: round k^tau and gamma*k^tau down, division up.
  mpfr_set_si(kt, k_abs, MPFR_RNDD);
  mpfr_pow(kt, kt, tau.raw(), MPFR_RNDD);
  mpfr_mul(den, gamma.raw(), kt, MPFR_RNDD);
  mpfr_ui_div(t.hi.raw(), 1, den, MPFR_RNDU);
  // Lower bound of t: everything the other way.
  mpfr_set_si(kt, k_abs, MPFR_RNDU);
  mpfr_pow(kt, kt, tau.raw(), MPFR_RNDU);
  mpfr_mul(den, gamma.raw(), kt, MPFR_RNDU);
  mpfr_ui_div(t.lo.raw(), 1, den, MPFR_RNDD);
  mpfr_clear(kt);
  mpfr_clear(den);
  return t;
}

// Decides dist >= threshold with interval refinement. `refine` produces a
// certified dist interval at the requested bit target. The reported margin
// is taken from an interval refined to the working precision.
template <typename RefineFn>
bool certified_at_least(const Threshold& t, RefineFn refine, const Real& gamma,
                        const Real& tau, long k, Real* margin_out) {
  auto report = [&](long bits) {
    QInterval d = refine(bits);
    mpq_class mid = (d.lo + d.hi) / 2;
    *margin_out = Real(mid) * gamma * pow(Real(std::labs(k)), tau);
  };
  long bits = 64;
  for (;;) {
    QInterval d = refine(bits);
    if (t.hi.compare(d.lo) <= 0) {  // dist_lo >= t_hi
      report(working_precision() + 16);
      return true;
    }
    if (d.hi == d.lo) {  // exact dist
      report(working_precision() + 16);
      return t.lo.compare(d.lo) <= 0;
    }
    if (t.lo.compare(d.hi) > 0) {  // dist_hi < t_lo
      report(working_precision() + 16);
      return false;
    }
    bits *= 2;
    if (bits > 1L << 16)
      throw PrecisionError("DC comparison undecidable at k=" + std::to_string(k));
  }
}

}  // namespace

DiophantineReport check_dc(const RotationNumber& alpha, const Real& gamma,
                           const Real& tau, long k_max) {
  if (k_max < 1) throw PreconditionError("check_dc requires K_max >= 1");
  if (gamma.sign() <= 0) throw PreconditionError("check_dc requires gamma > 0");
  DiophantineReport rep;
  rep.gamma = gamma;
  rep.tau = tau;
  rep.horizon = k_max;
  rep.holds = true;
  rep.precision_bits = working_precision();
  bool first = true;
  for (long k = 1; k <= k_max; ++k) {
    Threshold t = threshold_bounds(gamma, tau, k);
    Real margin;
    bool ok = certified_at_least(
        t, [&](long bits) { return alpha.dist_z_interval(mpz_class(k), bits); },
        gamma, tau, k, &margin);
    if (!ok) rep.holds = false;
    if (first || margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_k = k;
      first = false;
    }
  }
  return rep;
}

DiophantineReport check_dc_alpha(const Real& a, const RotationNumber& alpha,
                                 const Real& gamma, const Real& tau,
                                 long k_max) {
  if (k_max < 1) throw PreconditionError("check_dc_alpha requires K_max >= 1");
  if (gamma.sign() <= 0)
    throw PreconditionError("check_dc_alpha requires gamma > 0");
  // Take `a` as the exact dyadic rational stored in the Real.
  mpq_class a_exact;
  {
    mpz_class z;
    mpfr_exp_t e = mpfr_get_z_2exp(z.get_mpz_t(), a.raw());
    a_exact = mpq_class(z);
    if (e >= 0) {
      mpz_class sc = 1;
      mpz_mul_2exp(sc.get_mpz_t(), sc.get_mpz_t(), e);
      a_exact *= mpq_class(sc);
    } else {
      mpz_class sc = 1;
      mpz_mul_2exp(sc.get_mpz_t(), sc.get_mpz_t(), -e);
      a_exact /= mpq_class(sc);
    }
  }
  DiophantineReport rep;
  rep.gamma = gamma;
  rep.tau = tau;
  rep.horizon = k_max;
  rep.holds = true;
  rep.precision_bits = working_precision();
  bool first = true;
  for (long k = 1; k <= k_max; ++k) {
    for (int sgn : {+1, -1}) {
      long ks = sgn * k;
      Threshold t = threshold_bounds(gamma, tau, k);
      auto refine = [&](long bits) {
        std::size_t level = 2;
        mpq_class target(1);
        {
          mpz_class d = 1;
          mpz_mul_2exp(d.get_mpz_t(), d.get_mpz_t(), bits);
          target /= mpq_class(d);
        }
        for (;;) {
          QInterval br = alpha.bracket(level);
          // a - ks*alpha, exact interval endpoints.
          mpq_class lo, hi;
          if (ks > 0) {
            lo = a_exact - mpq_class(ks) * br.hi;
            hi = a_exact - mpq_class(ks) * br.lo;
          } else {
            lo = a_exact - mpq_class(ks) * br.lo;
            hi = a_exact - mpq_class(ks) * br.hi;
          }
          if (hi - lo < mpq_class(1, 2)) {
            QInterval d = dist_interval(lo, hi);
            if (d.hi - d.lo <= target || br.lo == br.hi) return d;
          }
          if (br.lo == br.hi) return dist_interval(lo, hi);
          level += 4;
          if (level > 100000)
            throw PrecisionError("check_dc_alpha: refinement diverged");
        }
      };
      Real margin;
      bool ok = certified_at_least(t, refine, gamma, tau, ks, &margin);
      if (!ok) rep.holds = false;
      if (first || margin < rep.worst_margin) {
        rep.worst_margin = margin;
        rep.worst_k = ks;
        first = false;
      }
    }
  }
  return rep;
}

RdcWindowReport check_rdc_window(const RotationNumber& alpha, const Real& gamma,
                                 const Real& tau, long k_max, long n_begin,
                                 long n_end) {
  if (n_begin < 0 || n_end < n_begin)
    throw PreconditionError("bad RDC window");
  RdcWindowReport rep;
  rep.n_begin = n_begin;
  rep.n_end = n_end;
  rep.all_hold = true;
  for (long n = n_begin; n <= n_end; ++n) {
    RotationNumber shifted = alpha.gauss_shift(static_cast<std::size_t>(n));
    rep.per_iterate.push_back(check_dc(shifted, gamma, tau, k_max));
    if (!rep.per_iterate.back().holds) rep.all_hold = false;
  }
  return rep;
}

}  // namespace kamlab
