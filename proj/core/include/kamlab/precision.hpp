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

#ifndef KAMLAB_PRECISION_HPP
#define KAMLAB_PRECISION_HPP

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>

namespace kamlab {

/// Errors thrown when an operation cannot certify its result at the working
/// precision (e.g. a continued-fraction quotient cannot be decided).
class PrecisionError : public std::runtime_error {
 public:
  explicit PrecisionError(const std::string& what) : std::runtime_error(what) {}
};

/// Violated precondition of a public operation. CLI maps this to exit code 2.
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what)
      : std::invalid_argument(what) {}
};

/// Internal consistency failure: a quantity the theory guarantees was found
/// violated at run time. CLI maps this to exit code 3.
class EstimateViolation : public std::runtime_error {
 public:
  explicit EstimateViolation(const std::string& what)
      : std::runtime_error(what) {}
};

/// Process-wide working precision in mantissa bits. All arithmetic rounds
/// results to this precision (round-to-nearest). Default is 256 bits.
long working_precision();
void set_working_precision(long bits);

/// RAII scope for temporarily switching the working precision.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(long bits) : saved_(working_precision()) {
    set_working_precision(bits);
  }
  ~PrecisionGuard() { set_working_precision(saved_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  long saved_;
};

/// Arbitrary-precision real number backed by MPFR. Value semantics; every
/// result is rounded to the working precision active at the call site.
class Real {
 public:
  Real() { mpfr_init2(v_, working_precision()); mpfr_set_zero(v_, 1); }
  Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Real(Real&& o) noexcept { mpfr_init2(v_, 2); mpfr_swap(v_, o.v_); }
  Real& operator=(const Real& o) {
    if (this != &o) { mpfr_set_prec(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    return *this;
  }
  Real& operator=(Real&& o) noexcept { mpfr_swap(v_, o.v_); return *this; }
  ~Real() { mpfr_clear(v_); }

  Real(long n) : Real() { mpfr_set_si(v_, n, MPFR_RNDN); }          // NOLINT
  Real(int n) : Real(static_cast<long>(n)) {}                       // NOLINT
  Real(unsigned long n) : Real() { mpfr_set_ui(v_, n, MPFR_RNDN); } // NOLINT
  Real(double d) : Real() { mpfr_set_d(v_, d, MPFR_RNDN); }         // NOLINT
  explicit Real(const mpz_class& z) : Real() { mpfr_set_z(v_, z.get_mpz_t(), MPFR_RNDN); }
  explicit Real(const mpq_class& q) : Real() { mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN); }

  /// Parses a base-10 literal, or a C99 hex-float ("0x1.8p+1") round-trip form.
  static Real parse(const std::string& s);

  /// Exact hex-float serialization (round-trips at equal precision).
  std::string to_hex() const;
  /// Decimal rendering with enough digits for the stored precision.
  std::string to_decimal(int digits = 0) const;

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }

  long precision() const { return mpfr_get_prec(v_); }

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  // Arithmetic. Results carry the current working precision.
  friend Real operator+(const Real& a, const Real& b) { return binop(a, b, mpfr_add); }
  friend Real operator-(const Real& a, const Real& b) { return binop(a, b, mpfr_sub); }
  friend Real operator*(const Real& a, const Real& b) { return binop(a, b, mpfr_mul); }
  friend Real operator/(const Real& a, const Real& b) { return binop(a, b, mpfr_div); }
  Real operator-() const { Real r = out(); mpfr_neg(r.v_, v_, MPFR_RNDN); return r; }
  Real& operator+=(const Real& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator-=(const Real& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator*=(const Real& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator/=(const Real& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }

  friend bool operator==(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) == 0; }
  friend bool operator!=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) != 0; }
  friend bool operator<(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
  friend bool operator<=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
  friend bool operator>(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
  friend bool operator>=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }

  int compare(const mpq_class& q) const { return mpfr_cmp_q(v_, q.get_mpq_t()); }

  // Elementary functions.
  friend Real abs(const Real& a) { Real r = out(); mpfr_abs(r.v_, a.v_, MPFR_RNDN); return r; }
  friend Real sqrt(const Real& a) { Real r = out(); mpfr_sqrt(r.v_, a.v_, MPFR_RNDN); return r; }
  friend Real sin(const Real& a) { Real r = out(); mpfr_sin(r.v_, a.v_, MPFR_RNDN); return r; }
  friend Real cos(const Real& a) { Real r = out(); mpfr_cos(r.v_, a.v_, MPFR_RNDN); return r; }
  friend Real tan(const Real& a) { Real r = out(); mpfr_tan(r.v_, a.v_, MPFR_RNDN); return r; }
  friend Real atan(const Real& a) { Real r = out(); mpfr_atan(r.v_, a.v_, MPFR_RNDN); return r; }
  friend Real acos(const Real& a) { Real r = out(); mpfr_acos(r.v_, a.v_, MPFR_RNDN); return r; }
  friend Real atan2(const Real& y, const Real& x) {
    Real r = out(); mpfr_atan2(r.v_, y.v_, x.v_, MPFR_RNDN); return r;
  }
  friend Real exp(const Real& a) { Real r = out(); mpfr_exp(r.v_, a.v_, MPFR_RNDN); return r; }
  friend Real log(const Real& a) { Real r = out(); mpfr_log(r.v_, a.v_, MPFR_RNDN); return r; }
  friend Real pow(const Real& a, const Real& b) { return binop(a, b, mpfr_pow); }
  friend Real floor(const Real& a) { Real r = out(); mpfr_floor(r.v_, a.v_); return r; }
  friend Real round_nearest(const Real& a) {
    Real r = out(); mpfr_rint(r.v_, a.v_, MPFR_RNDN); return r;
  }
  friend void sin_cos(Real& s, Real& c, const Real& a) {
    Real rs = out(), rc = out();
    mpfr_sin_cos(rs.v_, rc.v_, a.v_, MPFR_RNDN);
    s = std::move(rs); c = std::move(rc);
  }
  friend Real min(const Real& a, const Real& b) { return a <= b ? a : b; }
  friend Real max(const Real& a, const Real& b) { return a >= b ? a : b; }

  static Real pi() { Real r = out(); mpfr_const_pi(r.v_, MPFR_RNDN); return r; }
  static Real two_pi() { Real p = pi(); return p + p; }

  /// 2^e as an exact Real (e may be negative).
  static Real pow2(long e) {
    Real r = out(); mpfr_set_ui_2exp(r.v_, 1, e, MPFR_RNDN); return r;
  }

  /// x reduced into [0,1).
  friend Real fractional(const Real& a) {
    Real r = out(); mpfr_floor(r.v_, a.v_);
    mpfr_sub(r.v_, a.v_, r.v_, MPFR_RNDN); return r;
  }

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

 private:
  static Real out() { return Real(); }
  using MpfrBin = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);
  static Real binop(const Real& a, const Real& b, MpfrBin f) {
    Real r = out(); f(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
  }
  mpfr_t v_;
};

/// min over l in Z of |x - l|; always in [0, 1/2].
Real dist_to_integers(const Real& x);

/// Complex number over Real.
struct Complex {
  Real re, im;

  Complex() = default;
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  Complex(Real r) : re(std::move(r)), im(0L) {}  // NOLINT
  Complex(double r) : re(r), im(0L) {}           // NOLINT

  static Complex zero() { return Complex(); }
  static Complex one() { return Complex(Real(1L)); }
  static Complex i() { return Complex(Real(0L), Real(1L)); }

  /// e^{2*pi*i*turns}.
  static Complex unit(const Real& turns) {
    Real s(0L), c(0L);
    sin_cos(s, c, Real::two_pi() * turns);
    return Complex(c, s);
  }

  bool is_zero() const { return re.is_zero() && im.is_zero(); }

  friend Complex operator+(const Complex& a, const Complex& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend Complex operator-(const Complex& a, const Complex& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend Complex operator*(const Complex& a, const Complex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend Complex operator*(const Real& a, const Complex& b) {
    return {a * b.re, a * b.im};
  }
  friend Complex operator/(const Complex& a, const Complex& b) {
    Real n = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
  }
  Complex operator-() const { return {-re, -im}; }
  Complex& operator+=(const Complex& o) { re += o.re; im += o.im; return *this; }
  Complex& operator-=(const Complex& o) { re -= o.re; im -= o.im; return *this; }
  Complex& operator*=(const Complex& o) { *this = *this * o; return *this; }

  friend bool operator==(const Complex& a, const Complex& b) {
    return a.re == b.re && a.im == b.im;
  }

  friend Complex conj(const Complex& a) { return {a.re, -a.im}; }
  friend Real norm2(const Complex& a) { return a.re * a.re + a.im * a.im; }
  friend Real abs(const Complex& a) { return sqrt(norm2(a)); }
  /// Argument in (-pi, pi].
  friend Real arg(const Complex& a) { return atan2(a.im, a.re); }
};

/// FNV-1a 64-bit hash, used to fingerprint configurations in outputs.
std::uint64_t fnv1a64(const std::string& bytes);

std::ostream& operator<<(std::ostream& os, const Real& r);
std::ostream& operator<<(std::ostream& os, const Complex& c);

}  // namespace kamlab

#endif  // KAMLAB_PRECISION_HPP
