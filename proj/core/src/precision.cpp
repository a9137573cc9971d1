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

#include "kamlab/precision.hpp"

#include <cstdio>
#include <ostream>
#include <cstdlib>
#include <cstring>

namespace kamlab {

namespace {
long g_bits = 256;
}

long working_precision() { return g_bits; }

void set_working_precision(long bits) {
  if (bits < 16 || bits > (1L << 24)) {
    throw PreconditionError("working precision out of range [16, 2^24]: " +
                            std::to_string(bits));
  }
  g_bits = bits;
}

Real Real::parse(const std::string& s) {
  Real r;
  // Base 0 auto-detects the 0x / -0x hex-float round-trip form.
  int bad = mpfr_set_str(r.v_, s.c_str(), 0, MPFR_RNDN);
  if (bad != 0) {
    throw PreconditionError("unparseable real literal: '" + s + "'");
  }
  return r;
}

std::string Real::to_hex() const {
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%Ra", v_);
  std::string s(buf);
  mpfr_free_str(buf);
  return s;
}

std::string Real::to_decimal(int digits) const {
  if (digits <= 0) {
    // ceil(bits * log10(2)) + 2 guard digits
    digits = static_cast<int>(mpfr_get_prec(v_) * 0.30103) + 3;
  }
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Rg", digits, v_);
  std::string s(buf);
  mpfr_free_str(buf);
  return s;
}

Real dist_to_integers(const Real& x) {
  Real f = fractional(x);
  Real g = Real(1L) - f;
  return f <= g ? f : g;
}

std::ostream& operator<<(std::ostream& os, const Real& r) {
  return os << r.to_decimal(24);
}

std::ostream& operator<<(std::ostream& os, const Complex& c) {
  return os << "(" << c.re << (c.im.sign() < 0 ? " - " : " + ")
            << abs(c.im) << "i)";
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace kamlab
