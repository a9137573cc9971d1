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

#ifndef KAMLAB_COCYCLE_HPP
#define KAMLAB_COCYCLE_HPP

#include <vector>

#include "kamlab/arithmetic.hpp"
#include "kamlab/group_map.hpp"

namespace kamlab {

/// Skew product (x, S) -> (x + alpha, A(x) S) on T x SU(2).
struct Cocycle {
  RotationNumber frequency;  // alpha as a continued-fraction source
  Real alpha;                // cached evaluation at construction precision
  GroupMap transfer;         // A(.)

  Cocycle(RotationNumber freq, GroupMap a)
      : frequency(std::move(freq)),
        alpha(frequency.value()),
        transfer(std::move(a)) {}

  static Cocycle constant(RotationNumber freq, GroupElement a) {
    return Cocycle(std::move(freq), GroupMap::constant(std::move(a)));
  }
};

/// n-th iterate transfer value A_n(x) = A(x+(n-1)a) ... A(x); n = 0 gives
/// Id, negative n the inverse-iterate formula A_{-m}(x) = A_m(x - m a)^{-1}.
/// The orbit product is accumulated by binary splitting.
GroupElement iterate(const Cocycle& c, long n, const Real& x);

/// Conj_B(c) = (alpha, B(.+alpha) A(.) B(.)^{-1}).
Cocycle conjugate(const GroupMap& b, const Cocycle& c);

struct RigidityHit {
  long m = 0;
  Real base_distance;   // ||| m alpha |||
  Real fiber_distance;  // sup over the grid of d(A_m(x), Id)
  Real total;
};

struct RigidityOptions {
  std::size_t grid_size = 16;
  long exhaustive_upto = 128;  // scan every m below this bound
  int denominator_multiples = 2;
};

/// Iterates m <= horizon with |||m alpha||| + sup_x d(A_m(x), Id) <= delta.
/// Candidates are every m <= exhaustive_upto plus small multiples of the
/// continued-fraction denominators q_n <= horizon. One orbit sweep per grid
/// point covers all candidates.
std::vector<RigidityHit> rigidity_scan(const Cocycle& c, long horizon,
                                       const Real& delta,
                                       const RigidityOptions& opts = {});

}  // namespace kamlab

#endif  // KAMLAB_COCYCLE_HPP
