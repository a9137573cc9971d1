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

#ifndef KAMLAB_GROUP_MAP_HPP
#define KAMLAB_GROUP_MAP_HPP

#include <variant>
#include <vector>

#include "kamlab/fourier.hpp"
#include "kamlab/su2.hpp"

namespace kamlab {

/// Map T -> SU(2) represented as an ordered product of elementary factors,
/// evaluated left to right: G(x) = f_0(x) f_1(x) ... f_{n-1}(x).
///   Morphism: {e^{2 pi i ((h/2) x + c)}, 0}  (2-periodic when h is odd)
///   Const:    a fixed group element
///   Exp:      exp of a band-limited algebra map
class GroupMap {
 public:
  struct Morphism {
    long half_degree = 0;  // frequency h/2
    Real phase_turns;      // c
  };
  struct Const {
    GroupElement value;
  };
  struct Exp {
    AlgebraMap generator;
  };
  using Factor = std::variant<Morphism, Const, Exp>;

  GroupMap() = default;

  static GroupMap identity() { return GroupMap(); }
  static GroupMap morphism(long half_degree, Real phase_turns = Real(0L));
  static GroupMap constant(GroupElement g);
  static GroupMap exponential(AlgebraMap y);

  const std::vector<Factor>& factors() const { return factors_; }
  bool is_exact() const;  // no Exp factors

  /// Appends the factors of `other` on the right: this(x) * other(x).
  GroupMap& compose(const GroupMap& other);
  friend GroupMap operator*(const GroupMap& a, const GroupMap& b);

  GroupMap inverse() const;
  /// G(. + delta).
  GroupMap shifted(const Real& delta) const;

  GroupElement evaluate(const Real& x) const;

  /// Sum of morphism half-degrees; the product is 1-periodic iff this is
  /// even and every Exp factor has integer-lattice content.
  long morphism_half_degree_sum() const;
  bool is_one_periodic(const Real& tol) const;

  /// Samples on the 2-periodic grid x_j = 2j/m.
  std::vector<GroupElement> sample_grid(std::size_t m) const;

 private:
  std::vector<Factor> factors_;
};

/// Ad(G(.)).f(.) re-expanded on the lattice. Morphism and Const factors act
/// exactly on coefficients; Exp factors go through an oversampled grid
/// transform whose discarded mass must come out below `tol` (the result's
/// aliasing bound records it), else the lattice is grown and the transform
/// retried. Throws EstimateViolation if growth cannot reach `tol`.
AlgebraMap conjugate_map(const GroupMap& g, const AlgebraMap& f,
                         const Real& tol);

/// Ad of a single constant, exact on coefficients.
AlgebraMap conjugate_map_constant(const GroupElement& c, const AlgebraMap& f);

/// Coefficient shift: f(. + delta).
AlgebraMap shift_argument(const AlgebraMap& f, const Real& delta);

/// Generic forward transform of a pointwise-defined SU(2)-valued map g:
/// samples log(g(x_j)) on x_j = 2j/m. Precondition: g stays away from the
/// antipode (log branch).
AlgebraMap log_map_from_samples(const std::vector<GroupElement>& samples,
                                long keep_half_band, bool half_lattice);

}  // namespace kamlab

#endif  // KAMLAB_GROUP_MAP_HPP
