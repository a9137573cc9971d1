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

#include "kamlab/cocycle.hpp"

#include <algorithm>
#include <set>

namespace kamlab {

namespace {

GroupElement iterate_pos(const Cocycle& c, long n, const Real& x) {
  if (n == 0) return GroupElement::identity();
  if (n == 1) return c.transfer.evaluate(x);
  long m = n / 2;
  // A_n(x) = A_{n-m}(x + m alpha) A_m(x); splitting keeps the error
  // accumulation logarithmic in n.
  GroupElement right = iterate_pos(c, m, x);
  GroupElement left = iterate_pos(c, n - m, x + Real(m) * c.alpha);
  return left * right;
}

}  // namespace

GroupElement iterate(const Cocycle& c, long n, const Real& x) {
  if (n >= 0) return iterate_pos(c, n, x);
  long m = -n;
  return iterate_pos(c, m, x - Real(m) * c.alpha).inverse();
}

Cocycle conjugate(const GroupMap& b, const Cocycle& c) {
  GroupMap t = b.shifted(c.alpha);
  t.compose(c.transfer);
  t.compose(b.inverse());
  return Cocycle(c.frequency, std::move(t));
}

std::vector<RigidityHit> rigidity_scan(const Cocycle& c, long horizon,
                                       const Real& delta,
                                       const RigidityOptions& opts) {
  if (horizon < 1) throw PreconditionError("rigidity_scan requires horizon >= 1");

  // Candidate iterates: a dense low range plus multiples of convergent
  // denominators.
  std::set<long> candidates;
  for (long m = 1; m <= std::min(horizon, opts.exhaustive_upto); ++m)
    candidates.insert(m);
  auto exp = c.frequency.expand(64);
  for (const auto& pq : exp.convergents) {
    if (!pq.second.fits_slong_p()) break;
    long q = pq.second.get_si();
    for (int j = 1; j <= opts.denominator_multiples; ++j) {
      if (q <= horizon / j) candidates.insert(j * q);
    }
  }
  if (candidates.empty()) return {};
  long max_m = *candidates.rbegin();

  // One orbit sweep per grid point, recording the product at candidates.
  std::vector<long> cand(candidates.begin(), candidates.end());
  std::vector<Real> fiber(cand.size(), Real(0L));
  const std::size_t grid = opts.grid_size;
  for (std::size_t g = 0; g < grid; ++g) {
    Real x = Real(static_cast<long>(g)) / Real(static_cast<long>(grid));
    GroupElement acc = GroupElement::identity();
    std::size_t next = 0;
    for (long j = 0; j < max_m && next < cand.size(); ++j) {
      acc = c.transfer.evaluate(x + Real(j) * c.alpha) * acc;
      while (next < cand.size() && cand[next] == j + 1) {
        Real d = distance_to_identity(acc);
        if (d > fiber[next]) fiber[next] = d;
        ++next;
      }
    }
  }

  std::vector<RigidityHit> hits;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    RigidityHit h;
    h.m = cand[i];
    h.base_distance = dist_z(Real(h.m) * c.alpha);
    h.fiber_distance = fiber[i];
    h.total = h.base_distance + h.fiber_distance;
    if (h.total <= delta) hits.push_back(std::move(h));
  }
  return hits;
}

}  // namespace kamlab
