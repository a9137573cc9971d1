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

#ifndef KAMLAB_SERIALIZATION_HPP
#define KAMLAB_SERIALIZATION_HPP

#include <json.hpp>

#include "kamlab/harmonics.hpp"
#include "kamlab/normal_form.hpp"

namespace kamlab {

using Json = nlohmann::ordered_json;

// Reals serialize as exact hex-float strings plus a human-readable decimal.
Json real_to_json(const Real& r);
Real real_from_json(const Json& j);

Json complex_to_json(const Complex& c);
Complex complex_from_json(const Json& j);

Json group_element_to_json(const GroupElement& g);
GroupElement group_element_from_json(const Json& j);

// Channels as arrays of (k, re, im) triples on the flagged lattice.
Json algebra_map_to_json(const AlgebraMap& f);
AlgebraMap algebra_map_from_json(const Json& j);

Json group_map_to_json(const GroupMap& g);
GroupMap group_map_from_json(const Json& j);

// Frequency specification: {"type": "golden" | "sqrt2_minus_one" |
// "quotients" | "rational" | "literal", ...}. Also accepts the compact CLI
// string forms ("golden", "quotients:1,2;period:3", "rational:7/10",
// "literal:0.61803").
Json rotation_spec_normalize(const Json& spec_or_string);
RotationNumber rotation_from_json(const Json& spec);
RotationNumber rotation_from_string(const std::string& s);

Json kam_params_to_json(const KamParams& p);
KamParams kam_params_from_json(const Json& j);

Json diophantine_report_to_json(const DiophantineReport& r);

Json scheme_trace_to_json(const SchemeTrace& t);

Json plant_to_json(const Plant& p);
Plant plant_from_json(const Json& j);

Json ledger_to_json(const NormalFormLedger& l, const Json& alpha_spec);
NormalFormLedger ledger_from_json(const Json& j);

Json diagnosis_to_json(const Diagnosis& d);

Json classification_to_json(const ClassificationReport& r);

/// Atomic write: temp file in the same directory, then rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace kamlab

#endif  // KAMLAB_SERIALIZATION_HPP
