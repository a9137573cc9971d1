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

#include "kamlab/serialization.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace kamlab {

Json real_to_json(const Real& r) {
  return Json{{"hex", r.to_hex()}, {"dec", r.to_double()}};
}

Real real_from_json(const Json& j) {
  if (j.is_string()) return Real::parse(j.get<std::string>());
  if (j.is_number()) return Real(j.get<double>());
  return Real::parse(j.at("hex").get<std::string>());
}

Json complex_to_json(const Complex& c) {
  return Json{{"re", c.re.to_hex()}, {"im", c.im.to_hex()}};
}

Complex complex_from_json(const Json& j) {
  return Complex(Real::parse(j.at("re").get<std::string>()),
                 Real::parse(j.at("im").get<std::string>()));
}

Json group_element_to_json(const GroupElement& g) {
  return Json{{"z", complex_to_json(g.z)}, {"w", complex_to_json(g.w)}};
}

GroupElement group_element_from_json(const Json& j) {
  return GroupElement(complex_from_json(j.at("z")),
                      complex_from_json(j.at("w")));
}

namespace {

Json channel_to_json(const AlgebraMap& f, bool z_channel) {
  Json arr = Json::array();
  for (long h = -f.half_band(); h <= f.half_band(); ++h) {
    Complex c = z_channel ? f.z_coeff(h) : f.t_coeff(h);
    if (c.is_zero()) continue;
    arr.push_back(Json::array(
        {static_cast<double>(h) / 2.0, c.re.to_hex(), c.im.to_hex()}));
  }
  return arr;
}

}  // namespace

Json algebra_map_to_json(const AlgebraMap& f) {
  return Json{{"lattice", f.half_lattice() ? "half" : "integer"},
              {"aliasing", f.aliasing_bound().to_hex()},
              {"t", channel_to_json(f, false)},
              {"z", channel_to_json(f, true)}};
}

AlgebraMap algebra_map_from_json(const Json& j) {
  AlgebraMap f;
  for (bool z_channel : {false, true}) {
    for (const auto& triple : j.at(z_channel ? "z" : "t")) {
      double k = triple.at(0).get<double>();
      long h = std::lround(2.0 * k);
      Complex c(Real::parse(triple.at(1).get<std::string>()),
                Real::parse(triple.at(2).get<std::string>()));
      if (z_channel) f.set_z(h, c);
      else f.set_t(h, c);
    }
  }
  f.set_aliasing_bound(Real::parse(j.at("aliasing").get<std::string>()));
  return f;
}

Json group_map_to_json(const GroupMap& g) {
  Json factors = Json::array();
  for (const auto& fac : g.factors()) {
    if (const auto* m = std::get_if<GroupMap::Morphism>(&fac)) {
      factors.push_back(Json{{"type", "morphism"},
                             {"half_degree", m->half_degree},
                             {"phase_turns", m->phase_turns.to_hex()}});
    } else if (const auto* c = std::get_if<GroupMap::Const>(&fac)) {
      factors.push_back(
          Json{{"type", "constant"}, {"value", group_element_to_json(c->value)}});
    } else {
      const auto& e = std::get<GroupMap::Exp>(fac);
      factors.push_back(Json{{"type", "exponential"},
                             {"generator", algebra_map_to_json(e.generator)}});
    }
  }
  return Json{{"factors", factors}};
}

GroupMap group_map_from_json(const Json& j) {
  GroupMap g;
  for (const auto& fac : j.at("factors")) {
    std::string type = fac.at("type").get<std::string>();
    if (type == "morphism") {
      g.compose(GroupMap::morphism(
          fac.at("half_degree").get<long>(),
          Real::parse(fac.at("phase_turns").get<std::string>())));
    } else if (type == "constant") {
      g.compose(GroupMap::constant(group_element_from_json(fac.at("value"))));
    } else if (type == "exponential") {
      g.compose(GroupMap::exponential(algebra_map_from_json(fac.at("generator"))));
    } else {
      throw PreconditionError("unknown group map factor type: " + type);
    }
  }
  return g;
}

Json rotation_spec_normalize(const Json& spec_or_string) {
  if (!spec_or_string.is_string()) return spec_or_string;
  std::string s = spec_or_string.get<std::string>();
  if (s == "golden") return Json{{"type", "golden"}};
  if (s == "sqrt2m1" || s == "sqrt2_minus_one")
    return Json{{"type", "sqrt2_minus_one"}};
  auto split = [](const std::string& text, char sep) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, sep)) out.push_back(tok);
    return out;
  };
  if (s.rfind("quotients:", 0) == 0) {
    std::string rest = s.substr(10);
    std::string init = rest, period;
    auto semi = rest.find(";period:");
    if (semi != std::string::npos) {
      init = rest.substr(0, semi);
      period = rest.substr(semi + 8);
    }
    Json jq = Json::array(), jp = Json::array();
    for (const auto& tok : split(init, ','))
      if (!tok.empty()) jq.push_back(std::stoul(tok));
    for (const auto& tok : split(period, ','))
      if (!tok.empty()) jp.push_back(std::stoul(tok));
    return Json{{"type", "quotients"}, {"initial", jq}, {"period", jp}};
  }
  if (s.rfind("rational:", 0) == 0) {
    auto parts = split(s.substr(9), '/');
    if (parts.size() != 2)
      throw PreconditionError("rational spec must be rational:p/q");
    return Json{{"type", "rational"}, {"p", std::stol(parts[0])},
                {"q", std::stol(parts[1])}};
  }
  if (s.rfind("literal:", 0) == 0) {
    return Json{{"type", "literal"}, {"value", s.substr(8)}};
  }
  throw PreconditionError("unparseable frequency spec: '" + s + "'");
}

RotationNumber rotation_from_json(const Json& spec_in) {
  Json spec = rotation_spec_normalize(spec_in);
  std::string type = spec.at("type").get<std::string>();
  if (type == "golden") return RotationNumber::golden_mean();
  if (type == "sqrt2_minus_one") return RotationNumber::sqrt2_minus_one();
  if (type == "quotients") {
    std::vector<unsigned long> init, period;
    for (const auto& q : spec.at("initial")) init.push_back(q.get<unsigned long>());
    if (spec.contains("period"))
      for (const auto& q : spec.at("period")) period.push_back(q.get<unsigned long>());
    return RotationNumber::from_quotients(std::move(init), std::move(period));
  }
  if (type == "rational") {
    return RotationNumber::from_rational(
        mpq_class(spec.at("p").get<long>(), spec.at("q").get<long>()));
  }
  if (type == "literal") {
    return RotationNumber::from_literal(spec.at("value").get<std::string>());
  }
  throw PreconditionError("unknown frequency spec type: " + type);
}

RotationNumber rotation_from_string(const std::string& s) {
  return rotation_from_json(Json(s));
}

Json kam_params_to_json(const KamParams& p) {
  return Json{{"n1", p.n1},
              {"sigma", real_to_json(p.sigma)},
              {"nu", real_to_json(p.nu)},
              {"tau", real_to_json(p.tau)},
              {"gamma", real_to_json(p.gamma)},
              {"s0", p.s0},
              {"s0_check", p.s0_check},
              {"c0", real_to_json(p.c0)},
              {"entry_eps", real_to_json(p.entry_eps)},
              {"max_steps", p.max_steps},
              {"precision_bits", p.precision_bits},
              {"y_norm_cap", real_to_json(p.y_norm_cap)},
              {"verify_grid", p.verify_grid},
              {"residual_tol", real_to_json(p.residual_tol)},
              {"aliasing_tol", real_to_json(p.aliasing_tol)},
              {"drop_tol", real_to_json(p.drop_tol)},
              {"dc_certify_horizon", p.dc_certify_horizon}};
}

KamParams kam_params_from_json(const Json& j) {
  KamParams p;
  auto opt_real = [&](const char* key, Real& target) {
    if (j.contains(key)) target = real_from_json(j.at(key));
  };
  if (j.contains("n1")) p.n1 = j.at("n1").get<long>();
  opt_real("sigma", p.sigma);
  opt_real("nu", p.nu);
  opt_real("tau", p.tau);
  opt_real("gamma", p.gamma);
  if (j.contains("s0")) p.s0 = j.at("s0").get<int>();
  if (j.contains("s0_check")) p.s0_check = j.at("s0_check").get<int>();
  opt_real("c0", p.c0);
  opt_real("entry_eps", p.entry_eps);
  if (j.contains("max_steps")) p.max_steps = j.at("max_steps").get<int>();
  if (j.contains("precision_bits"))
    p.precision_bits = j.at("precision_bits").get<long>();
  opt_real("y_norm_cap", p.y_norm_cap);
  if (j.contains("verify_grid"))
    p.verify_grid = j.at("verify_grid").get<std::size_t>();
  opt_real("residual_tol", p.residual_tol);
  opt_real("aliasing_tol", p.aliasing_tol);
  opt_real("drop_tol", p.drop_tol);
  if (j.contains("dc_certify_horizon"))
    p.dc_certify_horizon = j.at("dc_certify_horizon").get<long>();
  return p;
}

Json diophantine_report_to_json(const DiophantineReport& r) {
  return Json{{"gamma", real_to_json(r.gamma)},
              {"tau", real_to_json(r.tau)},
              {"horizon", r.horizon},
              {"worst_k", r.worst_k},
              {"worst_margin", real_to_json(r.worst_margin)},
              {"holds", r.holds},
              {"precision_bits", r.precision_bits}};
}

Json scheme_trace_to_json(const SchemeTrace& t) {
  Json steps = Json::array();
  for (const auto& s : t.steps) {
    Json js{{"n", s.n},
            {"N", s.big_n},
            {"K", real_to_json(s.big_k)},
            {"angle_in", real_to_json(s.angle_in)},
            {"eps0", real_to_json(s.eps0_in)},
            {"eps_s0", real_to_json(s.eps_s0_in)},
            {"eps0_out", real_to_json(s.eps0_out)},
            {"eps_s0_out", real_to_json(s.eps_s0_out)},
            {"y_norm0", real_to_json(s.y_norm0)},
            {"y_norm_s0", real_to_json(s.y_norm_s0)},
            {"y_scaling_ratio", real_to_json(s.y_scaling_ratio)},
            {"residual", real_to_json(s.residual)},
            {"mean_blocked", s.mean_blocked},
            {"c_fix", s.c_fix.has_value()}};
    if (s.resonance) {
      js["resonance"] = Json{{"k1", s.resonance->k1},
                             {"eps1", real_to_json(s.resonance->epsilon)},
                             {"mode", complex_to_json(s.resonant_mode)}};
    }
    steps.push_back(std::move(js));
  }
  return Json{{"status", t.status},
              {"alpha", real_to_json(t.alpha)},
              {"entry_eps0", real_to_json(t.entry_eps0)},
              {"entry_eps_s0", real_to_json(t.entry_eps_s0)},
              {"dc_certified", t.dc_certified},
              {"dc_horizon", t.dc_horizon},
              {"params", kam_params_to_json(t.params)},
              {"steps", steps},
              {"a_final", group_element_to_json(t.a_final)},
              {"f_final", algebra_map_to_json(t.f_final)}};
}

Json plant_to_json(const Plant& p) {
  Json steps = Json::array();
  for (const auto& s : p.steps) {
    steps.push_back(Json{{"n", s.n},
                         {"k", s.k},
                         {"eps", real_to_json(s.eps)},
                         {"amp", real_to_json(s.amp)},
                         {"phi", real_to_json(s.phi)}});
  }
  return Json{{"steps", steps}};
}

Plant plant_from_json(const Json& j) {
  Plant p;
  for (const auto& s : j.at("steps")) {
    PlantStep step;
    step.n = s.at("n").get<long>();
    step.k = s.at("k").get<long>();
    step.eps = real_from_json(s.at("eps"));
    step.amp = real_from_json(s.at("amp"));
    step.phi = real_from_json(s.at("phi"));
    p.steps.push_back(std::move(step));
  }
  return p;
}

Json ledger_to_json(const NormalFormLedger& l, const Json& alpha_spec) {
  Json steps = Json::array();
  for (const auto& s : l.steps) {
    steps.push_back(Json{{"n", s.n},
                         {"k", s.k},
                         {"a", real_to_json(s.a)},
                         {"eps", real_to_json(s.eps)},
                         {"amp", real_to_json(s.amp)},
                         {"phi", real_to_json(s.phi)},
                         {"theta", real_to_json(s.theta)},
                         {"c_fix", s.c_fix},
                         {"window_violation", s.window_violation}});
  }
  return Json{{"alpha_spec", alpha_spec},
              {"alpha", real_to_json(l.alpha)},
              {"params", kam_params_to_json(l.params)},
              {"schedule", l.schedule},
              {"horizon", l.horizon},
              {"steps", steps},
              {"D", group_map_to_json(l.d)},
              {"d_log_norm_sum", real_to_json(l.d_log_norm_sum)},
              {"d_in_v_class", l.d_in_v_class},
              {"limiting_constant", group_element_to_json(l.limiting_constant)},
              {"verification_residual", real_to_json(l.verification_residual)}};
}

NormalFormLedger ledger_from_json(const Json& j) {
  NormalFormLedger l(rotation_from_json(j.at("alpha_spec")));
  l.alpha = real_from_json(j.at("alpha"));
  l.params = kam_params_from_json(j.at("params"));
  l.schedule = j.at("schedule").get<std::vector<long>>();
  l.horizon = j.at("horizon").get<long>();
  for (const auto& s : j.at("steps")) {
    ResonantStep r;
    r.n = s.at("n").get<long>();
    r.k = s.at("k").get<long>();
    r.a = real_from_json(s.at("a"));
    r.eps = real_from_json(s.at("eps"));
    r.amp = real_from_json(s.at("amp"));
    r.phi = real_from_json(s.at("phi"));
    r.theta = real_from_json(s.at("theta"));
    r.c_fix = s.at("c_fix").get<bool>();
    r.window_violation = s.at("window_violation").get<bool>();
    l.steps.push_back(std::move(r));
  }
  l.d = group_map_from_json(j.at("D"));
  l.d_log_norm_sum = real_from_json(j.at("d_log_norm_sum"));
  l.d_in_v_class = j.at("d_in_v_class").get<bool>();
  l.limiting_constant = group_element_from_json(j.at("limiting_constant"));
  l.verification_residual = real_from_json(j.at("verification_residual"));
  return l;
}

Json diagnosis_to_json(const Diagnosis& d) {
  auto reals = [](const std::vector<Real>& v) {
    Json arr = Json::array();
    for (const auto& r : v) arr.push_back(r.to_double());
    return arr;
  };
  const char* verdict = "finitely-resonant";
  if (d.verdict == Diagnosis::Verdict::AngleSquareSummable)
    verdict = "angle-square-summable";
  else if (d.verdict == Diagnosis::Verdict::NotSummable)
    verdict = "not-summable";
  Json h_sigma = Json::array();
  for (const auto& row : d.h_sigma) {
    h_sigma.push_back(Json{{"sigma", row.sigma.to_double()},
                           {"partial_sums", reals(row.partial_sums)},
                           {"summable_evidence", row.summable_evidence},
                           {"fitted_exponent", row.fitted_exponent}});
  }
  Json out{{"verdict", verdict},
           {"summary", d.summary},
           {"theta", reals(d.theta)},
           {"partial_sums", reals(d.partial_sums)},
           {"h_sigma", h_sigma},
           {"gaps", d.gaps},
           {"steps_since_last_resonance", d.steps_since_last_resonance},
           {"fitted_exponent", d.fitted_exponent},
           {"confidence", d.confidence}};
  if (d.limiting_dc) out["limiting_dc"] = diophantine_report_to_json(*d.limiting_dc);
  return out;
}

Json classification_to_json(const ClassificationReport& r) {
  auto item = [](const ClassificationReport::Item& it) {
    return Json{{"pass", it.pass},
                {"decisive_fail", it.decisive_fail},
                {"worst_margin", it.worst_margin.to_double()},
                {"detail", it.detail}};
  };
  const char* verdict = "inconclusive";
  if (r.verdict == ClassificationReport::Verdict::Equivalent) verdict = "equivalent";
  else if (r.verdict == ClassificationReport::Verdict::Inequivalent)
    verdict = "inequivalent";
  Json sums = Json::array();
  for (const auto& [s, v] : r.k_tilde_weighted_sums)
    sums.push_back(Json{{"s", s}, {"sum", v.to_double()}});
  return Json{{"verdict", verdict},
              {"resonant_steps", item(r.resonant_steps)},
              {"angles", item(r.angles)},
              {"rotation_numbers", item(r.rotation_numbers)},
              {"arguments", item(r.arguments)},
              {"k_tilde", r.k_tilde},
              {"k_tilde_weighted_sums", sums}};
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string());
    os << content;
    if (!os.flush()) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace kamlab
