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

#include "kamlab/pipeline.hpp"

#include <iomanip>
#include <sstream>

namespace kamlab {

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::string csv_real(const Real& r) {
  std::ostringstream os;
  os << std::setprecision(17) << r.to_double();
  return os.str();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  ExperimentConfig cfg;
  cfg.raw = j;
  cfg.alpha_spec = rotation_spec_normalize(
      j.contains("alpha") ? j.at("alpha") : Json("golden"));
  if (j.contains("kam")) cfg.params = kam_params_from_json(j.at("kam"));
  if (j.contains("precision_bits"))
    cfg.precision_bits = j.at("precision_bits").get<long>();
  cfg.params.precision_bits = cfg.precision_bits;
  if (j.contains("seed")) cfg.seed = j.at("seed").get<unsigned long>();
  if (j.contains("run_scheme"))
    cfg.run_scheme_stage = j.at("run_scheme").get<bool>();
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();

  int inputs = 0;
  if (j.contains("plant") && !j.at("plant").is_null()) {
    cfg.plant = plant_from_json(j.at("plant"));
    ++inputs;
  }
  if (j.contains("transfer") && !j.at("transfer").is_null()) {
    cfg.transfer_json = j.at("transfer");
    ++inputs;
  }
  if (j.contains("cocycle") && !j.at("cocycle").is_null()) {
    const Json& c = j.at("cocycle");
    cfg.constant_angle = c.value("constant_angle", 0.0);
    if (c.contains("random_perturbation")) {
      RandomPerturbation rp;
      rp.band = c.at("random_perturbation").value("band", 4L);
      rp.c0_norm = c.at("random_perturbation").value("c0_norm", 1e-5);
      cfg.random_perturbation = rp;
    }
    ++inputs;
  }
  if (inputs > 1) {
    throw PreconditionError(
        "config must give at most one of plant/transfer/cocycle");
  }

  if (j.contains("analysis")) {
    const Json& a = j.at("analysis");
    if (a.contains("diagnose_sigmas")) {
      for (const auto& s : a.at("diagnose_sigmas"))
        cfg.diagnose_sigmas.push_back(Real(s.get<double>()));
    }
    if (a.contains("eigen") && !a.at("eigen").is_null()) {
      EigenCfg e;
      e.m = a.at("eigen").value("m", 2L);
      e.n_trunc = a.at("eigen").value("n_trunc", 8L);
      e.circle_grid = a.at("eigen").value("circle_grid", std::size_t(1000));
      cfg.eigen = e;
    }
    if (a.contains("correlation") && !a.at("correlation").is_null()) {
      const Json& c = a.at("correlation");
      CorrelationCfg cc;
      cc.m = c.value("m", 1L);
      cc.t_max = c.value("t", 1000L);
      cc.grid = c.value("grid", std::size_t(32));
      cc.band = c.value("band", 2L);
      auto fill = [&](const char* key, long& k, long& jj, long& p) {
        if (!c.contains(key)) return;
        k = c.at(key).value("k", 0L);
        jj = c.at(key).value("j", 0L);
        p = c.at(key).value("p", 0L);
      };
      fill("f", cc.f_k, cc.f_j, cc.f_p);
      fill("g", cc.g_k, cc.g_j, cc.g_p);
      cfg.correlation = cc;
    }
  }
  if (cfg.diagnose_sigmas.empty()) {
    cfg.diagnose_sigmas = {Real(0L), Real(2L)};
  }
  return cfg;
}

Cocycle build_input_cocycle(const ExperimentConfig& cfg) {
  RotationNumber freq = rotation_from_json(cfg.alpha_spec);
  if (cfg.plant) {
    return synthesize(*cfg.plant, freq, cfg.params);
  }
  if (cfg.transfer_json) {
    return Cocycle(freq, group_map_from_json(*cfg.transfer_json));
  }
  GroupMap t = GroupMap::constant(
      GroupElement::diagonal(Real(cfg.constant_angle.value_or(0.0))));
  if (cfg.random_perturbation) {
    AlgebraMap f = random_algebra_map(cfg.seed, cfg.random_perturbation->band,
                                      Real(cfg.random_perturbation->c0_norm));
    t.compose(GroupMap::exponential(f));
  }
  return Cocycle(freq, t);
}

PipelineResult run_pipeline(const ExperimentConfig& cfg) {
  PrecisionGuard guard(cfg.precision_bits);
  PipelineResult result;
  result.status = "ok";
  Json stamp{{"config_fnv64", hex64(fnv1a64(cfg.raw.dump()))},
             {"precision_bits", cfg.precision_bits},
             {"seed", cfg.seed}};
  auto emit_json = [&](const std::string& name, Json j) {
    j["provenance"] = stamp;
    std::string path = cfg.out_dir + "/" + name;
    write_file_atomic(path, j.dump(2) + "\n");
    result.files_written.push_back(path);
  };
  auto emit_text = [&](const std::string& name, const std::string& text) {
    std::string path = cfg.out_dir + "/" + name;
    write_file_atomic(path, text);
    result.files_written.push_back(path);
  };

  std::string stage = "build-input";
  try {
    Cocycle c = build_input_cocycle(cfg);

    std::size_t trace_steps = 0;
    std::size_t resonances = 0;
    Json verdict;
    if (cfg.run_scheme_stage) {
    stage = "kam-run";
    SchemeTrace trace = run_scheme(c, cfg.params);
    trace_steps = trace.steps.size();
    emit_json("trace.json", scheme_trace_to_json(trace));
    {
      std::ostringstream csv;
      csv << "n,N,K,eps0,eps_s0,y_norm0,residual,resonant_k,resonant_eps\n";
      for (const auto& s : trace.steps) {
        csv << s.n << ',' << s.big_n << ',' << csv_real(s.big_k) << ','
            << csv_real(s.eps0_in) << ',' << csv_real(s.eps_s0_in) << ','
            << csv_real(s.y_norm0) << ',' << csv_real(s.residual) << ',';
        if (s.resonance)
          csv << s.resonance->k1 << ',' << csv_real(s.resonance->epsilon);
        else
          csv << "0,0";
        csv << '\n';
      }
      emit_text("trace.csv", csv.str());
    }

    stage = "extract";
    NormalFormLedger ledger = extract(trace);
    emit_json("ledger.json", ledger_to_json(ledger, cfg.alpha_spec));
    {
      std::ostringstream csv;
      csv << "i,n,k,eps,amp,phi,theta\n";
      for (std::size_t i = 0; i < ledger.steps.size(); ++i) {
        const auto& s = ledger.steps[i];
        csv << i << ',' << s.n << ',' << s.k << ',' << csv_real(s.eps) << ','
            << csv_real(s.amp) << ',' << csv_real(s.phi) << ','
            << csv_real(s.theta) << '\n';
      }
      emit_text("ledger.csv", csv.str());
    }

    stage = "diagnose";
    Diagnosis diag = diagnose(ledger, cfg.diagnose_sigmas);
    emit_json("diagnosis.json", diagnosis_to_json(diag));
    resonances = ledger.steps.size();
    verdict = diagnosis_to_json(diag)["verdict"];
    }

    if (cfg.eigen) {
      stage = "eigen-search";
      EigenSearchOptions opts;
      opts.circle_grid = cfg.eigen->circle_grid;
      auto points = eigen_search(c, cfg.eigen->m, cfg.eigen->n_trunc, {}, opts);
      std::ostringstream csv;
      csv << "lambda_re,lambda_im,sigma_min\n";
      Real worst(0L), best(-1L);
      for (const auto& pt : points) {
        csv << csv_real(pt.lambda.re) << ',' << csv_real(pt.lambda.im) << ','
            << csv_real(pt.sigma_min) << '\n';
        if (best < Real(0L) || pt.sigma_min < best) best = pt.sigma_min;
        if (pt.sigma_min > worst) worst = pt.sigma_min;
      }
      emit_text("eigen.csv", csv.str());
      emit_json("eigen.json", Json{{"m", cfg.eigen->m},
                                   {"n_trunc", cfg.eigen->n_trunc},
                                   {"points", points.size()},
                                   {"sigma_min_best", best.to_double()},
                                   {"sigma_min_worst", worst.to_double()}});
    }

    if (cfg.correlation) {
      stage = "correlation";
      const auto& cc = *cfg.correlation;
      FiberFunction f =
          FiberFunction::basis(cc.m, cc.band, cc.f_k, cc.f_j, cc.f_p);
      FiberFunction g =
          FiberFunction::basis(cc.m, cc.band, cc.g_k, cc.g_j, cc.g_p);
      auto pts = correlation_trace(c, f, g, cc.t_max, cc.grid);
      std::ostringstream csv;
      csv << "n,corr_re,corr_im,cesaro\n";
      for (const auto& pt : pts) {
        csv << pt.n << ',' << csv_real(pt.correlation.re) << ','
            << csv_real(pt.correlation.im) << ',' << csv_real(pt.cesaro)
            << '\n';
      }
      emit_text("correlation.csv", csv.str());
    }

    stage = "summary";
    result.summary = Json{{"status", "ok"},
                          {"trace_steps", trace_steps},
                          {"resonances", resonances},
                          {"diagnosis", verdict}};
    emit_json("summary.json", result.summary);
  } catch (const std::exception& e) {
    result.status = stage + ": " + e.what();
    Json summary{{"status", "failed"}, {"stage", stage}, {"error", e.what()}};
    emit_json("summary.json", summary);
    throw;
  }
  return result;
}

}  // namespace kamlab
