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
//
// Command-line laboratory for quasiperiodic SU(2) cocycles: continued
// fractions and Diophantine certificates, conjugation-scheme runs, normal
// form extraction/synthesis/classification/deformation, truncated Koopman
// eigenvalue scans and correlation traces.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "kamlab/pipeline.hpp"

using namespace kamlab;

namespace {

Json load_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw PreconditionError("cannot open " + path);
  Json j;
  is >> j;
  return j;
}

ExperimentConfig load_config(const std::string& path, long precision_override,
                             unsigned long seed_override,
                             const std::string& out_dir_override) {
  Json j = load_json(path);
  if (precision_override > 0) j["precision_bits"] = precision_override;
  if (seed_override > 0) j["seed"] = seed_override;
  if (!out_dir_override.empty()) j["out_dir"] = out_dir_override;
  return ExperimentConfig::from_json(j);
}

int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const PreconditionError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 2;
  } catch (const PrecisionError& e) {
    std::cerr << "precision: " << e.what() << "\n";
    return 2;
  } catch (const EstimateViolation& e) {
    std::cerr << "estimate violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for quasiperiodic cocycles on T x SU(2)"};
  app.require_subcommand(1);

  long precision_bits = 0;
  unsigned long seed = 0;
  std::string out_dir;
  app.add_option("--precision-bits", precision_bits,
                 "working precision override (mantissa bits)");
  app.add_option("--seed", seed, "random seed override");
  app.add_option("--out-dir", out_dir, "output directory override");

  // ---- cf ----
  auto* cf = app.add_subcommand("cf", "continued fractions");
  auto* cf_expand = cf->add_subcommand("expand", "partial quotients and convergents");
  std::string cf_alpha = "golden";
  std::size_t cf_n = 10;
  bool cf_json = false;
  cf_expand->add_option("--alpha", cf_alpha, "frequency spec");
  cf_expand->add_option("--n", cf_n, "number of quotients");
  cf_expand->add_flag("--json", cf_json, "JSON output");
  auto* cf_eval = cf->add_subcommand("evaluate", "evaluate to a precision");
  std::string cfe_alpha = "golden";
  long cfe_bits = 256;
  cf_eval->add_option("--alpha", cfe_alpha, "frequency spec");
  cf_eval->add_option("--bits", cfe_bits, "mantissa bits");

  // ---- dc-check ----
  auto* dc = app.add_subcommand("dc-check", "certified Diophantine scan");
  std::string dc_alpha = "golden";
  double dc_gamma = 3.0, dc_tau = 2.5;
  long dc_kmax = 1000;
  std::string dc_a;
  long dc_gauss_begin = -1, dc_gauss_end = -1;
  dc->add_option("--alpha", dc_alpha, "frequency spec");
  dc->add_option("--gamma", dc_gamma, "gamma");
  dc->add_option("--tau", dc_tau, "tau");
  dc->add_option("--kmax", dc_kmax, "scan horizon");
  dc->add_option("--dc-alpha", dc_a,
                 "check |||a - k alpha||| for this constant angle instead");
  dc->add_option("--gauss-begin", dc_gauss_begin, "RDC window start");
  dc->add_option("--gauss-end", dc_gauss_end, "RDC window end");

  // ---- kam run ----
  auto* kam = app.add_subcommand("kam", "conjugation scheme");
  auto* kam_run = kam->add_subcommand("run", "run the scheme from a config");
  std::string kam_cfg;
  kam_run->add_option("--config", kam_cfg, "experiment config JSON")->required();

  // ---- nf ----
  auto* nf = app.add_subcommand("nf", "normal forms");
  auto* nf_extract = nf->add_subcommand("extract", "run and extract the ledger");
  std::string nfe_cfg;
  nf_extract->add_option("--config", nfe_cfg)->required();
  auto* nf_classify = nf->add_subcommand("classify", "compare two ledgers");
  std::string nfc_l1, nfc_l2;
  double nfc_sigma = 0.0;
  nf_classify->add_option("--ledger1", nfc_l1)->required();
  nf_classify->add_option("--ledger2", nfc_l2)->required();
  nf_classify->add_option("--sigma", nfc_sigma, "H^sigma class (0 = smooth)");
  auto* nf_synth = nf->add_subcommand("synthesize", "plant -> cocycle");
  std::string nfs_cfg;
  nf_synth->add_option("--config", nfs_cfg)->required();
  auto* nf_deform = nf->add_subcommand("deform", "dyadic path between ledgers");
  std::string nfd_l1, nfd_l2, nfd_cfg;
  double nfd_t = 0.0;
  nf_deform->add_option("--ledger1", nfd_l1)->required();
  nf_deform->add_option("--ledger2", nfd_l2)->required();
  nf_deform->add_option("--t", nfd_t)->required();
  nf_deform->add_option("--config", nfd_cfg, "scheme parameters (optional)");

  // ---- eigen ----
  auto* eigen = app.add_subcommand("eigen", "truncated Koopman spectrum");
  auto* eigen_searchc = eigen->add_subcommand("search", "sigma_min over a lambda grid");
  std::string eig_cfg;
  eigen_searchc->add_option("--config", eig_cfg)->required();

  // ---- simulate ----
  auto* sim = app.add_subcommand("simulate", "correlation trace CSV");
  std::string sim_cfg;
  sim->add_option("--config", sim_cfg)->required();

  CLI11_PARSE(app, argc, argv);

  if (precision_bits > 0) set_working_precision(precision_bits);

  return run_guarded([&] {
    if (cf_expand->parsed()) {
      auto alpha = rotation_from_string(cf_alpha);
      auto e = alpha.expand(cf_n);
      if (cf_json) {
        Json jq = Json::array(), jc = Json::array();
        for (auto q : e.quotients) jq.push_back(q);
        for (const auto& [p, q] : e.convergents)
          jc.push_back(Json::array({p.get_str(), q.get_str()}));
        Json out{{"alpha", cf_alpha},
                 {"quotients", jq},
                 {"convergents", jc},
                 {"terminated", e.terminated}};
        std::cout << out.dump(2) << "\n";
      } else {
        std::cout << "quotients:";
        for (auto q : e.quotients) std::cout << ' ' << q;
        std::cout << (e.terminated ? "  (rational, terminated)" : "") << "\n";
        std::cout << "convergents:";
        for (const auto& [p, q] : e.convergents)
          std::cout << ' ' << p.get_str() << '/' << q.get_str();
        std::cout << "\n";
      }
    } else if (cf_eval->parsed()) {
      auto alpha = rotation_from_string(cfe_alpha);
      Real v = alpha.evaluate(cfe_bits);
      std::cout << v.to_decimal(static_cast<int>(cfe_bits * 0.301) + 2) << "\n";
    } else if (dc->parsed()) {
      auto alpha = rotation_from_string(dc_alpha);
      Json out;
      if (dc_gauss_begin >= 0 && dc_gauss_end >= dc_gauss_begin) {
        auto rep = check_rdc_window(alpha, Real(dc_gamma), Real(dc_tau),
                                    dc_kmax, dc_gauss_begin, dc_gauss_end);
        Json arr = Json::array();
        for (const auto& r : rep.per_iterate)
          arr.push_back(diophantine_report_to_json(r));
        out = Json{{"alpha", dc_alpha},
                   {"window", Json::array({rep.n_begin, rep.n_end})},
                   {"all_hold", rep.all_hold},
                   {"reports", arr}};
      } else if (!dc_a.empty()) {
        Real a = Real::parse(dc_a);
        auto rep = check_dc_alpha(a, alpha, Real(dc_gamma), Real(dc_tau), dc_kmax);
        out = Json{{"alpha", dc_alpha},
                   {"a", dc_a},
                   {"report", diophantine_report_to_json(rep)}};
      } else {
        auto rep = check_dc(alpha, Real(dc_gamma), Real(dc_tau), dc_kmax);
        out = Json{{"alpha", dc_alpha},
                   {"report", diophantine_report_to_json(rep)}};
      }
      std::cout << out.dump(2) << "\n";
    } else if (kam_run->parsed()) {
      auto cfg = load_config(kam_cfg, precision_bits, seed, out_dir);
      auto res = run_pipeline(cfg);
      std::cout << res.summary.dump(2) << "\n";
    } else if (nf_extract->parsed()) {
      auto cfg = load_config(nfe_cfg, precision_bits, seed, out_dir);
      auto res = run_pipeline(cfg);
      std::cout << res.summary.dump(2) << "\n";
    } else if (nf_classify->parsed()) {
      auto l1 = ledger_from_json(load_json(nfc_l1));
      auto l2 = ledger_from_json(load_json(nfc_l2));
      auto rep = classify_pair(l1, l2, Real(nfc_sigma));
      std::cout << classification_to_json(rep).dump(2) << "\n";
    } else if (nf_synth->parsed()) {
      auto cfg = load_config(nfs_cfg, precision_bits, seed, out_dir);
      if (!cfg.plant) throw PreconditionError("synthesize needs a plant");
      PrecisionGuard guard(cfg.precision_bits);
      Cocycle c = build_input_cocycle(cfg);
      Json out{{"alpha_spec", cfg.alpha_spec},
               {"transfer", group_map_to_json(c.transfer)}};
      write_file_atomic(cfg.out_dir + "/cocycle.json", out.dump(2) + "\n");
      std::cout << "wrote " << cfg.out_dir << "/cocycle.json\n";
    } else if (nf_deform->parsed()) {
      auto l1 = ledger_from_json(load_json(nfd_l1));
      auto l2 = ledger_from_json(load_json(nfd_l2));
      KamParams params = l1.params;
      if (!nfd_cfg.empty()) {
        params = kam_params_from_json(load_json(nfd_cfg).at("kam"));
      }
      PrecisionGuard guard(params.precision_bits);
      Cocycle c = deform(l1, l2, Real(nfd_t), params);
      Json out{{"t", nfd_t}, {"transfer", group_map_to_json(c.transfer)}};
      std::string dir = out_dir.empty() ? "." : out_dir;
      write_file_atomic(dir + "/cocycle.json", out.dump(2) + "\n");
      std::cout << "wrote " << dir << "/cocycle.json\n";
    } else if (eigen_searchc->parsed()) {
      auto cfg = load_config(eig_cfg, precision_bits, seed, out_dir);
      if (!cfg.eigen) throw PreconditionError("config lacks analysis.eigen");
      auto res = run_pipeline(cfg);
      std::cout << res.summary.dump(2) << "\n";
    } else if (sim->parsed()) {
      auto cfg = load_config(sim_cfg, precision_bits, seed, out_dir);
      if (!cfg.correlation)
        throw PreconditionError("config lacks analysis.correlation");
      auto res = run_pipeline(cfg);
      std::cout << res.summary.dump(2) << "\n";
    }
  });
}
