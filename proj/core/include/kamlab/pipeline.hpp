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

#ifndef KAMLAB_PIPELINE_HPP
#define KAMLAB_PIPELINE_HPP

#include <optional>
#include <string>

#include "kamlab/serialization.hpp"

namespace kamlab {

/// One reproducible experiment: frequency, scheme parameters, the input
/// cocycle (a plant, an explicit transfer, or a seeded random perturbation
/// of a constant), analysis switches and output paths. Identical config and
/// seed produce byte-identical output files at fixed precision.
struct ExperimentConfig {
  Json raw;  // canonical form, hashed into every output
  Json alpha_spec;
  KamParams params;
  long precision_bits = 256;
  unsigned long seed = 1;
  std::string out_dir = ".";

  bool run_scheme_stage = true;  // "run_scheme": false skips to the analyses
  std::optional<Plant> plant;
  std::optional<Json> transfer_json;
  std::optional<double> constant_angle;
  struct RandomPerturbation {
    long band = 4;
    double c0_norm = 1e-5;
  };
  std::optional<RandomPerturbation> random_perturbation;

  std::vector<Real> diagnose_sigmas;
  struct EigenCfg {
    long m = 2;
    long n_trunc = 8;
    std::size_t circle_grid = 1000;
  };
  std::optional<EigenCfg> eigen;
  struct CorrelationCfg {
    long m = 1;
    long t_max = 1000;
    std::size_t grid = 32;
    long f_k = 0, f_j = 0, f_p = 0;
    long g_k = 0, g_j = 0, g_p = 0;
    long band = 2;
  };
  std::optional<CorrelationCfg> correlation;

  static ExperimentConfig from_json(const Json& j);
};

struct PipelineResult {
  std::vector<std::string> files_written;
  std::string status;  // "ok" or the failure diagnostic
  Json summary;
};

/// synthesize? -> run_scheme -> extract -> diagnose -> optional analyses.
/// Every stage's output is written before the next begins (write-to-temp,
/// atomic rename); refusals are surfaced after the partial outputs land.
PipelineResult run_pipeline(const ExperimentConfig& cfg);

/// The cocycle an experiment configures (exposed for the CLI subcommands
/// that bypass the scheme).
Cocycle build_input_cocycle(const ExperimentConfig& cfg);

}  // namespace kamlab

#endif  // KAMLAB_PIPELINE_HPP
