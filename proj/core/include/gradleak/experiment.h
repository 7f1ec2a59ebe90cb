//
// Copyright 2026 The gradleak Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Sweep orchestration: every (selection x batch size x sigma x seed) trial
// samples a batch, computes the victim gradients the attacker observes,
// runs the reconstruction and scores it.

#ifndef GRADLEAK_EXPERIMENT_H_
#define GRADLEAK_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gradleak/attack.h"
#include "gradleak/corpus.h"
#include "gradleak/defense.h"
#include "gradleak/metrics.h"
#include "gradleak/model.h"
#include "gradleak/training.h"

namespace gradleak {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kGeneratorName = "std::mt19937_64";

struct ExperimentConfig {
  std::string dataset = "synthetic";
  std::string model = "toy";
  ModelConfig model_config = ModelConfig::toy();
  // Replaces model_config and model_seed when set.
  std::optional<std::filesystem::path> checkpoint;
  std::uint64_t model_seed = 0;
  // Fine-tune on the corpus before attacking.
  std::optional<TrainConfig> training;
  CorpusSpec corpus;
  std::vector<std::string> selections;
  std::vector<std::size_t> batch_sizes{1, 2, 4};
  std::size_t trials = 10;
  // Trial t uses seed + t for batch sampling, noise and attack init.
  std::uint64_t seed = 0;
  AttackConfig attack;
  // Empty means undefended gradients; otherwise one cell per sigma using
  // dp's clip bound and delta.
  std::vector<double> sigmas;
  DpConfig dp;
  // Bigram reordering between projections.
  bool use_scorer = true;
  // Nothing is written when empty.
  std::filesystem::path output_dir;
  // 0 uses the hardware concurrency.
  std::size_t threads = 1;
  // results.csv carries wall time only when set; otherwise runtime_s is 0 and
  // timings go to timings.csv so reruns stay byte-identical.
  bool record_runtime = false;

  void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
// Throws ConfigError on unknown keys or ill-typed values.
void from_json(const nlohmann::json& j, ExperimentConfig& c);

// Accepts a config file or a manifest.json written by run_experiment.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct ResultRow {
  std::string dataset;
  std::string model;
  std::string selection;
  std::size_t batch = 0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  double r1 = 0.0;
  double r2 = 0.0;
  double rl = 0.0;
  double loss = 0.0;
  double runtime_s = 0.0;
  bool failed = false;
  std::string error;
};

struct SummaryRow {
  std::string selection;
  std::size_t batch = 0;
  double sigma = 0.0;
  std::size_t trials = 0;
  std::size_t failed = 0;
  double median_r1 = 0.0;
  double median_r2 = 0.0;
  double median_rl = 0.0;
  double mean_r1 = 0.0;
  double mean_r2 = 0.0;
  double mean_rl = 0.0;
};

// Model and corpus shared read-only by all trials of a sweep.
struct Lab {
  ExperimentConfig config;
  ParamStore params;
  Corpus corpus;
  std::optional<UtilityMetrics> utility;
  std::size_t training_steps = 0;
};

Lab prepare_lab(const ExperimentConfig& config);

// B sentences of one common length, drawn by seed only.
std::vector<Sentence> sample_batch(const Corpus& corpus, std::size_t batch,
                                   std::uint64_t seed);

struct TrialOutcome {
  ResultRow row;
  std::vector<std::vector<int>> references;
  ReconstructionResult reconstruction;
};

// One cell of the sweep. Failures (including non-finite losses) come back as
// a failed row with zero scores and a NaN loss.
TrialOutcome run_trial(const Lab& lab, const std::string& selection,
                       std::size_t batch, std::optional<double> sigma,
                       std::uint64_t seed);

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<SummaryRow> summary;
  nlohmann::json manifest;
};

// Rows come back in cell order (selection, batch, sigma, seed) regardless of
// thread count.
ExperimentResult run_experiment(const ExperimentConfig& config);
ExperimentResult run_experiment(const Lab& lab);

// Groups rows by (selection, batch, sigma) in first-appearance order.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

double median(std::vector<double> values);

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

}  // namespace gradleak

#endif  // GRADLEAK_EXPERIMENT_H_
