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

// Command-line front end: corpus generation, training, single attacks and
// sweeps. Exit status is nonzero only for configuration errors.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "gradleak/checkpoint.h"
#include "gradleak/corpus.h"
#include "gradleak/errors.h"
#include "gradleak/experiment.h"
#include "gradleak/metrics.h"
#include "gradleak/training.h"

namespace {

using namespace gradleak;

constexpr int kConfigExit = 2;

std::string join(const std::vector<int>& tokens) {
  std::string s;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(tokens[i]);
  }
  return s;
}

void print_summary(const std::vector<SummaryRow>& summary) {
  std::printf("%-24s %5s %7s %6s %9s %9s %9s\n", "selection", "batch", "sigma",
              "failed", "med_r1", "med_r2", "med_rl");
  for (const auto& s : summary) {
    std::printf("%-24s %5zu %7g %6zu %9.4f %9.4f %9.4f\n", s.selection.c_str(),
                s.batch, s.sigma, s.failed, s.median_r1, s.median_r2, s.median_rl);
  }
}

int cmd_generate_corpus(const CorpusSpec& spec, const std::string& out_path) {
  const Corpus corpus = generate_corpus(spec);
  std::ofstream out(out_path);
  if (!out) throw ConfigError("cannot write " + out_path);
  write_corpus(out, corpus.sentences);
  std::printf("wrote %zu sentences to %s\n", corpus.sentences.size(),
              out_path.c_str());
  return 0;
}

int cmd_train(ExperimentConfig config, const std::string& out_path) {
  if (!config.training) config.training = TrainConfig{};
  const Lab lab = prepare_lab(config);
  save_checkpoint(out_path, lab.params, lab.config.model_seed);
  std::printf("steps %zu  accuracy %.4f  f1 %.4f  mcc %.4f\n", lab.training_steps,
              lab.utility->accuracy, lab.utility->f1, lab.utility->mcc);
  std::printf("checkpoint written to %s\n", out_path.c_str());
  return 0;
}

int cmd_attack(const ExperimentConfig& config, const std::string& selection,
               std::size_t batch, std::uint64_t seed, std::optional<double> sigma) {
  ExperimentConfig c = config;
  c.selections = {selection};
  c.batch_sizes = {batch};
  const Lab lab = prepare_lab(c);
  const TrialOutcome t = run_trial(lab, selection, batch, sigma, seed);
  if (t.row.failed) {
    std::printf("trial failed: %s\n", t.row.error.c_str());
    return 0;
  }
  for (std::size_t b = 0; b < t.references.size(); ++b) {
    std::printf("reference[%zu]:      %s\n", b, join(t.references[b]).c_str());
    std::printf("reconstruction[%zu]: %s\n", b,
                join(t.reconstruction.tokens[b]).c_str());
  }
  std::printf("r1 %.4f  r2 %.4f  rl %.4f  loss %.6g  steps %zu  %.2fs\n", t.row.r1,
              t.row.r2, t.row.rl, t.row.loss, t.reconstruction.steps_run,
              t.row.runtime_s);
  return 0;
}

int cmd_sweep(ExperimentConfig config) {
  const ExperimentResult result = run_experiment(config);
  print_summary(result.summary);
  if (!config.output_dir.empty()) {
    std::printf("results written to %s\n", config.output_dir.string().c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient-inversion lab on a toy transformer classifier"};
  app.require_subcommand(1);

  std::string config_path;
  std::string manifest_path;
  std::string out_path;
  std::optional<std::size_t> threads;

  CorpusSpec spec;
  auto* gen = app.add_subcommand("generate-corpus", "Write a synthetic corpus as TSV");
  gen->add_option("--seed", spec.seed);
  gen->add_option("--size", spec.num_sentences);
  gen->add_option("--vocab", spec.vocab_size);
  gen->add_option("--min-length", spec.min_length);
  gen->add_option("--max-length", spec.max_length);
  gen->add_option("-o,--out", out_path, "Output TSV")->required();

  auto* train = app.add_subcommand("train", "Fine-tune the model and save a checkpoint");
  train->add_option("-c,--config", config_path, "Experiment config (JSON)")->required();
  train->add_option("-o,--out", out_path, "Checkpoint path")->required();

  std::string selection = "all";
  std::size_t batch = 1;
  std::uint64_t seed = 0;
  std::optional<double> sigma;
  auto* attack = app.add_subcommand("attack", "Run one reconstruction and print it");
  attack->add_option("-c,--config", config_path, "Experiment config (JSON)")->required();
  attack->add_option("-s,--selection", selection, "Module keys joined with '+'");
  attack->add_option("-b,--batch", batch);
  attack->add_option("--seed", seed);
  attack->add_option("--sigma", sigma, "Apply DP-SGD with this noise multiplier");

  auto* sweep = app.add_subcommand("sweep", "Run every configured cell");
  auto* sweep_src = sweep->add_option_group("source");
  sweep_src->add_option("-c,--config", config_path, "Experiment config (JSON)");
  sweep_src->add_option("-m,--manifest", manifest_path, "Rerun a manifest.json");
  sweep_src->require_option(1);
  sweep->add_option("-o,--out", out_path, "Output directory (overrides config)");
  sweep->add_option("-j,--threads", threads);

  std::vector<double> sigmas;
  auto* defend = app.add_subcommand("defend-sweep", "Sweep DP noise multipliers");
  defend->add_option("-c,--config", config_path, "Experiment config (JSON)")->required();
  defend->add_option("--sigmas", sigmas, "Noise multipliers")->delimiter(',');
  defend->add_option("-o,--out", out_path, "Output directory (overrides config)");
  defend->add_option("-j,--threads", threads);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_generate_corpus(spec, out_path);
    ExperimentConfig config = load_experiment_config(
        manifest_path.empty() ? config_path : manifest_path);
    if (threads) config.threads = *threads;
    if (!out_path.empty() && (*sweep || *defend)) config.output_dir = out_path;
    if (*train) return cmd_train(config, out_path);
    if (*attack) return cmd_attack(config, selection, batch, seed, sigma);
    if (*defend) {
      if (!sigmas.empty()) config.sigmas = sigmas;
      if (config.sigmas.empty()) config.sigmas = {0.0, 0.01, 0.1, 0.5, 1.0};
      config.validate();
    }
    return cmd_sweep(config);
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kConfigExit;
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return kConfigExit;
  } catch (const InputError& e) {
    spdlog::error("{}", e.what());
    return kConfigExit;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return 0;
  }
}
