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

#include "gradleak/experiment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <Eigen/Core>
#include <spdlog/spdlog.h>

#include "gradleak/checkpoint.h"
#include "gradleak/selection.h"
#include "gradleak/serialization.h"

namespace gradleak {
namespace {

constexpr const char* kResultsHeader =
    "dataset,model,selection,batch,sigma,seed,r1,r2,rl,loss,runtime_s";

std::string fmt_double(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string fmt_loss(double v) {
  return std::isfinite(v) ? fmt_double("%.9g", v) : "nan";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw InputError("bad number '" + s + "' in results CSV");
  return v;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

nlohmann::json versions() {
  return {{"gradleak", kVersion},
          {"compiler", __VERSION__},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& field) {
  if (j.contains(key)) j.at(key).get_to(field);
}

std::size_t thread_count(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested;
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, jobs));
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!checkpoint) model_config.validate();
  corpus.validate();
  attack.validate();
  if (selections.empty()) throw ConfigError("experiment needs at least one selection");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (batch_sizes.empty()) throw ConfigError("experiment needs at least one batch size");
  for (std::size_t b : batch_sizes) {
    if (b < 1 || b > 8) throw ConfigError("batch sizes must lie in [1, 8]");
  }
  for (double s : sigmas) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw ConfigError("sigmas must be finite and >= 0");
    }
    DpConfig d = dp;
    d.noise_multiplier = s;
    d.validate();
  }
  if (training) {
    if (training->epochs < 1 || training->batch_size < 1 ||
        !(training->learning_rate > 0.0)) {
      throw ConfigError("invalid training config");
    }
    if (training->dp) training->dp->validate();
  }
  if (!checkpoint) {
    if (corpus.vocab_size != model_config.vocab_size) {
      throw ConfigError("corpus vocabulary differs from the model vocabulary");
    }
    if (corpus.max_length > model_config.max_seq_len) {
      throw ConfigError("corpus sentences exceed the model's max_seq_len");
    }
    for (const auto& s : selections) {
      try {
        Selection::parse(s).validate(model_config);
      } catch (const UsageError& e) {
        throw ConfigError(e.what());
      }
    }
  }
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = {{"dataset", c.dataset},
       {"model", c.model},
       {"model_config", c.model_config},
       {"model_seed", c.model_seed},
       {"corpus", c.corpus},
       {"selections", c.selections},
       {"batch_sizes", c.batch_sizes},
       {"trials", c.trials},
       {"seed", c.seed},
       {"attack", c.attack},
       {"sigmas", c.sigmas},
       {"dp", c.dp},
       {"use_scorer", c.use_scorer},
       {"output_dir", c.output_dir.string()},
       {"threads", c.threads},
       {"record_runtime", c.record_runtime}};
  j["checkpoint"] = c.checkpoint ? nlohmann::json(c.checkpoint->string()) : nlohmann::json(nullptr);
  j["training"] = c.training ? nlohmann::json(*c.training) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  static const std::set<std::string> known = {
      "dataset",  "model",   "model_config", "model_seed",  "checkpoint",
      "training", "corpus",  "selections",   "batch_sizes", "trials",
      "seed",     "attack",  "sigmas",       "dp",          "use_scorer",
      "output_dir", "threads", "record_runtime"};
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  try {
    read_opt(j, "dataset", c.dataset);
    read_opt(j, "model", c.model);
    read_opt(j, "model_config", c.model_config);
    read_opt(j, "model_seed", c.model_seed);
    if (j.contains("checkpoint") && !j.at("checkpoint").is_null()) {
      c.checkpoint = j.at("checkpoint").get<std::string>();
    }
    if (j.contains("training") && !j.at("training").is_null()) {
      c.training = j.at("training").get<TrainConfig>();
    }
    read_opt(j, "corpus", c.corpus);
    read_opt(j, "selections", c.selections);
    read_opt(j, "batch_sizes", c.batch_sizes);
    read_opt(j, "trials", c.trials);
    read_opt(j, "seed", c.seed);
    read_opt(j, "attack", c.attack);
    read_opt(j, "sigmas", c.sigmas);
    read_opt(j, "dp", c.dp);
    read_opt(j, "use_scorer", c.use_scorer);
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    read_opt(j, "threads", c.threads);
    read_opt(j, "record_runtime", c.record_runtime);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad experiment config: ") + e.what());
  }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  // A manifest wraps the config it was produced from.
  if (j.is_object() && j.contains("config") && j.contains("generator")) {
    j = j.at("config");
  }
  ExperimentConfig config = j.get<ExperimentConfig>();
  config.validate();
  return config;
}

Lab prepare_lab(const ExperimentConfig& config) {
  config.validate();
  Lab lab;
  lab.config = config;
  if (config.checkpoint) {
    Checkpoint ckpt = load_checkpoint(*config.checkpoint);
    lab.params = std::move(ckpt.params);
    lab.config.model_config = lab.params.config;
    lab.config.model_seed = ckpt.seed;
  } else {
    lab.params = init_params(config.model_config, config.model_seed);
  }
  lab.corpus = generate_corpus(config.corpus);
  if (lab.config.model_config.vocab_size != config.corpus.vocab_size) {
    throw ConfigError("checkpoint vocabulary differs from the corpus vocabulary");
  }
  if (config.training) {
    // 80/20 split; the attack draws from the whole corpus.
    const std::span<const Sentence> all(lab.corpus.sentences);
    const std::size_t n_train = all.size() * 4 / 5;
    TrainResult trained =
        train(lab.params, all.first(n_train), all.subspan(n_train), *config.training);
    lab.params = std::move(trained.params);
    lab.utility = trained.metrics;
    lab.training_steps = trained.steps;
  }
  return lab;
}

std::vector<Sentence> sample_batch(const Corpus& corpus, std::size_t batch,
                                   std::uint64_t seed) {
  const auto& all = corpus.sentences;
  if (all.empty()) throw InputError("cannot sample from an empty corpus");
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(batch)};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  const std::size_t length = all[pick(rng)].tokens.size();
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].tokens.size() == length) pool.push_back(i);
  }
  if (pool.size() < batch) {
    throw InputError("corpus has fewer than " + std::to_string(batch) +
                     " sentences of length " + std::to_string(length));
  }
  std::vector<std::size_t> chosen;
  std::sample(pool.begin(), pool.end(), std::back_inserter(chosen), batch, rng);
  std::shuffle(chosen.begin(), chosen.end(), rng);
  std::vector<Sentence> out;
  for (std::size_t i : chosen) out.push_back(all[i]);
  return out;
}

TrialOutcome run_trial(const Lab& lab, const std::string& selection_text,
                       std::size_t batch, std::optional<double> sigma,
                       std::uint64_t seed) {
  const ExperimentConfig& cfg = lab.config;
  TrialOutcome out;
  ResultRow& row = out.row;
  row.dataset = cfg.dataset;
  row.model = cfg.model;
  row.selection = selection_text;
  row.batch = batch;
  row.sigma = sigma.value_or(0.0);
  row.seed = seed;

  const auto start = std::chrono::steady_clock::now();
  try {
    const std::vector<Sentence> sentences = sample_batch(lab.corpus, batch, seed);
    std::vector<int> labels;
    for (const auto& s : sentences) {
      out.references.push_back(s.tokens);
      labels.push_back(s.label);
    }
    const TokenBatch tokens = TokenBatch::from_rows(out.references);
    GradStore grads;
    if (sigma) {
      DpConfig dp = cfg.dp;
      dp.noise_multiplier = *sigma;
      dp.seed = seed;
      grads = defended_victim_gradients(lab.params, tokens, labels, dp);
    } else {
      grads = victim_gradients(lab.params, tokens, labels);
    }
    const Selection selection = Selection::parse(selection_text);
    const GradientView view = resolve(selection, grads, lab.params.config);

    AttackConfig attack = cfg.attack;
    attack.seed = seed;
    ReconstructOptions options;
    if (cfg.use_scorer) options.scorer = &lab.corpus.scorer;
    std::optional<std::vector<int>> known;
    if (attack.labels_known) known = labels;
    out.reconstruction = reconstruct(lab.params, view, selection, known,
                                     tokens.length, batch, attack, options);
    const double loss = out.reconstruction.final_loss;
    if (!std::isfinite(loss)) throw NumericError("non-finite matching loss");
    const RougeScores scores =
        align_and_score(out.references, out.reconstruction.tokens);
    row.r1 = scores.r1.f;
    row.r2 = scores.r2.f;
    row.rl = scores.rl.f;
    row.loss = loss;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    row.failed = true;
    row.error = e.what();
    row.r1 = row.r2 = row.rl = 0.0;
    row.loss = std::numeric_limits<double>::quiet_NaN();
    spdlog::warn("trial {} / B={} / seed {} failed: {}", selection_text, batch,
                 seed, e.what());
  }
  row.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  return run_experiment(prepare_lab(config));
}

ExperimentResult run_experiment(const Lab& lab) {
  const ExperimentConfig& cfg = lab.config;
  struct Cell {
    std::string selection;
    std::size_t batch;
    std::optional<double> sigma;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  std::vector<std::optional<double>> sigmas;
  if (cfg.sigmas.empty()) {
    sigmas.push_back(std::nullopt);
  } else {
    sigmas.assign(cfg.sigmas.begin(), cfg.sigmas.end());
  }
  for (const auto& sel : cfg.selections) {
    for (std::size_t b : cfg.batch_sizes) {
      for (const auto& s : sigmas) {
        for (std::size_t t = 0; t < cfg.trials; ++t) {
          cells.push_back({sel, b, s, cfg.seed + t});
        }
      }
    }
  }

  std::vector<ResultRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& c = cells[i];
      rows[i] = run_trial(lab, c.selection, c.batch, c.sigma, c.seed).row;
    }
  };
  const std::size_t n_threads = thread_count(cfg.threads, cells.size());
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }

  ExperimentResult result;
  result.summary = summarize(rows);

  nlohmann::json& m = result.manifest;
  m["config"] = cfg;
  m["generator"] = kGeneratorName;
  m["versions"] = versions();
  m["model_seed"] = cfg.model_seed;
  std::vector<std::uint64_t> seeds;
  for (std::size_t t = 0; t < cfg.trials; ++t) seeds.push_back(cfg.seed + t);
  m["trial_seeds"] = seeds;
  m["rows"] = rows.size();
  if (!cfg.sigmas.empty()) {
    m["dp"] = {{"sigmas", cfg.sigmas},
               {"clip_bound", cfg.dp.clip_bound},
               {"delta", cfg.dp.delta},
               // Each trial releases one gradient.
               {"steps", 1},
               {"batch_sizes", cfg.batch_sizes},
               {"dataset_size", lab.corpus.sentences.size()}};
    if (std::isinf(cfg.dp.clip_bound)) m["dp"]["clip_bound"] = nullptr;
  }
  if (lab.utility) {
    m["training"] = {{"steps", lab.training_steps},
                     {"accuracy", lab.utility->accuracy},
                     {"f1", lab.utility->f1},
                     {"mcc", lab.utility->mcc}};
  }
  nlohmann::json failed = nlohmann::json::array();
  for (const auto& r : rows) {
    if (r.failed) {
      failed.push_back({{"selection", r.selection}, {"batch", r.batch},
                        {"sigma", r.sigma}, {"seed", r.seed}, {"error", r.error}});
    }
  }
  m["failed_trials"] = std::move(failed);

  if (!cfg.output_dir.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    std::vector<ResultRow> written = rows;
    if (!cfg.record_runtime) {
      std::ofstream timings(cfg.output_dir / "timings.csv");
      timings << "selection,batch,sigma,seed,runtime_s\n";
      for (auto& r : written) {
        timings << r.selection << ',' << r.batch << ',' << fmt_double("%g", r.sigma)
                << ',' << r.seed << ',' << fmt_double("%.3f", r.runtime_s) << '\n';
        r.runtime_s = 0.0;
      }
    }
    std::ofstream results(cfg.output_dir / "results.csv");
    write_results_csv(results, written);
    std::ofstream summary(cfg.output_dir / "summary.csv");
    write_summary_csv(summary, result.summary);
    std::ofstream manifest(cfg.output_dir / "manifest.json");
    manifest << result.manifest.dump(2) << '\n';
    if (!results || !summary || !manifest) {
      throw InputError("failed writing outputs to " + cfg.output_dir.string());
    }
  }
  result.rows = std::move(rows);
  return result;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<std::string, std::size_t, double>;
  std::vector<Key> order;
  std::map<Key, std::vector<const ResultRow*>> groups;
  for (const auto& r : rows) {
    Key k{r.selection, r.batch, r.sigma};
    auto [it, inserted] = groups.try_emplace(k);
    if (inserted) order.push_back(k);
    it->second.push_back(&r);
  }
  std::vector<SummaryRow> out;
  for (const auto& k : order) {
    const auto& g = groups.at(k);
    std::vector<double> r1, r2, rl;
    SummaryRow s;
    std::tie(s.selection, s.batch, s.sigma) = k;
    for (const ResultRow* r : g) {
      r1.push_back(r->r1);
      r2.push_back(r->r2);
      rl.push_back(r->rl);
      s.failed += r->failed ? 1 : 0;
    }
    s.trials = g.size();
    s.median_r1 = median(r1);
    s.median_r2 = median(r2);
    s.median_rl = median(rl);
    s.mean_r1 = mean(r1);
    s.mean_r2 = mean(r2);
    s.mean_rl = mean(rl);
    out.push_back(std::move(s));
  }
  return out;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << r.dataset << ',' << r.model << ',' << r.selection << ',' << r.batch
        << ',' << fmt_double("%g", r.sigma) << ',' << r.seed << ','
        << fmt_double("%.6f", r.r1) << ',' << fmt_double("%.6f", r.r2) << ','
        << fmt_double("%.6f", r.rl) << ',' << fmt_loss(r.loss) << ','
        << fmt_double("%.3f", r.runtime_s) << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader) {
    throw InputError("results CSV has an unexpected header");
  }
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 11) throw InputError("results CSV row has the wrong field count");
    ResultRow r;
    try {
      r.dataset = f[0];
      r.model = f[1];
      r.selection = f[2];
      r.batch = std::stoull(f[3]);
      r.sigma = parse_double(f[4]);
      r.seed = std::stoull(f[5]);
      r.r1 = parse_double(f[6]);
      r.r2 = parse_double(f[7]);
      r.rl = parse_double(f[8]);
      r.loss = parse_double(f[9]);
      r.runtime_s = parse_double(f[10]);
    } catch (const std::logic_error&) {
      throw InputError("malformed results CSV row: " + line);
    }
    r.failed = std::isnan(r.loss);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "selection,batch,sigma,trials,failed,median_r1,median_r2,median_rl,"
         "mean_r1,mean_r2,mean_rl\n";
  for (const auto& s : rows) {
    out << s.selection << ',' << s.batch << ',' << fmt_double("%g", s.sigma) << ','
        << s.trials << ',' << s.failed << ',' << fmt_double("%.6f", s.median_r1)
        << ',' << fmt_double("%.6f", s.median_r2) << ','
        << fmt_double("%.6f", s.median_rl) << ',' << fmt_double("%.6f", s.mean_r1)
        << ',' << fmt_double("%.6f", s.mean_r2) << ','
        << fmt_double("%.6f", s.mean_rl) << '\n';
  }
}

}  // namespace gradleak
