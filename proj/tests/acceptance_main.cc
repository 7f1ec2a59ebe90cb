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

// Acceptance suite. Prints one PASS/FAIL line per criterion, each followed by
// the measurements behind it. Exits non-zero when a criterion fails that was
// not named with --expect-fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "gradleak/attack.h"
#include "gradleak/corpus.h"
#include "gradleak/experiment.h"
#include "gradleak/gradcheck.h"
#include "gradleak/metrics.h"
#include "gradleak/model.h"
#include "gradleak/ops.h"
#include "gradleak/selection.h"
#include "gradleak/training.h"
#include "oracles.h"

namespace gradleak {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "ok   " : "MISS ") + what);
  }
};

std::string num(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Options {
  fs::path out_dir;
  std::string cli;
  std::size_t threads = 0;
};

// --- Parameter accounting -------------------------------------------------

// Published BERT-base total, which also counts token-type embeddings.
constexpr double kPublishedBertTotal = 109'483'778.0;

Outcome parameter_accounting(const Options&) {
  Outcome o;
  const ModelConfig bert = ModelConfig::bert_base();
  for (const char* m : {"q", "k", "v", "o"}) {
    const auto n = count_params(bert, ModuleKey::parse(std::string(m) + "@0")).count;
    o.check(n == 589'824, std::string(m) + "@0 = " + std::to_string(n) + " (want 589824)");
  }
  const auto f = count_params(bert, ModuleKey::parse("f@0")).count;
  o.check(f == 2'359'296, "f@0 = " + std::to_string(f) + " (want 2359296)");
  const auto layer = count_params(bert, ModuleKey::parse("layer@0")).count;
  o.check(layer == 7'087'872, "layer@0 = " + std::to_string(layer) + " (want 7087872)");
  const double pct = 100.0 * count_params(bert, ModuleKey::parse("q@3")).count /
                     kPublishedBertTotal;
  o.check(std::abs(pct - 0.54) <= 0.01, "used_ratio(q@3) = " + num("%.4f", pct) +
                                            "% of 109483778 (want 0.54 +- 0.01)");
  const double own = 100.0 * used_ratio(Selection::parse("q@3"), bert);
  o.notes.push_back("     own total " + std::to_string(count_params(bert, ModuleKey::parse("all")).count) +
                    " gives " + num("%.4f", own) + "%");
  return o;
}

// --- Autodiff -------------------------------------------------------------

struct Primitive {
  std::string name;
  std::vector<Tensor> inputs;
  std::function<Tensor(const std::vector<Tensor>&)> fn;
};

Tensor uniform(const Shape& shape, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(shape.numel());
  for (double& x : v) x = u(rng);
  return Tensor::constant(shape, std::move(v));
}

std::vector<Primitive> primitives(std::mt19937_64& rng) {
  auto r = [&](const Shape& s) { return uniform(s, rng, -1.0, 1.0); };
  auto pos = [&](const Shape& s) { return uniform(s, rng, 0.5, 2.0); };
  const Shape m{3, 4};
  const std::vector<std::size_t> idx{0, 3, 3, 1};
  const std::vector<int> labels{0, 3, 1};
  using V = const std::vector<Tensor>&;
  return {
      {"add", {r(m), r(m)}, [](V x) { return add(x[0], x[1]); }},
      {"sub", {r(m), r(m)}, [](V x) { return sub(x[0], x[1]); }},
      {"mul", {r(m), r(m)}, [](V x) { return mul(x[0], x[1]); }},
      {"div", {r(m), pos(m)}, [](V x) { return div(x[0], x[1]); }},
      {"neg", {r(m)}, [](V x) { return neg(x[0]); }},
      {"scale", {r(m)}, [](V x) { return scale(x[0], 1.7); }},
      {"add_scalar", {r(m)}, [](V x) { return add_scalar(x[0], 0.3); }},
      {"exp", {r(m)}, [](V x) { return exp(x[0]); }},
      {"log", {pos(m)}, [](V x) { return log(x[0]); }},
      {"tanh", {r(m)}, [](V x) { return tanh(x[0]); }},
      {"sqrt", {pos(m)}, [](V x) { return sqrt(x[0]); }},
      {"pow", {pos(m)}, [](V x) { return pow(x[0], 2.5); }},
      {"square", {r(m)}, [](V x) { return square(x[0]); }},
      {"gelu", {uniform(m, rng, -3, 3)}, [](V x) { return gelu(x[0]); }},
      {"gelu'", {uniform(m, rng, -3, 3)}, [](V x) { return gelu_derivative(x[0], 1); }},
      {"gelu''", {uniform(m, rng, -3, 3)}, [](V x) { return gelu_derivative(x[0], 2); }},
      {"sum", {r(m)}, [](V x) { return sum(x[0]); }},
      {"expand", {r(Shape{})}, [](V x) { return expand(x[0], Shape{3, 4}); }},
      {"sum_rows", {r(m)}, [](V x) { return sum_rows(x[0]); }},
      {"broadcast_rows", {r(Shape{4})}, [](V x) { return broadcast_rows(x[0], 3); }},
      {"sum_cols", {r(m)}, [](V x) { return sum_cols(x[0]); }},
      {"broadcast_cols", {r(Shape{3})}, [](V x) { return broadcast_cols(x[0], 4); }},
      {"reshape", {r(m)}, [](V x) { return reshape(x[0], Shape{2, 6}); }},
      {"add_rowvec", {r(m), r(Shape{4})}, [](V x) { return add_rowvec(x[0], x[1]); }},
      {"mul_rowvec", {r(m), r(Shape{4})}, [](V x) { return mul_rowvec(x[0], x[1]); }},
      {"matmul", {r(m), r(Shape{4, 5})}, [](V x) { return matmul(x[0], x[1]); }},
      {"matmul_ta", {r(Shape{4, 3}), r(Shape{4, 5})},
       [](V x) { return matmul(x[0], x[1], true, false); }},
      {"matmul_tb", {r(m), r(Shape{5, 4})}, [](V x) { return matmul(x[0], x[1], false, true); }},
      {"matmul_tab", {r(Shape{4, 3}), r(Shape{5, 4})},
       [](V x) { return matmul(x[0], x[1], true, true); }},
      {"slice", {r(Shape{5, 6})}, [](V x) { return slice(x[0], 1, 2, 2, 3); }},
      {"pad", {r(Shape{2, 3})}, [](V x) { return pad(x[0], 5, 6, 1, 2); }},
      {"concat_cols", {r(Shape{3, 2}), r(m)},
       [](V x) { return concat_cols(std::vector<Tensor>{x[0], x[1]}); }},
      {"concat_rows", {r(Shape{2, 4}), r(m)},
       [](V x) { return concat_rows(std::vector<Tensor>{x[0], x[1]}); }},
      {"gather_rows", {r(Shape{5, 4})}, [idx](V x) { return gather_rows(x[0], idx); }},
      {"scatter_rows", {r(Shape{4, 4})}, [idx](V x) { return scatter_rows(x[0], idx, 5); }},
      {"softmax_rowwise", {r(m)}, [](V x) { return softmax_rowwise(x[0]); }},
      {"layer_norm", {r(Shape{3, 6}), r(Shape{6}), r(Shape{6})},
       [](V x) { return layer_norm(x[0], x[1], x[2], 1e-12); }},
      {"cross_entropy", {r(m)},
       [labels](V x) { return cross_entropy_with_logits(x[0], labels); }},
      {"dot", {r(m), r(m)}, [](V x) { return dot(x[0], x[1]); }},
  };
}

// Matched blocks of a selection, as the attack sees them.
GradientView matched(const GradientView& view) {
  GradientView out;
  for (const auto& b : view.blocks) {
    if (b.name != "embed.word" && !b.name.ends_with("attn.k.bias")) out.blocks.push_back(b);
  }
  return out;
}

Outcome autodiff(const Options&) {
  Outcome o;
  std::mt19937_64 rng(0);

  double worst = 0.0;
  std::string worst_name;
  for (const Primitive& p : primitives(rng)) {
    // Scalarize with a fixed random weighting of the output.
    const Tensor w = uniform(p.fn(p.inputs).shape(), rng, -1.0, 1.0);
    for (std::size_t i = 0; i < p.inputs.size(); ++i) {
      auto f = [&](const Tensor& xi) {
        std::vector<Tensor> args = p.inputs;
        args[i] = xi;
        return dot(p.fn(args), w);
      };
      const double err = finite_diff_check(f, p.inputs[i], 1e-6).max_error;
      if (err > worst) {
        worst = err;
        worst_name = p.name + "[" + std::to_string(i) + "]";
      }
    }
  }
  o.check(worst <= 1e-5, "primitives: worst relative error " + num("%.2e", worst) + " at " +
                             worst_name + " (want <= 1e-5)");

  // Full toy-model loss, 20 coordinates of every parameter block.
  const ParamStore params = init_params(ModelConfig::toy(), 0);
  const Corpus corpus = generate_corpus(CorpusSpec{});
  std::vector<std::vector<int>> rows{corpus.sentences[0].tokens, corpus.sentences[1].tokens};
  const std::vector<int> labels{corpus.sentences[0].label, corpus.sentences[1].label};
  const TokenBatch batch = TokenBatch::from_rows(rows);
  double model_worst = 0.0;
  for (const auto& [name, block] : params.blocks) {
    std::vector<std::size_t> coords;
    if (name == "embed.word") {
      for (int t : batch.ids) coords.push_back(static_cast<std::size_t>(t) * 64 + rng() % 64);
    } else {
      for (int i = 0; i < 20; ++i) coords.push_back(rng() % block.numel());
    }
    auto loss = [&](const Tensor& v) {
      ParamStore q = params;
      q.blocks.at(name) = v;
      return cross_entropy_with_logits(forward(q, batch), labels);
    };
    model_worst = std::max(model_worst, finite_diff_check(loss, block, 1e-5, coords).max_error);
  }
  o.check(model_worst <= 1e-5, "toy model loss, every block: worst " +
                                   num("%.2e", model_worst) + " (want <= 1e-5)");

  // Second order: matching loss w.r.t. dummy embeddings through the dummy
  // backward pass.
  const std::vector<int> one_label{labels[0]};
  const GradStore target_grads =
      victim_gradients(params, TokenBatch::from_rows({rows[0]}), one_label);
  const Tensor x = uniform(Shape{1, rows[0].size(), 64}, rng, -0.04, 0.04);
  for (const char* sel : {"all", "layer@0", "q@0", "f@1", "p@1"}) {
    const GradientView target =
        matched(resolve(Selection::parse(sel), target_grads, params.config));
    const std::vector<std::string> names = target.names();
    auto f = [&](const Tensor& e) {
      const auto g = embedding_input_gradients(params, e, one_label, names, true);
      GradientView dummy;
      for (std::size_t i = 0; i < names.size(); ++i) {
        dummy.blocks.push_back({names[i], g[i], target.blocks[i].weight});
      }
      return matching_loss(dummy, target);
    };
    std::vector<std::size_t> coords;
    for (int i = 0; i < 24; ++i) coords.push_back(rng() % x.numel());
    const double err = finite_diff_check(f, x, 1e-4, coords).max_error;
    o.check(err <= 1e-4, std::string("second order, ") + sel + ": " + num("%.2e", err) +
                             " (want <= 1e-4)");
  }
  return o;
}

// --- Metric oracles -------------------------------------------------------

Outcome metric_oracles(const Options&) {
  Outcome o;
  std::mt19937_64 rng(1);
  std::size_t mismatches = 0;
  for (int i = 0; i < 200; ++i) {
    std::vector<int> ref(1 + rng() % 8), hyp(1 + rng() % 8);
    for (int& t : ref) t = static_cast<int>(rng() % 6);
    for (int& t : hyp) t = static_cast<int>(rng() % 6);
    const RougeScores got = rouge(ref, hyp);
    const bool same = got.r1.f == oracle::rouge_n(ref, hyp, 1).f &&
                      got.r2.f == oracle::rouge_n(ref, hyp, 2).f &&
                      got.rl.f == oracle::rouge_l(ref, hyp).f &&
                      got.rl.precision == oracle::rouge_l(ref, hyp).precision &&
                      got.rl.recall == oracle::rouge_l(ref, hyp).recall;
    mismatches += same ? 0 : 1;
  }
  o.check(mismatches == 0, "rouge vs brute force on 200 random pairs: " +
                               std::to_string(mismatches) + " mismatches");

  const RougeScores hand = rouge(std::vector<int>{0, 1, 2}, std::vector<int>{0, 2});
  o.check(std::abs(hand.r1.f - 0.8) < 1e-12 && hand.r2.f == 0.0 &&
              std::abs(hand.rl.f - 0.8) < 1e-12,
          "\"a b c\" vs \"a c\": R1 " + num("%.4f", hand.r1.f) + ", R2 " +
              num("%.4f", hand.r2.f) + ", RL " + num("%.4f", hand.rl.f));

  double mcc_worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    Confusion c{rng() % 20, rng() % 20, rng() % 20, rng() % 20};
    if (i % 10 == 0) c.tn = c.fn = 0;  // every prediction is the positive class
    mcc_worst = std::max(mcc_worst, std::abs(mcc(c) - oracle::mcc(c)));
  }
  o.check(mcc_worst <= 1e-15, "mcc vs direct formula on 100 tables: worst " +
                                  num("%.1e", mcc_worst));
  const std::vector<int> gold{0, 1, 1, 0, 1, 0};
  const std::vector<int> one_class(gold.size(), 1);
  o.check(mcc(one_class, gold) == 0.0, "all-one-class predictions give mcc 0");
  return o;
}

// --- Attack effectiveness -------------------------------------------------

constexpr std::size_t kTrials = 10;
constexpr std::size_t kSteps = 3000;

ExperimentConfig reference_config(const Options& opt, const std::string& name) {
  ExperimentConfig c;  // toy model seed 0, synthetic corpus seed 0, T = 4
  c.trials = kTrials;
  c.seed = 0;
  c.attack.steps = kSteps;
  c.threads = opt.threads;
  c.output_dir = opt.out_dir / name;
  return c;
}

double cell_median(const std::vector<SummaryRow>& summary, const std::string& selection,
                   std::size_t batch, double sigma = 0.0) {
  for (const auto& s : summary) {
    if (s.selection == selection && s.batch == batch && s.sigma == sigma) return s.median_rl;
  }
  throw std::runtime_error("missing cell " + selection);
}

Outcome attack_effectiveness(const Options& opt) {
  Outcome o;
  ExperimentConfig c = reference_config(opt, "effectiveness");
  const std::vector<std::string> singles{"q@1", "k@1", "v@1", "o@1", "f@1", "p@1"};
  c.selections = {"all", "transformer", "layer@1"};
  c.selections.insert(c.selections.end(), singles.begin(), singles.end());
  c.batch_sizes = {1};
  Lab lab = prepare_lab(c);
  const ExperimentResult b1 = run_experiment(lab);

  std::size_t exact = 0;
  for (const auto& r : b1.rows) exact += (r.selection == "all" && r.r1 == 1.0) ? 1 : 0;
  o.check(exact >= 7, "all, B=1: exact recovery in " + std::to_string(exact) + "/10 seeds (want >= 7)");

  std::vector<double> base;
  for (std::uint64_t seed = 0; seed < kTrials; ++seed) {
    const auto ref = sample_batch(lab.corpus, 1, seed).front().tokens;
    std::mt19937_64 rng(seed);
    base.push_back(random_baseline_rl(ref, lab.params.config.vocab_size, 100, rng));
  }
  const double baseline = median(base);
  const double all = cell_median(b1.summary, "all", 1);
  const double transformer = cell_median(b1.summary, "transformer", 1);
  const double layer = cell_median(b1.summary, "layer@1", 1);
  double best = -1.0;
  std::string best_name;
  std::string singles_text;
  for (const auto& s : singles) {
    const double m = cell_median(b1.summary, s, 1);
    singles_text += " " + s + "=" + num("%.3f", m);
    if (m > best) {
      best = m;
      best_name = s;
    }
  }
  o.notes.push_back("     median RL: all " + num("%.3f", all) + ", transformer " +
                    num("%.3f", transformer) + ", layer@1 " + num("%.3f", layer) + ";" +
                    singles_text + "; random " + num("%.3f", baseline));
  constexpr double kTol = 0.05;
  o.check(all >= transformer - kTol, "all >= transformer");
  o.check(transformer >= layer - kTol, "transformer >= layer@1");
  o.check(layer >= best - kTol, "layer@1 >= best single module (" + best_name + ")");
  o.check(best >= baseline + 0.15 - kTol, "best single module >= random + 0.15");

  lab.config.selections = {"all"};
  lab.config.batch_sizes = {4};
  lab.config.output_dir = opt.out_dir / "effectiveness_b4";
  const ExperimentResult b4 = run_experiment(lab);
  const double all4 = cell_median(b4.summary, "all", 4);
  o.check(all4 <= all, "all: median RL at B=4 " + num("%.3f", all4) + " <= B=1 " + num("%.3f", all));
  return o;
}

// --- Defense behaviour ----------------------------------------------------

Outcome defense_behavior(const Options& opt) {
  Outcome o;
  ExperimentConfig c = reference_config(opt, "defense");
  c.selections = {"all"};
  c.batch_sizes = {1};
  c.sigmas = {0.0, 0.01, 0.1, 0.5, 1.0};
  c.dp.clip_bound = 1.0;
  const Lab lab = prepare_lab(c);
  const ExperimentResult r = run_experiment(lab);
  std::map<double, double> m;
  std::string text;
  for (double s : c.sigmas) {
    m[s] = cell_median(r.summary, "all", 1, s);
    text += " sigma " + num("%g", s) + ": " + num("%.3f", m[s]) + ";";
  }
  o.notes.push_back("     median RL (C = 1):" + text);
  const double drop = m[0.0] - m[0.01];
  o.check(drop < 0.05, "sigma 0.01 drop " + num("%.3f", drop) + " (want < 0.05)");
  const std::vector<double> chain{0.0, 0.1, 0.5, 1.0};
  bool monotone = true;
  for (std::size_t i = 1; i < chain.size(); ++i) {
    monotone = monotone && m[chain[i]] <= m[chain[i - 1]] + 0.05;
  }
  o.check(monotone, "median RL non-increasing over sigma {0, 0.1, 0.5, 1} within 0.05");

  // Utility of DP-SGD fine-tuning on the synthetic task, 80/20 split.
  const std::span<const Sentence> all(lab.corpus.sentences);
  const std::size_t n_train = all.size() * 4 / 5;
  auto utility = [&](double sigma) {
    TrainConfig t;
    t.learning_rate = 0.5;
    DpConfig dp;
    dp.clip_bound = 1.0;
    dp.noise_multiplier = sigma;
    t.dp = dp;
    return train(lab.params, all.first(n_train), all.subspan(n_train), t).metrics.mcc;
  };
  const double clean = utility(0.0);
  o.check(clean > 0.3, "training MCC at sigma 0: " + num("%.3f", clean) + " (want > 0.3)");
  for (double sigma : {5.0, 20.0}) {
    const double noisy = utility(sigma);
    o.check(noisy <= 0.1, "training MCC at sigma " + num("%g", sigma) + ": " +
                              num("%.3f", noisy) + " (want <= 0.1)");
  }
  return o;
}

// --- Determinism ----------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism(const Options& opt) {
  Outcome o;
  const fs::path root = opt.out_dir / "determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  ExperimentConfig c;
  c.selections = {"layer@1", "q@1+f@1"};
  c.batch_sizes = {1, 2};
  c.sigmas = {0.0, 0.1};
  c.trials = 2;
  c.seed = 7;
  c.attack.steps = 200;
  c.threads = opt.threads;
  c.output_dir = root / "first";

  if (!opt.cli.empty()) {
    std::ofstream(root / "config.json") << nlohmann::json(c).dump(2) << '\n';
    auto run = [&](const std::string& args) {
      const std::string cmd = "\"" + opt.cli + "\" sweep " + args + " > \"" +
                              (root / "log.txt").string() + "\" 2>&1";
      const int status = std::system(cmd.c_str());
      o.check(status == 0, "gradleak sweep " + args.substr(0, args.find(' ')) + " exits 0");
    };
    run("-c \"" + (root / "config.json").string() + "\"");
    run("-m \"" + (root / "first" / "manifest.json").string() + "\" -o \"" +
        (root / "second").string() + "\"");
  } else {
    run_experiment(c);
    ExperimentConfig again = load_experiment_config(root / "first" / "manifest.json");
    again.output_dir = root / "second";
    run_experiment(again);
  }
  const std::string first = slurp(root / "first" / "results.csv");
  const std::string second = slurp(root / "second" / "results.csv");
  o.check(!first.empty() && first == second,
          "results.csv identical across reruns (" + std::to_string(first.size()) + " bytes)");
  return o;
}

struct Criterion {
  std::string name;
  double budget_s;  // 0 means no stated limit
  std::function<Outcome(const Options&)> run;
};

}  // namespace
}  // namespace gradleak

int main(int argc, char** argv) {
  using namespace gradleak;
  Options opt;
  std::vector<std::string> expect_fail;
  std::vector<std::string> only;
  opt.out_dir = fs::temp_directory_path() / "gradleak_acceptance";
  CLI::App app{"gradleak acceptance suite"};
  app.add_option("--out", opt.out_dir, "Directory for sweep outputs");
  app.add_option("--cli", opt.cli, "gradleak executable for the determinism check");
  app.add_option("-j,--threads", opt.threads, "Worker threads (0 = all cores)");
  app.add_option("--expect-fail", expect_fail, "Criteria allowed to fail");
  app.add_option("--only", only, "Run only these criteria");
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::err);

  const std::vector<Criterion> criteria{
      {"parameter-accounting", 1.0, parameter_accounting},
      {"autodiff", 120.0, autodiff},
      {"metric-oracles", 0.0, metric_oracles},
      {"attack-effectiveness", 1500.0, attack_effectiveness},
      {"defense-behavior", 900.0, defense_behavior},
      {"determinism", 0.0, determinism},
  };
  int unexpected = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(opt);
    } catch (const std::exception& e) {
      o.check(false, std::string("error: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0) {
      o.check(secs < c.budget_s, "runtime " + num("%.1f", secs) + " s (limit " +
                                     num("%g", c.budget_s) + " s)");
    }
    const bool expected = std::find(expect_fail.begin(), expect_fail.end(), c.name) !=
                          expect_fail.end();
    std::printf("%s %s (%.1f s)%s\n", o.pass ? "PASS" : "FAIL", c.name.c_str(), secs,
                !o.pass && expected ? " [expected]" : "");
    for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
    if (!o.pass && !expected) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
