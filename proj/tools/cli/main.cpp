// Copyright 2026 The StORM Ordinal Authors
//
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

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "benchmark.hpp"
#include "commands.hpp"
#include "storm/encoding.hpp"

namespace {

using namespace storm;
using namespace storm::cli;

struct ModeFlags {
  std::string mode = "unconstrained";
  std::string domain = "automatic";
  std::string predict = "viterbi";

  void add(CLI::App* app) {
    app->add_option("--mode", mode, "Transition handling: unconstrained or constrained")->capture_default_str();
    app->add_option("--domain", domain, "Inference domain: automatic, exp or log")->capture_default_str();
    app->add_option("--predict", predict, "StORM decoding rule: viterbi or marginal")->capture_default_str();
  }
  InferenceMode inference() const {
    try {
      return {parse_domain(domain), parse_constrained(mode)};
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  PredictionRule rule() const {
    try {
      return parse_prediction_rule(predict);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
};

ModelKind model_kind(const std::string& name) {
  try {
    return parse_model_kind(name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

int run(int argc, char** argv) {
  CLI::App app{"StORM ordinal regression: chain CRF over cumulative label codes, baselines and benchmarks"};
  app.require_subcommand(1);

  // synth
  SynthOptions synth;
  std::string synth_kind = "linear";
  auto* synth_cmd = app.add_subcommand("synth", "Write train and test CSVs of a synthetic manifold");
  synth_cmd->add_option("--kind", synth_kind, "linear, sine, circle or spiral")->capture_default_str();
  synth_cmd->add_option("--k", synth.num_classes, "Number of classes")->capture_default_str();
  synth_cmd->add_option("--n-train", synth.n_train)->capture_default_str();
  synth_cmd->add_option("--n-test", synth.n_test)->capture_default_str();
  synth_cmd->add_option("--noise", synth.noise, "Gaussian noise standard deviation")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Output prefix; writes <out>.train.csv and <out>.test.csv")->required();

  // train
  TrainOptions train;
  std::string train_model = "storm";
  std::string train_grid;
  double train_l2 = 0.0;
  ModeFlags train_mode;
  auto* train_cmd = app.add_subcommand("train", "Fit a model on a CSV file and write the model document");
  train_cmd->add_option("--model", train_model, "storm, ordlog, nest or logreg")->capture_default_str();
  train_cmd->add_option("--train", train.train_csv, "Training CSV")->required();
  train_cmd->add_option("--label", train.label_column, "Label column name")->capture_default_str();
  train_cmd->add_option("--k", train.num_classes, "Number of classes")->required();
  auto* l2_opt = train_cmd->add_option("--l2", train_l2, "Fixed l2 strength (skips cross-validation)");
  train_cmd->add_option("--l2-grid", train_grid, "Comma separated l2 grid for cross-validation")->excludes(l2_opt);
  train_cmd->add_option("--folds", train.folds)->capture_default_str();
  train_cmd->add_option("--nystroem", train.nystroem_landmarks, "Nystroem landmarks (0 = raw features)");
  train_cmd->add_option("--gamma", train.gamma, "RBF kernel width for --nystroem")->capture_default_str();
  train_cmd->add_option("--seed", train.seed)->capture_default_str();
  train_cmd->add_option("--out", train.out, "Model file")->required();
  train_mode.add(train_cmd);

  // predict
  PredictOptions predict;
  auto* predict_cmd = app.add_subcommand("predict", "Predict labels (and optionally probabilities) for a CSV file");
  predict_cmd->add_option("--model", predict.model, "Model file")->required();
  predict_cmd->add_option("--input", predict.csv, "Feature CSV")->required();
  predict_cmd->add_option("--label", predict.label_column, "Column to ignore if present")->capture_default_str();
  predict_cmd->add_flag("--proba", predict.proba, "Append one probability column per class");
  predict_cmd->add_option("--out", predict.out, "Predictions CSV")->required();

  // benchmark
  BenchmarkOptions bench;
  std::vector<std::string> bench_models;
  std::string bench_grid;
  double bench_l2 = 0.0;
  std::string bench_out;
  ModeFlags bench_mode;
  auto* bench_cmd = app.add_subcommand("benchmark", "Run the repeated train/test protocol and write a report");
  bench_cmd->add_option("--dataset", bench.datasets, "synth:<kind>:<K> or csv:<path>:<label>:<K>; repeatable");
  bench_cmd->add_option("--model", bench_models, "Models to compare; repeatable (default: all four)");
  bench_cmd->add_option("--reps", bench.repetitions)->capture_default_str();
  bench_cmd->add_option("--only-rep", bench.only_repetition, "Run a single repetition");
  bench_cmd->add_option("--seed", bench.seed)->capture_default_str();
  bench_cmd->add_option("--jobs", bench.jobs, "Concurrent fits")->capture_default_str();
  bench_cmd->add_option("--n-train", bench.n_train)->capture_default_str();
  bench_cmd->add_option("--n-test", bench.n_test)->capture_default_str();
  bench_cmd->add_option("--noise", bench.noise)->capture_default_str();
  auto* bench_l2_opt = bench_cmd->add_option("--l2", bench_l2, "Fixed l2 strength (skips cross-validation)");
  bench_cmd->add_option("--l2-grid", bench_grid, "Comma separated l2 grid")->excludes(bench_l2_opt);
  bench_cmd->add_option("--folds", bench.folds)->capture_default_str();
  bench_cmd->add_option("--nystroem", bench.nystroem_landmarks, "Nystroem landmarks (0 = raw features)");
  bench_cmd->add_option("--gamma", bench.gamma)->capture_default_str();
  bench_cmd->add_option("--alpha", bench.alpha, "Significance level: 0.01, 0.05 or 0.1")->capture_default_str();
  bench_cmd->add_option("--out", bench_out, "Report file; scores and timings go to <out>.scores.csv and "
                                            "<out>.timings.csv")->required();
  bench_mode.add(bench_cmd);

  // grid
  GridOptions grid;
  auto* grid_cmd = app.add_subcommand("grid", "Evaluate a query over a 2-D lattice for plotting");
  grid_cmd->add_option("--model", grid.model, "Model file with 2 raw features")->required();
  grid_cmd->add_option("--x-min", grid.x_min)->capture_default_str();
  grid_cmd->add_option("--x-max", grid.x_max)->capture_default_str();
  grid_cmd->add_option("--y-min", grid.y_min)->capture_default_str();
  grid_cmd->add_option("--y-max", grid.y_max)->capture_default_str();
  grid_cmd->add_option("--resolution", grid.resolution)->capture_default_str();
  grid_cmd->add_option("--query", grid.query, "label, proba:<k> or interval:<a>:<b>")->capture_default_str();
  grid_cmd->add_option("--out", grid.out, "Grid CSV (x,y,value)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (synth_cmd->parsed()) {
      try {
        synth.kind = parse_manifold(synth_kind);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      run_synth(synth, std::cout);
    } else if (train_cmd->parsed()) {
      train.model = model_kind(train_model);
      if (l2_opt->count() > 0) train.l2 = train_l2;
      if (!train_grid.empty()) train.l2_grid = parse_l2_grid(train_grid);
      train.mode = train_mode.inference();
      train.prediction = train_mode.rule();
      run_train(train, std::cout);
    } else if (predict_cmd->parsed()) {
      run_predict(predict, std::cout);
    } else if (bench_cmd->parsed()) {
      if (!bench_models.empty()) {
        bench.models.clear();
        for (const auto& m : bench_models) bench.models.push_back(model_kind(m));
      }
      if (bench_l2_opt->count() > 0) bench.l2 = bench_l2;
      if (!bench_grid.empty()) bench.l2_grid = parse_l2_grid(bench_grid);
      bench.mode = bench_mode.inference();
      bench.prediction = bench_mode.rule();
      const auto result = run_benchmark(bench, &std::cerr);
      write_benchmark(result, bench_out);
      std::cout << "benchmark: " << result.cells.size() << " fits -> " << bench_out << '\n';
    } else if (grid_cmd->parsed()) {
      run_grid(grid, std::cout);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
