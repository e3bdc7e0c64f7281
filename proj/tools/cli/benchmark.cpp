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

#include "benchmark.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "storm/evaluation.hpp"
#include "storm/rng.hpp"

namespace storm::cli {

namespace {

using nlohmann::json;

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

struct Source {
  DatasetSpec spec;
  std::optional<OrdinalDataset> table;  // CSV sources only
};

TrainTestSplit make_split(const Source& source, const BenchmarkOptions& o, std::uint64_t seed, int repetition) {
  if (source.spec.source == DatasetSpec::Source::synthetic) {
    return {make_synthetic(source.spec.kind, o.n_train, source.spec.num_classes, o.noise, synth_train_seed(seed)),
            make_synthetic(source.spec.kind, o.n_test, source.spec.num_classes, o.noise, synth_test_seed(seed))};
  }
  SplitSpec split;
  split.seed = derive_seed(o.seed, stable_hash(source.spec.text), 0);
  split.train_size = o.n_train;
  split.n_repetitions = o.repetitions;
  split.n_cv_folds = o.folds;
  return random_split_at(*source.table, split, repetition);
}

BenchmarkCell run_cell(const Source& source, const BenchmarkOptions& o, ModelKind model, int repetition) {
  BenchmarkCell cell;
  cell.dataset = source.spec.text;
  cell.model = model;
  cell.repetition = repetition;
  cell.seed = repetition_seed(o.seed, source.spec.text, repetition);
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto split = make_split(source, o, cell.seed, repetition);
    TrainOptions train;
    train.model = model;
    train.num_classes = source.spec.num_classes;
    train.l2 = o.l2;
    train.l2_grid = o.l2_grid;
    train.folds = o.folds;
    train.mode = o.mode;
    train.prediction = o.prediction;
    train.nystroem_landmarks = o.nystroem_landmarks;
    train.gamma = o.gamma;
    train.seed = cell.seed;
    const auto result = train_bundle(train, split.train);

    const auto& x = split.test.features();
    std::vector<int> predicted(static_cast<std::size_t>(x.rows()));
    Eigen::VectorXd row(x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      row = x.row(i).transpose();
      predicted[static_cast<std::size_t>(i)] =
          result.bundle.predict(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
    }
    const int K = source.spec.num_classes;
    cell.zero_one = macro_zero_one(split.test.labels(), predicted, K);
    cell.mae = macro_mae(split.test.labels(), predicted, K);
    cell.selected_l2 = result.selected_l2;
    cell.warnings = result.warnings;
    cell.ok = std::isfinite(cell.zero_one) && std::isfinite(cell.mae);
    if (!cell.ok) cell.error = "non-finite score";
  } catch (const std::exception& e) {
    cell.ok = false;
    cell.error = e.what();
  }
  cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return cell;
}

json config_json(const BenchmarkOptions& o) {
  std::vector<std::string> models;
  for (auto m : o.models) models.emplace_back(to_string(m));
  return {{"datasets", o.datasets},
          {"models", models},
          {"repetitions", o.repetitions},
          {"only_repetition", o.only_repetition >= 0 ? json(o.only_repetition) : json(nullptr)},
          {"seed", o.seed},
          {"n_train", o.n_train},
          {"n_test", o.n_test},
          {"noise", o.noise},
          {"l2", o.l2 ? json(*o.l2) : json(nullptr)},
          {"l2_grid", o.l2_grid},
          {"cv_folds", o.folds},
          {"mode", o.mode.constrain_transitions ? "constrained" : "unconstrained"},
          {"domain", to_string(o.mode.domain)},
          {"prediction", to_string(o.prediction)},
          {"nystroem", {{"landmarks", o.nystroem_landmarks}, {"gamma", o.gamma}}},
          {"alpha", o.alpha}};
}

double mean_of(const std::vector<double>& v) {
  double total = 0.0;
  for (double x : v) total += x;
  return v.empty() ? 0.0 : total / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

void assemble_report(BenchmarkRun& run) {
  const auto& o = run.options;
  json report;
  report["schema_version"] = 1;
  report["document"] = "storm_benchmark_report";
  report["config"] = config_json(o);

  json warnings = json::array();
  json results = json::array();
  for (const auto& c : run.cells) {
    json r = {{"dataset", c.dataset},
              {"model", to_string(c.model)},
              {"repetition", c.repetition},
              {"seed", c.seed},
              {"status", c.ok ? "ok" : "failed"},
              {"selected_l2", c.ok ? json(c.selected_l2) : json(nullptr)},
              {"zero_one", c.ok ? json(c.zero_one) : json(nullptr)},
              {"mae", c.ok ? json(c.mae) : json(nullptr)},
              {"warnings", c.warnings}};
    if (!c.ok) r["error"] = c.error;
    results.push_back(std::move(r));
    const std::string where = c.dataset + " / " + std::string(to_string(c.model)) + " / rep " +
                              std::to_string(c.repetition) + ": ";
    for (const auto& w : c.warnings) warnings.push_back(where + w);
    if (!c.ok) warnings.push_back(where + "fit failed: " + c.error);
  }
  report["results"] = std::move(results);

  // scores[metric][dataset][model] -> per-repetition values, keyed by repetition.
  const std::vector<std::string> metrics = {"zero_one", "mae"};
  std::map<std::pair<std::string, int>, std::map<int, const BenchmarkCell*>> by_cell;
  for (const auto& c : run.cells) {
    if (c.ok) by_cell[{c.dataset, static_cast<int>(c.model)}][c.repetition] = &c;
  }
  const auto value = [](const BenchmarkCell& c, const std::string& metric) {
    return metric == "zero_one" ? c.zero_one : c.mae;
  };

  json summary = json::array();
  for (const auto& d : o.datasets) {
    for (auto m : o.models) {
      json entry = {{"dataset", d}, {"model", to_string(m)}};
      const auto it = by_cell.find({d, static_cast<int>(m)});
      std::size_t n = 0;
      for (const auto& metric : metrics) {
        std::vector<double> v;
        if (it != by_cell.end()) {
          for (const auto& [rep, cell] : it->second) v.push_back(value(*cell, metric));
        }
        n = v.size();
        entry[metric] = {{"mean", v.empty() ? json(nullptr) : json(mean_of(v))}, {"sd", sample_sd(v)}};
      }
      entry["n"] = n;
      summary.push_back(std::move(entry));
    }
  }
  report["summary"] = std::move(summary);

  std::vector<std::string> model_names;
  for (auto m : o.models) model_names.emplace_back(to_string(m));

  json ranks = json::object();
  json cds = json::object();
  json wilcoxon = json::object();
  for (const auto& metric : metrics) {
    ScoreTable table;
    table.models = model_names;
    table.metric = metric;
    std::vector<std::vector<double>> rows;
    for (const auto& d : o.datasets) {
      std::vector<double> row;
      for (auto m : o.models) {
        const auto it = by_cell.find({d, static_cast<int>(m)});
        if (it == by_cell.end() || it->second.empty()) break;
        std::vector<double> v;
        for (const auto& [rep, cell] : it->second) v.push_back(value(*cell, metric));
        row.push_back(mean_of(v));
      }
      if (row.size() != o.models.size()) {
        if (metric == metrics.front()) warnings.push_back(d + ": excluded from ranking, a model has no scores");
        continue;
      }
      table.datasets.push_back(d);
      rows.push_back(std::move(row));
    }
    table.scores.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(o.models.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < rows[i].size(); ++j) {
        table.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
      }
    }

    if (o.models.size() >= 2 && !rows.empty()) {
      const auto cd = critical_difference_analysis(table, o.alpha);
      ranks[metric] = {{"table", to_json(table)}, {"average_ranks", cd.average_ranks}};
      cds[metric] = to_json(cd);
    } else {
      ranks[metric] = nullptr;
      cds[metric] = nullptr;
    }

    json tests = json::array();
    for (std::size_t i = 0; i < o.models.size(); ++i) {
      for (std::size_t j = i + 1; j < o.models.size(); ++j) {
        std::vector<double> a;
        std::vector<double> b;
        for (const auto& d : o.datasets) {
          const auto ia = by_cell.find({d, static_cast<int>(o.models[i])});
          const auto ib = by_cell.find({d, static_cast<int>(o.models[j])});
          if (ia == by_cell.end() || ib == by_cell.end()) continue;
          for (const auto& [rep, cell] : ia->second) {
            const auto match = ib->second.find(rep);
            if (match == ib->second.end()) continue;
            a.push_back(value(*cell, metric));
            b.push_back(value(*match->second, metric));
          }
        }
        json entry = {{"model_a", model_names[i]}, {"model_b", model_names[j]}, {"n_pairs", a.size()}};
        if (a.size() >= 5) {
          entry["mean_difference"] = mean_of(a) - mean_of(b);
          entry["test"] = to_json(wilcoxon_signed_rank(a, b, o.alpha));
        } else {
          entry["test"] = nullptr;
          entry["skipped"] = "fewer than 5 paired scores";
        }
        tests.push_back(std::move(entry));
      }
    }
    wilcoxon[metric] = std::move(tests);
  }
  report["ranks"] = std::move(ranks);
  report["wilcoxon"] = std::move(wilcoxon);
  report["critical_difference"] = std::move(cds);
  report["warnings"] = std::move(warnings);
  run.report = std::move(report);
}

}  // namespace

std::vector<std::string> default_benchmark_datasets() {
  std::vector<std::string> out;
  for (int k : {5, 10}) {
    for (const char* kind : {"linear", "sine", "circle", "spiral"}) {
      out.push_back(std::string("synth:") + kind + ":" + std::to_string(k));
    }
  }
  return out;
}

std::uint64_t repetition_seed(std::uint64_t master, const std::string& dataset, int repetition) {
  return derive_seed(master, stable_hash(dataset), static_cast<std::uint64_t>(repetition));
}

BenchmarkRun run_benchmark(const BenchmarkOptions& o, std::ostream* progress) {
  if (o.datasets.empty()) throw UsageError("benchmark needs at least one dataset");
  if (o.models.empty()) throw UsageError("benchmark needs at least one model");
  if (std::set<ModelKind>(o.models.begin(), o.models.end()).size() != o.models.size()) {
    throw UsageError("benchmark models must be distinct");
  }
  if (o.repetitions < 1) throw UsageError("--reps must be >= 1");
  if (o.only_repetition >= o.repetitions) throw UsageError("--only-rep must be below --reps");
  if (o.jobs < 1) throw UsageError("--jobs must be >= 1");
  if (o.n_train < o.folds || o.n_test < 1) throw UsageError("--n-train must be >= the CV folds and --n-test >= 1");
  if (!o.l2 && o.l2_grid.empty()) throw UsageError("empty --l2-grid");
  nemenyi_q(2, o.alpha);

  std::vector<Source> sources;
  for (const auto& text : o.datasets) {
    Source s{parse_dataset_spec(text), std::nullopt};
    if (s.spec.source == DatasetSpec::Source::csv) {
      s.table = load_csv(s.spec.path, s.spec.label_column, s.spec.num_classes);
      if (o.n_train >= s.table->rows()) {
        throw UsageError(text + ": --n-train must leave test rows (file has " + std::to_string(s.table->rows()) + ")");
      }
    }
    sources.push_back(std::move(s));
  }

  struct Task {
    std::size_t source;
    int repetition;
    ModelKind model;
  };
  std::vector<Task> tasks;
  for (std::size_t d = 0; d < sources.size(); ++d) {
    for (int r = 0; r < o.repetitions; ++r) {
      if (o.only_repetition >= 0 && r != o.only_repetition) continue;
      for (auto m : o.models) tasks.push_back({d, r, m});
    }
  }

  BenchmarkRun run;
  run.options = o;
  run.cells.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex log_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto& t = tasks[i];
      run.cells[i] = run_cell(sources[t.source], o, t.model, t.repetition);
      const auto finished = ++done;
      if (progress != nullptr) {
        const std::lock_guard lock(log_mutex);
        const auto& c = run.cells[i];
        *progress << '[' << finished << '/' << tasks.size() << "] " << c.dataset << ' ' << to_string(c.model)
                  << " rep " << c.repetition << ": "
                  << (c.ok ? "0/1 " + format_real(c.zero_one) + " mae " + format_real(c.mae) : "FAILED " + c.error)
                  << '\n';
      }
    }
  };
  const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(o.jobs), tasks.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  assemble_report(run);
  return run;
}

std::string report_text(const BenchmarkRun& run) { return run.report.dump(2) + "\n"; }

std::string scores_csv(const BenchmarkRun& run) {
  std::ostringstream out;
  out << "dataset,model,repetition,seed,status,selected_l2,zero_one,mae\n";
  for (const auto& c : run.cells) {
    out << csv_field(c.dataset) << ',' << to_string(c.model) << ',' << c.repetition << ',' << c.seed << ','
        << (c.ok ? "ok" : "failed") << ',';
    if (c.ok) out << format_real(c.selected_l2) << ',' << format_real(c.zero_one) << ',' << format_real(c.mae);
    else out << ",,";
    out << '\n';
  }
  return out.str();
}

std::string timings_csv(const BenchmarkRun& run) {
  std::ostringstream out;
  out << "dataset,model,repetition,seconds\n";
  for (const auto& c : run.cells) {
    out << csv_field(c.dataset) << ',' << to_string(c.model) << ',' << c.repetition << ',' << format_real(c.seconds)
        << '\n';
  }
  return out.str();
}

void write_benchmark(const BenchmarkRun& run, const std::filesystem::path& out) {
  write_file_atomic(out, report_text(run));
  auto scores = out;
  scores += ".scores.csv";
  auto timings = out;
  timings += ".timings.csv";
  write_file_atomic(scores, scores_csv(run));
  write_file_atomic(timings, timings_csv(run));
}

}  // namespace storm::cli
