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

#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "storm/evaluation.hpp"
#include "storm/nystroem.hpp"
#include "storm/rng.hpp"

namespace storm::cli {

namespace {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? text.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

int parse_int(std::string_view text, std::string_view what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw UsageError(std::string(what) + ": '" + std::string(text) + "' is not an integer");
  }
  return v;
}

double parse_real(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw UsageError(std::string(what) + ": '" + std::string(text) + "' is not a finite number");
  }
  return v;
}

void check_classes(int k) {
  if (k < 2) throw UsageError("number of classes must be at least 2");
}

}  // namespace

DatasetSpec parse_dataset_spec(std::string_view text) {
  DatasetSpec spec;
  spec.text = std::string(text);
  const auto parts = split(text, ':');
  if (parts.size() == 3 && parts[0] == "synth") {
    spec.source = DatasetSpec::Source::synthetic;
    try {
      spec.kind = parse_manifold(parts[1]);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    spec.num_classes = parse_int(parts[2], "dataset K");
  } else if (parts.size() >= 4 && parts[0] == "csv") {
    spec.source = DatasetSpec::Source::csv;
    const auto path_end = text.size() - parts[parts.size() - 1].size() - parts[parts.size() - 2].size() - 2;
    spec.path = std::string(text.substr(4, path_end - 4));
    spec.label_column = std::string(parts[parts.size() - 2]);
    spec.num_classes = parse_int(parts.back(), "dataset K");
  } else {
    throw UsageError("dataset spec '" + spec.text +
                     "' must be synth:<kind>:<K> or csv:<path>:<label column>:<K>");
  }
  check_classes(spec.num_classes);
  return spec;
}

bool parse_constrained(std::string_view text) {
  if (text == "unconstrained") return false;
  if (text == "constrained") return true;
  throw UsageError("--mode must be unconstrained or constrained, got '" + std::string(text) + "'");
}

std::vector<double> parse_l2_grid(std::string_view text) {
  std::vector<double> grid;
  for (auto part : split(text, ',')) {
    const double v = parse_real(part, "--l2-grid");
    if (v < 0.0) throw UsageError("--l2-grid: strengths must be non-negative");
    grid.push_back(v);
  }
  return grid;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw DataError("failed writing " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw DataError("cannot replace " + path.string());
  }
}

// ---------------------------------------------------------------------------
// synth

std::uint64_t synth_train_seed(std::uint64_t seed) { return derive_seed(seed, stable_hash("synth/train"), 0); }
std::uint64_t synth_test_seed(std::uint64_t seed) { return derive_seed(seed, stable_hash("synth/test"), 0); }

SynthFiles run_synth(const SynthOptions& o, std::ostream& log) {
  check_classes(o.num_classes);
  if (o.n_train < o.num_classes || o.n_test < o.num_classes) {
    throw UsageError("--n-train and --n-test must be at least K");
  }
  if (!(o.noise >= 0.0)) throw UsageError("--noise must be non-negative");
  if (o.out.empty()) throw UsageError("--out is required");

  const auto train = make_synthetic(o.kind, o.n_train, o.num_classes, o.noise, synth_train_seed(o.seed));
  const auto test = make_synthetic(o.kind, o.n_test, o.num_classes, o.noise, synth_test_seed(o.seed));
  SynthFiles files{o.out, o.out};
  files.train += ".train.csv";
  files.test += ".test.csv";
  write_file_atomic(files.train, to_csv(train));
  write_file_atomic(files.test, to_csv(test));
  log << "synth " << to_string(o.kind) << " K=" << o.num_classes << ": " << train.rows() << " train rows -> "
      << files.train.string() << ", " << test.rows() << " test rows -> " << files.test.string() << '\n';
  return files;
}

// ---------------------------------------------------------------------------
// train

TrainResult train_bundle(const TrainOptions& o, const OrdinalDataset& data) {
  TrainConfig config;
  config.seed = o.seed;
  config.mode = o.mode;
  config.prediction = o.prediction;

  std::optional<NystroemMap> map;
  const OrdinalDataset* fit_data = &data;
  OrdinalDataset mapped = data;
  if (o.nystroem_landmarks > 0) {
    if (o.nystroem_landmarks > data.rows()) {
      throw UsageError("--nystroem " + std::to_string(o.nystroem_landmarks) + " exceeds the " +
                       std::to_string(data.rows()) + " training rows");
    }
    if (!(o.gamma > 0.0)) throw UsageError("--gamma must be positive");
    auto [fitted, transformed] =
        nystroem_features(data, o.nystroem_landmarks, o.gamma, derive_seed(o.seed, stable_hash("nystroem"), 0));
    map = std::move(fitted);
    mapped = std::move(transformed);
    fit_data = &mapped;
  }

  if (o.l2) {
    config.l2_strength = *o.l2;
    auto model = fit_model(o.model, *fit_data, config);
    auto warnings = model->warnings();
    return {ModelBundle(std::shared_ptr<const OrdinalModel>(std::move(model)), std::move(map)), *o.l2,
            std::move(warnings)};
  }
  if (o.l2_grid.empty()) throw UsageError("empty --l2-grid");
  auto cv = fit_cv(o.model, *fit_data, o.l2_grid, config, o.folds);
  return {ModelBundle(std::shared_ptr<const OrdinalModel>(std::move(cv.model)), std::move(map)), cv.selected_l2,
          std::move(cv.warnings)};
}

TrainResult run_train(const TrainOptions& o, std::ostream& log) {
  check_classes(o.num_classes);
  if (o.out.empty()) throw UsageError("--out is required");
  if (o.l2 && !(*o.l2 >= 0.0)) throw UsageError("--l2 must be non-negative");
  const auto data = load_csv(o.train_csv, o.label_column, o.num_classes);
  auto result = train_bundle(o, data);
  write_file_atomic(o.out, serialize_model(result.bundle));

  std::vector<int> predicted;
  predicted.reserve(static_cast<std::size_t>(data.rows()));
  Eigen::VectorXd row(data.dim());
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    row = data.features().row(i).transpose();
    predicted.push_back(result.bundle.predict(std::span<const double>(row.data(), static_cast<std::size_t>(row.size()))));
  }
  log << "trained " << to_string(o.model) << " on " << data.rows() << " rows, l2=" << result.selected_l2
      << (o.l2 ? " (fixed)" : " (cv)") << ", train macro 0/1 loss "
      << macro_zero_one(data.labels(), predicted, o.num_classes) << "; model -> " << o.out.string() << '\n';
  for (const auto& w : result.warnings) log << "warning: " << w << '\n';
  return result;
}

// ---------------------------------------------------------------------------
// predict

void run_predict(const PredictOptions& o, std::ostream& log) {
  if (o.out.empty()) throw UsageError("--out is required");
  const auto bundle = load_model(o.model);
  const auto table = load_feature_csv(o.csv, o.label_column);
  if (table.features.cols() != bundle.input_dim()) {
    throw DataError(o.csv.string() + ": model expects " + std::to_string(bundle.input_dim()) + " features, file has " +
                    std::to_string(table.features.cols()));
  }
  const int K = bundle.num_classes();
  std::ostringstream out;
  out << "prediction";
  if (o.proba) {
    for (int k = 1; k <= K; ++k) out << ",p" << k;
  }
  out << '\n';
  Eigen::VectorXd row(table.features.cols());
  for (Eigen::Index i = 0; i < table.features.rows(); ++i) {
    row = table.features.row(i).transpose();
    const std::span<const double> x(row.data(), static_cast<std::size_t>(row.size()));
    out << bundle.predict(x);
    if (o.proba) {
      for (double p : bundle.predict_proba(x)) out << ',' << format_real(p);
    }
    out << '\n';
  }
  write_file_atomic(o.out, out.str());
  log << "predicted " << table.features.rows() << " rows -> " << o.out.string() << '\n';
}

// ---------------------------------------------------------------------------
// grid

void run_grid(const GridOptions& o, std::ostream& log) {
  if (o.out.empty()) throw UsageError("--out is required");
  if (o.resolution < 1) throw UsageError("--resolution must be >= 1");
  if (!(o.x_max >= o.x_min) || !(o.y_max >= o.y_min)) throw UsageError("grid range must satisfy min <= max");
  const auto bundle = load_model(o.model);
  if (bundle.input_dim() != 2) {
    throw DataError("grid export needs a model with 2 raw features, this one has " +
                    std::to_string(bundle.input_dim()));
  }
  const int K = bundle.num_classes();

  enum class Query { label, proba, interval } query = Query::label;
  int a = 1;
  int b = K;
  const auto parts = split(o.query, ':');
  if (parts.size() == 1 && parts[0] == "label") {
    query = Query::label;
  } else if (parts.size() == 2 && parts[0] == "proba") {
    query = Query::proba;
    a = parse_int(parts[1], "--query proba");
    b = a;
  } else if (parts.size() == 3 && parts[0] == "interval") {
    query = Query::interval;
    a = parse_int(parts[1], "--query interval");
    b = parse_int(parts[2], "--query interval");
  } else {
    throw UsageError("--query must be label, proba:<k> or interval:<a>:<b>");
  }
  if (a < 1 || b > K || a > b) throw UsageError("--query labels must satisfy 1 <= a <= b <= " + std::to_string(K));

  const auto step = [&](double lo, double hi, int i) {
    return o.resolution == 1 ? lo : lo + (hi - lo) * i / (o.resolution - 1);
  };
  std::ostringstream out;
  out << "x,y,value\n";
  for (int iy = 0; iy < o.resolution; ++iy) {
    for (int ix = 0; ix < o.resolution; ++ix) {
      const double point[2] = {step(o.x_min, o.x_max, ix), step(o.y_min, o.y_max, iy)};
      double value = 0.0;
      switch (query) {
        case Query::label:
          value = bundle.predict(point);
          break;
        case Query::proba:
          value = bundle.predict_proba(point)[static_cast<std::size_t>(a - 1)];
          break;
        case Query::interval:
          value = bundle.interval_probability(point, a, b);
          break;
      }
      out << format_real(point[0]) << ',' << format_real(point[1]) << ',' << format_real(value) << '\n';
    }
  }
  write_file_atomic(o.out, out.str());
  log << "grid " << o.resolution << "x" << o.resolution << " (" << o.query << ") -> " << o.out.string() << '\n';
}

}  // namespace storm::cli
