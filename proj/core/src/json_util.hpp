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

#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "storm/dataset.hpp"

namespace storm::detail {

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.begin(), v.end()); }

inline Eigen::VectorXd vector_from_json(const nlohmann::json& j, Eigen::Index expected, const char* field) {
  const auto values = j.get<std::vector<double>>();
  if (expected >= 0 && static_cast<Eigen::Index>(values.size()) != expected) {
    throw DataError(std::string("model document: field '") + field + "' has " + std::to_string(values.size()) +
                    " entries, expected " + std::to_string(expected));
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

/// Row-major nested array.
template <typename Derived>
nlohmann::json matrix_to_json(const Eigen::MatrixBase<Derived>& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols,
                                        const char* field) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw DataError(std::string("model document: field '") + field + "' must have " + std::to_string(rows) + " rows");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) m.row(i) = vector_from_json(j[static_cast<std::size_t>(i)], cols, field);
  return m;
}

inline Standardizer standardizer_from_json(const nlohmann::json& j) {
  const Eigen::Index raw = j.at("raw_dim").get<Eigen::Index>();
  if (raw < 1) throw DataError("model document: raw_dim must be >= 1");
  const auto& doc = j.at("standardization");
  return Standardizer(vector_from_json(doc.at("mean"), raw, "standardization.mean"),
                      vector_from_json(doc.at("scale"), raw, "standardization.scale"));
}

}  // namespace storm::detail
