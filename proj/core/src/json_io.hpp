#pragma once

// Internal JSON helpers shared by serialization.cpp and experiments.cpp.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "gdeconv/error.hpp"

namespace gdeconv::detail {

using json = nlohmann::json;

// JSON has no NaN/inf; they are written as null and read back as NaN.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline double to_double(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!j.is_number()) throw IngestionError("expected a number, got " + std::string(j.type_name()));
  return j.get<double>();
}

inline json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

inline Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw IngestionError("expected a numeric array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = to_double(j[i]);
  return v;
}

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    rows.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"storage", "row_major"}, {"data", rows}};
}

inline Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_object()) throw IngestionError("matrix must be an object");
  if (j.value("storage", std::string()) != "row_major") {
    throw IngestionError("matrix storage must be 'row_major'");
  }
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const json& data = j.at("data");
  if (rows < 0 || cols < 0 || !data.is_array() || static_cast<Eigen::Index>(data.size()) != rows) {
    throw IngestionError("matrix data does not match its declared shape");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = data[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw IngestionError("matrix row " + std::to_string(i) + " has the wrong length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = to_double(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

}  // namespace gdeconv::detail
