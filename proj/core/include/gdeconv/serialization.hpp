#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gdeconv/experiments.hpp"
#include "gdeconv/graphs.hpp"
#include "gdeconv/identifiability.hpp"
#include "gdeconv/signals.hpp"
#include "gdeconv/solver.hpp"

// JSON documents exchanged by the command-line tool. Matrices are written as
// row-major nested arrays tagged `"storage": "row_major"`; the column-major
// vec() convention never appears in files.
namespace gdeconv {

inline constexpr int kBundleSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

// How an instance was generated; enough to regenerate it bit-identically.
struct BundleParameters {
  std::string graph_source = "erdos_renyi";  // or "file"
  std::size_t n = 0;
  double edge_probability = 0.0;
  std::string graph_file;
  std::size_t order = 0;
  double alpha = 0.0;
  std::size_t sparsity = 0;
  std::size_t signals = 0;
  std::uint64_t seed = 0;
  std::size_t graph_redraws = 0;
  std::size_t ambiguity_redraws = 0;
  std::size_t filter_redraws = 0;
};

struct ProblemBundle {
  Graph graph;
  ShiftOperator shift{Eigen::MatrixXd(), ShiftKind::custom};
  Eigen::MatrixXd y;
  std::optional<GroundTruth> truth;
  // Indices into vec(X0) (column-major), as stored in the file.
  std::optional<std::vector<Eigen::Index>> support;
  std::optional<BundleParameters> parameters;
};

ProblemBundle make_bundle(const Instance& instance, const BundleParameters& params);

std::string bundle_to_json(const ProblemBundle& bundle);
// Throws IngestionError on malformed documents.
ProblemBundle bundle_from_json(const std::string& text);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

std::string result_to_json(const DeconvolutionResult& result, const ReweightedOptions& options,
                           std::optional<double> relative_error_value,
                           std::optional<std::uint64_t> seed);

std::string certificate_to_json(const CertificateReport& report);
std::string ambiguity_to_json(const AmbiguityReport& report);

// Matrix <-> JSON text, for tools that embed matrices in their own output.
std::string matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const std::string& text);

}  // namespace gdeconv
