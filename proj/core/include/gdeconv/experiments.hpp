#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gdeconv/graphs.hpp"
#include "gdeconv/identifiability.hpp"
#include "gdeconv/signals.hpp"
#include "gdeconv/solver.hpp"
#include "gdeconv/spectral.hpp"

namespace gdeconv {

inline constexpr int kGridSchemaVersion = 1;
inline constexpr std::size_t kGraphRedrawBudget = 100;

struct GraphSource {
  enum class Kind { erdos_renyi, file };

  Kind kind = Kind::erdos_renyi;
  std::size_t n = 50;
  double edge_probability = 0.3;
  std::filesystem::path path;  // used when kind == file

  static GraphSource random(std::size_t n, double p) { return {Kind::erdos_renyi, n, p, {}}; }
  static GraphSource from_file(std::filesystem::path path) {
    return {Kind::file, 0, 0.0, std::move(path)};
  }
};

// Parameters of one synthetic instance.
struct InstanceSpec {
  std::size_t sparsity = 10;  // S, total nonzeros in X0
  std::size_t signals = 10;   // P
  std::size_t order = 5;      // L
  double alpha = 0.1;
};

// Everything drawn for one trial. Random graphs are redrawn until connected
// and free of u^(i,j) eigenvectors; filters are redrawn until invertible.
struct Instance {
  Graph graph;
  ShiftOperator shift{Eigen::MatrixXd(), ShiftKind::custom};
  SpectralDecomposition dec;
  GroundTruth truth;
  std::uint64_t seed = 0;
  std::size_t graph_redraws = 0;      // disconnected random graphs rejected
  std::size_t ambiguity_redraws = 0;  // ambiguous random graphs rejected
  std::size_t filter_redraws = 0;
  bool ambiguous = false;             // only possible for file graphs
};

// Throws Error subclasses when a budget is exhausted or parameters are invalid.
Instance generate_instance(const GraphSource& source, ShiftKind shift_kind,
                           const InstanceSpec& spec, std::uint64_t trial_seed,
                           std::size_t graph_budget = kGraphRedrawBudget);

enum class Axis { S, P, L };

const char* to_string(Axis axis) noexcept;
Axis axis_from_string(const std::string& name);

struct AxisRange {
  Axis axis = Axis::S;
  std::vector<std::size_t> values;
};

struct ExperimentConfig {
  GraphSource graph;
  ShiftKind shift_kind = ShiftKind::normalized_adjacency;
  AxisRange axis1{Axis::S, {10}};
  AxisRange axis2{Axis::P, {10}};
  // Values used for whichever of S, P, L is not on a grid axis.
  InstanceSpec fixed;
  std::size_t trials = 20;
  double success_threshold = 0.01;
  std::uint64_t base_seed = 1;
  std::size_t workers = 1;
  ReweightedOptions solver;

  // Throws ParameterError on empty axes, repeated axes, zero trials,
  // non-positive threshold, or cells with S > N * P.
  void validate() const;

  InstanceSpec cell_spec(std::size_t v1, std::size_t v2) const;
};

struct TrialOutcome {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double error = 0.0;  // e_X; NaN when no estimate was produced
  bool success = false;
  SolveStatus status = SolveStatus::solver_failure;
  int iterations = 0;
  std::size_t graph_redraws = 0;
  std::size_t ambiguity_redraws = 0;
  std::size_t filter_redraws = 0;
  std::string failure;  // non-empty when the trial aborted
};

struct CellResult {
  std::size_t v1 = 0;
  std::size_t v2 = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;  // successes / trials
  double mean_error = 0.0;    // over trials with a finite e_X
  std::size_t solver_failures = 0;
  std::size_t ambiguity_redraws = 0;
  std::vector<TrialOutcome> outcomes;
};

struct ExperimentGrid {
  ExperimentConfig config;
  std::vector<CellResult> cells;  // axis1-major order
  double elapsed_seconds = 0.0;
  std::string code_version;
};

// Per-trial seed from (base_seed, cell axis values, trial). Independent of
// grid layout and worker count.
std::uint64_t trial_seed(const ExperimentConfig& cfg, std::size_t v1, std::size_t v2,
                         std::size_t trial);

TrialOutcome run_trial(const ExperimentConfig& cfg, std::size_t v1, std::size_t v2,
                       std::size_t trial);

ExperimentGrid run_grid(const ExperimentConfig& cfg);

struct AlphaSummary {
  double alpha = 0.0;
  double mean_success_rate = 0.0;
  std::size_t cells = 0;
  std::size_t trials = 0;
};

// Configs must differ only in alpha. Returned in input order.
std::vector<AlphaSummary> compare_alpha(const std::vector<ExperimentConfig>& configs);
// Same, from grids that were already run.
std::vector<AlphaSummary> compare_alpha(const std::vector<ExperimentGrid>& grids);

// Header `<axis1>,<axis2>,success_rate,mean_error,trials,solver_failures,ambiguity_redraws`.
std::string grid_csv(const ExperimentGrid& grid);
std::string grid_json(const ExperimentGrid& grid);

// Writes the CSV to `csv_path` and the JSON sidecar next to it
// (`<stem>.json`). Throws IngestionError with the path on I/O failure.
void persist(const ExperimentGrid& grid, const std::filesystem::path& csv_path);

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

ExperimentGrid load_grid_json(const std::filesystem::path& path);

}  // namespace gdeconv
