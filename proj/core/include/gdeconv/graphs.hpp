#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gdeconv {

// Undirected weighted edge, stored with i < j. Node indices are 0-based.
struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;
  double w = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Undirected graph without self-loops or parallel edges.
class Graph {
 public:
  Graph() = default;

  // Validates the edge list and stores it canonically (i < j, sorted).
  // Throws ParameterError on self-loops, out-of-range nodes, repeated pairs or
  // non-positive/non-finite weights.
  Graph(std::size_t n, std::vector<Edge> edges, bool weighted = false);

  std::size_t n() const noexcept { return n_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  bool weighted() const noexcept { return weighted_; }

  Eigen::MatrixXd adjacency() const;
  Eigen::VectorXd degrees() const;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  bool weighted_ = false;
};

enum class ShiftKind { adjacency, normalized_adjacency, custom };

const char* to_string(ShiftKind kind) noexcept;
ShiftKind shift_kind_from_string(const std::string& name);

// Real symmetric graph-shift operator.
class ShiftOperator {
 public:
  // Checks symmetry to 1e-12 relative; throws ContractError otherwise.
  ShiftOperator(Eigen::MatrixXd matrix, ShiftKind kind);

  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  ShiftKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }

 private:
  Eigen::MatrixXd matrix_;
  ShiftKind kind_;
};

// G(n, p) with unit weights; each unordered pair is kept independently with
// probability p. Bit-identical for equal seeds.
Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed);

// Whitespace-separated `i j [w]` lines, 0-based. Blank lines and `#` comments
// are skipped, except a `# n=<int>` header which fixes the node count.
Graph parse_edge_list(std::istream& in);
Graph load_edge_list(const std::filesystem::path& path);
void write_edge_list(const Graph& g, std::ostream& out);

ShiftOperator adjacency_shift(const Graph& g);

// D^{-1/2} A D^{-1/2}; throws DegenerateDegreeError on isolated nodes.
ShiftOperator normalized_adjacency(const Graph& g);

// Symmetric matrix whose off-diagonal pattern must match the graph's edges.
ShiftOperator custom_shift(const Graph& g, Eigen::MatrixXd matrix);

bool is_connected(const Graph& g);

}  // namespace gdeconv
