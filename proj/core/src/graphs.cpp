#include "gdeconv/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "gdeconv/error.hpp"
#include "gdeconv/rng.hpp"

namespace gdeconv {

Graph::Graph(std::size_t n, std::vector<Edge> edges, bool weighted)
    : n_(n), edges_(std::move(edges)), weighted_(weighted) {
  for (Edge& e : edges_) {
    if (e.i >= n_ || e.j >= n_) {
      throw ParameterError("edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                           ") out of range for n=" + std::to_string(n_));
    }
    if (e.i == e.j) throw ParameterError("self-loop at node " + std::to_string(e.i));
    if (!(std::isfinite(e.w) && e.w > 0.0)) {
      throw ParameterError("edge weight must be positive and finite");
    }
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.i, a.j) < std::pair(b.i, b.j);
  });
  auto dup = std::adjacent_find(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return a.i == b.i && a.j == b.j;
  });
  if (dup != edges_.end()) {
    throw ParameterError("repeated edge (" + std::to_string(dup->i) + "," +
                         std::to_string(dup->j) + ")");
  }
}

Eigen::MatrixXd Graph::adjacency() const {
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : edges_) {
    a(e.i, e.j) = e.w;
    a(e.j, e.i) = e.w;
  }
  return a;
}

Eigen::VectorXd Graph::degrees() const {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
  for (const Edge& e : edges_) {
    d(e.i) += e.w;
    d(e.j) += e.w;
  }
  return d;
}

const char* to_string(ShiftKind kind) noexcept {
  switch (kind) {
    case ShiftKind::adjacency:
      return "adjacency";
    case ShiftKind::normalized_adjacency:
      return "normalized_adjacency";
    case ShiftKind::custom:
      return "custom";
  }
  return "custom";
}

ShiftKind shift_kind_from_string(const std::string& name) {
  if (name == "adjacency") return ShiftKind::adjacency;
  if (name == "normalized_adjacency") return ShiftKind::normalized_adjacency;
  if (name == "custom") return ShiftKind::custom;
  throw ParameterError("unknown shift kind '" + name + "'");
}

ShiftOperator::ShiftOperator(Eigen::MatrixXd matrix, ShiftKind kind)
    : matrix_(std::move(matrix)), kind_(kind) {
  if (matrix_.rows() != matrix_.cols()) throw ContractError("shift operator must be square");
  if (matrix_.size() == 0) return;
  const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
  if ((matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ContractError("shift operator is not symmetric");
  }
  if (!matrix_.allFinite()) throw ContractError("shift operator has non-finite entries");
}

Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  if (n < 2) throw ParameterError("erdos_renyi requires n >= 2");
  if (!(p > 0.0 && p <= 1.0)) throw ParameterError("erdos_renyi requires 0 < p <= 1");
  Rng rng(seed);
  std::bernoulli_distribution keep(p);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (keep(rng)) edges.push_back({i, j, 1.0});
    }
  }
  return Graph(n, std::move(edges), false);
}

Graph parse_edge_list(std::istream& in) {
  std::map<std::pair<std::size_t, std::size_t>, double> seen;
  std::size_t declared_n = 0;
  bool has_header = false;
  bool weighted = false;
  std::size_t max_index = 0;
  bool any_edge = false;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      std::string body = line.substr(first + 1);
      body.erase(0, body.find_first_not_of(" \t"));
      if (body.rfind("n=", 0) == 0) {
        std::istringstream hs(body.substr(2));
        long long v = -1;
        std::string rest;
        if (!(hs >> v) || v < 1 || (hs >> rest)) {
          throw IngestionError("malformed node-count header", lineno);
        }
        declared_n = static_cast<std::size_t>(v);
        has_header = true;
      }
      continue;
    }

    std::istringstream ls(line);
    long long i = -1, j = -1;
    if (!(ls >> i >> j)) throw IngestionError("expected 'i j [w]'", lineno);
    if (i < 0 || j < 0) throw IngestionError("negative node index", lineno);
    double w = 1.0;
    std::string tok;
    if (ls >> tok) {
      std::size_t used = 0;
      try {
        w = std::stod(tok, &used);
      } catch (const std::exception&) {
        throw IngestionError("unparsable weight '" + tok + "'", lineno);
      }
      if (used != tok.size()) throw IngestionError("unparsable weight '" + tok + "'", lineno);
      if (ls >> tok) throw IngestionError("trailing tokens", lineno);
    }
    if (i == j) throw IngestionError("self-loop at node " + std::to_string(i), lineno);
    if (!(std::isfinite(w) && w > 0.0)) {
      throw IngestionError("edge weight must be positive and finite", lineno);
    }
    if (w != 1.0) weighted = true;

    const auto a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(j);
    const std::pair<std::size_t, std::size_t> key{std::min(a, b), std::max(a, b)};
    auto [it, inserted] = seen.emplace(key, w);
    if (!inserted && it->second != w) {
      throw IngestionError("duplicate edge (" + std::to_string(key.first) + "," +
                               std::to_string(key.second) + ") with conflicting weight",
                           lineno);
    }
    max_index = std::max({max_index, key.first, key.second});
    any_edge = true;
  }

  std::size_t n = any_edge ? max_index + 1 : 0;
  if (has_header) {
    if (any_edge && declared_n <= max_index) {
      throw IngestionError("node-count header n=" + std::to_string(declared_n) +
                           " smaller than max index + 1");
    }
    n = declared_n;
  }

  std::vector<Edge> edges;
  edges.reserve(seen.size());
  for (const auto& [key, w] : seen) edges.push_back({key.first, key.second, w});
  return Graph(n, std::move(edges), weighted);
}

Graph load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open edge list '" + path.string() + "'");
  try {
    return parse_edge_list(in);
  } catch (const IngestionError& e) {
    throw IngestionError(path.string() + ": " + e.what());
  }
}

void write_edge_list(const Graph& g, std::ostream& out) {
  out << "# n=" << g.n() << '\n';
  const auto old_precision = out.precision(17);
  for (const Edge& e : g.edges()) out << e.i << ' ' << e.j << ' ' << e.w << '\n';
  out.precision(old_precision);
}

ShiftOperator adjacency_shift(const Graph& g) {
  return ShiftOperator(g.adjacency(), ShiftKind::adjacency);
}

ShiftOperator normalized_adjacency(const Graph& g) {
  const Eigen::VectorXd d = g.degrees();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d(i) > 0.0)) {
      throw DegenerateDegreeError("node " + std::to_string(i) +
                                  " is isolated; normalized adjacency undefined");
    }
  }
  const auto n = static_cast<Eigen::Index>(g.n());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    const double v = e.w / std::sqrt(d(e.i) * d(e.j));
    s(e.i, e.j) = v;
    s(e.j, e.i) = v;
  }
  return ShiftOperator(std::move(s), ShiftKind::normalized_adjacency);
}

ShiftOperator custom_shift(const Graph& g, Eigen::MatrixXd matrix) {
  const auto n = static_cast<Eigen::Index>(g.n());
  if (matrix.rows() != n || matrix.cols() != n) {
    throw ContractError("custom shift must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  const Eigen::MatrixXd a = g.adjacency();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && ((a(i, j) != 0.0) != (matrix(i, j) != 0.0))) {
        throw ContractError("custom shift sparsity pattern differs from the graph at (" +
                            std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  return ShiftOperator(std::move(matrix), ShiftKind::custom);
}

bool is_connected(const Graph& g) {
  const std::size_t n = g.n();
  if (n <= 1) return true;
  std::vector<std::vector<std::size_t>> adj(n);
  for (const Edge& e : g.edges()) {
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
  }
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t u : adj[v]) {
      if (!seen[u]) {
        seen[u] = 1;
        ++reached;
        stack.push_back(u);
      }
    }
  }
  return reached == n;
}

}  // namespace gdeconv
