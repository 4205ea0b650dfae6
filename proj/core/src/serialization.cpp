#include "gdeconv/serialization.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gdeconv/error.hpp"
#include "gdeconv/spectral.hpp"
#include "json_io.hpp"

namespace gdeconv {

using detail::json;

namespace {

json graph_to_json(const Graph& g) {
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.i, e.j, e.w});
  return {{"n", g.n()}, {"weighted", g.weighted()}, {"edges", edges}};
}

Graph graph_from_json(const json& j) {
  const auto n = j.at("n").get<std::size_t>();
  std::vector<Edge> edges;
  for (const json& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 3) throw IngestionError("edge entries must be [i, j, w]");
    edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<double>()});
  }
  try {
    return Graph(n, std::move(edges), j.value("weighted", false));
  } catch (const ParameterError& e) {
    throw IngestionError(std::string("invalid graph: ") + e.what());
  }
}

json optional_vector(const std::optional<Eigen::VectorXd>& v) {
  return v ? detail::vector_to_json(*v) : json(nullptr);
}

}  // namespace

ProblemBundle make_bundle(const Instance& instance, const BundleParameters& params) {
  ProblemBundle b;
  b.graph = instance.graph;
  b.shift = instance.shift;
  b.y = instance.truth.y;
  b.truth = instance.truth;
  b.support = instance.truth.x0.vec_support();
  b.parameters = params;
  return b;
}

std::string bundle_to_json(const ProblemBundle& b) {
  json doc = {{"schema_version", kBundleSchemaVersion},
              {"kind", "gdeconv.bundle"},
              {"graph", graph_to_json(b.graph)},
              {"shift", {{"kind", to_string(b.shift.kind())},
                         {"matrix", detail::matrix_to_json(b.shift.matrix())}}},
              {"y", detail::matrix_to_json(b.y)}};
  if (b.truth) {
    const GroundTruth& t = *b.truth;
    doc["truth"] = {{"x0", detail::matrix_to_json(t.x0.values())},
                    {"h0", {{"coeffs", optional_vector(t.h0.coeffs())},
                            {"response", optional_vector(t.h0.stored_response())}}},
                    {"g0", detail::vector_to_json(t.g0)},
                    {"g0_sum", t.g0_sum()}};
  }
  if (b.support) doc["support"] = *b.support;
  if (b.parameters) {
    const BundleParameters& p = *b.parameters;
    doc["parameters"] = {{"graph_source", p.graph_source},
                         {"n", p.n},
                         {"edge_probability", p.edge_probability},
                         {"graph_file", p.graph_file},
                         {"L", p.order},
                         {"alpha", p.alpha},
                         {"S", p.sparsity},
                         {"P", p.signals},
                         {"seed", p.seed},
                         {"graph_redraws", p.graph_redraws},
                         {"ambiguity_redraws", p.ambiguity_redraws},
                         {"filter_redraws", p.filter_redraws}};
  }
  return doc.dump(2) + "\n";
}

ProblemBundle bundle_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (!doc.is_object()) throw IngestionError("bundle must be a JSON object");
    if (doc.value("schema_version", 0) != kBundleSchemaVersion) {
      throw IngestionError("unsupported bundle schema_version");
    }
    ProblemBundle b;
    b.graph = graph_from_json(doc.at("graph"));
    const json& js = doc.at("shift");
    Eigen::MatrixXd s = detail::matrix_from_json(js.at("matrix"));
    const auto n = static_cast<Eigen::Index>(b.graph.n());
    if (s.rows() != n || s.cols() != n) throw IngestionError("shift size does not match graph");
    try {
      b.shift = ShiftOperator(std::move(s), shift_kind_from_string(js.at("kind").get<std::string>()));
    } catch (const ContractError& e) {
      throw IngestionError(std::string("invalid shift: ") + e.what());
    } catch (const ParameterError& e) {
      throw IngestionError(std::string("invalid shift: ") + e.what());
    }
    b.y = detail::matrix_from_json(doc.at("y"));
    if (b.y.rows() != n || b.y.cols() < 1) throw IngestionError("y must have N rows and P >= 1 columns");
    if (!b.y.allFinite()) throw IngestionError("y contains non-finite values");

    if (doc.contains("truth") && !doc.at("truth").is_null()) {
      const json& jt = doc.at("truth");
      GroundTruth t;
      Eigen::MatrixXd x0 = detail::matrix_from_json(jt.at("x0"));
      if (x0.rows() != b.y.rows() || x0.cols() != b.y.cols()) {
        throw IngestionError("x0 shape does not match y");
      }
      t.x0 = SparseInputMatrix(std::move(x0));
      const json& jh = jt.at("h0");
      const bool has_c = jh.contains("coeffs") && !jh.at("coeffs").is_null();
      const bool has_r = jh.contains("response") && !jh.at("response").is_null();
      if (has_c && has_r) {
        t.h0 = FilterSpec::from_both(detail::vector_from_json(jh.at("coeffs")),
                                     detail::vector_from_json(jh.at("response")), eig_sym(b.shift));
      } else if (has_c) {
        t.h0 = FilterSpec::from_coeffs(detail::vector_from_json(jh.at("coeffs")));
      } else if (has_r) {
        t.h0 = FilterSpec::from_response(detail::vector_from_json(jh.at("response")));
      } else {
        throw IngestionError("h0 needs coeffs or response");
      }
      t.g0 = detail::vector_from_json(jt.at("g0"));
      if (t.g0.size() != n) throw IngestionError("g0 length does not match graph");
      t.y = b.y;
      b.truth = std::move(t);
    }
    if (doc.contains("support") && !doc.at("support").is_null()) {
      std::vector<Eigen::Index> support;
      for (const json& k : doc.at("support")) {
        if (!k.is_number_integer()) throw IngestionError("support indices must be integers");
        support.push_back(k.get<Eigen::Index>());
      }
      b.support = std::move(support);
    }
    if (doc.contains("parameters") && !doc.at("parameters").is_null()) {
      const json& jp = doc.at("parameters");
      BundleParameters p;
      p.graph_source = jp.value("graph_source", std::string("erdos_renyi"));
      p.n = jp.value("n", std::size_t{0});
      p.edge_probability = jp.value("edge_probability", 0.0);
      p.graph_file = jp.value("graph_file", std::string());
      p.order = jp.value("L", std::size_t{0});
      p.alpha = jp.value("alpha", 0.0);
      p.sparsity = jp.value("S", std::size_t{0});
      p.signals = jp.value("P", std::size_t{0});
      p.seed = jp.value("seed", std::uint64_t{0});
      p.graph_redraws = jp.value("graph_redraws", std::size_t{0});
      p.ambiguity_redraws = jp.value("ambiguity_redraws", std::size_t{0});
      p.filter_redraws = jp.value("filter_redraws", std::size_t{0});
      b.parameters = p;
    }
    return b;
  } catch (const json::exception& e) {
    throw IngestionError(std::string("malformed bundle: ") + e.what());
  } catch (const ParameterError& e) {
    throw IngestionError(std::string("malformed bundle: ") + e.what());
  } catch (const ContractError& e) {
    throw IngestionError(std::string("malformed bundle: ") + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IngestionError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IngestionError("failed writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string result_to_json(const DeconvolutionResult& r, const ReweightedOptions& options,
                           std::optional<double> relative_error_value,
                           std::optional<std::uint64_t> seed) {
  json iters = json::array();
  for (const IterationRecord& it : r.iterations) {
    iters.push_back({{"objective", detail::number(it.objective)},
                     {"previous_objective", detail::number(it.previous_objective)},
                     {"l1_norm", detail::number(it.l1_norm)},
                     {"relative_change", detail::number(it.relative_change)},
                     {"gap", detail::number(it.gap)},
                     {"inner_iterations", it.inner_iterations}});
  }
  json doc = {{"schema_version", kReportSchemaVersion},
              {"kind", "gdeconv.result"},
              {"status", to_string(r.status)},
              {"g_tilde", detail::vector_to_json(r.g_tilde)},
              {"x_hat", detail::matrix_to_json(r.x_hat)},
              {"h_tilde", r.h_tilde.size() ? detail::vector_to_json(r.h_tilde) : json(nullptr)},
              {"h_hat", r.h_hat ? detail::vector_to_json(*r.h_hat) : json(nullptr)},
              {"iterations", iters},
              {"options",
               {{"delta", options.delta ? json(*options.delta) : json(nullptr)},
                {"delta_used", r.delta},
                {"eps", options.eps},
                {"max_iters", options.max_iters},
                {"inner_tol", options.inner_tol}}},
              {"e_X", relative_error_value ? detail::number(*relative_error_value) : json(nullptr)},
              {"seed", seed ? json(*seed) : json(nullptr)}};
  return doc.dump(2) + "\n";
}

std::string certificate_to_json(const CertificateReport& c) {
  json doc = {{"schema_version", kReportSchemaVersion},
              {"kind", "gdeconv.certificate"},
              {"c1_rank", c.c1_rank},
              {"c1_holds", c.c1_holds},
              {"c2_margin", detail::number(c.c2_margin)},
              {"c2_gamma", detail::number(c.c2_gamma)},
              {"c2_holds", c.c2_holds},
              {"certified", c.certified()}};
  return doc.dump(2) + "\n";
}

std::string ambiguity_to_json(const AmbiguityReport& r) {
  json pairs = json::array();
  for (const AmbiguousPair& p : r.pairs) {
    pairs.push_back({{"i", p.i}, {"j", p.j}, {"eigenvalue", p.eigenvalue}});
  }
  json doc = {{"schema_version", kReportSchemaVersion},
              {"kind", "gdeconv.ambiguity"},
              {"ambiguous", r.ambiguous()},
              {"pairs", pairs}};
  return doc.dump(2) + "\n";
}

std::string matrix_to_json(const Eigen::MatrixXd& m) { return detail::matrix_to_json(m).dump(); }

Eigen::MatrixXd matrix_from_json(const std::string& text) {
  try {
    return detail::matrix_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw IngestionError(std::string("malformed matrix: ") + e.what());
  }
}

}  // namespace gdeconv
