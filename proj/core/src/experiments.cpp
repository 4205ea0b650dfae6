#include "gdeconv/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>
#include <utility>

#include "gdeconv/error.hpp"
#include "gdeconv/rng.hpp"
#include "json_io.hpp"

namespace gdeconv {

namespace {

constexpr const char* kCodeVersion = "gdeconv 0.1.0";

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

ShiftOperator make_shift(const Graph& g, ShiftKind kind) {
  switch (kind) {
    case ShiftKind::adjacency:
      return adjacency_shift(g);
    case ShiftKind::normalized_adjacency:
      return normalized_adjacency(g);
    case ShiftKind::custom:
      break;
  }
  throw ParameterError("experiments support adjacency and normalized_adjacency shifts only");
}

}  // namespace

Instance generate_instance(const GraphSource& source, ShiftKind shift_kind,
                           const InstanceSpec& spec, std::uint64_t seed, std::size_t graph_budget) {
  Instance inst;
  inst.seed = seed;

  if (source.kind == GraphSource::Kind::file) {
    inst.graph = load_edge_list(source.path);
    if (!is_connected(inst.graph)) {
      throw ParameterError("graph file '" + source.path.string() + "' is not connected");
    }
    inst.shift = make_shift(inst.graph, shift_kind);
    inst.ambiguous = detect_ambiguities(inst.shift).ambiguous();
  } else {
    bool found = false;
    for (std::size_t attempt = 0; attempt < graph_budget; ++attempt) {
      Graph g = erdos_renyi(source.n, source.edge_probability,
                            stream_seed(seed, Stream::graph, attempt));
      if (!is_connected(g)) {
        ++inst.graph_redraws;
        continue;
      }
      ShiftOperator s = make_shift(g, shift_kind);
      if (detect_ambiguities(s).ambiguous()) {
        ++inst.ambiguity_redraws;
        continue;
      }
      inst.graph = std::move(g);
      inst.shift = std::move(s);
      found = true;
      break;
    }
    if (!found) {
      throw Error("no connected, unambiguous graph within " + std::to_string(graph_budget) +
                  " draws (" + std::to_string(inst.graph_redraws) + " disconnected, " +
                  std::to_string(inst.ambiguity_redraws) + " ambiguous)");
    }
  }

  inst.dec = eig_sym(inst.shift);
  const std::size_t n = inst.graph.n();
  const SparseInputMatrix x0 =
      fixed_sparsity_inputs(n, spec.signals, spec.sparsity, stream_seed(seed, Stream::inputs));
  const FilterDraw draw =
      make_filter(spec.order, spec.alpha, stream_seed(seed, Stream::filter), inst.dec);
  inst.filter_redraws = draw.redraws;
  inst.truth = synthesize(x0, draw.filter, inst.dec);
  return inst;
}

const char* to_string(Axis axis) noexcept {
  switch (axis) {
    case Axis::S:
      return "S";
    case Axis::P:
      return "P";
    case Axis::L:
      return "L";
  }
  return "S";
}

Axis axis_from_string(const std::string& name) {
  if (name == "S") return Axis::S;
  if (name == "P") return Axis::P;
  if (name == "L") return Axis::L;
  throw ParameterError("unknown grid axis '" + name + "' (expected S, P or L)");
}

InstanceSpec ExperimentConfig::cell_spec(std::size_t v1, std::size_t v2) const {
  InstanceSpec spec = fixed;
  auto set = [&spec](Axis a, std::size_t v) {
    switch (a) {
      case Axis::S:
        spec.sparsity = v;
        break;
      case Axis::P:
        spec.signals = v;
        break;
      case Axis::L:
        spec.order = v;
        break;
    }
  };
  set(axis1.axis, v1);
  set(axis2.axis, v2);
  return spec;
}

void ExperimentConfig::validate() const {
  if (axis1.values.empty() || axis2.values.empty()) throw ParameterError("grid axes must be non-empty");
  if (axis1.axis == axis2.axis) throw ParameterError("grid axes must differ");
  if (trials < 1) throw ParameterError("trials must be at least 1");
  if (!(success_threshold > 0.0)) throw ParameterError("success threshold must be positive");
  if (workers < 1) throw ParameterError("workers must be at least 1");
  if (!(fixed.alpha >= 0.0)) throw ParameterError("alpha must be non-negative");
  solver.validate();
  if (graph.kind == GraphSource::Kind::erdos_renyi) {
    if (graph.n < 2) throw ParameterError("random graphs need n >= 2");
    if (!(graph.edge_probability > 0.0 && graph.edge_probability <= 1.0)) {
      throw ParameterError("edge probability must lie in (0, 1]");
    }
  } else if (graph.path.empty()) {
    throw ParameterError("graph file path is empty");
  }
  if (shift_kind == ShiftKind::custom) {
    throw ParameterError("experiments support adjacency and normalized_adjacency shifts only");
  }
  const std::size_t n = graph.kind == GraphSource::Kind::erdos_renyi ? graph.n : 0;
  for (std::size_t v1 : axis1.values) {
    for (std::size_t v2 : axis2.values) {
      const InstanceSpec s = cell_spec(v1, v2);
      if (s.sparsity < 1 || s.signals < 1 || s.order < 1) {
        throw ParameterError("S, P and L must be at least 1");
      }
      if (n > 0 && (s.sparsity > n * s.signals || s.order > n)) {
        throw ParameterError("cell (" + std::to_string(v1) + "," + std::to_string(v2) +
                             ") needs S <= N*P and L <= N");
      }
    }
  }
}

std::uint64_t trial_seed(const ExperimentConfig& cfg, std::size_t v1, std::size_t v2,
                         std::size_t trial) {
  return derive_seed({cfg.base_seed, static_cast<std::uint64_t>(cfg.axis1.axis), v1,
                      static_cast<std::uint64_t>(cfg.axis2.axis), v2, trial});
}

TrialOutcome run_trial(const ExperimentConfig& cfg, std::size_t v1, std::size_t v2,
                       std::size_t trial) {
  TrialOutcome out;
  out.trial = trial;
  out.seed = trial_seed(cfg, v1, v2, trial);
  out.error = std::numeric_limits<double>::quiet_NaN();
  try {
    const Instance inst =
        generate_instance(cfg.graph, cfg.shift_kind, cfg.cell_spec(v1, v2), out.seed);
    out.graph_redraws = inst.graph_redraws;
    out.ambiguity_redraws = inst.ambiguity_redraws;
    out.filter_redraws = inst.filter_redraws;
    const Eigen::MatrixXd z = khatri_rao_z(inst.truth.y, inst.dec);
    const DeconvolutionResult res = reweighted_l1(z, cfg.solver);
    out.status = res.status;
    out.iterations = static_cast<int>(res.iterations.size());
    out.error = relative_error(res.x_hat, inst.truth.x0.values());
    out.success = out.error < cfg.success_threshold;
  } catch (const std::exception& e) {
    out.failure = e.what();
    out.status = SolveStatus::solver_failure;
    out.success = false;
  }
  return out;
}

ExperimentGrid run_grid(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();

  struct Task {
    std::size_t cell, v1, v2, trial;
  };
  std::vector<Task> tasks;
  ExperimentGrid grid;
  grid.config = cfg;
  grid.code_version = kCodeVersion;
  for (std::size_t v1 : cfg.axis1.values) {
    for (std::size_t v2 : cfg.axis2.values) {
      const std::size_t cell = grid.cells.size();
      CellResult c;
      c.v1 = v1;
      c.v2 = v2;
      c.trials = cfg.trials;
      c.outcomes.resize(cfg.trials);
      grid.cells.push_back(std::move(c));
      for (std::size_t t = 0; t < cfg.trials; ++t) tasks.push_back({cell, v1, v2, t});
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next.fetch_add(1); k < tasks.size(); k = next.fetch_add(1)) {
      const Task& t = tasks[k];
      grid.cells[t.cell].outcomes[t.trial] = run_trial(cfg, t.v1, t.v2, t.trial);
    }
  };
  const std::size_t nthreads = std::min(cfg.workers, std::max<std::size_t>(tasks.size(), 1));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(nthreads);
    for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  }

  for (CellResult& c : grid.cells) {
    double sum = 0.0;
    std::size_t finite = 0;
    for (const TrialOutcome& o : c.outcomes) {
      if (o.success) ++c.successes;
      if (o.status == SolveStatus::solver_failure) ++c.solver_failures;
      c.ambiguity_redraws += o.ambiguity_redraws;
      if (std::isfinite(o.error)) {
        sum += o.error;
        ++finite;
      }
    }
    c.success_rate = static_cast<double>(c.successes) / static_cast<double>(c.trials);
    c.mean_error = finite ? sum / static_cast<double>(finite)
                          : std::numeric_limits<double>::quiet_NaN();
  }

  grid.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return grid;
}

namespace {

bool same_except_alpha(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.graph.kind == b.graph.kind && a.graph.n == b.graph.n &&
         a.graph.edge_probability == b.graph.edge_probability && a.graph.path == b.graph.path &&
         a.shift_kind == b.shift_kind && a.axis1.axis == b.axis1.axis &&
         a.axis1.values == b.axis1.values && a.axis2.axis == b.axis2.axis &&
         a.axis2.values == b.axis2.values && a.fixed.sparsity == b.fixed.sparsity &&
         a.fixed.signals == b.fixed.signals && a.fixed.order == b.fixed.order &&
         a.trials == b.trials && a.success_threshold == b.success_threshold &&
         a.base_seed == b.base_seed && a.solver.delta == b.solver.delta &&
         a.solver.eps == b.solver.eps && a.solver.max_iters == b.solver.max_iters &&
         a.solver.inner_tol == b.solver.inner_tol;
}

AlphaSummary summarize(const ExperimentGrid& g) {
  AlphaSummary s;
  s.alpha = g.config.fixed.alpha;
  s.cells = g.cells.size();
  double total = 0.0;
  for (const CellResult& c : g.cells) {
    total += c.success_rate;
    s.trials += c.trials;
  }
  s.mean_success_rate = s.cells ? total / static_cast<double>(s.cells) : 0.0;
  return s;
}

}  // namespace

std::vector<AlphaSummary> compare_alpha(const std::vector<ExperimentGrid>& grids) {
  std::vector<AlphaSummary> out;
  for (const ExperimentGrid& g : grids) {
    if (!same_except_alpha(grids.front().config, g.config)) {
      throw ParameterError("compare_alpha: grids differ in more than alpha");
    }
    out.push_back(summarize(g));
  }
  return out;
}

std::vector<AlphaSummary> compare_alpha(const std::vector<ExperimentConfig>& configs) {
  for (const ExperimentConfig& c : configs) {
    if (!same_except_alpha(configs.front(), c)) {
      throw ParameterError("compare_alpha: configs differ in more than alpha");
    }
  }
  std::vector<ExperimentGrid> grids;
  grids.reserve(configs.size());
  for (const ExperimentConfig& c : configs) grids.push_back(run_grid(c));
  return compare_alpha(grids);
}

std::string grid_csv(const ExperimentGrid& grid) {
  std::string out;
  out += to_string(grid.config.axis1.axis);
  out += ',';
  out += to_string(grid.config.axis2.axis);
  out += ",success_rate,mean_error,trials,solver_failures,ambiguity_redraws\n";
  for (const CellResult& c : grid.cells) {
    out += std::to_string(c.v1) + ',' + std::to_string(c.v2) + ',' +
           format_double(c.success_rate) + ',' + format_double(c.mean_error) + ',' +
           std::to_string(c.trials) + ',' + std::to_string(c.solver_failures) + ',' +
           std::to_string(c.ambiguity_redraws) + '\n';
  }
  return out;
}

namespace {

using detail::json;

json config_to_json(const ExperimentConfig& c) {
  json graph = {{"kind", c.graph.kind == GraphSource::Kind::file ? "file" : "erdos_renyi"}};
  if (c.graph.kind == GraphSource::Kind::file) {
    graph["path"] = c.graph.path.string();
  } else {
    graph["n"] = c.graph.n;
    graph["edge_probability"] = c.graph.edge_probability;
  }
  return {
      {"graph", graph},
      {"shift", to_string(c.shift_kind)},
      {"axis1", {{"name", to_string(c.axis1.axis)}, {"values", c.axis1.values}}},
      {"axis2", {{"name", to_string(c.axis2.axis)}, {"values", c.axis2.values}}},
      {"fixed",
       {{"S", c.fixed.sparsity}, {"P", c.fixed.signals}, {"L", c.fixed.order},
        {"alpha", c.fixed.alpha}}},
      {"trials", c.trials},
      {"success_threshold", c.success_threshold},
      {"base_seed", c.base_seed},
      {"solver",
       {{"delta", c.solver.delta ? json(*c.solver.delta) : json(nullptr)},
        {"eps", c.solver.eps},
        {"max_iters", c.solver.max_iters},
        {"inner_tol", c.solver.inner_tol}}},
  };
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  const json& g = j.at("graph");
  if (g.at("kind").get<std::string>() == "file") {
    c.graph = GraphSource::from_file(g.at("path").get<std::string>());
  } else {
    c.graph = GraphSource::random(g.at("n").get<std::size_t>(),
                                  g.at("edge_probability").get<double>());
  }
  c.shift_kind = shift_kind_from_string(j.at("shift").get<std::string>());
  c.axis1 = {axis_from_string(j.at("axis1").at("name").get<std::string>()),
             j.at("axis1").at("values").get<std::vector<std::size_t>>()};
  c.axis2 = {axis_from_string(j.at("axis2").at("name").get<std::string>()),
             j.at("axis2").at("values").get<std::vector<std::size_t>>()};
  const json& f = j.at("fixed");
  c.fixed.sparsity = f.at("S").get<std::size_t>();
  c.fixed.signals = f.at("P").get<std::size_t>();
  c.fixed.order = f.at("L").get<std::size_t>();
  c.fixed.alpha = f.at("alpha").get<double>();
  c.trials = j.at("trials").get<std::size_t>();
  c.success_threshold = j.at("success_threshold").get<double>();
  c.base_seed = j.at("base_seed").get<std::uint64_t>();
  const json& s = j.at("solver");
  if (!s.at("delta").is_null()) c.solver.delta = s.at("delta").get<double>();
  c.solver.eps = s.at("eps").get<double>();
  c.solver.max_iters = s.at("max_iters").get<int>();
  c.solver.inner_tol = s.at("inner_tol").get<double>();
  return c;
}

}  // namespace

std::string grid_json(const ExperimentGrid& grid) {
  json cells = json::array();
  const char* a1 = to_string(grid.config.axis1.axis);
  const char* a2 = to_string(grid.config.axis2.axis);
  for (const CellResult& c : grid.cells) {
    json trials = json::array();
    for (const TrialOutcome& o : c.outcomes) {
      json t = {{"trial", o.trial},
                {"seed", o.seed},
                {"e_X", detail::number(o.error)},
                {"success", o.success},
                {"status", to_string(o.status)},
                {"iterations", o.iterations},
                {"graph_redraws", o.graph_redraws},
                {"ambiguity_redraws", o.ambiguity_redraws},
                {"filter_redraws", o.filter_redraws}};
      if (!o.failure.empty()) t["failure"] = o.failure;
      trials.push_back(std::move(t));
    }
    cells.push_back({{a1, c.v1},
                     {a2, c.v2},
                     {"success_rate", c.success_rate},
                     {"mean_error", detail::number(c.mean_error)},
                     {"trials", c.trials},
                     {"solver_failures", c.solver_failures},
                     {"ambiguity_redraws", c.ambiguity_redraws},
                     {"outcomes", std::move(trials)}});
  }
  json doc = {{"schema_version", kGridSchemaVersion},
              {"kind", "gdeconv.grid"},
              {"config", config_to_json(grid.config)},
              {"cells", std::move(cells)},
              {"metadata",
               {{"code_version", grid.code_version},
                {"elapsed_seconds", grid.elapsed_seconds},
                {"workers", grid.config.workers}}}};
  return doc.dump(2) + "\n";
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".json");
  return p;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IngestionError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IngestionError("failed writing '" + path.string() + "'");
}

}  // namespace

void persist(const ExperimentGrid& grid, const std::filesystem::path& csv_path) {
  write_file(csv_path, grid_csv(grid));
  write_file(sidecar_path(csv_path), grid_json(grid));
}

ExperimentGrid load_grid_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open grid result '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    const json doc = json::parse(buf.str());
    if (doc.at("schema_version").get<int>() != kGridSchemaVersion) {
      throw IngestionError("unsupported grid schema_version");
    }
    ExperimentGrid grid;
    grid.config = config_from_json(doc.at("config"));
    const json& meta = doc.at("metadata");
    grid.code_version = meta.value("code_version", std::string());
    grid.elapsed_seconds = meta.value("elapsed_seconds", 0.0);
    grid.config.workers = meta.value("workers", std::size_t{1});
    const std::string a1 = to_string(grid.config.axis1.axis);
    const std::string a2 = to_string(grid.config.axis2.axis);
    for (const json& jc : doc.at("cells")) {
      CellResult c;
      c.v1 = jc.at(a1).get<std::size_t>();
      c.v2 = jc.at(a2).get<std::size_t>();
      c.success_rate = jc.at("success_rate").get<double>();
      c.mean_error = detail::to_double(jc.at("mean_error"));
      c.trials = jc.at("trials").get<std::size_t>();
      c.solver_failures = jc.at("solver_failures").get<std::size_t>();
      c.ambiguity_redraws = jc.at("ambiguity_redraws").get<std::size_t>();
      for (const json& jt : jc.at("outcomes")) {
        TrialOutcome o;
        o.trial = jt.at("trial").get<std::size_t>();
        o.seed = jt.at("seed").get<std::uint64_t>();
        o.error = detail::to_double(jt.at("e_X"));
        o.success = jt.at("success").get<bool>();
        o.status = solve_status_from_string(jt.at("status").get<std::string>());
        o.iterations = jt.at("iterations").get<int>();
        o.graph_redraws = jt.at("graph_redraws").get<std::size_t>();
        o.ambiguity_redraws = jt.at("ambiguity_redraws").get<std::size_t>();
        o.filter_redraws = jt.at("filter_redraws").get<std::size_t>();
        o.failure = jt.value("failure", std::string());
        if (o.success) ++c.successes;
        c.outcomes.push_back(std::move(o));
      }
      grid.cells.push_back(std::move(c));
    }
    return grid;
  } catch (const json::exception& e) {
    throw IngestionError(path.string() + ": malformed grid result: " + e.what());
  }
}

}  // namespace gdeconv
