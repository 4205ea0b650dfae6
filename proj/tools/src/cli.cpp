#include "gdeconv_cli/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gdeconv/error.hpp"
#include "gdeconv/experiments.hpp"
#include "gdeconv/graphs.hpp"
#include "gdeconv/identifiability.hpp"
#include "gdeconv/rng.hpp"
#include "gdeconv/serialization.hpp"
#include "gdeconv/solver.hpp"
#include "gdeconv/spectral.hpp"

namespace gdeconv::cli {

namespace {

// Raised for flag combinations CLI11 cannot express; maps to exit 2.
struct UsageError : Error {
  using Error::Error;
};

std::size_t parse_count(const std::string& text, const std::string& what) {
  std::size_t v = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw UsageError("invalid " + what + " '" + text + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

// "S=5,15,25" or "P=2:20:2" (first:last:step, inclusive).
AxisRange parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw UsageError("axis '" + spec + "' must look like S=5,10,15");
  AxisRange range;
  try {
    range.axis = axis_from_string(spec.substr(0, eq));
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  const std::string values = spec.substr(eq + 1);
  if (values.find(':') != std::string::npos) {
    const auto parts = split(values, ':');
    if (parts.size() != 3) throw UsageError("axis range must be first:last:step");
    const std::size_t first = parse_count(parts[0], "axis value");
    const std::size_t last = parse_count(parts[1], "axis value");
    const std::size_t step = parse_count(parts[2], "axis step");
    if (step == 0 || last < first) throw UsageError("axis range '" + values + "' is empty");
    for (std::size_t v = first; v <= last; v += step) range.values.push_back(v);
  } else {
    for (const std::string& p : split(values, ',')) range.values.push_back(parse_count(p, "axis value"));
  }
  return range;
}

ShiftKind parse_shift(const std::string& name) {
  try {
    return shift_kind_from_string(name);
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
}

ShiftOperator make_shift(const Graph& g, ShiftKind kind) {
  if (kind == ShiftKind::adjacency) return adjacency_shift(g);
  if (kind == ShiftKind::normalized_adjacency) return normalized_adjacency(g);
  throw UsageError("--shift must be adjacency or normalized_adjacency");
}

ProblemBundle load_bundle(const std::string& path) {
  return bundle_from_json(read_text_file(path));
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

// --- gen-graph -------------------------------------------------------------

struct GenGraphArgs {
  std::size_t n = 50;
  double p = 0.3;
  std::uint64_t seed = 1;
  bool connected = false;
  std::string out;
};

int cmd_gen_graph(const GenGraphArgs& a, std::ostream& out) {
  Graph g;
  std::size_t attempt = 0;
  for (;; ++attempt) {
    g = erdos_renyi(a.n, a.p, stream_seed(a.seed, Stream::graph, attempt));
    if (!a.connected || is_connected(g)) break;
    if (attempt + 1 >= kGraphRedrawBudget) {
      throw Error(fmt::format("no connected graph within {} draws", kGraphRedrawBudget));
    }
  }
  std::ofstream file(a.out);
  if (!file) throw IngestionError("cannot open '" + a.out + "' for writing");
  write_edge_list(g, file);
  if (!file) throw IngestionError("failed writing '" + a.out + "'");
  fmt::print(out, "n={} edges={} connected={} redraws={}\n", g.n(), g.edges().size(),
             bool_str(is_connected(g)), attempt);
  return kExitOk;
}

// --- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::size_t n = 50;
  double p = 0.3;
  std::string graph;
  std::string shift = "normalized_adjacency";
  std::size_t order = 5;
  double alpha = 0.1;
  std::size_t sparsity = 10;
  std::size_t signals = 10;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const GraphSource source =
      a.graph.empty() ? GraphSource::random(a.n, a.p) : GraphSource::from_file(a.graph);
  const ShiftKind kind = parse_shift(a.shift);
  if (kind == ShiftKind::custom) throw UsageError("--shift must be adjacency or normalized_adjacency");
  const InstanceSpec spec{a.sparsity, a.signals, a.order, a.alpha};
  const Instance inst = generate_instance(source, kind, spec, a.seed);

  BundleParameters params;
  params.graph_source = a.graph.empty() ? "erdos_renyi" : "file";
  params.n = inst.graph.n();
  params.edge_probability = a.graph.empty() ? a.p : 0.0;
  params.graph_file = a.graph;
  params.order = a.order;
  params.alpha = a.alpha;
  params.sparsity = a.sparsity;
  params.signals = a.signals;
  params.seed = a.seed;
  params.graph_redraws = inst.graph_redraws;
  params.ambiguity_redraws = inst.ambiguity_redraws;
  params.filter_redraws = inst.filter_redraws;
  write_text_file(a.out, bundle_to_json(make_bundle(inst, params)));
  fmt::print(out, "wrote {} N={} P={} S={} L={} alpha={} ambiguous={}\n", a.out, inst.graph.n(),
             a.signals, a.sparsity, a.order, a.alpha, bool_str(inst.ambiguous));
  return kExitOk;
}

// --- solve -----------------------------------------------------------------

struct SolveArgs {
  std::string bundle;
  std::optional<double> delta;
  double eps = 1e-4;
  int max_iters = 10;
  double inner_tol = 1e-9;
  std::string out;
};

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  const ProblemBundle b = load_bundle(a.bundle);
  ReweightedOptions opts;
  opts.delta = a.delta;
  opts.eps = a.eps;
  opts.max_iters = a.max_iters;
  opts.inner_tol = a.inner_tol;
  opts.validate();

  const SpectralDecomposition dec = eig_sym(b.shift);
  const Eigen::MatrixXd z = khatri_rao_z(b.y, dec);
  DeconvolutionResult res = reweighted_l1(z, opts);

  const std::size_t order = b.parameters ? b.parameters->order : 0;
  if (order > 0 && res.h_tilde.size() > 0) {
    res.h_hat = recover_filter(res.g_tilde, dec, order).coeffs;
  }
  std::optional<double> ex;
  if (b.truth) ex = relative_error(res.x_hat, b.truth->x0.values());
  std::optional<std::uint64_t> seed;
  if (b.parameters) seed = b.parameters->seed;
  if (!a.out.empty()) write_text_file(a.out, result_to_json(res, opts, ex, seed));

  fmt::print(out, "e_X={} iters={} status={}\n", ex ? fmt::format("{:.6f}", *ex) : "n/a",
             res.iterations.size(), to_string(res.status));
  return res.status == SolveStatus::solver_failure ? kExitNumerical : kExitOk;
}

// --- certify ---------------------------------------------------------------

struct CertifyArgs {
  std::string bundle;
  std::string out;
};

int cmd_certify(const CertifyArgs& a, std::ostream& out) {
  const ProblemBundle b = load_bundle(a.bundle);
  if (!b.truth) throw IngestionError("bundle '" + a.bundle + "' has no ground truth");
  const std::vector<Eigen::Index> support = b.support ? *b.support : b.truth->x0.vec_support();
  const SpectralDecomposition dec = eig_sym(b.shift);
  const Eigen::MatrixXd z = khatri_rao_z(b.y, dec);
  const CertificateReport rep = certify(z, support, b.truth->g0);
  if (!a.out.empty()) write_text_file(a.out, certificate_to_json(rep));
  fmt::print(out, "C1={} C2={} margin={:.6g}\n", bool_str(rep.c1_holds), bool_str(rep.c2_holds),
             rep.c2_margin);
  return kExitOk;
}

// --- ambiguity -------------------------------------------------------------

struct AmbiguityArgs {
  std::string graph;
  std::string bundle;
  std::string shift = "normalized_adjacency";
  std::string out;
};

int cmd_ambiguity(const AmbiguityArgs& a, std::ostream& out) {
  AmbiguityReport rep;
  if (!a.bundle.empty()) {
    rep = detect_ambiguities(load_bundle(a.bundle).shift);
  } else {
    rep = detect_ambiguities(make_shift(load_edge_list(a.graph), parse_shift(a.shift)));
  }
  if (!a.out.empty()) write_text_file(a.out, ambiguity_to_json(rep));
  fmt::print(out, "ambiguous={} pairs={}\n", bool_str(rep.ambiguous()), rep.pairs.size());
  for (const AmbiguousPair& p : rep.pairs) {
    fmt::print(out, "pair ({},{}) lambda={:.6g}\n", p.i, p.j, p.eigenvalue);
  }
  return kExitOk;
}

// --- grid ------------------------------------------------------------------

struct GridArgs {
  std::size_t n = 50;
  double p = 0.3;
  std::string graph;
  std::string shift = "normalized_adjacency";
  std::string axis1 = "S=5:45:10";
  std::string axis2 = "P=2:20:2";
  std::size_t sparsity = 10;
  std::size_t signals = 10;
  std::size_t order = 5;
  double alpha = 0.1;
  std::size_t trials = 20;
  double threshold = 0.01;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::optional<double> delta;
  double eps = 1e-4;
  int max_iters = 10;
  double inner_tol = 1e-9;
  std::string out;
};

int cmd_grid(const GridArgs& a, std::ostream& out) {
  ExperimentConfig cfg;
  cfg.graph = a.graph.empty() ? GraphSource::random(a.n, a.p) : GraphSource::from_file(a.graph);
  cfg.shift_kind = parse_shift(a.shift);
  cfg.axis1 = parse_axis(a.axis1);
  cfg.axis2 = parse_axis(a.axis2);
  cfg.fixed = {a.sparsity, a.signals, a.order, a.alpha};
  cfg.trials = a.trials;
  cfg.success_threshold = a.threshold;
  cfg.base_seed = a.seed;
  cfg.workers = a.workers;
  cfg.solver.delta = a.delta;
  cfg.solver.eps = a.eps;
  cfg.solver.max_iters = a.max_iters;
  cfg.solver.inner_tol = a.inner_tol;
  cfg.validate();

  const ExperimentGrid grid = run_grid(cfg);
  persist(grid, a.out);
  std::size_t successes = 0, trials = 0, failures = 0;
  for (const CellResult& c : grid.cells) {
    successes += c.successes;
    trials += c.trials;
    failures += c.solver_failures;
  }
  fmt::print(out, "cells={} trials={} success_rate={:.4f} solver_failures={} csv={} json={}\n",
             grid.cells.size(), trials,
             trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0, failures,
             a.out, sidecar_path(a.out).string());
  return kExitOk;
}

// --- replay ----------------------------------------------------------------

struct ReplayArgs {
  std::string grid_result;
  std::string cell;
  std::size_t trial = 0;
  std::string bundle_out;
};

int cmd_replay(const ReplayArgs& a, std::ostream& out) {
  const ExperimentGrid grid = load_grid_json(a.grid_result);
  const ExperimentConfig& cfg = grid.config;

  std::map<std::string, std::size_t> coords;
  for (const std::string& kv : split(a.cell, ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--cell must look like S=25,P=10");
    coords[kv.substr(0, eq)] = parse_count(kv.substr(eq + 1), "cell value");
  }
  const std::string n1 = to_string(cfg.axis1.axis), n2 = to_string(cfg.axis2.axis);
  if (coords.size() != 2 || !coords.count(n1) || !coords.count(n2)) {
    throw UsageError("--cell must name exactly the grid axes " + n1 + " and " + n2);
  }
  const std::size_t v1 = coords[n1], v2 = coords[n2];
  const CellResult* cell = nullptr;
  for (const CellResult& c : grid.cells) {
    if (c.v1 == v1 && c.v2 == v2) cell = &c;
  }
  if (!cell) throw UsageError("cell " + a.cell + " is not part of the grid");
  if (a.trial >= cell->outcomes.size()) {
    throw UsageError(fmt::format("trial {} out of range (cell has {})", a.trial, cell->outcomes.size()));
  }
  const TrialOutcome& recorded = cell->outcomes[a.trial];

  const TrialOutcome now = run_trial(cfg, v1, v2, a.trial);
  if (!a.bundle_out.empty()) {
    const InstanceSpec spec = cfg.cell_spec(v1, v2);
    const Instance inst = generate_instance(cfg.graph, cfg.shift_kind, spec, now.seed);
    BundleParameters params;
    const bool file = cfg.graph.kind == GraphSource::Kind::file;
    params.graph_source = file ? "file" : "erdos_renyi";
    params.n = inst.graph.n();
    params.edge_probability = file ? 0.0 : cfg.graph.edge_probability;
    params.graph_file = file ? cfg.graph.path.string() : std::string();
    params.order = spec.order;
    params.alpha = spec.alpha;
    params.sparsity = spec.sparsity;
    params.signals = spec.signals;
    params.seed = now.seed;
    params.graph_redraws = inst.graph_redraws;
    params.ambiguity_redraws = inst.ambiguity_redraws;
    params.filter_redraws = inst.filter_redraws;
    write_text_file(a.bundle_out, bundle_to_json(make_bundle(inst, params)));
  }

  const bool same = now.seed == recorded.seed &&
                    (now.error == recorded.error ||
                     (std::isnan(now.error) && std::isnan(recorded.error)));
  fmt::print(out, "e_X={:.6f} iters={} status={} recorded_e_X={:.6f} seed={} match={}\n", now.error,
             now.iterations, to_string(now.status), recorded.error, now.seed, bool_str(same));
  if (!now.failure.empty()) fmt::print(out, "failure: {}\n", now.failure);
  return same ? kExitOk : kExitNumerical;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Blind identification of graph filters with sparse inputs", "gdeconv"};
  app.require_subcommand(1);

  GenGraphArgs gg;
  auto* gen = app.add_subcommand("gen-graph", "Draw an Erdos-Renyi graph and write an edge list");
  gen->add_option("--n", gg.n, "Number of nodes")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  gen->add_option("--p", gg.p, "Edge probability")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--seed", gg.seed, "RNG seed");
  gen->add_flag("--connected", gg.connected, "Redraw until connected");
  gen->add_option("--out", gg.out, "Output edge-list path")->required();

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Generate a ground-truth problem bundle");
  auto* sim_n = sim->add_option("--n", sa.n, "Number of nodes (random graph)")->check(CLI::PositiveNumber);
  auto* sim_p = sim->add_option("--p", sa.p, "Edge probability (random graph)")->check(CLI::Range(0.0, 1.0));
  auto* sim_g = sim->add_option("--graph", sa.graph, "Edge-list file instead of a random graph")
                    ->check(CLI::ExistingFile);
  sim_g->excludes(sim_n)->excludes(sim_p);
  sim->add_option("--shift", sa.shift, "adjacency or normalized_adjacency");
  sim->add_option("--L", sa.order, "Filter order")->check(CLI::PositiveNumber);
  sim->add_option("--alpha", sa.alpha, "Filter perturbation scale")->check(CLI::NonNegativeNumber);
  sim->add_option("--s", sa.sparsity, "Total nonzeros in X0")->check(CLI::PositiveNumber);
  sim->add_option("--P", sa.signals, "Number of signals")->check(CLI::PositiveNumber);
  sim->add_option("--seed", sa.seed, "RNG seed");
  sim->add_option("--out", sa.out, "Output bundle path")->required();

  SolveArgs so;
  auto* solve = app.add_subcommand("solve", "Run iteratively reweighted l1 on a bundle");
  solve->add_option("--bundle", so.bundle, "Problem bundle")->required()->check(CLI::ExistingFile);
  solve->add_option("--delta", so.delta, "Reweighting smoothing (default: from first pass)")
      ->check(CLI::PositiveNumber);
  solve->add_option("--eps", so.eps, "Relative-change stopping threshold")->check(CLI::PositiveNumber);
  solve->add_option("--max-iters", so.max_iters, "Maximum reweighting passes")
      ->check(CLI::PositiveNumber);
  solve->add_option("--inner-tol", so.inner_tol, "Inner LP duality-gap tolerance")
      ->check(CLI::PositiveNumber);
  solve->add_option("--out", so.out, "Write the result JSON here");

  CertifyArgs ca;
  auto* cert = app.add_subcommand("certify", "Check the exact-recovery certificate (C1, C2)");
  cert->add_option("--bundle", ca.bundle, "Problem bundle with ground truth")
      ->required()
      ->check(CLI::ExistingFile);
  cert->add_option("--out", ca.out, "Write the certificate JSON here");

  AmbiguityArgs aa;
  auto* amb = app.add_subcommand("ambiguity", "Report node pairs with u^(i,j) eigenvectors");
  auto* amb_g = amb->add_option("--graph", aa.graph, "Edge-list file")->check(CLI::ExistingFile);
  auto* amb_b = amb->add_option("--bundle", aa.bundle, "Use the shift stored in a bundle")
                    ->check(CLI::ExistingFile);
  amb_g->excludes(amb_b);
  amb->add_option("--shift", aa.shift, "adjacency or normalized_adjacency (with --graph)");
  amb->add_option("--out", aa.out, "Write the report JSON here");

  GridArgs ga;
  auto* grid = app.add_subcommand("grid", "Run a recovery-rate grid");
  auto* grid_n = grid->add_option("--n", ga.n, "Number of nodes (random graph)")->check(CLI::PositiveNumber);
  auto* grid_p = grid->add_option("--p", ga.p, "Edge probability")->check(CLI::Range(0.0, 1.0));
  grid->add_option("--graph", ga.graph, "Edge-list file instead of random graphs")
      ->check(CLI::ExistingFile)
      ->excludes(grid_n)
      ->excludes(grid_p);
  grid->add_option("--shift", ga.shift, "adjacency or normalized_adjacency");
  grid->add_option("--axis1", ga.axis1, "First axis, e.g. S=5,15,25 or S=5:45:10");
  grid->add_option("--axis2", ga.axis2, "Second axis, e.g. P=2:20:2");
  grid->add_option("--S", ga.sparsity, "S when not on an axis")->check(CLI::PositiveNumber);
  grid->add_option("--P", ga.signals, "P when not on an axis")->check(CLI::PositiveNumber);
  grid->add_option("--L", ga.order, "L when not on an axis")->check(CLI::PositiveNumber);
  grid->add_option("--alpha", ga.alpha, "Filter perturbation scale")->check(CLI::NonNegativeNumber);
  grid->add_option("--trials", ga.trials, "Trials per cell")->check(CLI::PositiveNumber);
  grid->add_option("--threshold", ga.threshold, "Success threshold on e_X")->check(CLI::PositiveNumber);
  grid->add_option("--seed", ga.seed, "Base seed");
  grid->add_option("--workers", ga.workers, "Worker threads")->check(CLI::PositiveNumber);
  grid->add_option("--delta", ga.delta, "Reweighting smoothing")->check(CLI::PositiveNumber);
  grid->add_option("--eps", ga.eps, "Relative-change stopping threshold")->check(CLI::PositiveNumber);
  grid->add_option("--max-iters", ga.max_iters, "Maximum reweighting passes")->check(CLI::PositiveNumber);
  grid->add_option("--inner-tol", ga.inner_tol, "Inner LP tolerance")->check(CLI::PositiveNumber);
  grid->add_option("--out", ga.out, "CSV path; the JSON sidecar goes next to it")->required();

  ReplayArgs ra;
  auto* replay = app.add_subcommand("replay", "Re-run one recorded grid trial");
  replay->add_option("--grid-result", ra.grid_result, "Grid JSON sidecar")
      ->required()
      ->check(CLI::ExistingFile);
  replay->add_option("--cell", ra.cell, "Cell coordinates, e.g. S=25,P=10")->required();
  replay->add_option("--trial", ra.trial, "Trial index within the cell")->required();
  replay->add_option("--bundle-out", ra.bundle_out, "Also write the trial's problem bundle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen_graph(gg, out);
    if (sim->parsed()) return cmd_simulate(sa, out);
    if (solve->parsed()) return cmd_solve(so, out);
    if (cert->parsed()) return cmd_certify(ca, out);
    if (amb->parsed()) {
      if (aa.graph.empty() && aa.bundle.empty()) throw UsageError("ambiguity needs --graph or --bundle");
      return cmd_ambiguity(aa, out);
    }
    if (grid->parsed()) return cmd_grid(ga, out);
    if (replay->parsed()) return cmd_replay(ra, out);
  } catch (const NumericalError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace gdeconv::cli
