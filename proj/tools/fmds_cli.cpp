#include "fmds_cli.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "fmds/fmds.hpp"
#include "fmds/io.hpp"
#include "fmds/svg.hpp"

namespace fmds::cli {
namespace {

namespace fs = std::filesystem;
using io::Json;

// ---- generator parameters ----

struct GeneratorFlags {
  std::optional<std::string> spec_file;
  std::map<std::string, std::string> values;  // key -> raw value, from flags
};

const std::vector<std::string>& generator_keys() {
  static const std::vector<std::string> keys{
      "kind",  "n_points", "alpha_tilde", "k_neighbors", "seed",  "t_min",     "t_max",       "width",
      "hole_t_fraction", "hole_w_fraction", "x_min", "x_max", "y_min", "y_max", "nu", "depth", "down_weight",
      "up_weight", "lateral_weight"};
  return keys;
}

std::string dashed(std::string key) {
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  return key;
}

void add_generator_options(CLI::App& app, GeneratorFlags& flags) {
  app.add_option("--spec", flags.spec_file, "Dataset spec file (key = value per line)");
  for (const auto& key : generator_keys()) {
    app.add_option_function<std::string>(
        "--" + dashed(key), [&flags, key](const std::string& v) { flags.values[key] = v; },
        "Overrides '" + key + "' from the spec");
  }
}

double number_value(const io::ConfigEntry& e, const std::string& where) {
  try {
    return io::parse_double(e.value, where);
  } catch (const IoError&) {
    throw std::invalid_argument(where + ": '" + e.key + "' expects a number, got '" + e.value + "'");
  }
}

long long integer_value(const io::ConfigEntry& e, const std::string& where) {
  try {
    return io::parse_integer(e.value, where);
  } catch (const IoError&) {
    throw std::invalid_argument(where + ": '" + e.key + "' expects an integer, got '" + e.value + "'");
  }
}

/// Spec file entries first, then flag overrides. The kind is resolved
/// before anything else so that later keys start from its defaults.
GeneratorSpec resolve_generator_spec(const GeneratorFlags& flags) {
  std::vector<io::ConfigEntry> entries;
  std::string source = "spec";
  if (flags.spec_file) {
    source = *flags.spec_file;
    entries = io::parse_config(io::read_text(*flags.spec_file), source);
  }
  for (const auto& [k, v] : flags.values) entries.push_back({k, v, 0});

  DatasetKind kind = DatasetKind::swiss_roll;
  for (const auto& e : entries) {
    if (e.key != "kind") continue;
    const std::string where = e.line ? source + ":" + std::to_string(e.line) : "--kind";
    try {
      kind = parse_dataset_kind(e.value);
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument(where + ": unknown dataset kind '" + e.value + "'");
    }
  }
  GeneratorSpec spec = GeneratorSpec::defaults(kind);

  using Target = std::variant<double*, Index*, int*, std::uint64_t*>;
  const std::map<std::string, Target> targets{
      {"n_points", &spec.n_points},         {"alpha_tilde", &spec.alpha_tilde},
      {"k_neighbors", &spec.k_neighbors},   {"seed", &spec.seed},
      {"t_min", &spec.t_min},               {"t_max", &spec.t_max},
      {"width", &spec.width},               {"hole_t_fraction", &spec.hole_t_fraction},
      {"hole_w_fraction", &spec.hole_w_fraction}, {"x_min", &spec.x_min},
      {"x_max", &spec.x_max},               {"y_min", &spec.y_min},
      {"y_max", &spec.y_max},               {"nu", &spec.nu},
      {"depth", &spec.depth},               {"down_weight", &spec.down_weight},
      {"up_weight", &spec.up_weight},       {"lateral_weight", &spec.lateral_weight}};
  for (const auto& e : entries) {
    const std::string where = e.line ? source + ":" + std::to_string(e.line) : "--" + dashed(e.key);
    if (e.key == "kind") continue;
    const auto it = targets.find(e.key);
    if (it == targets.end()) throw std::invalid_argument(where + ": unknown key '" + e.key + "'");
    std::visit(
        [&](auto* p) {
          using T = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<T, double>) {
            *p = number_value(e, where);
          } else {
            const long long v = integer_value(e, where);
            if (v < 0) throw std::invalid_argument(where + ": '" + e.key + "' must be nonnegative");
            *p = static_cast<T>(v);
          }
        },
        it->second);
  }
  spec.validate();
  return spec;
}

Json spec_json(const GeneratorSpec& s) {
  Json j;
  j["kind"] = to_string(s.kind);
  j["seed"] = s.seed;
  if (s.kind == DatasetKind::tree) {
    j["depth"] = s.depth;
    j["down_weight"] = s.down_weight;
    j["up_weight"] = s.up_weight;
    j["lateral_weight"] = s.lateral_weight;
    return j;
  }
  j["n_points"] = s.n_points;
  j["alpha_tilde"] = s.alpha_tilde;
  j["k_neighbors"] = s.k_neighbors;
  if (s.kind == DatasetKind::swiss_roll || s.kind == DatasetKind::swiss_roll_hole) {
    j["t_min"] = s.t_min;
    j["t_max"] = s.t_max;
    j["width"] = s.width;
  }
  if (s.kind == DatasetKind::swiss_roll_hole) {
    j["hole_t_fraction"] = s.hole_t_fraction;
    j["hole_w_fraction"] = s.hole_w_fraction;
  }
  if (s.kind == DatasetKind::current_map || s.kind == DatasetKind::river) {
    j["domain"] = {s.x_min, s.x_max, s.y_min, s.y_max};
  }
  if (s.kind == DatasetKind::current_map) j["nu"] = s.nu;
  return j;
}

struct GeneratedFiles {
  fs::path data;       // points.csv or edges.csv
  fs::path colors;     // intrinsic.csv or nodes.csv
  fs::path metadata;
  bool is_graph = false;
  std::optional<GeneratedCloud> cloud;
  std::optional<GeneratedGraph> graph;
};

/// Everything is computed before the first file is written, so a failing
/// spec leaves the output directory untouched.
GeneratedFiles write_dataset(const GeneratorSpec& spec, const fs::path& dir) {
  GeneratedFiles files;
  files.metadata = dir / "metadata.json";
  Json meta;
  meta["spec"] = spec_json(spec);
  if (spec.kind == DatasetKind::tree) {
    const GeneratedGraph& g = files.graph.emplace(gen_tree(spec));
    meta["n_nodes"] = g.graph.size();
    meta["n_edges"] = g.graph.edges().size();
    files.is_graph = true;
    files.data = dir / "edges.csv";
    files.colors = dir / "nodes.csv";
    const std::string edges = io::format_edges(g.graph), nodes = io::format_node_depths(g.depth);
    io::write_text_atomic(files.data, edges);
    io::write_text_atomic(files.colors, nodes);
  } else {
    const GeneratedCloud& c = files.cloud.emplace(generate_cloud(spec));
    meta["n_points"] = c.cloud.size();
    meta["alpha_tilde"] = c.cloud.alpha_tilde();
    meta["k_neighbors"] = spec.k_neighbors;
    meta["intrinsic_columns"] = spec.kind == DatasetKind::swiss_roll || spec.kind == DatasetKind::swiss_roll_hole
                                    ? Json::array({"arc_length", "width"})
                                    : Json::array({"x1", "x2"});
    if (spec.kind == DatasetKind::swiss_roll_hole) {
      meta["removed"] = spec.n_points - c.cloud.size();
      meta["boundary"] = c.boundary.indices();
    }
    files.data = dir / "points.csv";
    files.colors = dir / "intrinsic.csv";
    const std::string points = io::format_points(c.cloud), intrinsic = io::format_matrix(c.intrinsic);
    io::write_text_atomic(files.data, points);
    io::write_text_atomic(files.colors, intrinsic);
  }
  io::write_json(files.metadata, meta);
  return files;
}

// ---- shared steps ----

/// Uniform weights. Unreachable pairs are rejected rather than imputed;
/// pass explicit weights that zero them out instead.
WeightMatrix default_weights(const DissimilarityMatrix& d) {
  if (!d.is_finite()) {
    throw std::invalid_argument("dissimilarity matrix has unreachable (inf) pairs; give --weights that zero them");
  }
  return WeightMatrix::uniform(d.size());
}

BoundarySet boundary_from_metadata(const fs::path& path, Index n) {
  const Json meta = io::read_json(path);
  if (!meta.contains("boundary")) throw IoError(path.string() + ": no 'boundary' field");
  return BoundarySet(meta.at("boundary").get<std::vector<Index>>(), n);
}

struct EmbedFlags {
  Index dim = 3;
  double alpha = 0.5;
  int max_iters = 500;
  double tol = 1e-7;
  std::string solver = "auto";
  std::string init = "classical";
  std::uint64_t seed = 0;
};

void add_embed_options(CLI::App& app, EmbedFlags& f) {
  app.add_option("--dim", f.dim, "Embedding dimension")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--alpha", f.alpha, "Drift norm, drift along the last axis")->check(CLI::Range(0.0, 0.999999))
      ->capture_default_str();
  app.add_option("--max-iters", f.max_iters, "Iteration cap")->check(CLI::NonNegativeNumber)->capture_default_str();
  app.add_option("--tol", f.tol, "Relative stress decrease tolerance")->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--solver", f.solver, "Linear solver")->check(CLI::IsMember({"auto", "direct", "iterative"}))
      ->capture_default_str();
  app.add_option("--init", f.init, "Initialization")
      ->check(CLI::IsMember({"classical", "symmetric_plus_one", "random"}))
      ->capture_default_str();
  app.add_option("--init-seed", f.seed, "Seed for random initialization")->capture_default_str();
}

SolverConfig solver_config(const EmbedFlags& f) {
  SolverConfig c;
  c.max_iters = f.max_iters;
  c.rel_stress_tol = f.tol;
  c.seed = f.seed;
  c.linear_solver = f.solver == "direct"      ? LinearSolverKind::direct
                    : f.solver == "iterative" ? LinearSolverKind::iterative
                                              : LinearSolverKind::automatic;
  c.init = f.init == "symmetric_plus_one" ? Initialization::symmetric_plus_one
           : f.init == "random"           ? Initialization::random
                                          : Initialization::classical;
  return c;
}

Json report_json(const SolveOutput& out, const RandersSpace& space, const DissimilarityMatrix& d,
                 const WeightMatrix& w, const EmbedFlags& f) {
  Json j;
  j["n_points"] = d.size();
  j["dim"] = space.dim();
  j["alpha"] = space.alpha();
  j["omega"] = std::vector<double>(space.omega().data(), space.omega().data() + space.dim());
  j["solver"] = f.solver;
  j["init"] = f.init;
  j["seed"] = f.seed;
  j["iterations_run"] = out.report.iterations_run;
  j["converged"] = out.report.converged;
  j["final_stress"] = out.report.final_stress;
  j["normalized_stress"] = normalized_stress(out.embedding, d, w, space);
  j["linear_fallbacks"] = out.report.linear_fallbacks;
  j["stress_history"] = io::vector_to_json(out.report.stress_history);
  return j;
}

SolveOutput embed(const DissimilarityMatrix& d, const WeightMatrix& w, const EmbedFlags& f, RandersSpace& space) {
  space = RandersSpace::along_last_axis(f.dim, f.alpha);
  return run_finsler_smacof(d, w, space, solver_config(f));
}

std::optional<Vector> read_colors(const fs::path& path, Index column, Index n) {
  const std::string text = io::read_text(path);
  Vector values(n);
  if (text.rfind("node,depth", 0) == 0) {
    const auto lines = io::lines_of(text);
    if (static_cast<Index>(lines.size()) != n + 1) throw IoError(path.string() + ": node count differs from embedding");
    for (Index i = 0; i < n; ++i) {
      const auto fields = io::split_fields(lines[static_cast<std::size_t>(i + 1)]);
      if (fields.size() != 2) throw IoError(path.string() + ":" + std::to_string(i + 2) + ": expected 2 columns");
      values(i) = io::parse_double(fields[1], path.string());
    }
    return values;
  }
  const Matrix m = io::parse_matrix(text, path.string());
  if (m.rows() != n) throw IoError(path.string() + ": row count differs from embedding");
  if (column < 0 || column >= m.cols()) throw std::invalid_argument("--color-column out of range");
  return Vector(m.col(column));
}

std::vector<Index> parse_columns(const std::string& text) {
  std::vector<Index> cols;
  if (text.empty()) return cols;
  for (auto f : io::split_fields(text)) {
    try {
      cols.push_back(static_cast<Index>(io::parse_integer(f, "--columns")));
    } catch (const IoError& e) {
      throw std::invalid_argument(e.what());
    }
  }
  return cols;
}

// ---- config handling ----

/// Expands "--config FILE" into "--key=value" arguments placed before the
/// remaining ones, so explicit flags (which come later) win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  if (args.empty()) return args;
  std::vector<std::string> rest{args.front()};
  std::vector<std::string> from_config;
  for (std::size_t i = 1; i < args.size(); ++i) {
    std::string file;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw std::invalid_argument("--config requires a file");
      file = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    for (const auto& e : io::parse_config(io::read_text(file), file)) {
      from_config.push_back("--" + dashed(e.key) + "=" + e.value);
    }
  }
  std::vector<std::string> out{rest.front()};
  out.insert(out.end(), from_config.begin(), from_config.end());
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finsler multidimensional scaling: datasets, asymmetric dissimilarities, embeddings, evaluation"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  const std::string config_help = "Flat key = value file; keys are option names, flags override it";

  // generate
  GeneratorFlags gen_flags;
  std::string gen_out = ".";
  auto* gen = app.add_subcommand("generate", "Write a synthetic dataset (points or edges, colors, metadata)");
  add_generator_options(*gen, gen_flags);
  gen->add_option("--out-dir", gen_out, "Output directory")->capture_default_str();
  gen->add_option("--config", config_help);

  // dissimilarity
  std::optional<std::string> dis_points, dis_graph, dis_meta;
  std::optional<double> dis_alpha_tilde;
  std::optional<Index> dis_k;
  std::string dis_out;
  auto* dis = app.add_subcommand("dissimilarity", "All-pairs directed geodesic distances as a matrix CSV");
  dis->add_option("--points", dis_points, "Point CSV (x1..xn, w1..wn)");
  dis->add_option("--graph", dis_graph, "Edge CSV");
  dis->add_option("--metadata", dis_meta, "Metadata JSON supplying k_neighbors and alpha_tilde defaults");
  dis->add_option("--alpha-tilde", dis_alpha_tilde, "Drift strength for the kNN weights");
  dis->add_option("--k", dis_k, "Neighbours per point");
  dis->add_option("--out", dis_out, "Output matrix CSV")->required();
  dis->add_option("--config", config_help);

  // weights
  std::string w_d, w_points, w_meta, w_method = "wormhole", w_out;
  double w_alpha_max = -1.0;
  std::optional<double> w_cf;
  bool w_soft = false;
  auto* wts = app.add_subcommand("weights", "Consistency weights for a dataset with a hole");
  wts->add_option("--dissimilarity", w_d, "Dissimilarity matrix CSV")->required();
  wts->add_option("--points", w_points, "Point CSV (ambient positions)");
  wts->add_option("--metadata", w_meta, "Metadata JSON with the 'boundary' list")->required();
  wts->add_option("--method", w_method, "Criterion")->check(CLI::IsMember({"wormhole", "intrinsic"}))
      ->capture_default_str();
  wts->add_option("--alpha-max", w_alpha_max, "Largest drift strength; sets c_f = 1 - alpha_max");
  wts->add_option("--cf", w_cf, "Lower bound of the metric per unit ambient length");
  wts->add_flag("--soft", w_soft, "Soft rather than binary wormhole weights");
  wts->add_option("--out", w_out, "Output weight matrix CSV")->required();
  wts->add_option("--config", config_help);

  // embed
  EmbedFlags emb_flags;
  std::string emb_d, emb_out, emb_report;
  std::optional<std::string> emb_w;
  auto* emb = app.add_subcommand("embed", "Finsler SMACOF embedding of a dissimilarity matrix");
  emb->add_option("--dissimilarity", emb_d, "Dissimilarity matrix CSV")->required();
  emb->add_option("--weights", emb_w, "Symmetric weight matrix CSV (default: uniform)");
  add_embed_options(*emb, emb_flags);
  emb->add_option("--out", emb_out, "Output embedding CSV")->required();
  emb->add_option("--report", emb_report, "Output report JSON")->required();
  emb->add_option("--config", config_help);

  // evaluate
  std::optional<std::string> ev_x, ev_d, ev_w, ev_graph, ev_out;
  double ev_alpha = 0.5, ev_r = 2.0, ev_t = 1.0;
  bool ev_link = false;
  std::uint64_t ev_split_seed = 0;
  EmbedFlags ev_embed;
  auto* ev = app.add_subcommand("evaluate", "Distortion, stress, MAP and link-prediction metrics as JSON");
  ev->add_option("--embedding", ev_x, "Embedding CSV");
  ev->add_option("--dissimilarity", ev_d, "Dissimilarity matrix CSV (distortion, stress)");
  ev->add_option("--weights", ev_w, "Weight matrix CSV for the stress");
  ev->add_option("--graph", ev_graph, "Edge CSV (MAP, link prediction)");
  ev->add_option("--embed-alpha", ev_alpha, "Drift norm of the embedding space")->capture_default_str();
  ev->add_flag("--link-prediction", ev_link, "Split the graph, fit an embedding to the training part, score it");
  ev->add_option("--split-seed", ev_split_seed, "Seed for the edge split and negative sampling")->capture_default_str();
  ev->add_option("--fd-r", ev_r, "Fermi-Dirac offset r")->capture_default_str();
  ev->add_option("--fd-t", ev_t, "Fermi-Dirac temperature t")->capture_default_str();
  add_embed_options(*ev, ev_embed);
  ev->add_option("--out", ev_out, "Output JSON (default: standard output)");
  ev->add_option("--config", config_help);

  // plot
  std::string pl_x, pl_out, pl_columns, pl_title;
  std::optional<std::string> pl_colors;
  Index pl_color_col = 0;
  svg::PlotStyle style;
  auto* pl = app.add_subcommand("plot", "Static SVG scatter plot of an embedding");
  pl->add_option("--embedding", pl_x, "Embedding CSV")->required();
  pl->add_option("--colors", pl_colors, "Matrix CSV or node,depth CSV with one row per point");
  pl->add_option("--color-column", pl_color_col, "Column of --colors to use")->capture_default_str();
  pl->add_option("--columns", pl_columns, "Comma-separated embedding columns (needed above 3 dimensions)");
  pl->add_option("--azimuth", style.azimuth, "Degrees about the drift axis")->capture_default_str();
  pl->add_option("--elevation", style.elevation, "Degrees of tilt")->capture_default_str();
  pl->add_option("--title", pl_title, "Plot title");
  pl->add_option("--out", pl_out, "Output SVG")->required();
  pl->add_option("--config", config_help);

  // pipeline
  GeneratorFlags pipe_gen;
  EmbedFlags pipe_embed;
  std::string pipe_dir, pipe_weights = "auto";
  bool pipe_soft = false;
  auto* pipe = app.add_subcommand("pipeline", "generate, dissimilarity, weights, embed, evaluate and plot in one run");
  add_generator_options(*pipe, pipe_gen);
  add_embed_options(*pipe, pipe_embed);
  pipe->add_option("--weights", pipe_weights, "auto (wormhole for the hole dataset), none, wormhole, intrinsic")
      ->check(CLI::IsMember({"auto", "none", "wormhole", "intrinsic"}))
      ->capture_default_str();
  pipe->add_flag("--soft", pipe_soft, "Soft wormhole weights");
  pipe->add_option("--out-dir", pipe_dir, "Output directory")->required();
  pipe->add_option("--config", config_help);

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return e.get_exit_code() == 0 ? kOk : kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  }

  try {
    if (gen->parsed()) {
      const GeneratorSpec spec = resolve_generator_spec(gen_flags);
      const GeneratedFiles files = write_dataset(spec, gen_out);
      out << "wrote " << files.data.string() << ", " << files.colors.string() << ", " << files.metadata.string()
          << "\n";
    } else if (dis->parsed()) {
      if (dis_points.has_value() == dis_graph.has_value()) {
        throw std::invalid_argument("give exactly one of --points and --graph");
      }
      DirectedWeightedGraph graph;
      if (dis_graph) {
        graph = io::read_edges(*dis_graph);
      } else {
        Json meta;
        if (dis_meta) meta = io::read_json(*dis_meta);
        const double alpha_tilde = dis_alpha_tilde ? *dis_alpha_tilde
                                   : meta.contains("alpha_tilde") ? meta["alpha_tilde"].get<double>()
                                                                  : throw std::invalid_argument("--alpha-tilde is required");
        const Index k = dis_k ? *dis_k
                        : meta.contains("k_neighbors") ? meta["k_neighbors"].get<Index>()
                                                       : throw std::invalid_argument("--k is required");
        graph = build_knn_digraph(io::read_points(*dis_points, alpha_tilde), k);
      }
      io::write_matrix(dis_out, all_pairs_distances(graph).matrix());
    } else if (wts->parsed()) {
      const DissimilarityMatrix d(io::read_matrix(w_d));
      const BoundarySet boundary = boundary_from_metadata(w_meta, d.size());
      WeightMatrix w;
      if (w_method == "intrinsic") {
        w = intrinsic_criterion_weights(d, boundary);
      } else {
        if (w_points.empty()) throw std::invalid_argument("--points is required for wormhole weights");
        const PointCloudWithField cloud = io::read_points(w_points, 0.0);
        WormholeConfig config;
        if (w_cf && w_alpha_max >= 0.0) throw std::invalid_argument("give at most one of --cf and --alpha-max");
        if (w_alpha_max >= 0.0) config = WormholeConfig::from_alpha_max(w_alpha_max);
        if (w_cf) config.c_f = *w_cf;
        config.soft = w_soft;
        w = wormhole_weights(d, boundary, cloud.points(), config);
      }
      io::write_matrix(w_out, w.matrix());
      Index kept = 0;
      for (Index i = 0; i < d.size(); ++i) {
        for (Index j = i + 1; j < d.size(); ++j) kept += w.matrix()(i, j) > 0.0;
      }
      out << "pairs kept: " << kept << " of " << d.size() * (d.size() - 1) / 2 << "\n";
    } else if (emb->parsed()) {
      const DissimilarityMatrix d(io::read_matrix(emb_d));
      const WeightMatrix w = emb_w ? WeightMatrix(io::read_matrix(*emb_w)) : default_weights(d);
      RandersSpace space = RandersSpace::euclidean(1);
      const SolveOutput result = embed(d, w, emb_flags, space);
      const Json report = report_json(result, space, d, w, emb_flags);
      io::write_matrix(emb_out, result.embedding);
      io::write_json(emb_report, report);
      out << "final stress " << io::format_double(result.report.final_stress) << " after "
          << result.report.iterations_run << " iterations\n";
    } else if (ev->parsed()) {
      Json metrics;
      if (ev_link) {
        if (!ev_graph) throw std::invalid_argument("--link-prediction needs --graph");
        const DirectedWeightedGraph graph = io::read_edges(*ev_graph);
        const RandersSpace space = RandersSpace::along_last_axis(ev_embed.dim, ev_embed.alpha);
        const FermiDiracParams params{ev_r, ev_t};
        const LinkPredictionRun run = link_prediction_eval(graph, space, params, ev_split_seed, solver_config(ev_embed));
        Json lp;
        lp["split_seed"] = ev_split_seed;
        lp["dim"] = space.dim();
        lp["alpha"] = space.alpha();
        lp["fd_r"] = ev_r;
        lp["fd_t"] = ev_t;
        lp["split_attempts"] = run.split.attempts;
        lp["test_links"] = run.split.test.size();
        lp["existence_auc"] = run.test.existence_auc;
        lp["existence_pairs"] = run.test.existence_pairs;
        lp["direction_auc"] = std::isfinite(run.test.direction_auc) ? Json(run.test.direction_auc) : Json(nullptr);
        lp["direction_pairs"] = run.test.direction_pairs;
        metrics["link_prediction"] = lp;
      }
      if (ev_x) {
        const Matrix x = io::read_matrix(*ev_x);
        const RandersSpace space = RandersSpace::along_last_axis(x.cols(), ev_alpha);
        metrics["embed_alpha"] = ev_alpha;
        if (ev_d) {
          const DissimilarityMatrix d(io::read_matrix(*ev_d));
          const WeightMatrix w = ev_w ? WeightMatrix(io::read_matrix(*ev_w)) : default_weights(d);
          metrics["stress"] = finsler_stress(x, d, w, space);
          metrics["normalized_stress"] = normalized_stress(x, d, w, space);
          metrics["distortion"] = normalized_distortion(x, d, space);
        }
        if (ev_graph) metrics["map"] = map_score(x, io::read_edges(*ev_graph), space);
      }
      if (metrics.empty()) throw std::invalid_argument("nothing to evaluate: give --embedding or --link-prediction");
      if (ev_out) {
        io::write_json(*ev_out, metrics);
      } else {
        out << metrics.dump(2) << "\n";
      }
    } else if (pl->parsed()) {
      const Matrix x = io::read_matrix(pl_x);
      style.columns = parse_columns(pl_columns);
      style.title = pl_title;
      std::optional<Vector> colors;
      if (pl_colors) {
        colors = read_colors(*pl_colors, pl_color_col, x.rows());
        style.color_label = fs::path(*pl_colors).stem().string();
      }
      io::write_text_atomic(pl_out, svg::scatter_plot(x, colors, style));
    } else if (pipe->parsed()) {
      const GeneratorSpec spec = resolve_generator_spec(pipe_gen);
      const fs::path dir = pipe_dir;
      const GeneratedFiles files = write_dataset(spec, dir);

      const auto& cloud = files.cloud;
      const DissimilarityMatrix d = files.is_graph
                                        ? all_pairs_distances(files.graph->graph)
                                        : all_pairs_distances(build_knn_digraph(cloud->cloud, spec.k_neighbors));
      io::write_matrix(dir / "dissimilarity.csv", d.matrix());

      std::string method = pipe_weights;
      if (method == "auto") method = spec.kind == DatasetKind::swiss_roll_hole ? "wormhole" : "none";
      if (method != "none" && spec.kind != DatasetKind::swiss_roll_hole) {
        throw std::invalid_argument("--weights " + method + " needs the swiss_roll_hole dataset");
      }
      WeightMatrix w = default_weights(d);
      if (method == "wormhole") {
        WormholeConfig config = WormholeConfig::from_alpha_max(spec.alpha_tilde, pipe_soft);
        w = wormhole_weights(d, cloud->boundary, cloud->cloud.points(), config);
      } else if (method == "intrinsic") {
        w = intrinsic_criterion_weights(d, cloud->boundary);
      }
      if (method != "none") io::write_matrix(dir / "weights.csv", w.matrix());

      RandersSpace space = RandersSpace::euclidean(1);
      const SolveOutput result = embed(d, w, pipe_embed, space);
      io::write_matrix(dir / "embedding.csv", result.embedding);
      io::write_json(dir / "report.json", report_json(result, space, d, w, pipe_embed));

      Json metrics;
      metrics["embed_alpha"] = space.alpha();
      metrics["stress"] = result.report.final_stress;
      metrics["normalized_stress"] = normalized_stress(result.embedding, d, w, space);
      if (d.is_finite()) metrics["distortion"] = normalized_distortion(result.embedding, d, space);
      if (files.is_graph) {
        const GeneratedGraph& tree = *files.graph;
        metrics["map"] = map_score(result.embedding, tree.graph, space);
        Vector depth(tree.graph.size());
        for (Index i = 0; i < depth.size(); ++i) depth(i) = tree.depth[static_cast<std::size_t>(i)];
        metrics["depth_vs_drift_spearman"] = spearman_correlation(depth, result.embedding.col(space.dim() - 1));
      }
      io::write_json(dir / "metrics.json", metrics);

      svg::PlotStyle pstyle;
      pstyle.title = to_string(spec.kind);
      pstyle.color_label = files.is_graph ? "depth" : "intrinsic";
      if (result.embedding.cols() > 3) {
        for (Index c = result.embedding.cols() - 3; c < result.embedding.cols(); ++c) pstyle.columns.push_back(c);
      }
      const auto colors = read_colors(files.colors, 0, result.embedding.rows());
      if (result.embedding.cols() >= 2) {
        io::write_text_atomic(dir / "embedding.svg", svg::scatter_plot(result.embedding, colors, pstyle));
      }
      out << "pipeline finished in " << dir.string() << ": final stress "
          << io::format_double(result.report.final_stress) << "\n";
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const nlohmann::json::exception& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIo;
  }
  return kOk;
}

}  // namespace fmds::cli
