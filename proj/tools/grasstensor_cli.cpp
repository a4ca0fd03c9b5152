#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "grasstensor/approx.hpp"
#include "grasstensor/check_suite.hpp"
#include "grasstensor/cluster.hpp"
#include "grasstensor/csv_io.hpp"
#include "grasstensor/entangle.hpp"
#include "grasstensor/objective_io.hpp"
#include "grasstensor/point_io.hpp"
#include "grasstensor/select.hpp"
#include "grasstensor/tensor_io.hpp"

namespace {

using gt::cplx;
using gt::DenseTensor;
using gt::Index;
using gt::MatX;
using gt::VecX;
using nlohmann::json;

struct CommonOpts {
  std::string input;
  std::string out = ".";
  std::string format = "json";
  std::string method = "rcg";
  std::string config;
  std::vector<Index> ranks;
  std::vector<Index> codims;
  double eps = 1e-13;
  int max_iter = 500;
  std::uint64_t seed = 0;
  int warm_hooi = 20;
  int multi_start = 1;
  bool timing = false;
};

json load_config_from_argv(int argc, char** argv) {
  std::string path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc)
      path = argv[i + 1];
    else if (arg.rfind("--config=", 0) == 0)
      path = arg.substr(9);
  }
  if (path.empty()) return json::object();
  try {
    return json::parse(gt::read_file(path));
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

// Config file keys mirror the long flag names; flags given on the command
// line still win because they are applied after these defaults.
void apply_config(const json& cfg, CommonOpts& o) {
  if (cfg.contains("input")) o.input = cfg.at("input").get<std::string>();
  if (cfg.contains("out")) o.out = cfg.at("out").get<std::string>();
  if (cfg.contains("format")) o.format = cfg.at("format").get<std::string>();
  if (cfg.contains("method")) o.method = cfg.at("method").get<std::string>();
  if (cfg.contains("ranks")) o.ranks = cfg.at("ranks").get<std::vector<Index>>();
  if (cfg.contains("codims")) o.codims = cfg.at("codims").get<std::vector<Index>>();
  if (cfg.contains("eps")) o.eps = cfg.at("eps").get<double>();
  if (cfg.contains("max-iter")) o.max_iter = cfg.at("max-iter").get<int>();
  if (cfg.contains("seed")) o.seed = cfg.at("seed").get<std::uint64_t>();
  if (cfg.contains("warm-hooi")) o.warm_hooi = cfg.at("warm-hooi").get<int>();
  if (cfg.contains("multi-start")) o.multi_start = cfg.at("multi-start").get<int>();
  if (cfg.contains("timing")) o.timing = cfg.at("timing").get<bool>();
}

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--input", o.input, "input file (tensor, points CSV, or matrix CSV)");
  cmd->add_option("--ranks", o.ranks, "comma-separated per-mode subspace dimensions")->delimiter(',');
  cmd->add_option("--codims", o.codims, "comma-separated normal-space dimensions per cluster")->delimiter(',');
  cmd->add_option("--method", o.method, "optimizer")->check(CLI::IsMember({"newton", "rcg", "hooi"}));
  cmd->add_option("--eps", o.eps, "relative-gradient stopping tolerance");
  cmd->add_option("--max-iter", o.max_iter, "iteration cap");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--warm-hooi", o.warm_hooi, "alternating warm-start sweeps");
  cmd->add_option("--multi-start", o.multi_start, "number of seeded starts");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--format", o.format, "extra artifact format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_flag("--timing", o.timing, "record wall time in traces (breaks byte-level determinism)");
  cmd->add_option("--config", o.config, "JSON config file with defaults for these flags");
}

gt::SolverConfig solver_cfg(const CommonOpts& o) {
  gt::SolverConfig cfg;
  cfg.epsilon = o.eps;
  cfg.max_iter = o.max_iter;
  cfg.record_timing = o.timing;
  return cfg;
}

int exit_code(gt::SolveStatus status) { return status == gt::SolveStatus::converged ? 0 : 2; }

std::string out_path(const CommonOpts& o, const std::string& name) {
  return (std::filesystem::path(o.out) / name).string();
}

template <class Scalar>
json solve_summary(const gt::SolveResult<Scalar>& res) {
  return json{{"status", gt::to_string(res.status)}, {"rho", res.rho}, {"relgrad", res.relgrad}, {"iters", res.iters}};
}

void write_result(const CommonOpts& o, const json& result, const std::vector<gt::TraceRow>& trace) {
  gt::write_trace_csv(out_path(o, "trace.csv"), trace);
  gt::atomic_write_file(out_path(o, "result.json"), result.dump(2) + "\n");
  if (o.format == "csv") {
    std::string flat = "key,value\n";
    for (const auto& [key, value] : result.items())
      if (value.is_primitive()) flat += key + "," + (value.is_string() ? value.get<std::string>() : value.dump()) + "\n";
    gt::atomic_write_file(out_path(o, "result.csv"), flat);
  }
}

template <class Scalar>
int run_approx(const DenseTensor<Scalar>& t, const CommonOpts& o) {
  const auto res = gt::best_rank_approx(t, o.ranks, gt::method_from_string(o.method), solver_cfg(o), o.warm_hooi);
  json result = solve_summary(res.solve);
  result["command"] = "approx";
  result["method"] = o.method;
  result["seed"] = o.seed;
  result["ranks"] = o.ranks;
  result["rho_hosvd"] = res.rho_hosvd;
  result["rho_warm"] = res.rho_warm;
  result["rho_final"] = res.rho_final;
  result["rel_residual"] = res.rel_residual;
  result["point"] = gt::point_to_json(res.solve.point);
  gt::save_tensor(out_path(o, "approximation.gten"), res.approx);
  write_result(o, result, res.solve.trace);
  return exit_code(res.solve.status);
}

int cmd_approx(const CommonOpts& o) {
  if (o.input.empty()) throw std::runtime_error("approx: --input is required");
  if (o.ranks.empty()) throw std::runtime_error("approx: --ranks is required");
  const auto loaded = gt::load_tensor(o.input);
  return loaded.complex ? run_approx(loaded.complex_data, o) : run_approx(loaded.real_data, o);
}

int cmd_entangle(const CommonOpts& o) {
  if (o.input.empty()) throw std::runtime_error("entangle: --input is required");
  const DenseTensor<cplx> psi = gt::load_tensor(o.input).as_complex();
  const auto res = gt::geometric_entanglement(psi, gt::method_from_string(o.method), solver_cfg(o), o.multi_start,
                                              o.seed, o.warm_hooi);
  json result = solve_summary(res.solve);
  result["command"] = "entangle";
  result["method"] = o.method;
  result["seed"] = o.seed;
  result["rho_star"] = res.rho_star;
  result["delta"] = res.delta;
  json closest = json::array();
  for (const auto& v : res.closest_product) {
    json part = json::array();
    for (Index i = 0; i < v.size(); ++i) part.push_back({v(i).real(), v(i).imag()});
    closest.push_back(part);
  }
  result["closest_product"] = closest;
  result["point"] = gt::point_to_json(res.solve.point);
  write_result(o, result, res.solve.trace);
  return exit_code(res.solve.status);
}

struct ClusterCliOpts {
  CommonOpts common;
  std::string init = "pda";
  std::string init_point;
  std::string truth;
};

int cmd_cluster(const ClusterCliOpts& co) {
  const CommonOpts& o = co.common;
  if (o.input.empty()) throw std::runtime_error("cluster: --input is required");
  const auto points = gt::read_csv_points(o.input);

  gt::ClusterOptions opt;
  opt.codims = o.codims.empty() ? std::vector<Index>{1, 1} : o.codims;
  opt.clusters = static_cast<Index>(opt.codims.size());
  opt.method = gt::method_from_string(o.method);
  opt.solver = solver_cfg(o);
  opt.multi_start = o.multi_start;
  opt.seed = o.seed;
  if (co.init == "pda")
    opt.init = gt::ClusterInit::pda;
  else if (co.init == "random")
    opt.init = gt::ClusterInit::random;
  else
    opt.init = gt::ClusterInit::given;

  gt::ProductPoint<double> given;
  const bool has_given = opt.init == gt::ClusterInit::given;
  if (has_given) {
    if (co.init_point.empty()) throw std::runtime_error("cluster: --init given needs --init-point");
    given = gt::load_point<double>(co.init_point);
  }
  const auto res = gt::cluster_points(points, opt, has_given ? &given : nullptr);

  json result = solve_summary(res.solve);
  result["command"] = "cluster";
  result["method"] = o.method;
  result["seed"] = o.seed;
  result["codims"] = opt.codims;
  result["labels"] = res.labels;
  json projectors = json::array();
  for (const auto& f : res.solve.point.factors)
    projectors.push_back(gt::detail::matrix_to_json(MatX<double>(f.projector())));
  result["normal_projectors"] = projectors;
  if (!co.truth.empty()) {
    const auto truth = gt::load_point<double>(co.truth);
    const auto cmp = gt::compare_arrangements(res.solve.point, truth);
    const auto cmp_init = gt::compare_arrangements(res.init_point, truth);
    result["err_trace_angle_deg"] = cmp.trace_angle_deg;
    result["err_principal_angle_deg"] = cmp.principal_angle_deg;
    result["init_trace_angle_deg"] = cmp_init.trace_angle_deg;
    result["matched_permutation"] = cmp.permutation;
  }
  result["point"] = gt::point_to_json(res.solve.point);
  if (o.format == "csv") {
    std::string lines;
    for (Index label : res.labels) lines += std::to_string(label) + "\n";
    gt::atomic_write_file(out_path(o, "labels.csv"), lines);
  }
  write_result(o, result, res.solve.trace);
  return exit_code(res.solve.status);
}

int cmd_select(const CommonOpts& o) {
  if (o.input.empty()) throw std::runtime_error("select: --input is required");
  if (o.ranks.size() != 2) throw std::runtime_error("select: --ranks needs exactly two entries (rows, cols)");
  const MatX<double> lambda = gt::read_csv_matrix(o.input);
  const auto res = gt::select_rows_cols(lambda, o.ranks[0], o.ranks[1], gt::method_from_string(o.method),
                                        solver_cfg(o), o.multi_start, o.seed);
  // index sets are reported 1-based
  std::vector<Index> rows, cols;
  for (Index r : res.rows) rows.push_back(r + 1);
  for (Index c : res.cols) cols.push_back(c + 1);
  json result = solve_summary(res.solve);
  result["command"] = "select";
  result["method"] = o.method;
  result["seed"] = o.seed;
  result["rows"] = rows;
  result["cols"] = cols;
  result["value"] = res.value;
  result["rho_relaxed"] = res.rho_relaxed;
  result["point"] = gt::point_to_json(res.solve.point);
  if (o.format == "csv") {
    std::string lines;
    for (std::size_t i = 0; i < rows.size(); ++i) lines += (i ? "," : "") + std::to_string(rows[i]);
    lines += "\n";
    for (std::size_t i = 0; i < cols.size(); ++i) lines += (i ? "," : "") + std::to_string(cols[i]);
    lines += "\n";
    gt::atomic_write_file(out_path(o, "selection.csv"), lines);
  }
  write_result(o, result, res.solve.trace);
  return exit_code(res.solve.status);
}

struct BenchCliOpts {
  CommonOpts common;
  std::vector<Index> dims = {10, 10, 10};
};

template <class Scalar>
int run_bench(const gt::ObjectiveMatrix<Scalar>& obj, const BenchCliOpts& bo) {
  const CommonOpts& o = bo.common;
  const std::vector<Index> ranks = o.ranks.empty() ? std::vector<Index>(obj.dims().size(), 2) : o.ranks;
  if (static_cast<Index>(ranks.size()) != obj.order())
    throw std::runtime_error("bench: --ranks arity does not match tensor order");

  // one shared warm start for every method
  gt::ProductPoint<Scalar> warm;
  const bool alternating_ok = obj.kind() == gt::ObjKind::rank_one && obj.sense() == gt::Sense::maximize;
  if (alternating_ok) {
    gt::SolverConfig warm_cfg = solver_cfg(o);
    warm_cfg.max_iter = o.warm_hooi;
    warm = gt::run_method(gt::Method::hooi, obj, gt::hosvd_point(obj.amplitudes(), ranks), warm_cfg).point;
  } else {
    auto rng = std::mt19937_64(o.seed);
    warm = gt::random_product<Scalar>(obj.dims(), ranks, rng);
  }

  json methods = json::object();
  std::vector<gt::TraceRow> main_trace;
  for (const gt::Method m : {gt::Method::newton, gt::Method::rcg, gt::Method::hooi}) {
    const std::string name = gt::to_string(m);
    if (m == gt::Method::hooi && !alternating_ok) {
      methods[name] = {{"skipped", "alternating updates need a rank-one maximization"}};
      continue;
    }
    const auto res = gt::run_method(m, obj, warm, solver_cfg(o));
    gt::write_trace_csv(out_path(o, "trace_" + name + ".csv"), res.trace);
    methods[name] = {{"status", gt::to_string(res.status)},
                     {"rho", res.rho},
                     {"relgrad", res.relgrad},
                     {"iters", res.iters},
                     {"reached_eps", res.status == gt::SolveStatus::converged},
                     {"millis", res.trace.empty() ? 0 : res.trace.back().millis}};
    if (m == gt::Method::rcg) main_trace = res.trace;
  }
  json result = {{"command", "bench"}, {"seed", o.seed},     {"dims", obj.dims()},
                 {"ranks", ranks},     {"eps", o.eps},       {"warm_start", alternating_ok ? "hosvd+hooi" : "random"},
                 {"methods", methods}, {"timing", o.timing}};
  write_result(o, result, main_trace);
  return 0;
}

int cmd_bench(const BenchCliOpts& bo) {
  const CommonOpts& o = bo.common;
  if (!o.input.empty()) {
    // a descriptor file carries a kind tag; anything else is a tensor
    const std::string bytes = gt::read_file(o.input);
    if (bytes.rfind("GTEN", 0) != 0) {
      json j;
      try {
        j = json::parse(bytes);
      } catch (const json::parse_error& e) {
        throw std::runtime_error(o.input + ": " + e.what());
      }
      if (j.contains("kind")) {
        if (gt::descriptor_is_complex(j)) return run_bench(gt::objective_from_json<cplx>(j, o.input), bo);
        return run_bench(gt::objective_from_json<double>(j, o.input), bo);
      }
    }
    const auto loaded = gt::load_tensor(o.input);
    if (loaded.complex) return run_bench(gt::ObjectiveMatrix<cplx>::rank_one(loaded.complex_data), bo);
    return run_bench(gt::ObjectiveMatrix<double>::rank_one(loaded.real_data), bo);
  }
  for (Index d : bo.dims)
    if (d < 1) throw std::runtime_error("bench: --dims must be positive");
  auto rng = std::mt19937_64(o.seed);
  DenseTensor<cplx> t(bo.dims);
  t.flat() = gt::gaussian_matrix<cplx>(t.size(), 1, rng);
  return run_bench(gt::ObjectiveMatrix<cplx>::rank_one(t), bo);
}

int cmd_check(double tolerance_scale) {
  const auto outcomes = gt::run_check_battery(tolerance_scale);
  std::size_t passed = 0;
  for (const auto& c : outcomes) {
    std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  (" << c.detail << ")\n";
    if (c.pass) ++passed;
  }
  std::cout << passed << "/" << outcomes.size() << " checks passed\n";
  return passed == outcomes.size() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace optimization over products of Grassmannians"};
  app.require_subcommand(1);

  json cfg;
  try {
    cfg = load_config_from_argv(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  CommonOpts approx_opts, entangle_opts, select_opts;
  ClusterCliOpts cluster_opts;
  BenchCliOpts bench_opts;
  double tolerance_scale = 1.0;
  select_opts.multi_start = 16;

  apply_config(cfg, approx_opts);
  apply_config(cfg, entangle_opts);
  apply_config(cfg, select_opts);
  apply_config(cfg, cluster_opts.common);
  apply_config(cfg, bench_opts.common);
  if (cfg.contains("init")) cluster_opts.init = cfg.at("init").get<std::string>();
  if (cfg.contains("init-point")) cluster_opts.init_point = cfg.at("init-point").get<std::string>();
  if (cfg.contains("truth")) cluster_opts.truth = cfg.at("truth").get<std::string>();
  if (cfg.contains("dims")) bench_opts.dims = cfg.at("dims").get<std::vector<Index>>();
  if (cfg.contains("tolerance-scale")) tolerance_scale = cfg.at("tolerance-scale").get<double>();

  int rc = 0;

  auto* approx = app.add_subcommand("approx", "best fixed-rank tensor approximation");
  add_common(approx, approx_opts);
  approx->callback([&] { rc = cmd_approx(approx_opts); });

  auto* entangle = app.add_subcommand("entangle", "geometric entanglement of a unit tensor");
  add_common(entangle, entangle_opts);
  entangle->callback([&] { rc = cmd_entangle(entangle_opts); });

  auto* cluster = app.add_subcommand("cluster", "linear subspace clustering of data points");
  add_common(cluster, cluster_opts.common);
  cluster->add_option("--init", cluster_opts.init, "initialization")->check(CLI::IsMember({"pda", "random", "given"}));
  cluster->add_option("--init-point", cluster_opts.init_point, "point JSON used with --init given");
  cluster->add_option("--truth", cluster_opts.truth, "point JSON with reference normals for error reporting");
  cluster->callback([&] { rc = cmd_cluster(cluster_opts); });

  auto* select = app.add_subcommand("select", "row/column subset selection for a nonnegative matrix");
  add_common(select, select_opts);
  select->callback([&] { rc = cmd_select(select_opts); });

  auto* bench = app.add_subcommand("bench", "compare optimizers from one shared warm start");
  add_common(bench, bench_opts.common);
  bench->add_option("--dims", bench_opts.dims, "tensor shape for the seeded random instance")->delimiter(',');
  bench->callback([&] { rc = cmd_bench(bench_opts); });

  auto* check = app.add_subcommand("check", "run the numerical oracle battery");
  check->add_option("--tolerance-scale", tolerance_scale, "multiply every check tolerance (hook for harness tests)");
  check->callback([&] { rc = cmd_check(tolerance_scale); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // collapse parser exit codes onto the documented contract: 0 for --help, 1 for usage errors
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
