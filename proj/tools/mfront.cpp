#include <CLI11.hpp>
#include <json.hpp>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <optional>

#include "mfront/dense.hpp"
#include "mfront/matrix_market.hpp"
#include "mfront/pipeline.hpp"

namespace fs = std::filesystem;
using namespace mfront;

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kNumeric = 2, kVerify = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  Index elements = 0;
  int degree = 1;
  std::string rhs = "one";
  unsigned workers = 1;
  std::string out;
  std::string matrix;
  std::string dot_graph;
  std::string dot_tree;
  Index oracle_cap = 2000;
  double tolerance = 1e-10;
  std::uint64_t seed = 0;
  bool shuffle = false;
  std::vector<Index> sweep;
  std::vector<int> degrees{1};
  std::vector<unsigned> worker_list{1};
  int repeats = 1;
  Index dof_cap = 100000;
};

struct Problem {
  std::optional<Mesh> mesh;
  GlobalSystem system;
  SolverPlan solver;
};

Problem load_problem(const Options& o) {
  Problem p;
  if (!o.matrix.empty()) {
    std::ifstream in(o.matrix);
    if (!in) throw UsageError("cannot open " + o.matrix);
    const auto m = io::read_matrix_market(in);
    if (m.rows != m.cols) throw UsageError("matrix must be square");
    p.system = GlobalSystem::from_triplets(m.rows, m.entries);
    p.system.set_rhs(p.system.multiply(std::vector<double>(m.rows, 1.0)));
    std::vector<Index> dofs(m.rows);
    std::iota(dofs.begin(), dofs.end(), Index{0});
    p.solver = make_solver_plan({Front::dense(0, p.system.to_dense(), dofs)}, p.system);
    return p;
  }
  if (o.elements < 1) throw UsageError("--elements must be >= 1");
  p.mesh.emplace(o.elements, o.degree);
  p.system = assemble_system(*p.mesh, make_rhs(parse_rhs_function(o.rhs)));
  p.solver = make_solver_plan(*p.mesh, p.system);
  return p;
}

ConcurrentOptions exec_options(const Options& o) {
  ConcurrentOptions c;
  c.workers = o.workers;
  if (o.shuffle) c.shuffle_seed = o.seed;
  return c;
}

struct Timed {
  FactorResult factors;
  double seconds;
};

Timed factorize(const Problem& p, const ConcurrentOptions& c) {
  const auto& ex = *p.solver.executor;
  const auto program = ex.compile(*p.solver.schedule, c.shuffle_seed);
  auto state = ex.initial_state(p.system);
  const auto t0 = std::chrono::steady_clock::now();
  ex.run_program(program, state, c);
  const auto t1 = std::chrono::steady_clock::now();
  return {ex.extract_factors(state), std::chrono::duration<double>(t1 - t0).count()};
}

std::vector<SparseEntry> sorted(std::vector<SparseEntry> entries) {
  std::sort(entries.begin(), entries.end(), [](const SparseEntry& a, const SparseEntry& b) {
    return std::pair(a.row, a.col) < std::pair(b.row, b.col);
  });
  return entries;
}

std::string_view mode_name(unsigned workers) {
  return workers == 1 ? "sequential" : "concurrent";
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path.string());
  return f;
}

fs::path out_dir(const Options& o) {
  if (o.out.empty()) throw UsageError("--out is required");
  fs::create_directories(o.out);
  return o.out;
}

void print_timing(const Problem& p, const Options& o, double seconds) {
  fmt::print("timing mode={} n_dof={} p={} workers={} wall_seconds={:.6f}\n",
             mode_name(o.workers), p.system.n_dof(), p.mesh ? p.mesh->degree() : 0,
             o.workers, seconds);
}

int cmd_generate(const Options& o) {
  if (o.elements < 1) throw UsageError("--elements must be >= 1");
  const Mesh mesh(o.elements, o.degree);
  const auto system = assemble_system(mesh, make_rhs(parse_rhs_function(o.rhs)));
  const auto dir = out_dir(o);
  {
    auto f = open_out(dir / "matrix.mtx");
    io::write_symmetric(f, system);
  }
  {
    auto f = open_out(dir / "rhs.txt");
    io::write_vector(f, system.rhs());
  }
  nlohmann::ordered_json manifest = {
      {"n_elements", mesh.n_elements()},
      {"degree", mesh.degree()},
      {"n_dof", mesh.n_dof()},
      {"rhs", o.rhs},
      {"domain", {mesh.domain_start(), mesh.domain_end()}},
      {"nnz", system.nnz()},
  };
  open_out(dir / "manifest.json") << manifest.dump(2) << '\n';
  fmt::print("wrote {} (n_dof={})\n", dir.string(), mesh.n_dof());
  return kOk;
}

int cmd_plan(const Options& o) {
  const auto p = load_problem(o);
  const auto& g = *p.solver.graph;
  const auto report = validate_dag(g);
  const auto stats = schedule_stats(*p.solver.schedule);
  fmt::print("n_dof {}\n", p.system.n_dof());
  fmt::print("tree_depth {}\n", p.solver.tree->depth());
  fmt::print("tree_nodes {}\n", p.solver.tree->nodes().size());
  for (TaskKind k : kAllTaskKinds) fmt::print("tasks_{} {}\n", to_string(k), report.count(k));
  fmt::print("tasks_total {}\n", g.size());
  fmt::print("edges {}\n", g.edge_count());
  fmt::print("longest_path {}\n", report.longest_path);
  fmt::print("foata_classes {}\n", stats.class_count);
  fmt::print("max_class_width {}\n", stats.max_width);
  fmt::print("fill_entries {}\n", p.solver.plan->pattern.size() - p.solver.plan->original_nonzeros);
  if (!stats.division_subtraction_mixed.empty()) {
    fmt::print("classes_mixing_division_and_subtraction {}\n",
               stats.division_subtraction_mixed.size());
  }
  if (!o.out.empty()) {
    const auto dir = out_dir(o);
    open_out(dir / "task_stats.csv") << task_stats_csv(report);
    open_out(dir / "schedule.csv") << schedule_csv(*p.solver.schedule);
  }
  if (!o.dot_graph.empty()) open_out(o.dot_graph) << export_dot(g);
  if (!o.dot_tree.empty()) open_out(o.dot_tree) << p.solver.tree->to_dot();
  return kOk;
}

int cmd_factorize(const Options& o) {
  const auto p = load_problem(o);
  const auto run = factorize(p, exec_options(o));
  const auto dir = out_dir(o);
  const Index n = p.system.n_dof();
  {
    auto f = open_out(dir / "L.mtx");
    io::write_general(f, n, n, sorted(run.factors.lower_factor_entries()));
  }
  {
    auto f = open_out(dir / "U.mtx");
    io::write_general(f, n, n, sorted(run.factors.upper_factor_entries()));
  }
  fmt::print("reconstruction {:.3e}\n", reconstruction_error(run.factors, p.system));
  print_timing(p, o, run.seconds);
  return kOk;
}

int cmd_solve(const Options& o) {
  const auto p = load_problem(o);
  const auto run = factorize(p, exec_options(o));
  const auto u = solve(run.factors, p.system.rhs());
  if (o.out.empty()) throw UsageError("--out is required");
  if (const auto parent = fs::path(o.out).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  {
    auto f = open_out(o.out);
    io::write_vector(f, u);
  }
  fmt::print("residual {:.3e}\n", relative_residual(p.system, u, p.system.rhs()));
  print_timing(p, o, run.seconds);
  return kOk;
}

int cmd_verify(const Options& o) {
  auto probe = o;
  if (o.matrix.empty()) {
    if (o.elements < 1) throw UsageError("--elements must be >= 1");
    const Index n_dof = static_cast<Index>(o.degree) * o.elements + 1;
    if (n_dof > o.oracle_cap) {
      fmt::print(std::cerr, "n_dof {} exceeds the oracle cap {}; refusing\n", n_dof,
                 o.oracle_cap);
      return kUsage;
    }
  }
  const auto p = load_problem(probe);
  const Index n = p.system.n_dof();
  if (n > o.oracle_cap) {
    fmt::print(std::cerr, "n_dof {} exceeds the oracle cap {}; refusing\n", n, o.oracle_cap);
    return kUsage;
  }
  const auto run = factorize(p, exec_options(o));
  const auto& f = run.factors;
  const auto u = solve(f, p.system.rhs());

  // The dense oracle eliminates in the same pivot order.
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(n);
  for (Index s = 0; s < n; ++s) perm.indices()[f.pivot_order[s]] = s;
  const Eigen::MatrixXd permuted = perm * p.system.to_dense() * perm.transpose();
  const Eigen::VectorXd b =
      perm * Eigen::Map<const Eigen::VectorXd>(p.system.rhs().data(), n);
  const auto oracle = dense_lu_oracle(permuted, b);
  const Eigen::VectorXd oracle_u = perm.transpose() * oracle.solution;

  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(n, n), upper = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : f.lower_factor_entries()) {
    lower(perm.indices()[e.row], perm.indices()[e.col]) = e.value;
  }
  for (const auto& e : f.upper_factor_entries()) {
    upper(perm.indices()[e.row], perm.indices()[e.col]) = e.value;
  }
  const auto rel = [](double diff, double scale) { return scale > 0 ? diff / scale : diff; };
  const double lower_dev = rel((lower - oracle.lower).cwiseAbs().maxCoeff(),
                               oracle.lower.cwiseAbs().maxCoeff());
  const double upper_dev = rel((upper - oracle.upper).cwiseAbs().maxCoeff(),
                               oracle.upper.cwiseAbs().maxCoeff());
  double sol_diff = 0.0;
  for (Index i = 0; i < n; ++i) sol_diff = std::max(sol_diff, std::abs(u[i] - oracle_u(i)));
  const double sol_dev = rel(sol_diff, oracle_u.cwiseAbs().maxCoeff());
  const double residual = relative_residual(p.system, u, p.system.rhs());
  const double recon = reconstruction_error(f, p.system);

  const bool pass = lower_dev < o.tolerance && upper_dev < o.tolerance &&
                    sol_dev < o.tolerance && residual < o.tolerance && recon < 1e-12;
  fmt::print("n_dof {}\n", n);
  fmt::print("lower_factor_deviation {:.3e}\n", lower_dev);
  fmt::print("upper_factor_deviation {:.3e}\n", upper_dev);
  fmt::print("solution_deviation {:.3e}\n", sol_dev);
  fmt::print("residual {:.3e}\n", residual);
  fmt::print("reconstruction {:.3e}\n", recon);
  fmt::print("tolerance {:.3e}\n", o.tolerance);
  fmt::print("{}\n", pass ? "PASS" : "FAIL");
  return pass ? kOk : kVerify;
}

int cmd_bench(const Options& o) {
  if (o.sweep.empty()) throw UsageError("--sweep needs at least one element count");
  if (o.repeats < 1) throw UsageError("--repeats must be >= 1");
  for (Index n : o.sweep) {
    for (int p : o.degrees) {
      check_degree(p);
      const Index n_dof = static_cast<Index>(p) * n + 1;
      if (n < 1) throw UsageError("sweep entries must be >= 1");
      if (n_dof > o.dof_cap) {
        throw UsageError(fmt::format("{} DOFs exceeds --dof-cap {}", n_dof, o.dof_cap));
      }
    }
  }
  std::ostringstream csv;
  csv << "n_dof,p,workers,mode,wall_seconds,tasks_total,foata_classes\n";
  for (Index n : o.sweep) {
    for (int p : o.degrees) {
      Options cell = o;
      cell.elements = n;
      cell.degree = p;
      const auto problem = load_problem(cell);
      for (unsigned w : o.worker_list) {
        if (w < 1) throw UsageError("--workers entries must be >= 1");
        cell.workers = w;
        double total = 0.0;
        for (int r = 0; r < o.repeats; ++r) total += factorize(problem, exec_options(cell)).seconds;
        fmt::print(csv, "{},{},{},{},{:.6f},{},{}\n", problem.system.n_dof(), p, w,
                   mode_name(w), total / o.repeats, problem.solver.graph->size(),
                   problem.solver.schedule->size());
      }
    }
  }
  if (o.out.empty()) {
    std::cout << csv.str();
  } else {
    if (const auto parent = fs::path(o.out).parent_path(); !parent.empty()) {
      fs::create_directories(parent);
    }
    open_out(o.out) << csv.str();
    fmt::print("wrote {}\n", o.out);
  }
  return kOk;
}

void add_problem_flags(CLI::App* sub, Options& o, bool matrix) {
  sub->add_option("--elements,-n", o.elements, "Number of mesh elements")
      ->check(CLI::Range(1, std::numeric_limits<Index>::max()));
  sub->add_option("--degree,-p", o.degree, "Polynomial degree")->check(CLI::Range(1, 3));
  sub->add_option("--rhs", o.rhs, "Load function: one, sin_pi, x_squared")
      ->check(CLI::IsMember({"one", "sin_pi", "x_squared"}));
  if (matrix) {
    sub->add_option("--matrix", o.matrix,
                    "Matrix Market file factored as one dense front; rhs = M * 1")
        ->check(CLI::ExistingFile);
  }
}

void add_exec_flags(CLI::App* sub, Options& o) {
  sub->add_option("--workers,-w", o.workers, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--seed", o.seed, "Shuffle each Foata class with this seed")
      ->each([&o](const std::string&) { o.shuffle = true; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-frontal direct solver for 1D finite element mass matrices"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("generate", "Write matrix.mtx, rhs.txt and manifest.json");
  add_problem_flags(gen, o, false);
  gen->add_option("--out,-o", o.out, "Output directory")->required();

  auto* plan = app.add_subcommand("plan", "Report tree, task and schedule statistics");
  add_problem_flags(plan, o, true);
  plan->add_option("--out,-o", o.out, "Directory for task_stats.csv and schedule.csv");
  plan->add_option("--dot-graph", o.dot_graph, "Write the dependency graph as DOT");
  plan->add_option("--dot-tree", o.dot_tree, "Write the elimination tree as DOT");

  auto* fact = app.add_subcommand("factorize", "Write L.mtx and U.mtx");
  add_problem_flags(fact, o, true);
  add_exec_flags(fact, o);
  fact->add_option("--out,-o", o.out, "Output directory")->required();

  auto* sol = app.add_subcommand("solve", "Factorize, solve and write the solution vector");
  add_problem_flags(sol, o, true);
  add_exec_flags(sol, o);
  sol->add_option("--out,-o", o.out, "Solution file")->required();

  auto* ver = app.add_subcommand("verify", "Compare against the dense LU oracle");
  add_problem_flags(ver, o, true);
  add_exec_flags(ver, o);
  ver->add_option("--oracle-cap", o.oracle_cap, "Largest n_dof the dense oracle accepts");
  ver->add_option("--tolerance", o.tolerance,
                  "Deviations must be strictly below this value")
      ->check(CLI::NonNegativeNumber);

  auto* bench = app.add_subcommand("bench", "Time factorization over a sweep, write CSV");
  bench->add_option("--sweep", o.sweep, "Element counts, comma separated")
      ->delimiter(',')
      ->required();
  bench->add_option("--degree,-p", o.degrees, "Degrees, comma separated")->delimiter(',');
  bench->add_option("--workers,-w", o.worker_list, "Worker counts, comma separated")
      ->delimiter(',');
  bench->add_option("--repeats", o.repeats, "Runs averaged per cell");
  bench->add_option("--seed", o.seed, "Shuffle each Foata class with this seed")
      ->each([&o](const std::string&) { o.shuffle = true; });
  bench->add_option("--dof-cap", o.dof_cap, "Refuse cells above this many DOFs");
  bench->add_option("--out,-o", o.out, "CSV file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (gen->parsed()) return cmd_generate(o);
    if (plan->parsed()) return cmd_plan(o);
    if (fact->parsed()) return cmd_factorize(o);
    if (sol->parsed()) return cmd_solve(o);
    if (ver->parsed()) return cmd_verify(o);
    if (bench->parsed()) return cmd_bench(o);
  } catch (const ZeroPivotError& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kNumeric;
  } catch (const UsageError& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kUsage;
  }
  return kUsage;
}
