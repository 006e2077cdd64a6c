// Command-line front end: entropy estimation, bandit and maze benchmarks,
// maximum-entropy policy computation, coupon-collector expectations, and the
// two-phase pipeline.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rlex/rlex.hpp"

namespace {

std::string default_out_dir() {
  if (const char* env = std::getenv("RLEX_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return "out";
}

rlex::PointSet read_points_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open points file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rlex::PointSet::from_rows(rows);
}

std::vector<double> read_number_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<double> values;
  double v;
  while (in >> v) values.push_back(v);
  return values;
}

std::vector<std::uint64_t> default_seeds(int count) {
  std::vector<std::uint64_t> seeds(count);
  for (int i = 0; i < count; ++i) seeds[i] = static_cast<std::uint64_t>(i);
  return seeds;
}

int run_estimate(const std::string& input, double alpha, int k, bool search, int subsets, int k_max,
                 std::uint64_t seed) {
  const rlex::PointSet points = read_points_file(input);
  const rlex::RenyiOrder order(alpha);
  int chosen_k = k;
  if (search) {
    const rlex::KSearchResult res = rlex::search_k(points, subsets, k_max, order, seed);
    chosen_k = res.k;
  }
  const rlex::SampleSet samples(points, chosen_k);
  const rlex::ShannonEstimate shannon = rlex::knn_shannon_estimate(samples);
  const rlex::RenyiEstimate renyi = rlex::knn_renyi_estimate(samples, order);
  std::cout << "alpha,k,renyi_entropy,renyi_statistic,shannon_entropy\n";
  std::cout << rlex::format_double(alpha) << ',' << chosen_k << ',' << rlex::format_double(renyi.entropy)
            << ',' << rlex::format_double(renyi.statistic) << ',' << rlex::format_double(shannon.value)
            << '\n';
  return 0;
}

int run_mepc_cmd(const std::string& mdp_file, double alpha, double sigma, double epsilon,
                 std::int64_t iterations, double gamma, int chain_length) {
  rlex::TabularMdp mdp;
  if (!mdp_file.empty()) {
    std::ifstream in(mdp_file);
    if (!in) throw std::runtime_error("cannot open mdp file: " + mdp_file);
    mdp = rlex::TabularMdp::load(in);
  } else {
    mdp = rlex::build_chain(chain_length, gamma);
  }
  const rlex::IterationBound bound = rlex::iteration_bound(alpha, sigma, epsilon);
  rlex::MepcConfig cfg;
  cfg.iterations = iterations > 0 ? iterations : bound.iterations;
  cfg.step_size = bound.eta;
  cfg.planning_tol = bound.eps1;
  cfg.distribution_tol = bound.eps2;
  cfg.sigma = sigma;
  cfg.alpha = alpha;
  const rlex::MepcResult result = rlex::run_mepc(mdp, cfg);
  std::cout << "iteration,smoothed_entropy\n";
  // The full trace from a bound-sized run is large; print a decimated view.
  const std::size_t stride = std::max<std::size_t>(1, result.entropy_trace.size() / 1000);
  for (std::size_t t = 0; t < result.entropy_trace.size(); t += stride)
    std::cout << t << ',' << rlex::format_double(result.entropy_trace[t]) << '\n';
  if ((result.entropy_trace.size() - 1) % stride != 0)
    std::cout << result.entropy_trace.size() - 1 << ','
              << rlex::format_double(result.entropy_trace.back()) << '\n';
  std::cout << "state,occupancy\n";
  for (std::size_t s = 0; s < result.final_occupancy.probs.size(); ++s)
    std::cout << s << ',' << rlex::format_double(result.final_occupancy.probs[s]) << '\n';
  return 0;
}

int run_ccp_cmd(const std::string& dist_file, double tol, std::int64_t mc_runs, std::uint64_t seed) {
  std::vector<double> probs = read_number_file(dist_file);
  if (probs.empty()) throw std::runtime_error("distribution file is empty");
  rlex::StateDistribution d(std::move(probs));
  const double expectation = rlex::ccp_expected_time(d, tol);
  // Discrete coupon-collection cross-check.
  rlex::Rng rng(seed);
  double total = 0.0;
  for (std::int64_t run = 0; run < mc_runs; ++run) {
    std::vector<std::uint8_t> seen(d.probs.size(), 0);
    std::size_t remaining = d.probs.size();
    std::int64_t draws = 0;
    while (remaining > 0) {
      const int s = rng.categorical(d.probs);
      ++draws;
      if (!seen[s]) {
        seen[s] = 1;
        --remaining;
      }
    }
    total += static_cast<double>(draws);
  }
  const double mc = total / static_cast<double>(mc_runs);
  std::cout << "expectation,monte_carlo,relative_gap\n";
  std::cout << rlex::format_double(expectation) << ',' << rlex::format_double(mc) << ','
            << rlex::format_double(std::fabs(expectation - mc) / mc) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intrinsically-motivated exploration toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = default_out_dir();
  std::vector<std::uint64_t> seeds;
  int jobs = 0;
  bool plot = false;
  app.add_option("--config", config_path, "experiment config file (JSON)");
  app.add_option("--out", out_dir, "output directory (overrides RLEX_OUT_DIR)");
  app.add_option("--seeds", seeds, "explicit seed list");
  app.add_option("--jobs", jobs, "worker threads (0 = hardware)");
  app.add_flag("--plot", plot, "emit plot.svg next to the CSV outputs");

  auto* estimate = app.add_subcommand("estimate", "k-NN entropy estimate of a sample file");
  std::string est_input;
  double est_alpha = 0.5;
  int est_k = 3;
  bool est_search = false;
  int est_subsets = 8;
  int est_kmax = 15;
  std::uint64_t est_seed = 0;
  estimate->add_option("--input", est_input, "whitespace-separated vectors, one per line")->required();
  estimate->add_option("--alpha", est_alpha, "entropy order in (0,1)");
  estimate->add_option("--k", est_k, "neighbor order");
  estimate->add_flag("--search-k", est_search, "select k by subset stability");
  estimate->add_option("--subsets", est_subsets, "subset count for --search-k");
  estimate->add_option("--k-max", est_kmax, "largest k tried by --search-k");
  estimate->add_option("--seed", est_seed, "partition seed for --search-k");

  auto* bandit = app.add_subcommand("bandit", "multi-seed bandit strategy comparison");
  auto* maze = app.add_subcommand("maze", "maze coverage benchmark");
  auto* pipeline = app.add_subcommand("rise-pipeline", "two-phase k-search + policy-update pipeline");
  std::uint64_t pipeline_seed = 0;
  int pipeline_size = 10;
  pipeline->add_option("--seed", pipeline_seed, "run seed");
  pipeline->add_option("--size", pipeline_size, "maze size");

  auto* mepc = app.add_subcommand("mepc", "maximum-entropy policy computation");
  std::string mepc_mdp;
  double mepc_alpha = 0.5;
  double mepc_sigma = 0.01;
  double mepc_eps = 0.05;
  std::int64_t mepc_iters = 0;
  double mepc_gamma = 0.9;
  int mepc_chain = 3;
  mepc->add_option("--mdp", mepc_mdp, "MDP text file (omit for the built-in chain)");
  mepc->add_option("--alpha", mepc_alpha, "entropy order in (0,1)");
  mepc->add_option("--sigma", mepc_sigma, "smoothing offset");
  mepc->add_option("--epsilon", mepc_eps, "target gap");
  mepc->add_option("--iterations", mepc_iters, "override the iteration bound");
  mepc->add_option("--gamma", mepc_gamma, "discount of the built-in chain");
  mepc->add_option("--chain-length", mepc_chain, "states of the built-in chain");

  auto* ccp = app.add_subcommand("ccp", "coupon-collector expected time of a distribution file");
  std::string ccp_dist;
  double ccp_tol = 1e-4;
  std::int64_t ccp_runs = 100'000;
  std::uint64_t ccp_seed = 0;
  ccp->add_option("--dist", ccp_dist, "file of state probabilities")->required();
  ccp->add_option("--tol", ccp_tol, "quadrature tolerance");
  ccp->add_option("--mc-runs", ccp_runs, "Monte-Carlo cross-check runs");
  ccp->add_option("--seed", ccp_seed, "Monte-Carlo seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (estimate->parsed())
      return run_estimate(est_input, est_alpha, est_k, est_search, est_subsets, est_kmax, est_seed);
    if (mepc->parsed())
      return run_mepc_cmd(mepc_mdp, mepc_alpha, mepc_sigma, mepc_eps, mepc_iters, mepc_gamma, mepc_chain);
    if (ccp->parsed()) return run_ccp_cmd(ccp_dist, ccp_tol, ccp_runs, ccp_seed);

    if (bandit->parsed() || maze->parsed()) {
      rlex::ExperimentConfig cfg;
      if (!config_path.empty()) {
        cfg = rlex::load_experiment_config_file(config_path);
      } else if (bandit->parsed()) {
        cfg.kind = rlex::ExperimentKind::kBandit;
        cfg.seeds = default_seeds(100);
        cfg.bandit.strategies = {
            {"epsilon_greedy_0.1", {rlex::BanditStrategy::kEpsilonGreedy, 0.1, 1.0, 0.5}},
            {"ucb_c1", {rlex::BanditStrategy::kUcb, 0.1, 1.0, 0.5}},
            {"thompson", {rlex::BanditStrategy::kThompson, 0.1, 1.0, 0.5}},
        };
      } else {
        cfg.kind = rlex::ExperimentKind::kMaze;
        cfg.seeds = default_seeds(100);
        rlex::MazeVariant vanilla;
        vanilla.name = "q_learning";
        cfg.maze.variants.push_back(vanilla);
        for (double alpha : {0.1, 0.5, 0.9}) {
          rlex::MazeVariant v;
          v.name = "rise_alpha_" + rlex::format_double(alpha);
          v.generator = rlex::IntrinsicKind::kRise;
          v.intrinsic.alpha = alpha;
          v.intrinsic.lambda0 = 1.0 / cfg.maze.size;
          cfg.maze.variants.push_back(v);
        }
      }
      if (!seeds.empty()) cfg.seeds = seeds;
      if (jobs != 0) cfg.jobs = jobs;
      if (plot) cfg.plot = true;
      if (out_dir != default_out_dir() || cfg.out_dir.empty()) cfg.out_dir = out_dir;
      cfg.validate();
      if (cfg.kind == rlex::ExperimentKind::kBandit) {
        const rlex::BanditBenchmarkResult result = rlex::run_bandit_benchmark(cfg);
        rlex::write_bandit_outputs(result, cfg.bandit.record_every, cfg.out_dir, cfg.plot);
        for (const rlex::RunSummary& s : result.final_regret)
          std::cout << s.name << ": final regret " << s.display() << '\n';
      } else {
        const rlex::MazeBenchmarkResult result = rlex::run_maze_benchmark(cfg);
        rlex::write_maze_outputs(result, cfg.out_dir, cfg.plot);
        for (const rlex::RunSummary& s : result.summaries)
          std::cout << s.name << ": steps to coverage " << s.display() << '\n';
      }
      return 0;
    }

    if (pipeline->parsed()) {
      rlex::RisePipelineConfig cfg;
      if (!config_path.empty()) cfg = rlex::load_experiment_config_file(config_path).pipeline;
      cfg.maze_size = pipeline_size;
      const rlex::RisePipelineResult result = rlex::run_rise_pipeline(cfg, pipeline_seed);
      std::cout << "chosen_k," << result.chosen_k << '\n';
      std::cout << "steps_to_coverage," << result.phase2.steps_to_coverage << '\n';
      std::cout << "covered," << (result.phase2.covered ? 1 : 0) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
