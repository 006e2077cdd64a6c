#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rlex/agents.hpp"
#include "rlex/bandit.hpp"
#include "rlex/csv.hpp"
#include "rlex/entropy.hpp"
#include "rlex/envs.hpp"
#include "rlex/intrinsic.hpp"
#include "rlex/mepc.hpp"
#include "rlex/plot.hpp"
#include "rlex/rng.hpp"

namespace rlex {

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

/// Per-run metrics with their mean, sample standard deviation, and the
/// "mean±std" display string.
struct RunSummary {
  std::string name;
  std::vector<double> values;
  double mean = 0.0;
  double stddev = 0.0;

  static RunSummary of(std::string name, std::vector<double> values) {
    RunSummary s;
    s.name = std::move(name);
    s.values = std::move(values);
    if (s.values.empty()) throw std::invalid_argument("run summary: no values");
    for (double v : s.values) s.mean += v;
    s.mean /= static_cast<double>(s.values.size());
    if (s.values.size() > 1) {
      double acc = 0.0;
      for (double v : s.values) acc += (v - s.mean) * (v - s.mean);
      s.stddev = std::sqrt(acc / static_cast<double>(s.values.size() - 1));
    }
    return s;
  }

  std::string display() const {
    std::ostringstream out;
    out.precision(6);
    out << mean << "±" << stddev;
    return out.str();
  }
};

/// One-sided bootstrap confidence that mean(slower) - mean(faster) > 0.
/// When paired, per-index differences are resampled (both vectors must come
/// from the same seed list); otherwise the two samples resample
/// independently.
inline double bootstrap_gap_confidence(const std::vector<double>& faster, const std::vector<double>& slower,
                                       int resamples = 10000, std::uint64_t seed = 0x9e3779b9ULL,
                                       bool paired = true) {
  if (faster.empty() || faster.size() != slower.size())
    throw std::invalid_argument("bootstrap: need equally-sized non-empty samples");
  Rng rng(seed);
  const int n = static_cast<int>(faster.size());
  int wins = 0;
  if (paired) {
    std::vector<double> diff(n);
    for (int i = 0; i < n; ++i) diff[i] = slower[i] - faster[i];
    for (int r = 0; r < resamples; ++r) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += diff[rng.uniform_int(n)];
      if (acc > 0.0) ++wins;
    }
  } else {
    for (int r = 0; r < resamples; ++r) {
      double a = 0.0;
      double b = 0.0;
      for (int i = 0; i < n; ++i) {
        a += faster[rng.uniform_int(n)];
        b += slower[rng.uniform_int(n)];
      }
      if (b - a > 0.0) ++wins;
    }
  }
  return static_cast<double>(wins) / static_cast<double>(resamples);
}

// ---------------------------------------------------------------------------
// Deterministic parallel map
// ---------------------------------------------------------------------------

/// Runs `task(i)` for i in [0, count) on `jobs` threads. Results are stored
/// by index, so parallel and serial execution produce identical output.
inline void parallel_for_index(int count, int jobs, const std::function<void(int)>& task) {
  if (count <= 0) return;
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

enum class ExperimentKind { kMaze, kBandit, kEstimate, kMepc, kCcp, kRisePipeline };

inline ExperimentKind experiment_kind_from_string(const std::string& name) {
  if (name == "maze") return ExperimentKind::kMaze;
  if (name == "bandit") return ExperimentKind::kBandit;
  if (name == "estimate") return ExperimentKind::kEstimate;
  if (name == "mepc") return ExperimentKind::kMepc;
  if (name == "ccp") return ExperimentKind::kCcp;
  if (name == "rise_pipeline" || name == "rise-pipeline") return ExperimentKind::kRisePipeline;
  throw std::invalid_argument("unknown experiment kind \"" + name +
                              "\"; valid: maze, bandit, estimate, mepc, ccp, rise_pipeline");
}

enum class StateEmbeddingKind { kCoords, kOneHot, kProjected };

inline StateEmbeddingKind embedding_kind_from_string(const std::string& name) {
  if (name == "coords") return StateEmbeddingKind::kCoords;
  if (name == "one_hot") return StateEmbeddingKind::kOneHot;
  if (name == "projected") return StateEmbeddingKind::kProjected;
  throw std::invalid_argument("unknown embedding \"" + name + "\"; valid: coords, one_hot, projected");
}

/// One agent variant of the maze benchmark.
struct MazeVariant {
  std::string name;
  IntrinsicKind generator = IntrinsicKind::kNone;
  IntrinsicConfig intrinsic;
};

struct MazeExperimentConfig {
  int size = 10;
  int portal_pairs = 2;
  double gamma = 0.99;
  bool sparse_rewards = false;
  QLearningConfig agent;
  std::int64_t max_total_steps = 1'600'000;
  StateEmbeddingKind embedding = StateEmbeddingKind::kCoords;
  std::uint64_t projection_seed = 17;
  std::vector<MazeVariant> variants;
};

struct BanditStrategyVariant {
  std::string name;
  BanditStrategyConfig config;
};

struct BanditExperimentConfig {
  std::vector<double> bernoulli_probs{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::int64_t horizon = 10'000;
  std::int64_t record_every = 100;
  std::vector<BanditStrategyVariant> strategies;
};

struct EstimateExperimentConfig {
  std::string points_file;
  double alpha = 0.5;
  int k = 3;
  bool search = false;
  int subsets = 8;
  int k_max = 15;
};

struct MepcExperimentConfig {
  std::string mdp_file;  // empty -> built-in chain
  int chain_length = 3;
  double gamma = 0.9;
  double alpha = 0.5;
  double sigma = 0.01;
  double epsilon = 0.05;
  std::int64_t iterations_override = 0;  // 0 -> use the bound
};

struct CcpExperimentConfig {
  std::string dist_file;
  double tol = 1e-4;
  std::int64_t monte_carlo_runs = 100'000;
};

struct RisePipelineConfig {
  int maze_size = 10;
  double gamma = 0.99;
  QLearningConfig agent;
  std::int64_t phase1_steps = 10'000;
  int subsets = 8;
  int k_max = 15;
  double alpha = 0.1;
  double lambda0 = 0.1;
  double kappa = 1e-5;
  std::int64_t max_total_steps = 400'000;
  int episodes = 0;  // 0 -> run until coverage or budget
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kMaze;
  std::vector<std::uint64_t> seeds;
  int jobs = 0;
  std::string out_dir = "out";
  bool plot = false;

  MazeExperimentConfig maze;
  BanditExperimentConfig bandit;
  EstimateExperimentConfig estimate;
  MepcExperimentConfig mepc;
  CcpExperimentConfig ccp;
  RisePipelineConfig pipeline;

  void validate() const {
    if (seeds.empty() && kind != ExperimentKind::kEstimate && kind != ExperimentKind::kCcp &&
        kind != ExperimentKind::kMepc)
      throw std::invalid_argument("experiment config: seed list must not be empty");
    std::vector<std::uint64_t> sorted = seeds;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("experiment config: seeds must be distinct");
    if (kind == ExperimentKind::kMaze && maze.variants.empty())
      throw std::invalid_argument("experiment config: maze experiment needs at least one variant");
    if (kind == ExperimentKind::kBandit && bandit.strategies.empty())
      throw std::invalid_argument("experiment config: bandit experiment needs at least one strategy");
    if (kind == ExperimentKind::kEstimate && estimate.points_file.empty())
      throw std::invalid_argument("experiment config: estimate needs a points file");
    if (kind == ExperimentKind::kCcp && ccp.dist_file.empty())
      throw std::invalid_argument("experiment config: ccp needs a distribution file");
  }
};

/// Loads and validates the JSON experiment file; unknown keys are rejected
/// to surface typos.
inline ExperimentConfig load_experiment_config(const nlohmann::json& j) {
  ExperimentConfig cfg;
  const auto known_root = {"kind", "seeds", "seed_count", "seed_base", "jobs",  "out_dir",
                           "plot", "maze",  "bandit",     "estimate",  "mepc", "ccp", "rise_pipeline"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known_root.begin(), known_root.end(), key) == known_root.end())
      throw std::invalid_argument("config: unknown key \"" + key + "\"");
  }
  cfg.kind = experiment_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("seeds")) {
    cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  } else if (j.contains("seed_count")) {
    const auto count = j.at("seed_count").get<std::uint64_t>();
    const auto base = j.value("seed_base", std::uint64_t{0});
    for (std::uint64_t s = 0; s < count; ++s) cfg.seeds.push_back(base + s);
  }
  cfg.jobs = j.value("jobs", 0);
  cfg.out_dir = j.value("out_dir", std::string("out"));
  cfg.plot = j.value("plot", false);

  if (j.contains("maze")) {
    const auto& m = j.at("maze");
    cfg.maze.size = m.value("size", 10);
    cfg.maze.portal_pairs = m.value("portal_pairs", 2);
    cfg.maze.gamma = m.value("gamma", 0.99);
    cfg.maze.sparse_rewards = m.value("reward_scheme", std::string("unit_cost")) == "sparse";
    cfg.maze.max_total_steps = m.value("max_total_steps", std::int64_t{1'600'000});
    if (m.contains("embedding")) cfg.maze.embedding = embedding_kind_from_string(m.at("embedding"));
    if (m.contains("agent")) {
      cfg.maze.agent.step_size = m.at("agent").value("step_size", 0.2);
      cfg.maze.agent.epsilon = m.at("agent").value("epsilon", 0.001);
      cfg.maze.agent.gamma = cfg.maze.gamma;
    } else {
      cfg.maze.agent.gamma = cfg.maze.gamma;
    }
    for (const auto& v : m.value("variants", nlohmann::json::array())) {
      MazeVariant variant;
      variant.name = v.at("name").get<std::string>();
      variant.generator = intrinsic_kind_from_string(v.value("generator", std::string("none")));
      variant.intrinsic.alpha = v.value("alpha", 0.1);
      variant.intrinsic.lambda0 = v.value("lambda0", 0.1);
      variant.intrinsic.kappa = v.value("kappa", 1e-5);
      variant.intrinsic.zeta = v.value("zeta", 0.0);
      variant.intrinsic.k = v.value("k", 5);
      variant.intrinsic.embedding_dim = v.value("embedding_dim", 16);
      cfg.maze.variants.push_back(std::move(variant));
    }
  }
  if (j.contains("bandit")) {
    const auto& b = j.at("bandit");
    if (b.contains("probs")) cfg.bandit.bernoulli_probs = b.at("probs").get<std::vector<double>>();
    cfg.bandit.horizon = b.value("horizon", std::int64_t{10'000});
    cfg.bandit.record_every = b.value("record_every", std::int64_t{100});
    for (const auto& s : b.value("strategies", nlohmann::json::array())) {
      BanditStrategyVariant variant;
      variant.name = s.at("name").get<std::string>();
      variant.config.strategy = bandit_strategy_from_string(s.at("strategy").get<std::string>());
      variant.config.epsilon = s.value("epsilon", 0.1);
      variant.config.ucb_c = s.value("c", 1.0);
      variant.config.temperature = s.value("temperature", 0.5);
      cfg.bandit.strategies.push_back(std::move(variant));
    }
  }
  if (j.contains("estimate")) {
    const auto& e = j.at("estimate");
    cfg.estimate.points_file = e.value("points_file", std::string());
    cfg.estimate.alpha = e.value("alpha", 0.5);
    cfg.estimate.k = e.value("k", 3);
    cfg.estimate.search = e.value("search", false);
    cfg.estimate.subsets = e.value("subsets", 8);
    cfg.estimate.k_max = e.value("k_max", 15);
  }
  if (j.contains("mepc")) {
    const auto& m = j.at("mepc");
    cfg.mepc.mdp_file = m.value("mdp_file", std::string());
    cfg.mepc.chain_length = m.value("chain_length", 3);
    cfg.mepc.gamma = m.value("gamma", 0.9);
    cfg.mepc.alpha = m.value("alpha", 0.5);
    cfg.mepc.sigma = m.value("sigma", 0.01);
    cfg.mepc.epsilon = m.value("epsilon", 0.05);
    cfg.mepc.iterations_override = m.value("iterations", std::int64_t{0});
  }
  if (j.contains("ccp")) {
    const auto& c = j.at("ccp");
    cfg.ccp.dist_file = c.value("dist_file", std::string());
    cfg.ccp.tol = c.value("tol", 1e-4);
    cfg.ccp.monte_carlo_runs = c.value("monte_carlo_runs", std::int64_t{100'000});
  }
  if (j.contains("rise_pipeline")) {
    const auto& p = j.at("rise_pipeline");
    cfg.pipeline.maze_size = p.value("maze_size", 10);
    cfg.pipeline.gamma = p.value("gamma", 0.99);
    cfg.pipeline.phase1_steps = p.value("phase1_steps", std::int64_t{10'000});
    cfg.pipeline.subsets = p.value("subsets", 8);
    cfg.pipeline.k_max = p.value("k_max", 15);
    cfg.pipeline.alpha = p.value("alpha", 0.1);
    cfg.pipeline.lambda0 = p.value("lambda0", 0.1);
    cfg.pipeline.kappa = p.value("kappa", 1e-5);
    cfg.pipeline.max_total_steps = p.value("max_total_steps", std::int64_t{400'000});
  }
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_experiment_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  return load_experiment_config(j);
}

// ---------------------------------------------------------------------------
// Maze coverage benchmark
// ---------------------------------------------------------------------------

/// Builds the per-state embedding table used by the k-NN novelty rewards.
inline std::vector<std::vector<double>> make_state_embeddings(const CompiledGridEnv& env,
                                                              StateEmbeddingKind kind, int projected_dim,
                                                              std::uint64_t projection_seed) {
  std::vector<std::vector<double>> table;
  table.reserve(env.mdp.n_states);
  switch (kind) {
    case StateEmbeddingKind::kCoords:
      for (const auto& [r, c] : env.state_cells)
        table.push_back({static_cast<double>(r), static_cast<double>(c)});
      break;
    case StateEmbeddingKind::kOneHot:
      for (int s = 0; s < env.mdp.n_states; ++s) table.push_back(one_hot_encode(s, env.mdp.n_states));
      break;
    case StateEmbeddingKind::kProjected: {
      RandomProjectionEncoder encoder(env.mdp.n_states, projected_dim, projection_seed);
      for (int s = 0; s < env.mdp.n_states; ++s)
        table.push_back(encoder.encode(one_hot_encode(s, env.mdp.n_states)));
      break;
    }
  }
  return table;
}

struct MazeRunResult {
  std::int64_t steps_to_coverage = 0;
  bool covered = false;
  std::int64_t episodes = 0;
  double extrinsic_return_sum = 0.0;
  double intrinsic_sum = 0.0;
};

/// One seeded maze-coverage run: episodes repeat until every state has been
/// visited or the step budget runs out. The maze topology depends only on
/// (size, seed), and the agent's action noise only on the seed, so variant
/// comparisons are paired.
inline MazeRunResult run_maze_coverage(const MazeExperimentConfig& cfg, const MazeVariant& variant,
                                       std::uint64_t seed) {
  const MazeSpec spec = generate_maze_spec(cfg.size, seed, cfg.portal_pairs);
  const GridRewardScheme scheme =
      cfg.sparse_rewards ? GridRewardScheme::sparse(cfg.size, cfg.size) : GridRewardScheme::unit_cost();
  const CompiledGridEnv env = build_maze(spec, cfg.gamma, scheme);

  QLearningConfig agent_cfg = cfg.agent;
  agent_cfg.gamma = cfg.gamma;
  QLearningAgent agent(env.mdp.n_states, env.mdp.n_actions, agent_cfg);
  if (variant.generator != IntrinsicKind::kNone) {
    auto embeddings = make_state_embeddings(env, cfg.embedding, variant.intrinsic.embedding_dim,
                                            cfg.projection_seed);
    agent.attach_intrinsic(std::make_unique<RewardGenerator>(variant.generator, variant.intrinsic,
                                                             std::move(embeddings), seed ^ 0xabcdef12ULL),
                           variant.intrinsic);
  }

  Rng rng = Rng::for_run(seed, 1);
  EnvState env_state(&env.mdp);
  CoverageCounter coverage(env.mdp.n_states);
  MazeRunResult result;
  while (!coverage.complete() && coverage.steps_taken() < cfg.max_total_steps) {
    env_state.reset_to(env.start_state);
    const std::int64_t remaining = cfg.max_total_steps - coverage.steps_taken();
    const EpisodeStats stats =
        agent.run_episode(env.mdp, env_state, rng, std::min(env.episode_step_cap, remaining), &coverage);
    ++result.episodes;
    result.extrinsic_return_sum += stats.extrinsic_return;
    result.intrinsic_sum += stats.intrinsic_sum;
  }
  result.covered = coverage.complete();
  result.steps_to_coverage = result.covered ? coverage.completion_step() : cfg.max_total_steps;
  return result;
}

struct MazeBenchmarkResult {
  std::vector<MazeVariant> variants;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<MazeRunResult>> runs;  // [variant][seed]
  std::vector<RunSummary> summaries;             // steps to coverage per variant
};

inline MazeBenchmarkResult run_maze_benchmark(const ExperimentConfig& config) {
  const MazeExperimentConfig& cfg = config.maze;
  MazeBenchmarkResult result;
  result.variants = cfg.variants;
  result.seeds = config.seeds;
  const int n_variants = static_cast<int>(cfg.variants.size());
  const int n_seeds = static_cast<int>(config.seeds.size());
  result.runs.assign(n_variants, std::vector<MazeRunResult>(n_seeds));
  parallel_for_index(n_variants * n_seeds, config.jobs, [&](int index) {
    const int v = index / n_seeds;
    const int s = index % n_seeds;
    result.runs[v][s] = run_maze_coverage(cfg, cfg.variants[v], config.seeds[s]);
  });
  for (int v = 0; v < n_variants; ++v) {
    std::vector<double> steps(n_seeds);
    for (int s = 0; s < n_seeds; ++s) steps[s] = static_cast<double>(result.runs[v][s].steps_to_coverage);
    result.summaries.push_back(RunSummary::of(cfg.variants[v].name, std::move(steps)));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Bandit comparison
// ---------------------------------------------------------------------------

struct BanditBenchmarkResult {
  std::vector<BanditStrategyVariant> strategies;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<BanditHistory>> histories;  // [strategy][seed]
  std::vector<RunSummary> final_regret;
};

inline BanditBenchmarkResult run_bandit_benchmark(const ExperimentConfig& config) {
  const BanditExperimentConfig& cfg = config.bandit;
  const BanditEnv env = BanditEnv::bernoulli(cfg.bernoulli_probs);
  BanditBenchmarkResult result;
  result.strategies = cfg.strategies;
  result.seeds = config.seeds;
  const int n_strategies = static_cast<int>(cfg.strategies.size());
  const int n_seeds = static_cast<int>(config.seeds.size());
  result.histories.assign(n_strategies, std::vector<BanditHistory>(n_seeds));
  parallel_for_index(n_strategies * n_seeds, config.jobs, [&](int index) {
    const int v = index / n_seeds;
    const int s = index % n_seeds;
    result.histories[v][s] =
        run_bandit(cfg.strategies[v].config, env, cfg.horizon, Rng::for_run(config.seeds[s], v)());
  });
  for (int v = 0; v < n_strategies; ++v) {
    std::vector<double> final_values(n_seeds);
    for (int s = 0; s < n_seeds; ++s) final_values[s] = result.histories[v][s].cumulative_regret.back();
    result.final_regret.push_back(RunSummary::of(cfg.strategies[v].name, std::move(final_values)));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Two-phase tabular pipeline
// ---------------------------------------------------------------------------

struct RisePipelineResult {
  int chosen_k = 1;
  std::vector<double> dispersion;
  MazeRunResult phase2;
};

/// Phase 1 rolls a uniform-random policy to collect embeddings and selects
/// the neighbor order by subset stability; phase 2 trains Q-learning with
/// the distance-exponent reward using the found k.
inline RisePipelineResult run_rise_pipeline(const RisePipelineConfig& cfg, std::uint64_t seed) {
  const MazeSpec spec = generate_maze_spec(cfg.maze_size, seed, 2);
  const CompiledGridEnv env = build_maze(spec, cfg.gamma);
  const auto embeddings = make_state_embeddings(env, StateEmbeddingKind::kCoords, 16, seed);

  if (cfg.phase1_steps < static_cast<std::int64_t>(cfg.subsets) * (cfg.k_max + 1))
    throw std::invalid_argument("rise pipeline: phase 1 sample budget too small for the subset search");

  // Phase 1: uniform-random rollout.
  Rng rng = Rng::for_run(seed, 0);
  EnvState env_state(&env.mdp);
  env_state.reset_to(env.start_state);
  PointSet phase1_points(static_cast<std::size_t>(cfg.phase1_steps), embeddings.front().size());
  for (std::int64_t t = 0; t < cfg.phase1_steps; ++t) {
    if (env_state.done()) env_state.reset_to(env.start_state);
    const int a = rng.uniform_int(env.mdp.n_actions);
    const StepResult step = env_state.step(a, rng);
    std::copy(embeddings[step.next_state].begin(), embeddings[step.next_state].end(),
              phase1_points.point(static_cast<std::size_t>(t)));
  }
  const KSearchResult search = search_k(phase1_points, cfg.subsets, cfg.k_max, RenyiOrder(cfg.alpha), seed);

  // Phase 2: Q-learning with the found k.
  ExperimentConfig exp;
  exp.seeds = {seed};
  MazeExperimentConfig maze_cfg;
  maze_cfg.size = cfg.maze_size;
  maze_cfg.gamma = cfg.gamma;
  maze_cfg.agent = cfg.agent;
  maze_cfg.max_total_steps = cfg.max_total_steps;
  MazeVariant variant;
  variant.name = "rise";
  variant.generator = IntrinsicKind::kRise;
  variant.intrinsic.alpha = cfg.alpha;
  variant.intrinsic.lambda0 = cfg.lambda0;
  variant.intrinsic.kappa = cfg.kappa;
  variant.intrinsic.k = search.k;

  RisePipelineResult result;
  result.chosen_k = search.k;
  result.dispersion = search.dispersion;
  result.phase2 = run_maze_coverage(maze_cfg, variant, seed);
  return result;
}

// ---------------------------------------------------------------------------
// Output files
// ---------------------------------------------------------------------------

inline void write_maze_outputs(const MazeBenchmarkResult& result, const std::string& out_dir, bool plot) {
  std::filesystem::create_directories(out_dir);
  {
    auto raw = open_output_file(out_dir + "/raw.csv");
    CsvWriter csv(raw);
    csv.header({"variant", "seed", "steps_to_coverage", "covered", "episodes", "extrinsic_return_sum",
                "intrinsic_sum"});
    for (std::size_t v = 0; v < result.variants.size(); ++v) {
      for (std::size_t s = 0; s < result.seeds.size(); ++s) {
        const MazeRunResult& run = result.runs[v][s];
        csv.row({result.variants[v].name, CsvWriter::field(result.seeds[s]),
                 CsvWriter::field(run.steps_to_coverage), run.covered ? "1" : "0",
                 CsvWriter::field(run.episodes), CsvWriter::field(run.extrinsic_return_sum),
                 CsvWriter::field(run.intrinsic_sum)});
      }
    }
  }
  {
    auto summary = open_output_file(out_dir + "/summary.csv");
    CsvWriter csv(summary);
    csv.header({"variant", "mean", "std", "display"});
    for (const RunSummary& s : result.summaries)
      csv.row({s.name, CsvWriter::field(s.mean), CsvWriter::field(s.stddev), s.display()});
  }
  if (plot) {
    std::vector<PlotSeries> series;
    for (std::size_t v = 0; v < result.variants.size(); ++v) {
      PlotSeries ps;
      ps.name = result.variants[v].name;
      std::vector<double> sorted = result.summaries[v].values;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i < sorted.size(); ++i) {
        ps.x.push_back(static_cast<double>(i + 1) / static_cast<double>(sorted.size()));
        ps.mean.push_back(sorted[i]);
      }
      series.push_back(std::move(ps));
    }
    auto svg = open_output_file(out_dir + "/plot.svg");
    emit_plot(series, {"Steps to full coverage", "run quantile", "environment steps"}, svg);
  }
}

inline void write_bandit_outputs(const BanditBenchmarkResult& result, std::int64_t record_every,
                                 const std::string& out_dir, bool plot) {
  std::filesystem::create_directories(out_dir);
  {
    auto raw = open_output_file(out_dir + "/raw.csv");
    CsvWriter csv(raw);
    csv.header({"strategy", "seed", "t", "arm", "reward", "cumulative_reward", "cumulative_regret"});
    for (std::size_t v = 0; v < result.strategies.size(); ++v) {
      for (std::size_t s = 0; s < result.seeds.size(); ++s) {
        const BanditHistory& h = result.histories[v][s];
        for (std::size_t t = 0; t < h.arms.size(); ++t) {
          if ((t + 1) % static_cast<std::size_t>(record_every) != 0 && t + 1 != h.arms.size()) continue;
          csv.row({result.strategies[v].name, CsvWriter::field(result.seeds[s]),
                   CsvWriter::field(static_cast<std::int64_t>(t + 1)), CsvWriter::field(h.arms[t]),
                   CsvWriter::field(h.rewards[t]), CsvWriter::field(h.cumulative_reward[t]),
                   CsvWriter::field(h.cumulative_regret[t])});
        }
      }
    }
  }
  {
    auto summary = open_output_file(out_dir + "/summary.csv");
    CsvWriter csv(summary);
    csv.header({"strategy", "final_regret_mean", "final_regret_std", "display"});
    for (const RunSummary& s : result.final_regret)
      csv.row({s.name, CsvWriter::field(s.mean), CsvWriter::field(s.stddev), s.display()});
  }
  if (plot) {
    std::vector<PlotSeries> series;
    for (std::size_t v = 0; v < result.strategies.size(); ++v) {
      PlotSeries ps;
      ps.name = result.strategies[v].name;
      const std::size_t horizon = result.histories[v][0].cumulative_regret.size();
      for (std::size_t t = record_every - 1; t < horizon; t += record_every) {
        double mean = 0.0;
        for (std::size_t s = 0; s < result.seeds.size(); ++s)
          mean += result.histories[v][s].cumulative_regret[t];
        mean /= static_cast<double>(result.seeds.size());
        double var = 0.0;
        for (std::size_t s = 0; s < result.seeds.size(); ++s) {
          const double d = result.histories[v][s].cumulative_regret[t] - mean;
          var += d * d;
        }
        ps.x.push_back(static_cast<double>(t + 1));
        ps.mean.push_back(mean);
        ps.stddev.push_back(result.seeds.size() > 1
                                ? std::sqrt(var / static_cast<double>(result.seeds.size() - 1))
                                : 0.0);
      }
      series.push_back(std::move(ps));
    }
    auto svg = open_output_file(out_dir + "/plot.svg");
    emit_plot(series, {"Cumulative regret", "step", "regret"}, svg);
  }
}

/// Reference hyperparameters of the GPU-scale deep-RL experiments. They are
/// documented constants only; nothing in this library consumes them.
struct DeepRlReferenceDefaults {
  static constexpr double kActorCriticLearningRate = 2.5e-4;
  static constexpr double kEncoderLearningRate = 5e-3;
  static constexpr int kEncoderBatchSize = 256;
  static constexpr int kParallelEnvironments = 8;
  static constexpr std::int64_t kPolicyUpdateEnvironmentSteps = 10'000'000;
  static constexpr std::int64_t kPhase1SampleSteps = 100'000;
  static constexpr int kImageEmbeddingSize = 128;
  static constexpr int kSubsetCount = 8;
  static constexpr int kKValueThreshold = 15;
  static constexpr double kGaeCoefficient = 0.95;
  static constexpr double kValueFunctionCoefficient = 0.05;
  static constexpr double kGradientClipThreshold = 5.0;
  static constexpr double kRenyiOrder = 0.1;
  static constexpr double kIntrinsicCoefficient = 0.1;
  static constexpr double kDecayRate = 1e-5;
  static constexpr int kNeighborOrder = 5;
};

}  // namespace rlex
