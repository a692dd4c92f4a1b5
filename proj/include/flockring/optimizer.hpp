#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "flockring/simulator.hpp"

namespace flockring {

enum class Algorithm { GA, PSO, GWO };

Algorithm parse_algorithm(const std::string& name); ///< ga|pso|gwo

/// Targets of the distance-error cost: desired spacing and radius, the agent
/// count (how many shortest pairwise distances enter per frame) and the
/// number of recorded frames.
struct FitnessSpec {
    double d = 0.0;
    double d_l = 0.0;
    int n_agents = 0;
    long frames = 0;

    void validate() const;
};

FitnessSpec make_fitness_spec(const ScenarioConfig& base);

/// Number of distinct agent pairs, N(N-1)/2.
long pair_count(int n);

/// One tunable parameter with its box bounds.
struct ParamBound {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
};

/// Free parameters and fixed overrides of one optimization scenario.
struct ScenarioBounds {
    std::vector<ParamBound> free;
    std::vector<std::pair<std::string, double>> fixed;
};

/// The four tuning scenarios: (1) all eleven controller/function parameters
/// free; (2) sigmoid bounds pinned; (3) sigma/bump parameters pinned;
/// (4) only the four gains free.
ScenarioBounds scenario_bounds(int scenario);

/// Splices named parameter values into a scenario (gains or action params).
ScenarioConfig apply_named_params(ScenarioConfig base,
                                  const std::vector<std::pair<std::string, double>>& values);
ScenarioConfig apply_candidate(ScenarioConfig base, const std::vector<ParamBound>& free,
                               const std::vector<double>& candidate);

/// Frobenius-norm accumulation of squared deviations of the per-frame
/// shortest pairwise distances from d and of the leader distances from d_L.
/// Divergence yields +inf (candidate rejected, not fatal).
double fitness(const ScenarioConfig& config, const FitnessSpec& spec);

struct OptimizerConfig {
    Algorithm algorithm = Algorithm::GWO;
    int scenario = 4;
    int population = 30;
    long iterations = 500;
    std::uint64_t seed = 1;

    void validate() const;
};

struct OptimizeResult {
    std::vector<ParamBound> free;  ///< the tuned parameters, in candidate order
    std::vector<double> best;      ///< best-ever candidate
    double best_cost = 0.0;
    std::vector<double> history;   ///< best-so-far cost: initial population + one per iteration
};

using Objective = std::function<double(const std::vector<double>&)>;
using Repair = std::function<void(std::vector<double>&)>;

/// Generic bound-constrained minimizer used by all three algorithms; exposed
/// so benchmark objectives can exercise the search directly. Candidates are
/// clamped to bounds and passed through repair before every evaluation.
/// Deterministic given the seed; a generation's candidates may be evaluated
/// concurrently.
OptimizeResult minimize(Algorithm algorithm, const std::vector<ParamBound>& bounds,
                        const Objective& objective, int population, long iterations,
                        std::uint64_t seed, const Repair& repair = {});

/// Tunes the scenario's free parameters against the simulator fitness.
OptimizeResult optimize(const OptimizerConfig& cfg, const ScenarioConfig& base);

} // namespace flockring
