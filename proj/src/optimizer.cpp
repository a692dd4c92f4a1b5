#include "flockring/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "flockring/errors.hpp"
#include "flockring/parallel.hpp"

namespace flockring {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Canonical hyperparameters.
constexpr int kTournamentSize = 3;
constexpr double kBlendAlpha = 0.5;
constexpr double kMutationStddevFraction = 0.1;
constexpr double kPsoInertia = 0.729;
constexpr double kPsoCognitive = 1.494;
constexpr double kPsoSocial = 1.494;

using Candidate = std::vector<double>;

void clamp_to(const std::vector<ParamBound>& bounds, Candidate& x) {
    for (std::size_t d = 0; d < bounds.size(); ++d) {
        x[d] = std::clamp(x[d], bounds[d].lo, bounds[d].hi);
    }
}

std::vector<double> evaluate_all(const std::vector<Candidate>& xs, const Objective& objective) {
    return parallel_map(xs.size(), [&](std::size_t i) { return objective(xs[i]); });
}

struct BestTracker {
    Candidate best;
    double cost = kInf;
    std::vector<double> history;

    void absorb(const std::vector<Candidate>& xs, const std::vector<double>& costs) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (costs[i] < cost) {
                cost = costs[i];
                best = xs[i];
            }
        }
    }
    void record() { history.push_back(cost); }
};

std::vector<Candidate> initial_population(const std::vector<ParamBound>& bounds, int population,
                                          std::mt19937_64& rng, const Repair& repair) {
    std::vector<Candidate> xs(population, Candidate(bounds.size()));
    for (auto& x : xs) {
        for (std::size_t d = 0; d < bounds.size(); ++d) {
            x[d] = std::uniform_real_distribution<double>(bounds[d].lo, bounds[d].hi)(rng);
        }
        if (repair) repair(x);
    }
    return xs;
}

OptimizeResult run_ga(const std::vector<ParamBound>& bounds, const Objective& objective,
                      int population, long iterations, std::mt19937_64& rng, const Repair& repair) {
    auto xs = initial_population(bounds, population, rng, repair);
    auto costs = evaluate_all(xs, objective);
    BestTracker tracker;
    tracker.absorb(xs, costs);
    tracker.record();

    const auto tournament = [&]() -> const Candidate& {
        std::uniform_int_distribution<int> pick(0, population - 1);
        int winner = pick(rng);
        for (int k = 1; k < kTournamentSize; ++k) {
            const int challenger = pick(rng);
            if (costs[challenger] < costs[winner]) winner = challenger;
        }
        return xs[winner];
    };

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double mutation_prob = 1.0 / static_cast<double>(bounds.size());

    for (long it = 0; it < iterations; ++it) {
        std::vector<Candidate> offspring;
        offspring.reserve(population);
        offspring.push_back(tracker.best); // elitism of 1
        while (static_cast<int>(offspring.size()) < population) {
            const Candidate& p1 = tournament();
            const Candidate& p2 = tournament();
            Candidate child(bounds.size());
            for (std::size_t d = 0; d < bounds.size(); ++d) {
                const double lo = std::min(p1[d], p2[d]);
                const double hi = std::max(p1[d], p2[d]);
                const double spread = hi - lo;
                child[d] = lo - kBlendAlpha * spread +
                           unit(rng) * (1.0 + 2.0 * kBlendAlpha) * spread;
                if (unit(rng) < mutation_prob) {
                    child[d] += gauss(rng) * kMutationStddevFraction * (bounds[d].hi - bounds[d].lo);
                }
            }
            clamp_to(bounds, child);
            if (repair) repair(child);
            offspring.push_back(std::move(child));
        }
        xs = std::move(offspring);
        costs = evaluate_all(xs, objective);
        tracker.absorb(xs, costs);
        tracker.record();
    }

    return {bounds, tracker.best, tracker.cost, tracker.history};
}

OptimizeResult run_pso(const std::vector<ParamBound>& bounds, const Objective& objective,
                       int population, long iterations, std::mt19937_64& rng, const Repair& repair) {
    auto xs = initial_population(bounds, population, rng, repair);
    auto costs = evaluate_all(xs, objective);
    std::vector<Candidate> velocity(population, Candidate(bounds.size(), 0.0));
    std::vector<Candidate> pbest = xs;
    std::vector<double> pbest_cost = costs;
    BestTracker tracker;
    tracker.absorb(xs, costs);
    tracker.record();

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (long it = 0; it < iterations; ++it) {
        for (int i = 0; i < population; ++i) {
            for (std::size_t d = 0; d < bounds.size(); ++d) {
                velocity[i][d] = kPsoInertia * velocity[i][d] +
                                 kPsoCognitive * unit(rng) * (pbest[i][d] - xs[i][d]) +
                                 kPsoSocial * unit(rng) * (tracker.best[d] - xs[i][d]);
                xs[i][d] += velocity[i][d];
            }
            clamp_to(bounds, xs[i]);
            if (repair) repair(xs[i]);
        }
        costs = evaluate_all(xs, objective);
        for (int i = 0; i < population; ++i) {
            if (costs[i] < pbest_cost[i]) {
                pbest_cost[i] = costs[i];
                pbest[i] = xs[i];
            }
        }
        tracker.absorb(xs, costs);
        tracker.record();
    }

    return {bounds, tracker.best, tracker.cost, tracker.history};
}

OptimizeResult run_gwo(const std::vector<ParamBound>& bounds, const Objective& objective,
                       int population, long iterations, std::mt19937_64& rng, const Repair& repair) {
    auto xs = initial_population(bounds, population, rng, repair);
    auto costs = evaluate_all(xs, objective);
    BestTracker tracker;
    tracker.absorb(xs, costs);
    tracker.record();

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (long it = 0; it < iterations; ++it) {
        // Rank the current pack; alpha/beta/delta lead the encircling update.
        std::vector<int> order(xs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return costs[a] < costs[b]; });
        const Candidate alpha = xs[order[0]];
        const Candidate beta = xs[order[std::min<std::size_t>(1, xs.size() - 1)]];
        const Candidate delta = xs[order[std::min<std::size_t>(2, xs.size() - 1)]];

        const double a = 2.0 - 2.0 * static_cast<double>(it) / static_cast<double>(iterations);
        for (auto& x : xs) {
            for (std::size_t d = 0; d < bounds.size(); ++d) {
                double sum = 0.0;
                for (const Candidate* leader : {&alpha, &beta, &delta}) {
                    const double coeff_a = 2.0 * a * unit(rng) - a;
                    const double coeff_c = 2.0 * unit(rng);
                    const double dist = std::abs(coeff_c * (*leader)[d] - x[d]);
                    sum += (*leader)[d] - coeff_a * dist;
                }
                x[d] = sum / 3.0;
            }
            clamp_to(bounds, x);
            if (repair) repair(x);
        }
        costs = evaluate_all(xs, objective);
        tracker.absorb(xs, costs);
        tracker.record();
    }

    return {bounds, tracker.best, tracker.cost, tracker.history};
}

} // namespace

Algorithm parse_algorithm(const std::string& name) {
    if (name == "ga") return Algorithm::GA;
    if (name == "pso") return Algorithm::PSO;
    if (name == "gwo") return Algorithm::GWO;
    throw std::invalid_argument("unknown algorithm '" + name + "' (expected ga|pso|gwo)");
}

void FitnessSpec::validate() const {
    if (n_agents < 3) throw std::invalid_argument("FitnessSpec: need at least 3 agents");
    if (frames < 1) throw std::invalid_argument("FitnessSpec: need at least 1 frame");
    if (d <= 0.0 || d_l <= 0.0) throw std::invalid_argument("FitnessSpec: distances must be positive");
}

FitnessSpec make_fitness_spec(const ScenarioConfig& base) {
    FitnessSpec spec;
    spec.d = base.params.d;
    spec.d_l = base.params.d_l;
    spec.n_agents = base.agent_count;
    spec.frames = std::lround(base.t_final / base.dt);
    spec.validate();
    return spec;
}

long pair_count(int n) {
    if (n < 1) throw std::invalid_argument("pair_count: n must be positive");
    return static_cast<long>(n) * (n - 1) / 2;
}

ScenarioBounds scenario_bounds(int scenario) {
    const ParamBound gain_bounds[] = {{"c1_alpha", 0.01, 20.0},
                                      {"c2_alpha", 0.01, 20.0},
                                      {"c1_gamma", 0.01, 20.0},
                                      {"c2_gamma", 0.01, 20.0}};
    const ParamBound sigmoid_bounds[] = {{"a", 0.01, 10.0},
                                         {"b", 0.01, 10.0},
                                         {"a_l", 0.01, 10.0},
                                         {"b_l", 0.01, 10.0}};
    const ParamBound sigma_bounds[] = {{"eps", 0.01, 0.99},
                                       {"h", 0.01, 0.99},
                                       {"eps_l", 0.01, 0.99}};
    const std::vector<std::pair<std::string, double>> sigmoid_fixed = {
        {"a", 5.0}, {"b", 5.0}, {"a_l", 3.0}, {"b_l", 3.0}};
    const std::vector<std::pair<std::string, double>> sigma_fixed = {
        {"eps", 0.1}, {"h", 0.2}, {"eps_l", 0.1}};

    ScenarioBounds out;
    out.free.assign(std::begin(gain_bounds), std::end(gain_bounds));
    switch (scenario) {
        case 1:
            out.free.insert(out.free.end(), std::begin(sigmoid_bounds), std::end(sigmoid_bounds));
            out.free.insert(out.free.end(), std::begin(sigma_bounds), std::end(sigma_bounds));
            break;
        case 2:
            out.free.insert(out.free.end(), std::begin(sigma_bounds), std::end(sigma_bounds));
            out.fixed = sigmoid_fixed;
            break;
        case 3:
            out.free.insert(out.free.end(), std::begin(sigmoid_bounds), std::end(sigmoid_bounds));
            out.fixed = sigma_fixed;
            break;
        case 4:
            out.fixed = sigmoid_fixed;
            out.fixed.insert(out.fixed.end(), sigma_fixed.begin(), sigma_fixed.end());
            break;
        default:
            throw std::invalid_argument("scenario must be in 1..4");
    }
    return out;
}

namespace {

void set_named(ScenarioConfig& config, const std::string& name, double value) {
    if (name == "c1_alpha") config.gains.c1_alpha = value;
    else if (name == "c2_alpha") config.gains.c2_alpha = value;
    else if (name == "c1_beta") config.gains.c1_beta = value;
    else if (name == "c2_beta") config.gains.c2_beta = value;
    else if (name == "c1_gamma") config.gains.c1_gamma = value;
    else if (name == "c2_gamma") config.gains.c2_gamma = value;
    else if (name == "a") config.params.a = value;
    else if (name == "b") config.params.b = value;
    else if (name == "a_l") config.params.a_l = value;
    else if (name == "b_l") config.params.b_l = value;
    else if (name == "eps") config.params.eps = value;
    else if (name == "h") config.params.h = value;
    else if (name == "eps_l") config.params.eps_l = value;
    else throw std::invalid_argument("unknown tunable parameter '" + name + "'");
}

// Keeps the sigmoid bound pairs ordered when both ends are free.
Repair make_pair_repair(const std::vector<ParamBound>& free) {
    std::vector<std::pair<int, int>> swaps;
    const auto index_of = [&free](const std::string& name) {
        for (std::size_t i = 0; i < free.size(); ++i) {
            if (free[i].name == name) return static_cast<int>(i);
        }
        return -1;
    };
    for (const auto& [lo_name, hi_name] : {std::pair{"a", "b"}, std::pair{"a_l", "b_l"}}) {
        const int lo = index_of(lo_name);
        const int hi = index_of(hi_name);
        if (lo >= 0 && hi >= 0) swaps.emplace_back(lo, hi);
    }
    if (swaps.empty()) return {};
    return [swaps](std::vector<double>& x) {
        for (const auto& [lo, hi] : swaps) {
            if (x[lo] > x[hi]) std::swap(x[lo], x[hi]);
        }
    };
}

} // namespace

ScenarioConfig apply_named_params(ScenarioConfig base,
                                  const std::vector<std::pair<std::string, double>>& values) {
    for (const auto& [name, value] : values) set_named(base, name, value);
    return base;
}

ScenarioConfig apply_candidate(ScenarioConfig base, const std::vector<ParamBound>& free,
                               const std::vector<double>& candidate) {
    if (free.size() != candidate.size()) {
        throw std::invalid_argument("candidate length does not match the free parameter list");
    }
    for (std::size_t i = 0; i < free.size(); ++i) set_named(base, free[i].name, candidate[i]);
    return base;
}

double fitness(const ScenarioConfig& config, const FitnessSpec& spec) {
    double sum = 0.0;
    std::vector<double> pairwise;
    try {
        run_stream(config, [&](const Simulator& sim) {
            const World& world = sim.world();
            pairwise.clear();
            for (std::size_t i = 0; i < world.agents.size(); ++i) {
                if (!world.agents[i].alive) continue;
                const Vec2& qi = world.agents[i].q;
                sum += std::pow((qi - world.leader.q_r).norm() - spec.d_l, 2);
                for (std::size_t j = i + 1; j < world.agents.size(); ++j) {
                    if (!world.agents[j].alive) continue;
                    pairwise.push_back((qi - world.agents[j].q).norm());
                }
            }
            const std::size_t keep = std::min<std::size_t>(spec.n_agents, pairwise.size());
            std::nth_element(pairwise.begin(), pairwise.begin() + keep, pairwise.end());
            for (std::size_t k = 0; k < keep; ++k) {
                sum += std::pow(pairwise[k] - spec.d, 2);
            }
        });
    } catch (const DivergenceError&) {
        return kInf;
    }
    return std::sqrt(sum);
}

void OptimizerConfig::validate() const {
    if (population < 2) throw std::invalid_argument("OptimizerConfig: population must be at least 2");
    if (iterations < 1) throw std::invalid_argument("OptimizerConfig: iterations must be at least 1");
    if (scenario < 1 || scenario > 4) throw std::invalid_argument("OptimizerConfig: scenario must be in 1..4");
}

OptimizeResult minimize(Algorithm algorithm, const std::vector<ParamBound>& bounds,
                        const Objective& objective, int population, long iterations,
                        std::uint64_t seed, const Repair& repair) {
    if (bounds.empty()) throw std::invalid_argument("minimize: no parameters to tune");
    for (const auto& bound : bounds) {
        if (!(bound.lo < bound.hi) || !std::isfinite(bound.lo) || !std::isfinite(bound.hi)) {
            throw std::invalid_argument("minimize: bad bounds for '" + bound.name + "'");
        }
    }
    if (population < 2) throw std::invalid_argument("minimize: population must be at least 2");

    std::mt19937_64 rng(seed);
    switch (algorithm) {
        case Algorithm::GA: return run_ga(bounds, objective, population, iterations, rng, repair);
        case Algorithm::PSO: return run_pso(bounds, objective, population, iterations, rng, repair);
        case Algorithm::GWO: return run_gwo(bounds, objective, population, iterations, rng, repair);
    }
    throw std::logic_error("unreachable");
}

OptimizeResult optimize(const OptimizerConfig& cfg, const ScenarioConfig& base) {
    cfg.validate();
    const ScenarioBounds bounds = scenario_bounds(cfg.scenario);
    const ScenarioConfig pinned = apply_named_params(base, bounds.fixed);
    const FitnessSpec spec = make_fitness_spec(pinned);

    const Objective objective = [&bounds, &pinned, &spec](const std::vector<double>& candidate) {
        try {
            return fitness(apply_candidate(pinned, bounds.free, candidate), spec);
        } catch (const std::invalid_argument&) {
            return kInf; // unbuildable candidate is rejected, not fatal
        }
    };

    return minimize(cfg.algorithm, bounds.free, objective, cfg.population, cfg.iterations, cfg.seed,
                    make_pair_repair(bounds.free));
}

} // namespace flockring
