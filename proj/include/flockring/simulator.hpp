#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "flockring/action.hpp"
#include "flockring/control.hpp"
#include "flockring/formation.hpp"
#include "flockring/world.hpp"

namespace flockring {

enum class FormationMode { SingleCircle, Scaling, MultiCircle };

struct NormalInit {
    Vec2 mean = Vec2::Zero();
    double stddev = 1.0;
};

struct AgentInit {
    Vec2 q = Vec2::Zero();
    Vec2 p = Vec2::Zero();
};

using InitSpec = std::variant<NormalInit, std::vector<AgentInit>>;

/// Piecewise-constant leader velocity segment.
struct LeaderSegment {
    double duration = 0.0;
    Vec2 velocity = Vec2::Zero();
};

struct LeaderScript {
    Vec2 start = Vec2::Zero();
    std::vector<LeaderSegment> segments;

    /// Active velocity at time t; zero once the script is exhausted.
    Vec2 velocity_at(double t) const;
};

/// Complete world description for one run.
struct ScenarioConfig {
    std::string name = "scenario";
    FormationMode mode = FormationMode::SingleCircle;
    std::uint64_t seed = 1;
    int agent_count = 0;
    InitSpec init = NormalInit{};
    FlockGains gains;
    ActionParams params;
    std::vector<Obstacle> obstacles;
    LeaderScript leader;
    std::optional<CirclePlan> plan;
    FaultSchedule faults;
    ScalingPolicy scaling;
    double dt = 0.1;
    double t_final = 50.0;
    double collision_floor = 0.1;

    /// Throws ConfigError (with the offending field) on any inconsistency.
    void validate() const;
};

/// Distance diagnostics recorded after every step.
struct MetricsFrame {
    double t = 0.0;
    std::vector<int> alive_ids;             ///< ascending ids the leader distances refer to
    std::vector<double> leader_distances;   ///< per alive agent, ascending id
    std::vector<double> adjacent_distances; ///< the N_alive shortest pairwise distances, sorted
    double min_pairwise = 0.0;              ///< +inf when fewer than 2 agents alive
    double min_obstacle_clearance = 0.0;    ///< min surface distance; +inf without obstacles
    double d = 0.0;                         ///< active agent spacing
    double d_l = 0.0;                       ///< active formation radius
};

struct Violation {
    enum class Kind { Collision, ObstaclePenetration };
    double t = 0.0;
    Kind kind = Kind::Collision;
    int agent = 0;
    int other = 0;    ///< second agent id, or obstacle index for penetrations
    double value = 0.0;
};

struct TrajectoryFrame {
    double t = 0.0;
    std::vector<AgentState> agents;
    LeaderState leader;
};

struct RunResult {
    std::vector<TrajectoryFrame> trajectory;
    std::vector<MetricsFrame> metrics;
    std::vector<Violation> violations;
    double final_d = 0.0;
    double final_d_l = 0.0;
};

/// Time-stepped integrator of the flocking dynamics under one scenario.
/// Deterministic for a fixed (config, seed).
class Simulator {
public:
    explicit Simulator(const ScenarioConfig& config);

    /// Semi-implicit Euler over one dt: velocities first, then positions;
    /// fault events and scaling rules are applied at the step's start time.
    void step();

    bool done() const { return step_index_ >= total_steps_; }
    double t() const { return step_index_ * config_.dt; }
    const World& world() const { return world_; }
    const FormationState& formation() const { return formation_; }
    const ActionParams& params() const { return params_; }

    MetricsFrame metrics() const;
    void scan_violations(std::vector<Violation>& out) const;

private:
    ScenarioConfig config_;
    World world_;
    ActionParams params_;
    FormationState formation_;
    std::size_t next_fault_ = 0;
    long step_index_ = 0;
    long total_steps_ = 0;
};

using StepObserver = std::function<void(const Simulator&)>;

/// Runs the scenario to completion, invoking the observer after every step.
void run_stream(const ScenarioConfig& config, const StepObserver& observe);

/// Runs the scenario and materializes trajectory, metrics and violations.
RunResult run(const ScenarioConfig& config);

/// Delimited-text trajectory: one leader row (id -1) and one row per agent
/// per frame, 9 significant digits, locale-independent.
void emit_trajectory(const RunResult& result, const std::filesystem::path& path);
void emit_metrics(const RunResult& result, const std::filesystem::path& path);
void emit_violations(const RunResult& result, const std::filesystem::path& path);

std::vector<TrajectoryFrame> read_trajectory(const std::filesystem::path& path);
std::vector<MetricsFrame> read_metrics(const std::filesystem::path& path);

} // namespace flockring
