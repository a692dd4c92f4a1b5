#pragma once

#include <optional>
#include <vector>

#include "flockring/action.hpp"
#include "flockring/geometry.hpp"

namespace flockring {

struct AgentState {
    Vec2 q = Vec2::Zero(); ///< position
    Vec2 p = Vec2::Zero(); ///< velocity
    int id = 0;
    bool alive = true;
};

struct LeaderState {
    Vec2 q_r = Vec2::Zero();
    Vec2 p_r = Vec2::Zero();
};

struct Obstacle {
    Vec2 center = Vec2::Zero();
    double radius = 0.0;
};

/// Virtual agent projected onto an obstacle surface.
struct BetaAgent {
    Vec2 q_hat = Vec2::Zero(); ///< closest boundary point to the source agent
    Vec2 p_hat = Vec2::Zero(); ///< tangential component of the agent velocity
    int obstacle = 0;          ///< index of the source obstacle
};

/// Value snapshot of one simulation instant. Queries are read-only; the
/// simulator mutates state only between steps.
struct World {
    std::vector<AgentState> agents;
    LeaderState leader;
    std::vector<Obstacle> obstacles;

    const AgentState& agent(int id) const;
    int alive_count() const;
};

/// Ids of all alive agents strictly within distance r of agent i (Eq. of a
/// spatially induced undirected graph: symmetric, irreflexive).
std::vector<int> neighbors(int i, const World& world, double r);

/// Spatial adjacency weight in [0,1]: bump of the sigma-distance ratio.
double adjacency_alpha(const Vec2& q_i, const Vec2& q_j, const ActionParams& p);

/// Heterogeneous adjacency weight between an agent and a beta-agent.
double adjacency_beta(const Vec2& q_i, const Vec2& q_hat, const ActionParams& p);

/// Projects an agent onto a circular obstacle: q_hat is the closest boundary
/// point, p_hat the tangential projection mu*(I - a a^T)*p of its velocity.
/// Throws std::domain_error when the agent is on or inside the obstacle.
BetaAgent beta_project(const Vec2& q_i, const Vec2& p_i, const Obstacle& obs, int obstacle_index = 0);

/// beta_project gated by the sensing range: engaged only when the projected
/// point falls within r_obs of the agent. Degenerate placement yields nullopt
/// (the simulator records the violation separately).
std::optional<BetaAgent> beta_agent_for(const Vec2& q_i, const Vec2& p_i, const Obstacle& obs,
                                        int obstacle_index, const ActionParams& p);

} // namespace flockring
