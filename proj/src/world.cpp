#include "flockring/world.hpp"

#include <cmath>
#include <stdexcept>

namespace flockring {

const AgentState& World::agent(int id) const {
    for (const auto& a : agents) {
        if (a.id == id) return a;
    }
    throw std::invalid_argument("unknown agent id " + std::to_string(id));
}

int World::alive_count() const {
    int n = 0;
    for (const auto& a : agents) n += a.alive ? 1 : 0;
    return n;
}

std::vector<int> neighbors(int i, const World& world, double r) {
    const AgentState& self = world.agent(i);
    if (!self.alive) throw std::invalid_argument("neighbors: agent " + std::to_string(i) + " is not alive");
    std::vector<int> out;
    for (const auto& other : world.agents) {
        if (other.id == i || !other.alive) continue;
        if ((other.q - self.q).norm() < r) out.push_back(other.id);
    }
    return out;
}

double adjacency_alpha(const Vec2& q_i, const Vec2& q_j, const ActionParams& p) {
    return bump(sigma_norm(q_j - q_i, p.eps) / p.r_alpha(), p.h);
}

double adjacency_beta(const Vec2& q_i, const Vec2& q_hat, const ActionParams& p) {
    return bump(sigma_norm(q_hat - q_i, p.eps) / p.d_beta(), p.h);
}

BetaAgent beta_project(const Vec2& q_i, const Vec2& p_i, const Obstacle& obs, int obstacle_index) {
    const Vec2 offset = q_i - obs.center;
    const double dist = offset.norm();
    if (dist <= obs.radius) {
        throw std::domain_error("beta_project: agent on or inside obstacle surface");
    }
    const double mu = obs.radius / dist;
    const Vec2 a = offset / dist;
    BetaAgent beta;
    beta.q_hat = mu * q_i + (1.0 - mu) * obs.center;
    beta.p_hat = mu * (p_i - a * a.dot(p_i));
    beta.obstacle = obstacle_index;
    return beta;
}

std::optional<BetaAgent> beta_agent_for(const Vec2& q_i, const Vec2& p_i, const Obstacle& obs,
                                        int obstacle_index, const ActionParams& p) {
    const Vec2 offset = q_i - obs.center;
    const double dist = offset.norm();
    if (dist <= obs.radius) return std::nullopt;
    if (dist - obs.radius >= p.r_obs) return std::nullopt;
    return beta_project(q_i, p_i, obs, obstacle_index);
}

} // namespace flockring
