#include "flockring/control.hpp"

#include <stdexcept>

namespace flockring {

void FlockGains::validate() const {
    const bool ok = c1_alpha > 0.0 && c2_alpha > 0.0 && c1_beta > 0.0 && c2_beta > 0.0 &&
                    c1_gamma > 0.0 && c2_gamma > 0.0;
    if (!ok) throw std::invalid_argument("FlockGains: all gains must be strictly positive");
}

LeaderFunction LeaderFunction::single() { return LeaderFunction{}; }

LeaderFunction LeaderFunction::multi(const CirclePlan& plan) {
    LeaderFunction f;
    f.mode_ = Mode::Multi;
    f.plan_ = &plan;
    return f;
}

LeaderFunction LeaderFunction::switched(const CirclePlan& plan, double t) {
    LeaderFunction f;
    f.mode_ = Mode::Switched;
    f.plan_ = &plan;
    f.t_ = t;
    return f;
}

double LeaderFunction::operator()(double z, const ActionParams& p) const {
    switch (mode_) {
        case Mode::Single: return phi_alpha_l(z, p);
        case Mode::Multi: return phi_alpha_l_multi(z, *plan_, p);
        case Mode::Switched: return phi_alpha_l_switched(z, t_, *plan_, p);
    }
    return 0.0;
}

Vec2 control_input(int i, const World& world, const FlockGains& gains,
                   const ActionParams& p, const LeaderFunction& leader_fn) {
    const AgentState& self = world.agent(i);
    if (!self.alive) throw std::invalid_argument("control_input: agent " + std::to_string(i) + " is not alive");

    Vec2 u = Vec2::Zero();

    // Alpha terms: gradient toward the desired spacing plus velocity consensus.
    for (int j : neighbors(i, world, p.r())) {
        const AgentState& other = world.agent(j);
        const double z = sigma_norm(other.q - self.q, p.eps);
        u += gains.c1_alpha * phi_alpha(z, p) * n_vector(self.q, other.q, p.eps);
        u += gains.c2_alpha * adjacency_alpha(self.q, other.q, p) * (other.p - self.p);
    }

    // Beta terms: repulsion from obstacle-surface projections within sensing
    // range. Agents on or inside an obstacle contribute no force here; the
    // simulator records those frames as violations.
    for (std::size_t k = 0; k < world.obstacles.size(); ++k) {
        const auto beta = beta_agent_for(self.q, self.p, world.obstacles[k], static_cast<int>(k), p);
        if (!beta) continue;
        const double z = sigma_norm(beta->q_hat - self.q, p.eps);
        u += gains.c1_beta * phi_beta(z, p) * n_vector(self.q, beta->q_hat, p.eps);
        u += gains.c2_beta * adjacency_beta(self.q, beta->q_hat, p) * (beta->p_hat - self.p);
    }

    // Gamma term: leader attraction/repulsion plus velocity matching.
    const double z_l = sigma_norm(world.leader.q_r - self.q, p.eps_l);
    u += gains.c1_gamma * leader_fn(z_l, p) * n_vector(self.q, world.leader.q_r, p.eps_l);
    u += gains.c2_gamma * (world.leader.p_r - self.p);

    return u;
}

} // namespace flockring
