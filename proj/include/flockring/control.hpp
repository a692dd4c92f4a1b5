#pragma once

#include "flockring/action.hpp"
#include "flockring/world.hpp"

namespace flockring {

struct FlockGains {
    double c1_alpha = 1.0;
    double c2_alpha = 1.0;
    double c1_beta = 1.0;
    double c2_beta = 1.0;
    double c1_gamma = 1.0;
    double c2_gamma = 1.0;

    void validate() const; ///< all gains strictly positive
};

/// Selects which agent-leader action function the gamma term uses.
class LeaderFunction {
public:
    static LeaderFunction single();
    static LeaderFunction multi(const CirclePlan& plan);
    static LeaderFunction switched(const CirclePlan& plan, double t);

    double operator()(double z, const ActionParams& p) const;

private:
    enum class Mode { Single, Multi, Switched };
    Mode mode_ = Mode::Single;
    const CirclePlan* plan_ = nullptr;
    double t_ = 0.0;
};

/// Per-agent control input: alpha (agent-agent) gradient and velocity
/// consensus, beta (obstacle) repulsion and damping, and the gamma (leader)
/// term. The distance part of the gamma term attracts the agent toward the
/// leader beyond the desired distance and repels it when closer.
Vec2 control_input(int i, const World& world, const FlockGains& gains,
                   const ActionParams& p, const LeaderFunction& leader_fn);

} // namespace flockring
