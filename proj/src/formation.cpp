#include "flockring/formation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "flockring/errors.hpp"

namespace flockring {

void ScalingPolicy::validate() const {
    if (expand_factor <= 1.0) throw std::invalid_argument("ScalingPolicy: expand_factor must exceed 1");
    if (shrink_factor <= 0.0 || shrink_factor >= 1.0) {
        throw std::invalid_argument("ScalingPolicy: shrink_factor must be in (0,1)");
    }
    if (hold_duration <= 0.0) throw std::invalid_argument("ScalingPolicy: hold_duration must be positive");
}

double polygon_spacing(int n, double d_l) {
    if (n < 2) throw std::invalid_argument("polygon_spacing: need at least 2 agents");
    if (d_l <= 0.0) throw std::invalid_argument("polygon_spacing: d_l must be positive");
    const double d = 2.0 * std::sin(std::numbers::pi / n) * d_l;
    if (d < 1.0) {
        std::ostringstream os;
        os << "polygon spacing " << d << " for N=" << n << ", d_L=" << d_l
           << " is below the feasibility bound 1";
        throw InfeasibleSpacingError(os.str());
    }
    return d;
}

int max_agents_on_circle(double d, double d_l) {
    if (d <= 0.0 || d_l <= 0.0) throw std::invalid_argument("max_agents_on_circle: distances must be positive");
    if (d > 2.0 * d_l) {
        throw std::invalid_argument("max_agents_on_circle: spacing exceeds the circle diameter");
    }
    // Slack absorbs the rounding of spacings published to 4 decimals.
    return static_cast<int>(std::floor(std::numbers::pi / std::asin(d / (2.0 * d_l)) + 1e-3));
}

void on_fault(World& world, FormationState& state, double /*t*/, int failed_id, ActionParams& params) {
    AgentState* found = nullptr;
    for (auto& a : world.agents) {
        if (a.id == failed_id) {
            found = &a;
            break;
        }
    }
    if (found == nullptr) throw std::invalid_argument("on_fault: unknown agent id " + std::to_string(failed_id));
    if (!found->alive) throw std::invalid_argument("on_fault: agent " + std::to_string(failed_id) + " already failed");

    found->alive = false;
    found->p = Vec2::Zero();

    state.d = polygon_spacing(world.alive_count(), state.d_l);
    params.d = state.d;
}

namespace {

// Alive agents with a positive obstacle adjacency weight: strictly outside
// the obstacle and with the surface projection inside both the repulsion
// distance and the sensing range.
std::vector<int> triggered_agents(const World& world, const ActionParams& params) {
    const double reach = std::min(params.d_obs, params.r_obs);
    std::vector<int> out;
    for (const auto& a : world.agents) {
        if (!a.alive) continue;
        for (const auto& obs : world.obstacles) {
            const double dist = (a.q - obs.center).norm();
            if (dist > obs.radius && dist - obs.radius < reach) {
                out.push_back(a.id);
                break;
            }
        }
    }
    return out;
}

bool chain_connected(const std::vector<int>& ids, const World& world, double r) {
    if (ids.empty()) return false;
    std::vector<int> stack{ids.front()};
    std::vector<bool> seen(ids.size(), false);
    seen[0] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        const Vec2& q_cur = world.agent(cur).q;
        for (std::size_t j = 0; j < ids.size(); ++j) {
            if (seen[j]) continue;
            if ((world.agent(ids[j]).q - q_cur).norm() < r) {
                seen[j] = true;
                ++reached;
                stack.push_back(ids[j]);
            }
        }
    }
    return reached == ids.size();
}

} // namespace

void scaling_step(const World& world, const ScalingPolicy& policy, double t,
                  FormationState& state, ActionParams& params) {
    if (!policy.enabled) return;

    if (state.scaled) {
        if (t < state.scale_until) return;
        // Hold expired: revert to the pre-scaling radius and re-arm. Trigger
        // evaluation resumes on the next step so the reverted radius is
        // always observable in the recorded metrics.
        state.d_l = state.base_d_l;
        state.d = polygon_spacing(world.alive_count(), state.d_l);
        state.scaled = false;
        params.d_l = state.d_l;
        params.d = state.d;
        return;
    }

    const std::vector<int> triggered = triggered_agents(world, params);
    const int quarter = (world.alive_count() + 3) / 4;
    if (static_cast<int>(triggered.size()) < quarter) return;

    const double factor = chain_connected(triggered, world, params.r())
                              ? policy.expand_factor
                              : policy.shrink_factor;
    state.base_d_l = state.d_l;
    state.d_l = factor * state.d_l;
    state.d = polygon_spacing(world.alive_count(), state.d_l);
    state.scaled = true;
    state.scale_until = t + policy.hold_duration;
    params.d_l = state.d_l;
    params.d = state.d;
}

CirclePlan plan_circles(const std::vector<int>& counts, double d_l1, double d_eps,
                        double kappa, double ts, const std::vector<double>& amplitudes) {
    if (counts.empty()) throw PlanError("plan needs at least one circle");
    if (counts[0] < 3) throw PlanError("first circle needs at least 3 agents");
    if (d_eps <= 0.0) throw PlanError("d_eps must be positive");
    if (ts < 0.0) throw PlanError("switch interval must be nonnegative");

    CirclePlan plan;
    plan.d = polygon_spacing(counts[0], d_l1);
    plan.d_eps = d_eps;
    plan.ts = ts;
    plan.counts = counts;
    plan.radii.resize(counts.size());
    plan.radii[0] = d_l1;
    for (std::size_t i = 1; i < counts.size(); ++i) {
        if (counts[i] < 2) {
            throw PlanError("circle " + std::to_string(i + 1) + " needs at least 2 agents to derive its radius");
        }
        plan.radii[i] = plan.d / (2.0 * std::sin(std::numbers::pi / counts[i]));
    }

    const double d_r = std::sqrt(3.0) / 2.0 * plan.d;
    for (std::size_t i = 0; i + 1 < counts.size(); ++i) {
        const double d_h = plan.radii[i] * std::cos(std::numbers::pi / counts[i]);
        plan.cutoffs.push_back(d_h + d_r - d_eps);
    }

    if (amplitudes.empty()) {
        plan.amplitudes.assign(plan.cutoffs.size(), 1.0);
    } else {
        if (amplitudes.size() != plan.cutoffs.size()) {
            throw PlanError("expected " + std::to_string(plan.cutoffs.size()) + " amplitudes, got " +
                            std::to_string(amplitudes.size()));
        }
        plan.amplitudes = amplitudes;
    }

    plan.validate(kappa);
    return plan;
}

} // namespace flockring
