#pragma once

#include <vector>

#include "flockring/action.hpp"
#include "flockring/world.hpp"

namespace flockring {

/// Temporary formation-radius scaling around obstacles, with timed reversion.
struct ScalingPolicy {
    double expand_factor = 2.0;  ///< radius multiplier for big frontal obstacles, > 1
    double shrink_factor = 0.5;  ///< radius multiplier between side obstacles, (0,1)
    double hold_duration = 20.0; ///< seconds before the radius reverts
    bool enabled = false;

    void validate() const;
};

struct FaultEvent {
    double time = 0.0;
    int agent = 0;
};

using FaultSchedule = std::vector<FaultEvent>;

/// Formation-level state owned by the simulation loop: the current circle
/// radius and spacing, plus the scaling hold timer.
struct FormationState {
    double d_l = 0.0;        ///< active leader distance
    double d = 0.0;          ///< active agent spacing
    double base_d_l = 0.0;   ///< pre-scaling radius the hold reverts to
    bool scaled = false;
    double scale_until = 0.0;
};

/// Regular-polygon spacing d = 2 sin(pi/N) d_L.
/// Throws InfeasibleSpacingError when the result falls below 1.
double polygon_spacing(int n, double d_l);

/// Largest N whose polygon spacing at radius d_l is still >= d. The floor
/// carries a 1e-3 slack so published 4-decimal spacings invert to their
/// original agent count.
int max_agents_on_circle(double d, double d_l);

/// Marks the agent dead and re-derives the spacing for the survivors,
/// propagating the new d (and thus r = kappa*d) into the action parameters.
void on_fault(World& world, FormationState& state, double t, int failed_id, ActionParams& params);

/// One evaluation of the size-scaling rules: when at least a quarter of the
/// alive agents sit in obstacle interaction range, the radius expands if they
/// form one connected chain under the agent-agent range and shrinks
/// otherwise; after hold_duration the radius reverts and the trigger re-arms.
void scaling_step(const World& world, const ScalingPolicy& policy, double t,
                  FormationState& state, ActionParams& params);

/// Derives a validated multi-circle plan: the first circle fixes the shared
/// spacing, outer radii come from inverting the polygon relation at that
/// spacing, and each inner circle's cut-off expels its surplus agents.
CirclePlan plan_circles(const std::vector<int>& counts, double d_l1, double d_eps,
                        double kappa, double ts,
                        const std::vector<double>& amplitudes = {});

} // namespace flockring
