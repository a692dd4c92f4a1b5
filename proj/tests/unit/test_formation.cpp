#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "flockring/errors.hpp"
#include "flockring/formation.hpp"

using namespace flockring;

namespace {

World polygon_world(int n, double d_l, const Vec2& center = Vec2::Zero()) {
    World world;
    world.leader.q_r = center;
    for (int k = 0; k < n; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / n;
        world.agents.push_back({center + d_l * Vec2(std::cos(angle), std::sin(angle)), Vec2::Zero(), k, true});
    }
    return world;
}

ActionParams scaling_params(double d) {
    ActionParams p;
    p.d = d;
    p.d_l = 5.0;
    p.d_obs = 2.0;
    p.r_obs = 3.0;
    return p;
}

} // namespace

TEST_CASE("polygon spacing reproduces the published values") {
    CHECK(polygon_spacing(31, 5.0) == doctest::Approx(1.0117).epsilon(1e-4));
    CHECK(polygon_spacing(10, 5.0) == doctest::Approx(3.0902).epsilon(1e-4));
    CHECK(polygon_spacing(12, 5.0) == doctest::Approx(2.5882).epsilon(1e-4));
    CHECK(polygon_spacing(5, 5.0) == doctest::Approx(5.8779).epsilon(1e-4));
    CHECK(polygon_spacing(3, 5.0) == doctest::Approx(8.6603).epsilon(1e-4));
    CHECK(polygon_spacing(6, 5.0) == doctest::Approx(5.0).epsilon(1e-12)); // sin(pi/6) = 1/2
    CHECK(polygon_spacing(8, 5.0) == doctest::Approx(3.8268343236508977).epsilon(1e-12));

    CHECK_THROWS_AS(polygon_spacing(1, 5.0), std::invalid_argument);
    CHECK_THROWS_AS(polygon_spacing(40, 5.0), InfeasibleSpacingError); // d = 0.784
}

TEST_CASE("max agents on a circle") {
    CHECK(max_agents_on_circle(1.0117, 5.0) == 31);
    CHECK(max_agents_on_circle(10.0, 5.0) == 2); // diameter spacing
    CHECK_THROWS_AS(max_agents_on_circle(10.1, 5.0), std::invalid_argument);

    SUBCASE("round-trips polygon_spacing exactly") {
        for (int n = 3; n <= 100; ++n) {
            CHECK(max_agents_on_circle(polygon_spacing(n, 20.0), 20.0) == n);
        }
        for (int n = 3; n <= 31; ++n) {
            CHECK(max_agents_on_circle(polygon_spacing(n, 5.0), 5.0) == n);
        }
    }

    SUBCASE("definitional bracket on random inputs") {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> radius(2.0, 25.0);
        std::uniform_real_distribution<double> unit(0.05, 0.95);
        for (int k = 0; k < 300; ++k) {
            const double d_l = radius(rng);
            const double d = unit(rng) * 2.0 * d_l;
            const int n = max_agents_on_circle(d, d_l);
            const auto spacing = [&](int m) { return 2.0 * std::sin(std::numbers::pi / m) * d_l; };
            CHECK(spacing(n) >= d * (1.0 - 1e-3)); // floor slack tolerated
            if (n >= 2) CHECK(spacing(n + 1) < d);
        }
    }
}

TEST_CASE("fault handling re-derives the spacing") {
    World world = polygon_world(8, 5.0);
    FormationState state{5.0, polygon_spacing(8, 5.0), 5.0, false, 0.0};
    ActionParams params = scaling_params(state.d);

    on_fault(world, state, 12.5, 3, params);
    CHECK(world.alive_count() == 7);
    CHECK_FALSE(world.agents[3].alive);
    CHECK(state.d == doctest::Approx(4.3388).epsilon(1e-4));
    CHECK(state.d == polygon_spacing(7, 5.0));
    CHECK(params.d == state.d);

    // repeated failure of the same agent is a precondition violation
    CHECK_THROWS_AS(on_fault(world, state, 13.0, 3, params), std::invalid_argument);
    CHECK(world.alive_count() == 7);
    CHECK_THROWS_AS(on_fault(world, state, 13.0, 77, params), std::invalid_argument);

    for (int id : {0, 1, 2, 4}) on_fault(world, state, 20.0, id, params);
    CHECK(world.alive_count() == 3);
    CHECK(state.d == doctest::Approx(8.6603).epsilon(1e-4));
}

TEST_CASE("scaling expands for a connected chain near one obstacle") {
    // Three agents in a chain: neighbors pairwise at 2.4 < r but the ends are
    // not in each other's range, so this exercises chain connectivity.
    World world;
    world.agents.push_back({Vec2(5.0, 0.0), Vec2::Zero(), 0, true});
    world.agents.push_back({Vec2(7.4, 0.0), Vec2::Zero(), 1, true});
    world.agents.push_back({Vec2(9.8, 0.0), Vec2::Zero(), 2, true});
    for (int k = 3; k < 12; ++k) {
        world.agents.push_back({Vec2(-40.0 - 5.0 * k, 0.0), Vec2::Zero(), k, true});
    }
    world.obstacles.push_back({Vec2(7.4, -6.5), 5.0});

    ActionParams params = scaling_params(polygon_spacing(12, 5.0));
    FormationState state{5.0, params.d, 5.0, false, 0.0};
    const ScalingPolicy policy{2.0, 0.5, 20.0, true};

    CHECK(params.r() > 2.4);
    CHECK(params.r() < 4.8);

    scaling_step(world, policy, 30.0, state, params);
    CHECK(state.scaled);
    CHECK(state.d_l == 10.0);
    CHECK(state.scale_until == 50.0);
    CHECK(params.d_l == 10.0);
    CHECK(params.d == polygon_spacing(12, 10.0));

    // holding: no re-evaluation while the timer runs
    scaling_step(world, policy, 40.0, state, params);
    CHECK(state.d_l == 10.0);

    // after the hold, with the trigger gone, the radius reverts bitwise
    World clear = world;
    for (auto& a : clear.agents) a.q += Vec2(200.0, 0.0);
    scaling_step(clear, policy, 50.0, state, params);
    CHECK_FALSE(state.scaled);
    CHECK(state.d_l == 5.0);
    CHECK(params.d == polygon_spacing(12, 5.0));

    // re-armed immediately: a persisting trigger fires again at once
    scaling_step(world, policy, 50.5, state, params);
    CHECK(state.scaled);
    CHECK(state.d_l == 10.0);
}

TEST_CASE("scaling shrinks when the triggered agents are disconnected") {
    World world;
    // two pairs near opposite side obstacles
    world.agents.push_back({Vec2(0.0, 5.0), Vec2::Zero(), 0, true});
    world.agents.push_back({Vec2(1.5, 5.0), Vec2::Zero(), 1, true});
    world.agents.push_back({Vec2(0.0, -5.0), Vec2::Zero(), 2, true});
    world.agents.push_back({Vec2(1.5, -5.0), Vec2::Zero(), 3, true});
    for (int k = 4; k < 12; ++k) {
        world.agents.push_back({Vec2(60.0 + 5.0 * k, 0.0), Vec2::Zero(), k, true});
    }
    world.obstacles.push_back({Vec2(0.75, 8.0), 1.5});
    world.obstacles.push_back({Vec2(0.75, -8.0), 1.5});

    ActionParams params = scaling_params(polygon_spacing(12, 5.0));
    FormationState state{5.0, params.d, 5.0, false, 0.0};
    const ScalingPolicy policy{2.0, 0.5, 20.0, true};

    scaling_step(world, policy, 10.0, state, params);
    CHECK(state.scaled);
    CHECK(state.d_l == 2.5);
    CHECK(params.d == polygon_spacing(12, 2.5));
}

TEST_CASE("scaling ignores sub-quarter triggers and infeasible radii") {
    World world = polygon_world(12, 5.0);
    ActionParams params = scaling_params(polygon_spacing(12, 5.0));
    FormationState state{5.0, params.d, 5.0, false, 0.0};

    // two agents near the obstacle: below the ceil(12/4) = 3 threshold
    world.obstacles.push_back({Vec2(8.0, 0.0), 1.5});
    world.agents[0].q = Vec2(5.8, 0.0);
    world.agents[1].q = Vec2(5.8, 1.0);
    ScalingPolicy policy{2.0, 0.5, 20.0, true};
    scaling_step(world, policy, 5.0, state, params);
    CHECK_FALSE(state.scaled);
    CHECK(state.d_l == 5.0);

    // a shrink that would break d >= 1 raises instead of silently scaling
    world.agents[2].q = Vec2(5.8, -1.0);
    policy.shrink_factor = 0.2;
    World disconnected = world;
    disconnected.agents[2].q = Vec2(10.2, 0.0); // triggered on the far side, out of chain range
    ScalingPolicy tight = policy;
    FormationState state2{5.0, params.d, 5.0, false, 0.0};
    CHECK_THROWS_AS(scaling_step(disconnected, tight, 5.0, state2, params), InfeasibleSpacingError);

    // disabled policy never changes anything
    ScalingPolicy off{2.0, 0.5, 20.0, false};
    FormationState state3{5.0, params.d, 5.0, false, 0.0};
    scaling_step(world, off, 5.0, state3, params);
    CHECK_FALSE(state3.scaled);
}

TEST_CASE("multi-circle planning reproduces the published geometries") {
    SUBCASE("triangle") {
        const CirclePlan plan = plan_circles({3, 11, 18, 26}, 5.0, 1.5, 1.07, 110.0, {1.0, 1.5, 3.0});
        CHECK(plan.d == doctest::Approx(8.6603).epsilon(1e-4));
        CHECK(plan.radii[0] == 5.0);
        CHECK(plan.radii[1] == doctest::Approx(15.3696).epsilon(1e-2));
        CHECK(plan.radii[2] == doctest::Approx(24.9362).epsilon(1e-2));
        CHECK(plan.radii[3] == doctest::Approx(35.9237).epsilon(1e-2));
        // first cut-off: d_h + d_r - d_eps = 2.5 + 7.5 - 1.5
        CHECK(plan.cutoffs[0] == doctest::Approx(8.5).epsilon(1e-9));
        CHECK(plan.total_agents() == 58);
        CHECK_NOTHROW(plan.validate(1.07));
    }
    SUBCASE("pentagon") {
        const CirclePlan plan = plan_circles({5, 14, 22, 31}, 5.0, 0.9, 1.09, 75.0);
        CHECK(plan.d == doctest::Approx(5.8779).epsilon(1e-4));
        CHECK(plan.radii[1] == doctest::Approx(13.2074).epsilon(1e-2));
        CHECK(plan.radii[2] == doctest::Approx(20.6509).epsilon(1e-2));
        CHECK(plan.radii[3] == doctest::Approx(29.0499).epsilon(1e-2));
        CHECK(plan.total_agents() == 72);
    }
    SUBCASE("hexagon") {
        const CirclePlan plan = plan_circles({6, 14, 22, 30}, 5.0, 1.0, 1.1, 70.0);
        CHECK(plan.d == doctest::Approx(5.0).epsilon(1e-9));
        CHECK(plan.radii[1] == doctest::Approx(11.2349).epsilon(1e-2));
        CHECK(plan.radii[2] == doctest::Approx(17.5667).epsilon(1e-2));
        CHECK(plan.radii[3] == doctest::Approx(23.9169).epsilon(1e-2));
        CHECK(plan.total_agents() == 72);
    }
}

TEST_CASE("multi-circle planning rejects invalid inputs") {
    // interaction range 2.5 * 8.6603 exceeds every circle gap
    CHECK_THROWS_WITH_AS(plan_circles({3, 11, 18, 26}, 5.0, 1.5, 2.5, 110.0),
                         doctest::Contains("interaction range"), PlanError);
    CHECK_THROWS_AS(plan_circles({2, 11}, 5.0, 1.5, 1.07, 110.0), PlanError);
    CHECK_THROWS_AS(plan_circles({}, 5.0, 1.5, 1.07, 110.0), PlanError);
    CHECK_THROWS_AS(plan_circles({3, 11}, 5.0, 0.0, 1.07, 110.0), PlanError);
    CHECK_THROWS_AS(plan_circles({3, 11}, 5.0, 1.5, 1.07, 110.0, {1.0, 2.0}), PlanError);
    // non-increasing counts produce non-increasing radii
    CHECK_THROWS_AS(plan_circles({6, 6}, 5.0, 1.0, 1.07, 10.0), PlanError);

    // every returned plan satisfies its own invariants
    const CirclePlan plan = plan_circles({8, 20, 32}, 6.0, 1.2, 1.15, 30.0);
    CHECK_NOTHROW(plan.validate(1.15));
    for (int i = 0; i + 1 < plan.n(); ++i) {
        CHECK(plan.cutoffs[i] > plan.radii[i]);
        CHECK(plan.cutoffs[i] < plan.radii[i + 1]);
        CHECK(plan.radii[i + 1] - plan.radii[i] > 1.15 * plan.d);
    }
}

TEST_CASE("scaling policy validation") {
    ScalingPolicy policy{2.0, 0.5, 20.0, true};
    CHECK_NOTHROW(policy.validate());
    policy.expand_factor = 1.0;
    CHECK_THROWS_AS(policy.validate(), std::invalid_argument);
    policy = {2.0, 1.0, 20.0, true};
    CHECK_THROWS_AS(policy.validate(), std::invalid_argument);
    policy = {2.0, 0.5, 0.0, true};
    CHECK_THROWS_AS(policy.validate(), std::invalid_argument);
}
