#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "flockring/control.hpp"
#include "flockring/formation.hpp"

using namespace flockring;

namespace {

struct PolygonSetup {
    World world;
    ActionParams params;
    FlockGains gains;
};

// N agents on a regular polygon around the leader, co-moving with it.
PolygonSetup polygon_setup(int n, double d_l, const Vec2& leader_pos, const Vec2& leader_vel) {
    PolygonSetup setup;
    setup.params.d_l = d_l;
    setup.params.d = polygon_spacing(n, d_l);
    setup.gains = {6.6, 2.4, 15.0, 7.0, 4.3, 11.2};
    setup.world.leader = {leader_pos, leader_vel};
    for (int k = 0; k < n; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / n;
        setup.world.agents.push_back(
            {leader_pos + d_l * Vec2(std::cos(angle), std::sin(angle)), leader_vel, k, true});
    }
    return setup;
}

} // namespace

TEST_CASE("perfect polygon co-moving with the leader is an equilibrium") {
    const auto setup = polygon_setup(8, 5.0, Vec2(2.0, -1.0), Vec2(0.4, 0.1));
    for (int i = 0; i < 8; ++i) {
        const Vec2 u = control_input(i, setup.world, setup.gains, setup.params, LeaderFunction::single());
        CHECK(u.norm() < 1e-9);
    }
}

TEST_CASE("single agent is steered toward the desired leader distance") {
    ActionParams params;
    params.d = 3.0;
    params.d_l = 5.0;
    const FlockGains gains{1.0, 1.0, 1.0, 1.0, 2.0, 3.0};

    World world;
    world.leader = {Vec2::Zero(), Vec2::Zero()};
    world.agents.push_back({Vec2(2.0 * params.d_l, 0.0), Vec2::Zero(), 0, true});

    SUBCASE("attraction beyond d_L") {
        const Vec2 u = control_input(0, world, gains, params, LeaderFunction::single());
        CHECK(u.x() < 0.0);
        CHECK(u.y() == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("repulsion inside d_L") {
        world.agents[0].q = Vec2(0.5 * params.d_l, 0.0);
        const Vec2 u = control_input(0, world, gains, params, LeaderFunction::single());
        CHECK(u.x() > 0.0);
    }
    SUBCASE("velocity matching toward the leader velocity") {
        world.agents[0].q = Vec2(params.d_l, 0.0);
        world.agents[0].p = Vec2(0.0, -2.0);
        world.leader.p_r = Vec2(0.0, 1.0);
        const Vec2 u = control_input(0, world, gains, params, LeaderFunction::single());
        CHECK(u.y() == doctest::Approx(gains.c2_gamma * 3.0).epsilon(1e-12));
    }
    SUBCASE("dead agent is rejected") {
        world.agents[0].alive = false;
        CHECK_THROWS_AS(control_input(0, world, gains, params, LeaderFunction::single()),
                        std::invalid_argument);
    }
}

TEST_CASE("obstacle repulsion pushes away and ignores far obstacles") {
    ActionParams params;
    params.d = 3.0;
    params.d_l = 5.0;
    params.d_obs = 2.0;
    params.r_obs = 3.0;
    const FlockGains gains{1.0, 1.0, 10.0, 5.0, 1e-9, 1e-9};

    World world;
    world.leader = {Vec2(1000.0, 0.0), Vec2::Zero()}; // effectively no gamma pull
    world.agents.push_back({Vec2(0.0, 0.0), Vec2::Zero(), 0, true});
    world.obstacles.push_back({Vec2(-2.5, 0.0), 1.5}); // surface one unit away

    const Vec2 u = control_input(0, world, gains, params, LeaderFunction::single());
    CHECK(u.x() > 0.0); // pushed away from the obstacle

    world.obstacles[0].center = Vec2(-20.0, 0.0); // outside sensing range
    const Vec2 u_far = control_input(0, world, gains, params, LeaderFunction::single());
    CHECK(u_far.x() < 1e-6);
}

TEST_CASE("decentralization: agents beyond range cannot influence the input") {
    auto setup = polygon_setup(3, 5.0, Vec2::Zero(), Vec2::Zero());
    setup.world.agents.push_back({Vec2(100.0, 100.0), Vec2(3.0, -2.0), 3, true});

    const Vec2 before = control_input(0, setup.world, setup.gains, setup.params, LeaderFunction::single());
    setup.world.agents[3].q = Vec2(250.0, -80.0);
    setup.world.agents[3].p = Vec2(-1.0, 9.0);
    const Vec2 after = control_input(0, setup.world, setup.gains, setup.params, LeaderFunction::single());
    CHECK(before.x() == after.x());
    CHECK(before.y() == after.y());
}

TEST_CASE("permutation equivariance") {
    auto setup = polygon_setup(6, 5.0, Vec2::Zero(), Vec2::Zero());
    // perturb so forces are nonzero
    for (auto& a : setup.world.agents) a.q *= 1.1;

    std::vector<Vec2> inputs;
    for (int i = 0; i < 6; ++i) {
        inputs.push_back(control_input(i, setup.world, setup.gains, setup.params, LeaderFunction::single()));
    }

    World shuffled = setup.world;
    std::swap(shuffled.agents[0], shuffled.agents[4]);
    std::swap(shuffled.agents[2], shuffled.agents[5]);
    for (int i = 0; i < 6; ++i) {
        const Vec2 u = control_input(i, shuffled, setup.gains, setup.params, LeaderFunction::single());
        CHECK(u.x() == doctest::Approx(inputs[i].x()).epsilon(1e-12).scale(1.0));
        CHECK(u.y() == doctest::Approx(inputs[i].y()).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("translation invariance") {
    auto setup = polygon_setup(5, 5.0, Vec2::Zero(), Vec2(0.2, 0.0));
    for (auto& a : setup.world.agents) a.q *= 1.07; // off equilibrium
    setup.world.obstacles.push_back({Vec2(7.0, 0.5), 1.0});

    std::vector<Vec2> inputs;
    for (int i = 0; i < 5; ++i) {
        inputs.push_back(control_input(i, setup.world, setup.gains, setup.params, LeaderFunction::single()));
    }

    const Vec2 shift(137.0, -42.0);
    World moved = setup.world;
    for (auto& a : moved.agents) a.q += shift;
    moved.leader.q_r += shift;
    for (auto& o : moved.obstacles) o.center += shift;

    for (int i = 0; i < 5; ++i) {
        const Vec2 u = control_input(i, moved, setup.gains, setup.params, LeaderFunction::single());
        CHECK(std::abs(u.x() - inputs[i].x()) < 1e-12);
        CHECK(std::abs(u.y() - inputs[i].y()) < 1e-12);
    }
}

TEST_CASE("gain validation") {
    FlockGains gains{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    CHECK_NOTHROW(gains.validate());
    gains.c1_beta = 0.0;
    CHECK_THROWS_AS(gains.validate(), std::invalid_argument);
}
