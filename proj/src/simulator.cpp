#include "flockring/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "flockring/errors.hpp"

namespace flockring {

namespace {

constexpr double kTimeEps = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

Vec2 LeaderScript::velocity_at(double t) const {
    double end = 0.0;
    for (const auto& seg : segments) {
        end += seg.duration;
        if (t < end - kTimeEps) return seg.velocity;
    }
    return Vec2::Zero();
}

void ScenarioConfig::validate() const {
    if (!(dt > 0.0)) throw ConfigError("dt", "must be positive");
    if (!(t_final >= dt)) throw ConfigError("t_final", "must be at least dt");
    if (agent_count < 1) throw ConfigError("agents.count", "must be at least 1");
    if (collision_floor < 0.0) throw ConfigError("collision_floor", "must be nonnegative");

    if (const auto* states = std::get_if<std::vector<AgentInit>>(&init)) {
        if (static_cast<int>(states->size()) != agent_count) {
            throw ConfigError("agents.init.states", "expected " + std::to_string(agent_count) + " entries");
        }
        for (const auto& s : *states) {
            if (!s.q.allFinite() || !s.p.allFinite()) {
                throw ConfigError("agents.init.states", "non-finite entry");
            }
        }
    } else {
        const auto& normal = std::get<NormalInit>(init);
        if (!(normal.stddev >= 0.0) || !normal.mean.allFinite()) {
            throw ConfigError("agents.init", "mean must be finite and stddev nonnegative");
        }
    }

    try {
        gains.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("gains", e.what());
    }
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("params", e.what());
    }

    for (std::size_t k = 0; k < obstacles.size(); ++k) {
        if (!(obstacles[k].radius > 0.0)) {
            throw ConfigError("obstacles[" + std::to_string(k) + "].radius", "must be positive");
        }
        for (std::size_t j = 0; j < k; ++j) {
            if (obstacles[j].center == obstacles[k].center && obstacles[j].radius == obstacles[k].radius) {
                throw ConfigError("obstacles", "entries " + std::to_string(j) + " and " + std::to_string(k) +
                                                   " are identical");
            }
        }
    }

    for (std::size_t k = 0; k < leader.segments.size(); ++k) {
        if (!(leader.segments[k].duration > 0.0)) {
            throw ConfigError("leader.segments[" + std::to_string(k) + "].duration", "must be positive");
        }
    }

    // Mode-specific fields must be present exactly when required.
    if (mode == FormationMode::MultiCircle) {
        if (!plan.has_value()) throw ConfigError("plan", "required in multi-circle mode");
        try {
            plan->validate(params.kappa);
        } catch (const PlanError& e) {
            throw ConfigError("plan", e.what());
        }
        if (plan->total_agents() != agent_count) {
            throw ConfigError("agents.count", "must equal the plan total " + std::to_string(plan->total_agents()));
        }
        if (!faults.empty()) throw ConfigError("faults", "not supported in multi-circle mode");
        if (scaling.enabled) throw ConfigError("scaling.enabled", "not supported in multi-circle mode");
    } else {
        if (plan.has_value()) throw ConfigError("plan", "only allowed in multi-circle mode");
    }

    if (mode == FormationMode::Scaling) {
        if (!scaling.enabled) throw ConfigError("scaling.enabled", "must be true in scaling mode");
        try {
            scaling.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError("scaling", e.what());
        }
        try {
            polygon_spacing(agent_count, scaling.expand_factor * params.d_l);
            polygon_spacing(agent_count, scaling.shrink_factor * params.d_l);
        } catch (const InfeasibleSpacingError& e) {
            throw ConfigError("scaling", e.what());
        }
    } else if (scaling.enabled) {
        throw ConfigError("scaling.enabled", "only allowed in scaling mode");
    }

    if (!faults.empty()) {
        double prev = -kInf;
        std::vector<int> seen;
        for (std::size_t k = 0; k < faults.size(); ++k) {
            const auto& ev = faults[k];
            const std::string field = "faults[" + std::to_string(k) + "]";
            if (ev.time < prev) throw ConfigError(field, "times must be nondecreasing");
            prev = ev.time;
            if (ev.agent < 0 || ev.agent >= agent_count) throw ConfigError(field, "unknown agent id");
            if (std::find(seen.begin(), seen.end(), ev.agent) != seen.end()) {
                throw ConfigError(field, "agent fails twice");
            }
            seen.push_back(ev.agent);
        }
        if (agent_count - static_cast<int>(faults.size()) < 3) {
            throw ConfigError("faults", "at least 3 agents must survive");
        }
    }
}

Simulator::Simulator(const ScenarioConfig& config) : config_(config) {
    config_.validate();
    params_ = config_.params;

    if (config_.mode == FormationMode::MultiCircle) {
        formation_.d_l = config_.plan->radii[0];
        formation_.d = config_.plan->d;
        params_.d = config_.plan->d;
        params_.d_l = config_.plan->radii[0];
    } else {
        formation_.d_l = params_.d_l;
        formation_.d = params_.d;
    }
    formation_.base_d_l = formation_.d_l;

    world_.obstacles = config_.obstacles;
    world_.leader.q_r = config_.leader.start;
    world_.leader.p_r = config_.leader.velocity_at(0.0);

    world_.agents.resize(config_.agent_count);
    if (const auto* states = std::get_if<std::vector<AgentInit>>(&config_.init)) {
        for (int i = 0; i < config_.agent_count; ++i) {
            world_.agents[i] = AgentState{(*states)[i].q, (*states)[i].p, i, true};
        }
    } else {
        const auto& normal = std::get<NormalInit>(config_.init);
        std::mt19937_64 rng(config_.seed);
        std::normal_distribution<double> draw(0.0, 1.0);
        for (int i = 0; i < config_.agent_count; ++i) {
            const double x = normal.mean.x() + normal.stddev * draw(rng);
            const double y = normal.mean.y() + normal.stddev * draw(rng);
            world_.agents[i] = AgentState{Vec2(x, y), Vec2::Zero(), i, true};
        }
    }

    total_steps_ = std::llround(config_.t_final / config_.dt);
}

void Simulator::step() {
    if (done()) return;
    const double t_now = t();
    const double dt = config_.dt;

    while (next_fault_ < config_.faults.size() && config_.faults[next_fault_].time <= t_now + kTimeEps) {
        on_fault(world_, formation_, t_now, config_.faults[next_fault_].agent, params_);
        ++next_fault_;
    }

    if (config_.mode == FormationMode::Scaling) {
        scaling_step(world_, config_.scaling, t_now, formation_, params_);
    }

    const LeaderFunction leader_fn =
        config_.mode == FormationMode::MultiCircle
            ? LeaderFunction::switched(*config_.plan, t_now)
            : LeaderFunction::single();

    world_.leader.p_r = config_.leader.velocity_at(t_now);

    // All inputs are computed against the same snapshot before any state moves.
    std::vector<Vec2> u(world_.agents.size(), Vec2::Zero());
    for (std::size_t i = 0; i < world_.agents.size(); ++i) {
        if (!world_.agents[i].alive) continue;
        u[i] = control_input(world_.agents[i].id, world_, config_.gains, params_, leader_fn);
    }

    for (std::size_t i = 0; i < world_.agents.size(); ++i) {
        AgentState& a = world_.agents[i];
        if (!a.alive) continue;
        a.p += dt * u[i];
        a.q += dt * a.p;
        if (!a.q.allFinite() || !a.p.allFinite()) {
            throw DivergenceError(a.id, t_now);
        }
    }

    world_.leader.q_r += dt * world_.leader.p_r;
    ++step_index_;
}

MetricsFrame Simulator::metrics() const {
    MetricsFrame frame;
    frame.t = t();
    frame.d = formation_.d;
    frame.d_l = formation_.d_l;

    std::vector<const AgentState*> alive;
    for (const auto& a : world_.agents) {
        if (a.alive) alive.push_back(&a);
    }
    for (const auto* a : alive) {
        frame.alive_ids.push_back(a->id);
        frame.leader_distances.push_back((a->q - world_.leader.q_r).norm());
    }

    std::vector<double> pairwise;
    pairwise.reserve(alive.size() * (alive.size() + 1) / 2);
    for (std::size_t i = 0; i < alive.size(); ++i) {
        for (std::size_t j = i + 1; j < alive.size(); ++j) {
            pairwise.push_back((alive[i]->q - alive[j]->q).norm());
        }
    }
    frame.min_pairwise = kInf;
    if (!pairwise.empty()) {
        const std::size_t keep = std::min(alive.size(), pairwise.size());
        std::partial_sort(pairwise.begin(), pairwise.begin() + keep, pairwise.end());
        frame.adjacent_distances.assign(pairwise.begin(), pairwise.begin() + keep);
        frame.min_pairwise = frame.adjacent_distances.front();
    }

    frame.min_obstacle_clearance = kInf;
    for (const auto* a : alive) {
        for (const auto& obs : world_.obstacles) {
            frame.min_obstacle_clearance =
                std::min(frame.min_obstacle_clearance, (a->q - obs.center).norm() - obs.radius);
        }
    }
    return frame;
}

void Simulator::scan_violations(std::vector<Violation>& out) const {
    const double t_now = t();
    for (std::size_t i = 0; i < world_.agents.size(); ++i) {
        const AgentState& a = world_.agents[i];
        if (!a.alive) continue;
        for (std::size_t j = i + 1; j < world_.agents.size(); ++j) {
            const AgentState& b = world_.agents[j];
            if (!b.alive) continue;
            const double dist = (a.q - b.q).norm();
            if (dist < config_.collision_floor) {
                out.push_back({t_now, Violation::Kind::Collision, a.id, b.id, dist});
            }
        }
        for (std::size_t k = 0; k < world_.obstacles.size(); ++k) {
            const double dist = (a.q - world_.obstacles[k].center).norm();
            if (dist <= world_.obstacles[k].radius) {
                out.push_back({t_now, Violation::Kind::ObstaclePenetration, a.id, static_cast<int>(k),
                               dist - world_.obstacles[k].radius});
            }
        }
    }
}

void run_stream(const ScenarioConfig& config, const StepObserver& observe) {
    Simulator sim(config);
    while (!sim.done()) {
        sim.step();
        observe(sim);
    }
}

RunResult run(const ScenarioConfig& config) {
    RunResult result;
    run_stream(config, [&result](const Simulator& sim) {
        result.trajectory.push_back({sim.t(), sim.world().agents, sim.world().leader});
        result.metrics.push_back(sim.metrics());
        sim.scan_violations(result.violations);
        result.final_d = sim.formation().d;
        result.final_d_l = sim.formation().d_l;
    });
    return result;
}

namespace {

void append_num(std::string& line, double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
    line.append(buf, res.ptr);
}

void append_num(std::string& line, long v) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    line.append(buf, res.ptr);
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return in;
}

std::vector<std::string_view> split_csv(const std::string& line, std::vector<std::string_view>& cols) {
    cols.clear();
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cols.emplace_back(line.data() + start, line.size() - start);
            break;
        }
        cols.emplace_back(line.data() + start, comma - start);
        start = comma + 1;
    }
    return cols;
}

double parse_num(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v, std::chars_format::general);
    if (res.ec != std::errc{}) throw std::runtime_error("bad numeric field '" + std::string(s) + "'");
    return v;
}

long parse_int(std::string_view s) {
    long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{}) throw std::runtime_error("bad integer field '" + std::string(s) + "'");
    return v;
}

} // namespace

void emit_trajectory(const RunResult& result, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "t,id,alive,qx,qy,px,py\n";
    std::string line;
    for (const auto& frame : result.trajectory) {
        line.clear();
        append_num(line, frame.t);
        line += ",-1,1,";
        append_num(line, frame.leader.q_r.x());
        line += ',';
        append_num(line, frame.leader.q_r.y());
        line += ',';
        append_num(line, frame.leader.p_r.x());
        line += ',';
        append_num(line, frame.leader.p_r.y());
        line += '\n';
        for (const auto& a : frame.agents) {
            append_num(line, frame.t);
            line += ',';
            append_num(line, static_cast<long>(a.id));
            line += a.alive ? ",1," : ",0,";
            append_num(line, a.q.x());
            line += ',';
            append_num(line, a.q.y());
            line += ',';
            append_num(line, a.p.x());
            line += ',';
            append_num(line, a.p.y());
            line += '\n';
        }
        out << line;
    }
}

void emit_metrics(const RunResult& result, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "t,metric,index,value\n";
    std::string line;
    const auto row = [&](double t, const char* metric, long index, double value) {
        line.clear();
        append_num(line, t);
        line += ',';
        line += metric;
        line += ',';
        append_num(line, index);
        line += ',';
        append_num(line, value);
        line += '\n';
        out << line;
    };
    for (const auto& m : result.metrics) {
        for (std::size_t k = 0; k < m.leader_distances.size(); ++k) {
            row(m.t, "leader_dist", m.alive_ids[k], m.leader_distances[k]);
        }
        for (std::size_t k = 0; k < m.adjacent_distances.size(); ++k) {
            row(m.t, "adj_dist", static_cast<long>(k), m.adjacent_distances[k]);
        }
        row(m.t, "min_pair", 0, m.min_pairwise);
        row(m.t, "min_obs_clear", 0, m.min_obstacle_clearance);
        row(m.t, "d", 0, m.d);
        row(m.t, "d_L", 0, m.d_l);
    }
}

void emit_violations(const RunResult& result, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "t,kind,agent,other,value\n";
    std::string line;
    for (const auto& v : result.violations) {
        line.clear();
        append_num(line, v.t);
        line += v.kind == Violation::Kind::Collision ? ",collision," : ",obstacle_penetration,";
        append_num(line, static_cast<long>(v.agent));
        line += ',';
        append_num(line, static_cast<long>(v.other));
        line += ',';
        append_num(line, v.value);
        line += '\n';
        out << line;
    }
}

std::vector<TrajectoryFrame> read_trajectory(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<TrajectoryFrame> frames;
    std::string line;
    std::vector<std::string_view> cols;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        split_csv(line, cols);
        if (cols.size() != 7) throw std::runtime_error("trajectory row needs 7 fields");
        const double t = parse_num(cols[0]);
        const long id = parse_int(cols[1]);
        if (frames.empty() || frames.back().t != t) frames.push_back({t, {}, {}});
        TrajectoryFrame& frame = frames.back();
        const Vec2 q(parse_num(cols[3]), parse_num(cols[4]));
        const Vec2 p(parse_num(cols[5]), parse_num(cols[6]));
        if (id < 0) {
            frame.leader = LeaderState{q, p};
        } else {
            frame.agents.push_back({q, p, static_cast<int>(id), parse_int(cols[2]) != 0});
        }
    }
    return frames;
}

std::vector<MetricsFrame> read_metrics(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<MetricsFrame> frames;
    std::string line;
    std::vector<std::string_view> cols;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        split_csv(line, cols);
        if (cols.size() != 4) throw std::runtime_error("metrics row needs 4 fields");
        const double t = parse_num(cols[0]);
        if (frames.empty() || frames.back().t != t) {
            frames.push_back({});
            frames.back().t = t;
        }
        MetricsFrame& frame = frames.back();
        const std::string_view metric = cols[1];
        const double value = parse_num(cols[3]);
        if (metric == "leader_dist") {
            frame.alive_ids.push_back(static_cast<int>(parse_int(cols[2])));
            frame.leader_distances.push_back(value);
        } else if (metric == "adj_dist") {
            frame.adjacent_distances.push_back(value);
        } else if (metric == "min_pair") {
            frame.min_pairwise = value;
        } else if (metric == "min_obs_clear") {
            frame.min_obstacle_clearance = value;
        } else if (metric == "d") {
            frame.d = value;
        } else if (metric == "d_L") {
            frame.d_l = value;
        } else {
            throw std::runtime_error("unknown metric '" + std::string(metric) + "'");
        }
    }
    return frames;
}

} // namespace flockring
