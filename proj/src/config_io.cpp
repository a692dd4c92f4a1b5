#include "flockring/config_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "flockring/errors.hpp"

namespace flockring {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& message) {
    throw ConfigError(field, message);
}

const json& member(const json& obj, const std::string& field, const std::string& prefix) {
    const auto it = obj.find(field);
    if (it == obj.end()) fail(prefix + field, "missing");
    return *it;
}

double number(const json& obj, const std::string& field, const std::string& prefix) {
    const json& v = member(obj, field, prefix);
    if (!v.is_number()) fail(prefix + field, "must be a number");
    return v.get<double>();
}

double number_or(const json& obj, const std::string& field, double fallback) {
    const auto it = obj.find(field);
    return it == obj.end() ? fallback : it->get<double>();
}

Vec2 vec2(const json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        fail(field, "must be a [x, y] pair");
    }
    return Vec2(v[0].get<double>(), v[1].get<double>());
}

FormationMode parse_mode(const std::string& text) {
    if (text == "single") return FormationMode::SingleCircle;
    if (text == "scaling") return FormationMode::Scaling;
    if (text == "multi") return FormationMode::MultiCircle;
    fail("mode", "must be one of single|scaling|multi");
}

InitSpec parse_init(const json& init) {
    const std::string type = member(init, "type", "agents.init.").get<std::string>();
    if (type == "normal") {
        NormalInit normal;
        normal.mean = vec2(member(init, "mean", "agents.init."), "agents.init.mean");
        normal.stddev = number(init, "stddev", "agents.init.");
        return normal;
    }
    if (type == "explicit") {
        std::vector<AgentInit> states;
        for (const auto& row : member(init, "states", "agents.init.")) {
            if (!row.is_array() || row.size() != 4) {
                fail("agents.init.states", "each entry must be [qx, qy, px, py]");
            }
            states.push_back({Vec2(row[0].get<double>(), row[1].get<double>()),
                              Vec2(row[2].get<double>(), row[3].get<double>())});
        }
        return states;
    }
    fail("agents.init.type", "must be normal|explicit");
}

ActionParams parse_params(const json& p) {
    ActionParams out;
    out.a = number(p, "a", "params.");
    out.b = number(p, "b", "params.");
    out.a_l = number(p, "a_l", "params.");
    out.b_l = number(p, "b_l", "params.");
    out.eps = number(p, "eps", "params.");
    out.eps_l = number(p, "eps_l", "params.");
    out.h = number(p, "h", "params.");
    out.h_l = number_or(p, "h_l", out.h); // defaults to the agent bump fraction
    out.a_sigma_l = number_or(p, "a_sigma_l", 1.0);
    out.d = number_or(p, "d", 0.0); // 0 marks "derive from the formation"
    out.d_obs = number(p, "d_obs", "params.");
    out.d_l = number(p, "d_l", "params.");
    out.kappa = number(p, "kappa", "params.");
    out.r_obs = number(p, "r_obs", "params.");
    return out;
}

} // namespace

ScenarioConfig parse_scenario(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        fail("<root>", std::string("invalid JSON: ") + e.what());
    }

    ScenarioConfig config;
    config.name = root.value("name", "scenario");
    config.mode = parse_mode(member(root, "mode", "").get<std::string>());
    config.seed = member(root, "seed", "").get<std::uint64_t>();
    config.dt = number(root, "dt", "");
    config.t_final = number(root, "t_final", "");
    config.collision_floor = number_or(root, "collision_floor", 0.1);

    const json& agents = member(root, "agents", "");
    config.agent_count = member(agents, "count", "agents.").get<int>();
    config.init = parse_init(member(agents, "init", "agents."));

    const json& gains = member(root, "gains", "");
    config.gains.c1_alpha = number(gains, "c1_alpha", "gains.");
    config.gains.c2_alpha = number(gains, "c2_alpha", "gains.");
    config.gains.c1_beta = number(gains, "c1_beta", "gains.");
    config.gains.c2_beta = number(gains, "c2_beta", "gains.");
    config.gains.c1_gamma = number(gains, "c1_gamma", "gains.");
    config.gains.c2_gamma = number(gains, "c2_gamma", "gains.");

    config.params = parse_params(member(root, "params", ""));

    if (const auto it = root.find("obstacles"); it != root.end()) {
        for (std::size_t k = 0; k < it->size(); ++k) {
            const json& o = (*it)[k];
            const std::string prefix = "obstacles[" + std::to_string(k) + "].";
            config.obstacles.push_back(
                {vec2(member(o, "center", prefix), prefix + "center"), number(o, "radius", prefix)});
        }
    }

    const json& leader = member(root, "leader", "");
    config.leader.start = vec2(member(leader, "start", "leader."), "leader.start");
    if (const auto it = leader.find("segments"); it != leader.end()) {
        for (std::size_t k = 0; k < it->size(); ++k) {
            const json& seg = (*it)[k];
            const std::string prefix = "leader.segments[" + std::to_string(k) + "].";
            config.leader.segments.push_back(
                {number(seg, "duration", prefix), vec2(member(seg, "velocity", prefix), prefix + "velocity")});
        }
    }

    if (const auto it = root.find("faults"); it != root.end()) {
        for (std::size_t k = 0; k < it->size(); ++k) {
            const json& ev = (*it)[k];
            const std::string prefix = "faults[" + std::to_string(k) + "].";
            config.faults.push_back(
                {number(ev, "time", prefix), member(ev, "agent", prefix).get<int>()});
        }
    }

    if (const auto it = root.find("scaling"); it != root.end()) {
        config.scaling.enabled = it->value("enabled", false);
        config.scaling.expand_factor = number_or(*it, "expand_factor", 2.0);
        config.scaling.shrink_factor = number_or(*it, "shrink_factor", 0.5);
        config.scaling.hold_duration = number_or(*it, "hold_duration", 20.0);
    }

    if (const auto it = root.find("plan"); it != root.end()) {
        std::vector<int> counts;
        for (const auto& c : member(*it, "counts", "plan.")) counts.push_back(c.get<int>());
        std::vector<double> amplitudes;
        if (const auto amp = it->find("amplitudes"); amp != it->end()) {
            for (const auto& a : *amp) amplitudes.push_back(a.get<double>());
        }
        try {
            config.plan = plan_circles(counts, number(*it, "d_l1", "plan."), number(*it, "d_eps", "plan."),
                                       config.params.kappa, number(*it, "ts", "plan."), amplitudes);
        } catch (const PlanError& e) {
            fail("plan", e.what());
        } catch (const InfeasibleSpacingError& e) {
            fail("plan", e.what());
        }
    }

    // Derive the agent spacing when the file omits it.
    if (config.params.d <= 0.0) {
        if (config.plan.has_value()) {
            config.params.d = config.plan->d;
        } else if (config.agent_count >= 2) {
            try {
                config.params.d = polygon_spacing(config.agent_count, config.params.d_l);
            } catch (const InfeasibleSpacingError& e) {
                fail("params.d", e.what());
            }
        } else {
            fail("params.d", "required when it cannot be derived from the formation");
        }
    }

    config.validate();
    return config;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("<file>", "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string scenario_to_json(const ScenarioConfig& config) {
    json root;
    root["name"] = config.name;
    switch (config.mode) {
        case FormationMode::SingleCircle: root["mode"] = "single"; break;
        case FormationMode::Scaling: root["mode"] = "scaling"; break;
        case FormationMode::MultiCircle: root["mode"] = "multi"; break;
    }
    root["seed"] = config.seed;
    root["dt"] = config.dt;
    root["t_final"] = config.t_final;
    root["collision_floor"] = config.collision_floor;

    json agents;
    agents["count"] = config.agent_count;
    if (const auto* states = std::get_if<std::vector<AgentInit>>(&config.init)) {
        json arr = json::array();
        for (const auto& s : *states) {
            arr.push_back({s.q.x(), s.q.y(), s.p.x(), s.p.y()});
        }
        agents["init"] = {{"type", "explicit"}, {"states", arr}};
    } else {
        const auto& normal = std::get<NormalInit>(config.init);
        agents["init"] = {{"type", "normal"},
                          {"mean", {normal.mean.x(), normal.mean.y()}},
                          {"stddev", normal.stddev}};
    }
    root["agents"] = agents;

    root["gains"] = {{"c1_alpha", config.gains.c1_alpha}, {"c2_alpha", config.gains.c2_alpha},
                     {"c1_beta", config.gains.c1_beta},   {"c2_beta", config.gains.c2_beta},
                     {"c1_gamma", config.gains.c1_gamma}, {"c2_gamma", config.gains.c2_gamma}};

    root["params"] = {{"a", config.params.a},
                      {"b", config.params.b},
                      {"a_l", config.params.a_l},
                      {"b_l", config.params.b_l},
                      {"eps", config.params.eps},
                      {"eps_l", config.params.eps_l},
                      {"h", config.params.h},
                      {"h_l", config.params.h_l},
                      {"a_sigma_l", config.params.a_sigma_l},
                      {"d", config.params.d},
                      {"d_obs", config.params.d_obs},
                      {"d_l", config.params.d_l},
                      {"kappa", config.params.kappa},
                      {"r_obs", config.params.r_obs}};

    if (!config.obstacles.empty()) {
        json arr = json::array();
        for (const auto& o : config.obstacles) {
            arr.push_back({{"center", {o.center.x(), o.center.y()}}, {"radius", o.radius}});
        }
        root["obstacles"] = arr;
    }

    json leader;
    leader["start"] = {config.leader.start.x(), config.leader.start.y()};
    if (!config.leader.segments.empty()) {
        json arr = json::array();
        for (const auto& seg : config.leader.segments) {
            arr.push_back({{"duration", seg.duration}, {"velocity", {seg.velocity.x(), seg.velocity.y()}}});
        }
        leader["segments"] = arr;
    }
    root["leader"] = leader;

    if (!config.faults.empty()) {
        json arr = json::array();
        for (const auto& ev : config.faults) {
            arr.push_back({{"time", ev.time}, {"agent", ev.agent}});
        }
        root["faults"] = arr;
    }

    if (config.mode == FormationMode::Scaling) {
        root["scaling"] = {{"enabled", config.scaling.enabled},
                           {"expand_factor", config.scaling.expand_factor},
                           {"shrink_factor", config.scaling.shrink_factor},
                           {"hold_duration", config.scaling.hold_duration}};
    }

    if (config.plan.has_value()) {
        root["plan"] = {{"counts", config.plan->counts},
                        {"d_l1", config.plan->radii[0]},
                        {"d_eps", config.plan->d_eps},
                        {"ts", config.plan->ts},
                        {"amplitudes", config.plan->amplitudes}};
    }

    return root.dump(2) + "\n";
}

} // namespace flockring
