#include "conncoord/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "conncoord/errors.hpp"

namespace conncoord {
namespace {

using nlohmann::json;

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

class Reader {
public:
    Reader(const json& obj, std::string path, std::vector<std::string>& defaults)
        : obj_(obj), path_(std::move(path)), defaults_(defaults) {
        if (!obj_.is_object()) {
            throw ConfigError((path_.empty() ? std::string("<root>") : path_) + ": expected an object");
        }
    }

    /// Rejects keys that were never looked up.
    void finish(const std::set<std::string>& allowed) const {
        for (const auto& item : obj_.items()) {
            if (!allowed.contains(item.key())) {
                throw ConfigError(join(path_, item.key()) + ": unknown key");
            }
        }
    }

    bool has(const std::string& key) const { return obj_.contains(key); }
    std::string key(const std::string& k) const { return join(path_, k); }
    const json& at(const std::string& k) const { return obj_.at(k); }

    double number(const std::string& k) const {
        if (!has(k)) throw ConfigError(key(k) + ": required");
        return as_number(obj_.at(k), key(k));
    }
    double number(const std::string& k, double fallback) const {
        if (!has(k)) {
            defaults_.push_back(key(k));
            return fallback;
        }
        return as_number(obj_.at(k), key(k));
    }
    std::optional<double> optional_number(const std::string& k) const {
        if (!has(k) || obj_.at(k).is_null()) return std::nullopt;
        return as_number(obj_.at(k), key(k));
    }
    std::string text(const std::string& k) const {
        if (!has(k)) throw ConfigError(key(k) + ": required");
        return as_text(obj_.at(k), key(k));
    }
    std::string text(const std::string& k, const std::string& fallback) const {
        if (!has(k)) {
            defaults_.push_back(key(k));
            return fallback;
        }
        return as_text(obj_.at(k), key(k));
    }
    std::uint64_t unsigned_integer(const std::string& k, std::uint64_t fallback) const {
        if (!has(k)) {
            defaults_.push_back(key(k));
            return fallback;
        }
        const json& v = obj_.at(k);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
            throw ConfigError(key(k) + ": expected a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    static double as_number(const json& v, const std::string& where) {
        if (!v.is_number()) throw ConfigError(where + ": expected a number");
        return v.get<double>();
    }
    static std::string as_text(const json& v, const std::string& where) {
        if (!v.is_string()) throw ConfigError(where + ": expected a string");
        return v.get<std::string>();
    }

private:
    const json& obj_;
    std::string path_;
    std::vector<std::string>& defaults_;
};

std::vector<Eigen::VectorXd> vectors(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array of arrays");
    std::vector<Eigen::VectorXd> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string at = where + "[" + std::to_string(i) + "]";
        const json& row = v[i];
        if (!row.is_array()) throw ConfigError(at + ": expected an array of numbers");
        Eigen::VectorXd x(static_cast<Eigen::Index>(row.size()));
        for (std::size_t k = 0; k < row.size(); ++k) {
            x(static_cast<Eigen::Index>(k)) = Reader::as_number(row[k], at + "[" + std::to_string(k) + "]");
        }
        out.push_back(std::move(x));
    }
    return out;
}

// Each agent's gains are either one number (k I) or a list of diagonal entries.
std::vector<Eigen::VectorXd> damping(const json& v, std::size_t dim, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array");
    std::vector<Eigen::VectorXd> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string at = where + "[" + std::to_string(i) + "]";
        if (v[i].is_number()) {
            out.push_back(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dim), v[i].get<double>()));
        } else {
            out.push_back(vectors(json::array({v[i]}), at).front());
        }
    }
    return out;
}

json vectors_json(const std::vector<Eigen::VectorXd>& vs) {
    json out = json::array();
    for (const auto& v : vs) {
        json row = json::array();
        for (Eigen::Index k = 0; k < v.size(); ++k) row.push_back(v(k));
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace

ParsedConfig parse_config_text(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("<root>: malformed JSON: ") + e.what());
    }

    ParsedConfig parsed;
    ScenarioConfig& cfg = parsed.config;
    auto& defaults = parsed.defaults_applied;
    Reader top(root, "", defaults);

    cfg.name = top.text("name", "scenario");
    cfg.kind = network_kind_from_string(top.text("network"));

    if (!top.has("initial_positions")) throw ConfigError("initial_positions: required");
    cfg.initial_positions = vectors(top.at("initial_positions"), "initial_positions");
    const std::size_t inferred_dim =
        cfg.initial_positions.empty() ? 1 : static_cast<std::size_t>(cfg.initial_positions.front().size());
    cfg.dimension = static_cast<std::size_t>(top.unsigned_integer("dimension", inferred_dim));
    const std::size_t n_agents = cfg.initial_positions.size();

    if (top.has("initial_velocities")) {
        cfg.initial_velocities = vectors(top.at("initial_velocities"), "initial_velocities");
    } else {
        defaults.push_back("initial_velocities");
        cfg.initial_velocities.assign(n_agents, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cfg.dimension)));
    }

    cfg.broadcast_radius = top.number("broadcast_radius");
    cfg.buffer_width = top.number("buffer_width");
    cfg.edge_threshold = top.number("edge_threshold", cfg.broadcast_radius - cfg.buffer_width);

    if (!top.has("potential")) throw ConfigError("potential: required");
    {
        Reader pot(top.at("potential"), "potential", defaults);
        cfg.Q = pot.number("Q");
        cfg.p = pot.number("p", 1.0);
        pot.finish({"Q", "p"});
    }

    if (!top.has("damping_gains")) throw ConfigError("damping_gains: required");
    cfg.damping = damping(top.at("damping_gains"), cfg.dimension, "damping_gains");

    if (!top.has("delay")) throw ConfigError("delay: required");
    {
        Reader d(top.at("delay"), "delay", defaults);
        cfg.delay.max_delay = d.number("max_delay");
        try {
            cfg.delay.profile = delay_kind_from_string(d.text("profile", "sinusoidal"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("delay.profile: ") + e.what());
        }
        cfg.delay.frequency = d.number("frequency", 1.0);
        cfg.delay.constant = d.optional_number("constant");
        cfg.delay.walk_sigma = d.number("walk_sigma", 0.01);
        cfg.delay.walk_step = d.number("walk_step", 0.01);
        cfg.delay.seed = d.unsigned_integer("seed", 1);
        d.finish({"max_delay", "profile", "frequency", "constant", "walk_sigma", "walk_step", "seed"});
    }

    const double default_horizon = cfg.kind == NetworkKind::single_integrator ? 20.0 : 30.0;
    if (top.has("integrator")) {
        Reader in(top.at("integrator"), "integrator", defaults);
        cfg.integrator.step = in.number("step", 1e-3);
        cfg.integrator.horizon = in.number("horizon", default_horizon);
        cfg.integrator.decimation = static_cast<std::size_t>(in.unsigned_integer("decimation", 10));
        in.finish({"step", "horizon", "decimation"});
    } else {
        defaults.push_back("integrator");
        cfg.integrator = IntegratorSettings{1e-3, default_horizon, 10};
    }

    if (top.has("el_model")) {
        Reader m(top.at("el_model"), "el_model", defaults);
        cfg.el_model.m1 = m.number("m1", 0.5);
        cfg.el_model.m2 = m.number("m2", 0.5);
        cfg.el_model.l1 = m.number("l1", 1.0);
        cfg.el_model.l2 = m.number("l2", 1.0);
        cfg.el_model.gravity = m.number("gravity", 9.81);
        m.finish({"m1", "m2", "l1", "l2", "gravity"});
    } else {
        defaults.push_back("el_model");
    }

    if (top.has("monitors")) {
        Reader m(top.at("monitors"), "monitors", defaults);
        cfg.monitors.lyapunov_tolerance = m.number("lyapunov_tolerance", 1e-3);
        cfg.monitors.consensus_tolerance = m.number("consensus_tolerance", 1e-2);
        m.finish({"lyapunov_tolerance", "consensus_tolerance"});
    } else {
        defaults.push_back("monitors");
    }

    cfg.gain_check = gain_check_from_string(top.text("gain_check", "bypass"));
    cfg.alpha = top.optional_number("alpha");
    cfg.delta = top.optional_number("delta");

    top.finish({"name", "network", "dimension", "initial_positions", "initial_velocities",
                "broadcast_radius", "buffer_width", "edge_threshold", "potential", "damping_gains",
                "delay", "integrator", "el_model", "monitors", "gain_check", "alpha", "delta"});
    cfg.validate();
    return parsed;
}

ParsedConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string() + ": cannot open");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string emit_config(const ScenarioConfig& cfg) {
    json out;
    out["name"] = cfg.name;
    out["network"] = std::string(to_string(cfg.kind));
    out["dimension"] = cfg.dimension;
    out["initial_positions"] = vectors_json(cfg.initial_positions);
    out["initial_velocities"] = vectors_json(cfg.initial_velocities);
    out["broadcast_radius"] = cfg.broadcast_radius;
    out["buffer_width"] = cfg.buffer_width;
    out["edge_threshold"] = cfg.edge_threshold;
    out["potential"] = {{"Q", cfg.Q}, {"p", cfg.p}};
    out["damping_gains"] = vectors_json(cfg.damping);
    json delay = {{"max_delay", cfg.delay.max_delay},
                  {"profile", std::string(to_string(cfg.delay.profile))},
                  {"frequency", cfg.delay.frequency},
                  {"walk_sigma", cfg.delay.walk_sigma},
                  {"walk_step", cfg.delay.walk_step},
                  {"seed", cfg.delay.seed}};
    delay["constant"] = cfg.delay.constant ? json(*cfg.delay.constant) : json(nullptr);
    out["delay"] = std::move(delay);
    out["integrator"] = {{"step", cfg.integrator.step},
                         {"horizon", cfg.integrator.horizon},
                         {"decimation", cfg.integrator.decimation}};
    out["el_model"] = {{"m1", cfg.el_model.m1},
                       {"m2", cfg.el_model.m2},
                       {"l1", cfg.el_model.l1},
                       {"l2", cfg.el_model.l2},
                       {"gravity", cfg.el_model.gravity}};
    out["monitors"] = {{"lyapunov_tolerance", cfg.monitors.lyapunov_tolerance},
                       {"consensus_tolerance", cfg.monitors.consensus_tolerance}};
    out["gain_check"] = std::string(to_string(cfg.gain_check));
    out["alpha"] = cfg.alpha ? json(*cfg.alpha) : json(nullptr);
    out["delta"] = cfg.delta ? json(*cfg.delta) : json(nullptr);
    return out.dump(2);
}

}  // namespace conncoord
