#include "chaosfit/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "chaosfit/error.hpp"

namespace chaosfit {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.count(it.key())) throw ValidationError("unknown config key '" + where + it.key() + "'");
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key) || j.at(key).is_null()) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config key '") + key + "': " + e.what());
    }
}

void read_count(const json& j, const char* key, std::size_t& out) {
    if (!j.contains(key) || j.at(key).is_null()) return;
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ValidationError(std::string("config key '") + key + "' must be a non-negative integer");
    }
    out = v.get<std::size_t>();
}

void read_pair(const json& j, const char* key, double& lo, double& hi) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw ValidationError(std::string("config key '") + key + "' must be a pair of numbers");
    }
    lo = v[0].get<double>();
    hi = v[1].get<double>();
}

std::string loss_setting_name(LossModeSetting s) {
    switch (s) {
        case LossModeSetting::Auto: return "auto";
        case LossModeSetting::Full: return "full";
        case LossModeSetting::MeanOnly: return "mean_only";
    }
    return "auto";
}

}  // namespace

LossMode RunConfig::resolved_loss_mode() const {
    switch (loss_mode) {
        case LossModeSetting::Full: return LossMode::Full;
        case LossModeSetting::MeanOnly: return LossMode::MeanOnly;
        case LossModeSetting::Auto: break;
    }
    return model == ModelKind::OU ? LossMode::MeanOnly : LossMode::Full;
}

void RunConfig::validate() const {
    if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("T must be > 0");
    if (n < 2) throw ValidationError("n must be >= 2");
    if (N < 1) throw ValidationError("N must be >= 1");
    if (K < 1) throw ValidationError("K must be >= 1");
    if (P > 8) throw ValidationError("P must be <= 8");
    make_model(model, x0);
    if (!std::isfinite(theta_true.drift) || !std::isfinite(theta_true.diffusion) || theta_true.diffusion < 0.0) {
        throw ValidationError("theta_true must be finite with theta2 >= 0");
    }
    if (theta0.empty()) throw ValidationError("theta0 needs at least one start");
    for (double v : theta0) {
        if (!std::isfinite(v)) throw ValidationError("theta0 entries must be finite");
    }
    if (sigma0 && !(*sigma0 >= 0.0)) throw ValidationError("sigma0 must be >= 0");
    if (const auto* k = std::get_if<double>(&carrying_capacity); k && !(*k > 0.0)) {
        throw ValidationError("carrying_capacity must be > 0");
    }
    if (const auto* s = std::get_if<std::string>(&carrying_capacity); s && *s != "plateau") {
        throw ValidationError("carrying_capacity must be a number or \"plateau\"");
    }
    optimizer.validate();
    if (gradcheck.points == 0 || !(gradcheck.h > 0.0) || gradcheck.paths == 0) {
        throw ValidationError("gradcheck needs points >= 1, h > 0 and paths >= 1");
    }
    if (!(gradcheck.theta1_lo <= gradcheck.theta1_hi) || !(gradcheck.theta2_lo <= gradcheck.theta2_hi)) {
        throw ValidationError("gradcheck ranges must satisfy lo <= hi");
    }
}

namespace {

RunConfig parse_config(const json& j) {
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    reject_unknown(j,
                   {"model", "x0", "T", "n", "N", "K", "P", "theta_true", "theta0", "sigma0", "loss_mode", "seed",
                    "input", "carrying_capacity", "optimizer", "box", "gradcheck"},
                   "");
    RunConfig cfg;
    if (j.contains("model")) cfg.model = parse_model_kind(j.at("model").get<std::string>());
    read(j, "x0", cfg.x0);
    read(j, "T", cfg.T);
    read_count(j, "n", cfg.n);
    read_count(j, "N", cfg.N);
    std::size_t K = cfg.K;
    std::size_t P = cfg.P;
    read_count(j, "K", K);
    read_count(j, "P", P);
    cfg.K = static_cast<unsigned>(K);
    cfg.P = static_cast<unsigned>(P);
    if (j.contains("theta_true")) read_pair(j, "theta_true", cfg.theta_true.drift, cfg.theta_true.diffusion);
    if (j.contains("theta0")) {
        const auto& v = j.at("theta0");
        if (v.is_number()) {
            cfg.theta0 = {v.get<double>()};
        } else {
            read(j, "theta0", cfg.theta0);
        }
    }
    if (j.contains("sigma0") && !j.at("sigma0").is_null()) cfg.sigma0 = j.at("sigma0").get<double>();
    if (j.contains("loss_mode")) {
        const auto name = j.at("loss_mode").get<std::string>();
        if (name == "auto") {
            cfg.loss_mode = LossModeSetting::Auto;
        } else {
            cfg.loss_mode = parse_loss_mode(name) == LossMode::Full ? LossModeSetting::Full : LossModeSetting::MeanOnly;
        }
    }
    if (j.contains("seed") && !j.at("seed").is_null()) {
        if (!j.at("seed").is_number_unsigned()) throw ValidationError("seed must be a non-negative integer");
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("input") && !j.at("input").is_null()) cfg.input = j.at("input").get<std::string>();
    if (j.contains("carrying_capacity")) {
        const auto& v = j.at("carrying_capacity");
        if (v.is_number()) {
            cfg.carrying_capacity = v.get<double>();
        } else if (v.is_string()) {
            cfg.carrying_capacity = v.get<std::string>();
        } else if (!v.is_null()) {
            throw ValidationError("carrying_capacity must be a number, \"plateau\" or null");
        }
    }
    if (j.contains("optimizer")) {
        const auto& o = j.at("optimizer");
        reject_unknown(o, {"max_iters", "tol_grad", "tol_step", "gamma0", "gamma_min", "gamma_max", "clip"},
                       "optimizer.");
        read_count(o, "max_iters", cfg.optimizer.max_iters);
        read(o, "tol_grad", cfg.optimizer.tol_grad);
        read(o, "tol_step", cfg.optimizer.tol_step);
        read(o, "gamma0", cfg.optimizer.gamma0);
        read(o, "gamma_min", cfg.optimizer.gamma_min);
        read(o, "gamma_max", cfg.optimizer.gamma_max);
        read(o, "clip", cfg.optimizer.clip);
    }
    if (j.contains("box")) {
        const auto& b = j.at("box");
        reject_unknown(b, {"theta1", "theta2"}, "box.");
        read_pair(b, "theta1", cfg.optimizer.box.drift_lo, cfg.optimizer.box.drift_hi);
        read_pair(b, "theta2", cfg.optimizer.box.diffusion_lo, cfg.optimizer.box.diffusion_hi);
    }
    if (j.contains("gradcheck")) {
        const auto& g = j.at("gradcheck");
        reject_unknown(g, {"points", "h", "seed", "paths", "theta1_range", "theta2_range", "fail_above",
                           "corrupt_sensitivity"},
                       "gradcheck.");
        read_count(g, "points", cfg.gradcheck.points);
        read(g, "h", cfg.gradcheck.h);
        read(g, "seed", cfg.gradcheck.seed);
        read_count(g, "paths", cfg.gradcheck.paths);
        read_pair(g, "theta1_range", cfg.gradcheck.theta1_lo, cfg.gradcheck.theta1_hi);
        read_pair(g, "theta2_range", cfg.gradcheck.theta2_lo, cfg.gradcheck.theta2_hi);
        read(g, "fail_above", cfg.gradcheck.fail_above);
        read(g, "corrupt_sensitivity", cfg.gradcheck.corrupt_sensitivity);
    }
    return cfg;
}

}  // namespace

RunConfig config_from_json(const json& j) {
    try {
        return parse_config(j);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
}

ordered_json config_to_json(const RunConfig& cfg) {
    ordered_json j;
    j["model"] = to_string(cfg.model);
    j["x0"] = cfg.x0;
    j["T"] = cfg.T;
    j["n"] = cfg.n;
    j["N"] = cfg.N;
    j["K"] = cfg.K;
    j["P"] = cfg.P;
    j["theta_true"] = {cfg.theta_true.drift, cfg.theta_true.diffusion};
    j["theta0"] = cfg.theta0;
    j["sigma0"] = cfg.sigma0 ? ordered_json(*cfg.sigma0) : ordered_json(nullptr);
    j["loss_mode"] = loss_setting_name(cfg.loss_mode);
    j["seed"] = cfg.seed ? ordered_json(*cfg.seed) : ordered_json(nullptr);
    j["input"] = cfg.input ? ordered_json(*cfg.input) : ordered_json(nullptr);
    if (const auto* k = std::get_if<double>(&cfg.carrying_capacity)) {
        j["carrying_capacity"] = *k;
    } else if (const auto* s = std::get_if<std::string>(&cfg.carrying_capacity)) {
        j["carrying_capacity"] = *s;
    } else {
        j["carrying_capacity"] = nullptr;
    }
    const auto& o = cfg.optimizer;
    j["optimizer"] = {{"max_iters", o.max_iters}, {"tol_grad", o.tol_grad},   {"tol_step", o.tol_step},
                      {"gamma0", o.gamma0},       {"gamma_min", o.gamma_min}, {"gamma_max", o.gamma_max},
                      {"clip", o.clip}};
    j["box"] = {{"theta1", {o.box.drift_lo, o.box.drift_hi}}, {"theta2", {o.box.diffusion_lo, o.box.diffusion_hi}}};
    const auto& g = cfg.gradcheck;
    j["gradcheck"] = {{"points", g.points},
                      {"h", g.h},
                      {"seed", g.seed},
                      {"paths", g.paths},
                      {"theta1_range", {g.theta1_lo, g.theta1_hi}},
                      {"theta2_range", {g.theta2_lo, g.theta2_hi}},
                      {"fail_above", g.fail_above},
                      {"corrupt_sensitivity", g.corrupt_sensitivity}};
    return j;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open config '" + path.string() + "'");
    try {
        return config_from_json(json::parse(is));
    } catch (const json::exception& e) {
        throw ValidationError("config '" + path.string() + "': " + e.what());
    }
}

void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("--set expects key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;

    json* node = &j;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ValidationError("bad override key '" + key + "'");
        if (!node->is_object()) *node = json::object();
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        start = dot + 1;
    }
}

}  // namespace chaosfit
