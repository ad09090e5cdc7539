#include "chaosfit/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "chaosfit/error.hpp"
#include "chaosfit/io.hpp"

namespace chaosfit {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void write_json(const ordered_json& j, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ValidationError("cannot open '" + path.string() + "' for writing");
    os << j.dump(2) << '\n';
    if (!os) throw Error("write to '" + path.string() + "' failed");
}

std::string sigma_tilde_convention(NoiseType noise) {
    return noise == NoiseType::Additive ? "sqrt(mean_k QV_T / T)" : "sqrt(mean_k QV_T / energy_T)";
}

}  // namespace

RunConfig resolve_config(const CommandOptions& opts) {
    json j = json::object();
    if (opts.config) {
        std::ifstream is(*opts.config);
        if (!is) throw ValidationError("cannot open config '" + opts.config->string() + "'");
        j = json::parse(is, nullptr, false);
        if (j.is_discarded()) throw ValidationError("config '" + opts.config->string() + "' is not valid JSON");
    }
    for (const auto& s : opts.overrides) apply_override(j, s);
    RunConfig cfg = config_from_json(j);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.data) cfg.input = opts.data->string();
    cfg.validate();
    return cfg;
}

EstimationResult estimate(const RunConfig& cfg, const TrajectorySet& data) {
    cfg.validate();
    data.validate();
    EstimationResult res;
    res.mode = cfg.resolved_loss_mode();

    double x0 = 0.0;
    for (const auto& p : data.paths) x0 += p.front();
    res.x0 = x0 / static_cast<double>(data.path_count());
    const SdeModel model = make_model(cfg.model, res.x0);

    const QvStats qv = compute_qv_stats(data, model.noise());
    res.sigma_tilde = qv.sigma_tilde;
    const Objective objective(model, data.grid, cfg.K, cfg.P, LossTargets::from(data, qv), res.mode);

    OptimizerConfig opt = cfg.optimizer;
    if (res.mode == LossMode::MeanOnly) opt.active = {true, false};
    const double sigma_start = cfg.sigma0.value_or(res.sigma_tilde);

    for (double theta1 : cfg.theta0) {
        const Theta start{theta1, sigma_start};
        res.starts.push_back({start, run(objective, start, opt)});
    }
    return res;
}

double relative_gradient_error(const Vec2& analytic, const Vec2& fd) {
    const double scale = std::max({std::abs(analytic[0]), std::abs(analytic[1]), std::abs(fd[0]), std::abs(fd[1])});
    const double diff = std::max(std::abs(analytic[0] - fd[0]), std::abs(analytic[1] - fd[1]));
    if (scale == 0.0) return 0.0;
    return diff / scale;
}

GradcheckReport gradcheck(const RunConfig& cfg) {
    cfg.validate();
    const SdeModel model = make_model(cfg.model, cfg.x0);
    const TimeGrid grid = cfg.grid();
    const auto sim = euler_maruyama(model, cfg.theta_true, grid, cfg.gradcheck.paths, cfg.seed.value_or(0));
    const QvStats qv = compute_qv_stats(sim.set, model.noise());
    Objective objective(model, grid, cfg.K, cfg.P, LossTargets::from(sim.set, qv), cfg.resolved_loss_mode());
    if (cfg.gradcheck.corrupt_sensitivity) {
        objective.set_sensitivity_hook([](Sensitivities& s) {
            for (std::size_t k = 0; k < s.mode_count(); ++k) {
                for (int j = 0; j < 2; ++j) {
                    for (auto& v : s.series(j, k)) v *= 1.01;
                }
            }
        });
    }

    std::mt19937_64 rng(cfg.gradcheck.seed);
    std::uniform_real_distribution<double> u1(cfg.gradcheck.theta1_lo, cfg.gradcheck.theta1_hi);
    std::uniform_real_distribution<double> u2(cfg.gradcheck.theta2_lo, cfg.gradcheck.theta2_hi);
    const auto evaluator = [&objective](const Theta& th) { return objective.evaluate(th).total; };

    GradcheckReport rep;
    for (std::size_t p = 0; p < cfg.gradcheck.points; ++p) {
        const double a = u1(rng);
        const double b = u2(rng);
        GradcheckPoint pt;
        pt.theta = {a, b};
        pt.analytic = objective.evaluate_with_gradient(pt.theta).grad;
        pt.finite_diff = finite_diff_gradient(evaluator, pt.theta, cfg.gradcheck.h, cfg.optimizer.box);
        pt.rel_error = relative_gradient_error(pt.analytic, pt.finite_diff);
        rep.max_rel_error = std::max(rep.max_rel_error, pt.rel_error);
        rep.points.push_back(pt);
    }
    return rep;
}

int cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out) {
    cfg.validate();
    if (!cfg.seed) throw ValidationError("simulate requires a seed (config \"seed\" or --seed)");
    const SdeModel model = make_model(cfg.model, cfg.x0);
    const auto sim = euler_maruyama(model, cfg.theta_true, cfg.grid(), cfg.N, *cfg.seed);
    write_trajectories_csv(sim.set, out / "trajectories.csv");
    std::cout << "simulate: " << cfg.N << " " << to_string(cfg.model) << " paths, " << cfg.n + 1
              << " points, redraws " << sim.rejected << " -> " << (out / "trajectories.csv").string() << '\n';
    return kExitOk;
}

int cmd_estimate(const RunConfig& cfg, const std::filesystem::path& out) {
    cfg.validate();
    if (!cfg.input) throw ValidationError("estimate needs a data file (config \"input\" or --data)");
    TrajectorySet data = ingest_csv(*cfg.input, cfg.grid());

    ordered_json capacity;
    if (const auto* k = std::get_if<double>(&cfg.carrying_capacity)) {
        data = normalize_by_capacity(data, *k);
        capacity = {{"source", "user"}, {"value", *k}};
    } else if (std::holds_alternative<std::string>(cfg.carrying_capacity)) {
        const double k_hat = plateau_capacity(data);
        data = normalize_by_capacity(data, k_hat);
        capacity = {{"source", "plateau mean of final 10% of time points"}, {"value", k_hat}};
    } else {
        capacity = {{"source", "none"}, {"value", nullptr}};
    }

    const EstimationResult res = estimate(cfg, data);
    const NoiseType noise = make_model(cfg.model, res.x0).noise();

    ordered_json j;
    j["command"] = "estimate";
    j["config"] = config_to_json(cfg);
    j["data"] = {{"path", *cfg.input},
                 {"paths", data.path_count()},
                 {"steps", data.grid.steps()},
                 {"horizon", data.grid.horizon()},
                 {"x0", res.x0}};
    j["carrying_capacity"] = capacity;
    j["loss_mode"] = to_string(res.mode);
    j["sigma_tilde"] = res.sigma_tilde;
    j["sigma_tilde_convention"] = sigma_tilde_convention(noise);

    bool diverged = false;
    ordered_json starts = ordered_json::array();
    std::string summary = "start,theta1_0,theta2_0,theta1,theta2,loss,status,iterations\n";
    for (std::size_t s = 0; s < res.starts.size(); ++s) {
        const auto& sr = res.starts[s];
        const auto& tr = sr.trace;
        const std::string trace_name = "trace_" + std::to_string(s + 1) + ".csv";
        write_trace_csv(tr, out / trace_name);
        diverged = diverged || tr.status == OptimizerStatus::Diverged;
        starts.push_back({{"theta1_0", sr.start.drift},
                          {"theta2_0", sr.start.diffusion},
                          {"theta1", tr.final_theta.drift},
                          {"theta2", tr.final_theta.diffusion},
                          {"loss", tr.final_loss},
                          {"status", to_string(tr.status)},
                          {"iterations", tr.iterations()},
                          {"loss_increases", tr.loss_increases},
                          {"message", tr.message},
                          {"trace", trace_name}});
        summary += std::to_string(s + 1) + ',' + format_double(sr.start.drift) + ',' +
                   format_double(sr.start.diffusion) + ',' + format_double(tr.final_theta.drift) + ',' +
                   format_double(tr.final_theta.diffusion) + ',' + format_double(tr.final_loss) + ',' +
                   to_string(tr.status) + ',' + std::to_string(tr.iterations()) + '\n';
        std::cout << "estimate: start " << format_double(sr.start.drift) << " -> (" << tr.final_theta.drift << ", "
                  << tr.final_theta.diffusion << ") " << to_string(tr.status) << " after " << tr.iterations()
                  << " iterations\n";
    }
    j["starts"] = starts;
    j["status"] = diverged ? "diverged" : "ok";
    write_json(j, out / "results.json");
    {
        std::ofstream os(out / "summary.csv", std::ios::binary | std::ios::trunc);
        os << summary;
        if (!os) throw Error("cannot write summary.csv");
    }
    return diverged ? kExitNumerical : kExitOk;
}

int cmd_gradcheck(const RunConfig& cfg, const std::filesystem::path& out) {
    const GradcheckReport rep = gradcheck(cfg);
    const bool pass = rep.max_rel_error <= cfg.gradcheck.fail_above;
    ordered_json j;
    j["command"] = "gradcheck";
    j["config"] = config_to_json(cfg);
    j["loss_mode"] = to_string(cfg.resolved_loss_mode());
    ordered_json pts = ordered_json::array();
    for (const auto& p : rep.points) {
        pts.push_back({{"theta", {p.theta.drift, p.theta.diffusion}},
                       {"analytic", {p.analytic[0], p.analytic[1]}},
                       {"finite_diff", {p.finite_diff[0], p.finite_diff[1]}},
                       {"rel_error", p.rel_error}});
    }
    j["points"] = pts;
    j["max_rel_error"] = rep.max_rel_error;
    j["threshold"] = cfg.gradcheck.fail_above;
    j["pass"] = pass;
    write_json(j, out / "gradcheck.json");
    std::cout << "gradcheck: max relative error " << rep.max_rel_error << (pass ? " (pass)" : " (FAIL)") << '\n';
    return pass ? kExitOk : kExitNumerical;
}

int cmd_propagate(const RunConfig& cfg, const std::filesystem::path& out) {
    cfg.validate();
    const SdeModel model = make_model(cfg.model, cfg.x0);
    const BasisSet basis(cfg.T, cfg.K);
    const auto coeffs = propagate(model, cfg.theta_true, cfg.grid(), basis, cfg.P);
    write_coefficients_csv(coeffs, out / "coefficients.csv");
    write_moments_csv(coeffs, out / "moments.csv");
    std::cout << "propagate: " << coeffs.mode_count() << " modes -> " << (out / "coefficients.csv").string()
              << ", " << (out / "moments.csv").string() << '\n';
    return kExitOk;
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Wiener-chaos propagator and gradient-descent parameter estimation for scalar SDEs", "chaosfit"};
    app.require_subcommand(1);

    CommandOptions opts;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--seed", opts.seed, "RNG seed (u64)");
        sub->add_option("--out", opts.out, "output directory");
        sub->add_option("--set", opts.overrides, "override a config field, key=value (repeatable)");
    };
    auto* simulate = app.add_subcommand("simulate", "Euler-Maruyama trajectories to CSV");
    auto* estimate_cmd = app.add_subcommand("estimate", "multi-start parameter estimation from a trajectory CSV");
    auto* grad = app.add_subcommand("gradcheck", "analytic gradient vs finite differences");
    auto* prop = app.add_subcommand("propagate", "chaos coefficients and moments to CSV");
    for (auto* s : {simulate, estimate_cmd, grad, prop}) add_common(s);
    estimate_cmd->add_option("--data", opts.data, "trajectory CSV (overrides config input)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        const RunConfig cfg = resolve_config(opts);
        if (simulate->parsed()) return cmd_simulate(cfg, opts.out);
        if (estimate_cmd->parsed()) return cmd_estimate(cfg, opts.out);
        if (grad->parsed()) return cmd_gradcheck(cfg, opts.out);
        if (prop->parsed()) return cmd_propagate(cfg, opts.out);
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitValidation;
    } catch (const UndefinedError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitValidation;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitValidation;
}

}  // namespace chaosfit
