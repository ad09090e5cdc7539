#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "chaosfit/commands.hpp"
#include "chaosfit/error.hpp"
#include "chaosfit/io.hpp"

using namespace chaosfit;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("chaosfit_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream os(p, std::ios::binary);
    os << s;
}

std::string read_text(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "chaosfit");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream is(p);
    std::string line;
    while (std::getline(is, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

std::string expect_validation(const fs::path& p) {
    try {
        ingest_csv(p);
    } catch (const ValidationError& e) {
        return e.what();
    }
    ADD_FAILURE() << "no ValidationError for " << p;
    return {};
}

}  // namespace

TEST(Ingest, WellFormed) {
    const auto dir = scratch("ingest_ok");
    write_text(dir / "a.csv", "t,x1,x2,x3\n0,1,2,3\n0.5,1.5,2.5,3.5\n1,2,3,4\n");
    const auto set = ingest_csv(dir / "a.csv");
    EXPECT_EQ(set.path_count(), 3u);
    EXPECT_EQ(set.grid.steps(), 2u);
    EXPECT_EQ(set.paths[2], (Series{3, 3.5, 4}));
    EXPECT_FALSE(set.seed.has_value());
}

TEST(Ingest, ErrorsNameTheLocation) {
    const auto dir = scratch("ingest_bad");
    write_text(dir / "nonnum.csv", "t,x1,x2\n0,1,2\n0.5,1.5,abc\n1,2,3\n");
    EXPECT_NE(expect_validation(dir / "nonnum.csv").find("(row 3, column 3)"), std::string::npos);
    write_text(dir / "ragged.csv", "t,x1,x2\n0,1,2\n0.5,1.5\n1,2,3\n");
    EXPECT_NE(expect_validation(dir / "ragged.csv").find("row 3"), std::string::npos);
    write_text(dir / "uneven.csv", "t,x1\n0,1\n0.3,1\n1,1\n");
    EXPECT_NE(expect_validation(dir / "uneven.csv").find("(row 3, column 1)"), std::string::npos);
    write_text(dir / "inf.csv", "t,x1\n0,1\n0.5,inf\n1,1\n");
    EXPECT_NE(expect_validation(dir / "inf.csv").find("(row 3, column 2)"), std::string::npos);
    write_text(dir / "empty.csv", "");
    expect_validation(dir / "empty.csv");
    write_text(dir / "short.csv", "t,x1\n0,1\n1,1\n");
    expect_validation(dir / "short.csv");
    write_text(dir / "ok.csv", "t,x1\n0,1\n0.5,1\n1,1\n");
    EXPECT_THROW(ingest_csv(dir / "ok.csv", TimeGrid(1.0, 4)), ValidationError);
    EXPECT_THROW(ingest_csv(dir / "missing.csv"), ValidationError);
}

TEST(Ingest, RoundTripIsExact) {
    const auto dir = scratch("roundtrip");
    const auto sim = euler_maruyama(make_model(ModelKind::GBM, 1.0), {0.63, 0.06}, TimeGrid(1.0, 300), 7, 42);
    write_trajectories_csv(sim.set, dir / "t.csv");
    const auto back = ingest_csv(dir / "t.csv", sim.set.grid);
    EXPECT_EQ(back.grid, sim.set.grid);
    EXPECT_EQ(back.paths, sim.set.paths);
}

TEST(Ingest, PlateauNormalization) {
    const auto set = ingest_csv(fs::path(CHAOSFIT_TEST_DATA) / "growth_plate.csv");
    const double k = plateau_capacity(set);
    EXPECT_GT(k, 0.8);
    EXPECT_LT(k, 1.0);
    const auto norm = normalize_by_capacity(set, k);
    for (const auto& p : norm.paths) {
        for (double v : p) {
            EXPECT_GT(v, 0.0);
            EXPECT_LE(v, 1.2);
        }
    }
    EXPECT_THROW(normalize_by_capacity(set, 0.0), ValidationError);
}

TEST(Config, OverridesAndUnknownKeys) {
    nlohmann::json j = nlohmann::json::object();
    apply_override(j, "optimizer.max_iters=50");
    apply_override(j, "model=gbm");
    apply_override(j, "theta0=[0.4,0.2]");
    const auto cfg = config_from_json(j);
    EXPECT_EQ(cfg.optimizer.max_iters, 50u);
    EXPECT_EQ(cfg.model, ModelKind::GBM);
    EXPECT_EQ(cfg.theta0, (std::vector<double>{0.4, 0.2}));
    EXPECT_EQ(cfg.resolved_loss_mode(), LossMode::Full);
    EXPECT_THROW(config_from_json({{"modle", "ou"}}), ValidationError);
    EXPECT_THROW(config_from_json({{"optimizer", {{"tol", 1}}}}), ValidationError);
    EXPECT_THROW(config_from_json({{"model", 3}}), ValidationError);
    EXPECT_THROW(apply_override(j, "novalue"), ValidationError);

    const auto round = config_from_json(nlohmann::json::parse(config_to_json(cfg).dump()));
    EXPECT_EQ(config_to_json(round), config_to_json(cfg));
}

TEST(Cli, SimulateShapeAndDeterminism) {
    const auto dir = scratch("simulate");
    ASSERT_EQ(cli({"simulate", "--seed", "42", "--out", (dir / "a").string()}), kExitOk);
    ASSERT_EQ(cli({"simulate", "--seed", "42", "--out", (dir / "b").string()}), kExitOk);
    const auto rows = read_csv(dir / "a" / "trajectories.csv");
    ASSERT_EQ(rows.size(), 1002u);  // header + 1001 time points
    for (std::size_t i = 1; i < rows.size(); ++i) ASSERT_EQ(rows[i].size(), 1001u);
    EXPECT_EQ(read_text(dir / "a" / "trajectories.csv"), read_text(dir / "b" / "trajectories.csv"));
}

TEST(Cli, ValidationExitCodes) {
    const auto dir = scratch("exit_codes");
    EXPECT_EQ(cli({"simulate", "--out", dir.string()}), kExitValidation);
    EXPECT_EQ(cli({"simulate", "--seed", "1", "--set", "N=0", "--out", dir.string()}), kExitValidation);
    EXPECT_EQ(cli({"simulate", "--seed", "1", "--set", "bogus=1", "--out", dir.string()}), kExitValidation);
    EXPECT_EQ(cli({"simulate", "--seed", "1", "--config", (dir / "nope.json").string()}), kExitValidation);
    write_text(dir / "empty.csv", "");
    EXPECT_EQ(cli({"estimate", "--data", (dir / "empty.csv").string(), "--out", dir.string()}), kExitValidation);
    EXPECT_EQ(cli({"frobnicate"}), kExitValidation);
}

TEST(Cli, EstimateIsDeterministic) {
    const auto dir = scratch("estimate");
    const std::vector<std::string> common = {"--set", "n=200", "--set", "N=100", "--set", "model=gbm",
                                             "--set", "theta_true=[0.63,0.06]", "--set", "theta0=[0.4,0.8]"};
    auto with = [&](std::vector<std::string> a) {
        a.insert(a.end(), common.begin(), common.end());
        return a;
    };
    ASSERT_EQ(cli(with({"simulate", "--seed", "5", "--out", dir.string()})), kExitOk);
    const auto data = (dir / "trajectories.csv").string();
    ASSERT_EQ(cli(with({"estimate", "--data", data, "--out", (dir / "r1").string()})), kExitOk);
    ASSERT_EQ(cli(with({"estimate", "--data", data, "--out", (dir / "r2").string()})), kExitOk);
    for (const char* f : {"results.json", "summary.csv", "trace_1.csv", "trace_2.csv"}) {
        EXPECT_EQ(read_text(dir / "r1" / f), read_text(dir / "r2" / f)) << f;
    }
    const auto j = nlohmann::json::parse(read_text(dir / "r1" / "results.json"));
    EXPECT_EQ(j["starts"].size(), 2u);
    EXPECT_EQ(j["loss_mode"], "full");
    EXPECT_EQ(j["config"]["optimizer"]["gamma_max"], 1e3);
    for (const auto& s : j["starts"]) EXPECT_NEAR(s["theta1"].get<double>(), 0.63, 0.1);
}

TEST(Cli, EstimateGridMismatch) {
    const auto dir = scratch("estimate_grid");
    ASSERT_EQ(cli({"simulate", "--seed", "5", "--set", "n=100", "--set", "N=5", "--out", dir.string()}), kExitOk);
    EXPECT_EQ(cli({"estimate", "--data", (dir / "trajectories.csv").string(), "--set", "n=200", "--out", dir.string()}),
              kExitValidation);
}

TEST(Cli, EstimateNormalizesGrowthData) {
    const auto dir = scratch("growth");
    const auto data = (fs::path(CHAOSFIT_TEST_DATA) / "growth_plate.csv").string();
    ASSERT_EQ(cli({"estimate", "--data", data, "--set", "model=logistic", "--set", "T=24", "--set", "n=96", "--set",
                   "carrying_capacity=plateau", "--set", "theta0=[0.3]", "--set", "x0=0.02", "--set", "optimizer.gamma0=0.01", "--out", dir.string()}),
              kExitOk);
    const auto j = nlohmann::json::parse(read_text(dir / "results.json"));
    EXPECT_GT(j["carrying_capacity"]["value"].get<double>(), 0.8);
    EXPECT_NEAR(j["starts"][0]["theta1"].get<double>(), 0.56, 0.1);
}

TEST(Cli, GradcheckPassesAndNegativeControlFails) {
    const auto dir = scratch("gradcheck");
    for (const char* model : {"ou", "gbm", "logistic"}) {
        std::vector<std::string> args = {"gradcheck", "--seed", "3", "--set", std::string("model=") + model,
                                         "--set", "n=400", "--out", dir.string()};
        if (std::string(model) == "logistic") args.insert(args.end(), {"--set", "x0=0.1", "--set", "theta_true=[0.68,0.09]"});
        if (std::string(model) == "gbm") args.insert(args.end(), {"--set", "theta_true=[0.63,0.06]"});
        ASSERT_EQ(cli(args), kExitOk) << model;
        const auto j = nlohmann::json::parse(read_text(dir / "gradcheck.json"));
        EXPECT_LT(j["max_rel_error"].get<double>(), 1e-4) << model;
        EXPECT_EQ(j["points"].size(), 20u);
    }
    EXPECT_EQ(cli({"gradcheck", "--seed", "3", "--set", "n=400", "--set", "gradcheck.corrupt_sensitivity=true",
                   "--out", dir.string()}),
              kExitNumerical);
}

TEST(Cli, PropagateOutputs) {
    const auto dir = scratch("propagate");
    ASSERT_EQ(cli({"propagate", "--out", (dir / "a").string()}), kExitOk);
    const auto coeffs = read_csv(dir / "a" / "coefficients.csv");
    ASSERT_EQ(coeffs[0][1], "0");
    ASSERT_EQ(coeffs.size(), 1002u);
    double err = 0.0;
    for (std::size_t i = 1; i < coeffs.size(); ++i) {
        err = std::max(err, std::abs(std::stod(coeffs[i][1]) - std::exp(-1.7 * std::stod(coeffs[i][0]))));
    }
    EXPECT_LE(err, 1e-8);

    ASSERT_EQ(cli({"propagate", "--set", "theta_true=[1.7,0]", "--out", (dir / "zero").string()}), kExitOk);
    const auto z = read_csv(dir / "zero" / "coefficients.csv");
    for (std::size_t i = 1; i < z.size(); ++i) {
        for (std::size_t c = 2; c < z[i].size(); ++c) EXPECT_EQ(std::stod(z[i][c]), 0.0);
    }

    auto variance_error = [&](const std::string& K) {
        const auto out = dir / ("K" + K);
        EXPECT_EQ(cli({"propagate", "--set", "K=" + K, "--out", out.string()}), kExitOk);
        const auto m = read_csv(out / "moments.csv");
        double e = 0.0;
        for (std::size_t i = 1; i < m.size(); ++i) {
            const double t = std::stod(m[i][0]);
            const double exact = 0.15 * 0.15 * (1.0 - std::exp(-2 * 1.7 * t)) / (2 * 1.7);
            e = std::max(e, std::abs(std::stod(m[i][2]) - exact));
        }
        return e;
    };
    EXPECT_LT(variance_error("16"), variance_error("8"));
}
