#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include "cli/commands.hpp"
#include "cli/config.hpp"

namespace envctrl::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using std::numbers::pi;

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        root_ = fs::temp_directory_path() / (std::string("envctrl_cli_") + info->name());
        fs::remove_all(root_);
        fs::create_directories(root_);
    }
    void TearDown() override { fs::remove_all(root_); }

    // Single mode, swap-designed alpha4 = sqrt(2): exact swap at t = 2 pi.
    static json base_config() {
        return json::parse(R"({
            "bath": {"modes": [{"omega": 1.0, "g": 0.5, "nbar": 0.0}]},
            "interaction": {"alphas": [0, 0, 0, 1.4142135623730951], "eigenbasis": "bell"},
            "initial_s": [0.3, -0.2, 0.8],
            "probe": "sweep",
            "time_grid": {"start": 0.0, "stop": 6.283185307179586, "steps": 5},
            "oracle": {"cutoffs": [30], "tolerance": 1e-6},
            "search": {"k1_max": 2},
            "design": {"k1": 0, "k2": [1]},
            "reachable": {"samples": 32}
        })");
    }

    fs::path write(const json& doc, const std::string& name = "config.json") const {
        const fs::path p = root_ / name;
        std::ofstream(p) << doc.dump(2);
        return p;
    }

    int run(const std::string& cmd, const json& doc, const std::string& out = "out", CommandOptions opts = {}) {
        opts.out_dir = (root_ / out).string();
        log_.str("");
        return run_command(cmd, write(doc).string(), opts, log_);
    }

    json read_json(const std::string& rel) const {
        std::ifstream in(root_ / rel);
        return json::parse(in);
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    fs::path root_;
    std::ostringstream log_;
};

int column(const json& table, const std::string& name) {
    const auto& cols = table.at("columns");
    for (std::size_t i = 0; i < cols.size(); ++i)
        if (cols[i] == name) return static_cast<int>(i);
    ADD_FAILURE() << "missing column " << name;
    return 0;
}

TEST_F(CliTest, ConfigRoundTripIsIdempotent) {
    const RunConfig first = parse_config(base_config());
    const json canonical = to_json(first);
    const RunConfig second = parse_config(canonical);
    EXPECT_EQ(to_json(second), canonical);
    EXPECT_EQ(config_hash(first), config_hash(second));
    EXPECT_EQ(config_hash(first).size(), 16u);

    json changed = base_config();
    changed["initial_s"][0] = 0.31;
    EXPECT_NE(config_hash(parse_config(changed)), config_hash(first));
}

TEST_F(CliTest, TemperatureAndUnitaryFieldsRoundTrip) {
    json doc = base_config();
    doc["bath"]["modes"][0] = {{"omega", 2.0}, {"g", 0.1}, {"temperature", 1.5}};
    json u = json::array();
    for (int r = 0; r < 4; ++r) {
        json row = json::array();
        for (int c = 0; c < 4; ++c) row.push_back(json::array({r == 3 - c ? 1.0 : 0.0, 0.0}));
        u.push_back(row);
    }
    doc["interaction"] = {{"alphas", {0.1, 0.2, 0.3, 0.4}}, {"eigenbasis", "general"}, {"unitary", u}};
    const RunConfig c = parse_config(doc);
    EXPECT_NEAR(c.bath_spec().modes()[0].nbar, 1.0 / std::expm1(2.0 / 1.5), 1e-15);
    EXPECT_EQ(to_json(parse_config(to_json(c))), to_json(c));
}

TEST_F(CliTest, ValidationErrorsNameTheField) {
    const auto message = [](const json& doc) -> std::string {
        try {
            (void)parse_config(doc);
        } catch (const ConfigError& e) {
            return e.what();
        }
        return "<no error>";
    };
    json doc = base_config();
    doc["bath"]["modes"][0]["omga"] = 1.0;
    EXPECT_NE(message(doc).find("bath.modes[0].omga"), std::string::npos) << message(doc);

    doc = base_config();
    doc["time_grid"]["steps"] = "five";
    EXPECT_NE(message(doc).find("time_grid.steps"), std::string::npos) << message(doc);

    doc = base_config();
    doc["initial_s"] = {1.0, 1.0, 0.0};
    EXPECT_NE(message(doc).find("initial_s"), std::string::npos) << message(doc);

    doc = base_config();
    doc["bath"]["modes"][0]["omega"] = -1.0;
    EXPECT_NE(message(doc).find("omega"), std::string::npos) << message(doc);

    doc = base_config();
    doc["interaction"]["eigenbasis"] = "diagonal";
    EXPECT_NE(message(doc).find("interaction.eigenbasis"), std::string::npos) << message(doc);

    doc = base_config();
    doc.erase("initial_s");
    EXPECT_NE(message(doc).find("initial_s"), std::string::npos) << message(doc);
}

TEST_F(CliTest, SimulateWithoutCouplingIsConstant) {
    json doc = base_config();
    doc["bath"]["modes"][0]["g"] = 0.0;
    ASSERT_EQ(run("simulate", doc), kSuccess) << log_.str();
    const json t = read_json("out/trajectory.json");
    ASSERT_EQ(t.at("rows").size(), 6u * 5u);
    for (const auto& row : t.at("rows")) {
        EXPECT_NEAR(row[column(t, "sx")].get<double>(), 0.3, 1e-14);
        EXPECT_NEAR(row[column(t, "sy")].get<double>(), -0.2, 1e-14);
        EXPECT_NEAR(row[column(t, "sz")].get<double>(), 0.8, 1e-14);
        EXPECT_NEAR(row[column(t, "abs_gamma_14")].get<double>(), 1.0, 1e-15);
    }
}

TEST_F(CliTest, SimulateStartsAtInitialStateAndSwapsAtDesignedTime) {
    ASSERT_EQ(run("simulate", base_config()), kSuccess) << log_.str();
    const json t = read_json("out/trajectory.json");
    EXPECT_EQ(t.at("version"), version());
    EXPECT_EQ(t.at("config_hash"), config_hash(parse_config(base_config())));
    int swaps = 0;
    for (const auto& row : t.at("rows")) {
        const double time = row[column(t, "t")].get<double>();
        const double sx = row[column(t, "sx")], sy = row[column(t, "sy")], sz = row[column(t, "sz")];
        if (time == 0.0) {
            EXPECT_NEAR(sx, 0.3, 1e-14);
            EXPECT_NEAR(sy, -0.2, 1e-14);
            EXPECT_NEAR(sz, 0.8, 1e-14);
        }
        if (std::abs(time - 2 * pi) < 1e-12) {
            ++swaps;
            EXPECT_NEAR(sx, row[column(t, "px")].get<double>(), 1e-8);
            EXPECT_NEAR(sy, row[column(t, "py")].get<double>(), 1e-8);
            EXPECT_NEAR(sz, row[column(t, "pz")].get<double>(), 1e-8);
        }
        EXPECT_LE(row[column(t, "purity")].get<double>(), 1.0 + 1e-12);
    }
    EXPECT_EQ(swaps, 6);
    EXPECT_TRUE(fs::exists(root_ / "out/trajectory.csv"));
}

TEST_F(CliTest, ReachableCollapsesAtZeroAndCoversBallAtSwap) {
    ASSERT_EQ(run("reachable", base_config()), kSuccess) << log_.str();
    const json e = read_json("out/ellipsoids.json");
    const auto& rows = e.at("rows");
    ASSERT_EQ(rows.size(), 5u);
    for (const char* r : {"r1", "r2", "r3"}) EXPECT_LT(rows[0][column(e, r)].get<double>(), 1e-14);
    EXPECT_NEAR(rows[0][column(e, "cz")].get<double>(), 0.8, 1e-14);
    for (const char* r : {"r1", "r2", "r3"}) EXPECT_NEAR(rows[4][column(e, r)].get<double>(), 1.0, 1e-9);
    for (const char* c : {"cx", "cy", "cz"}) EXPECT_NEAR(rows[4][column(e, c)].get<double>(), 0.0, 1e-9);
    for (const auto& row : rows) {
        for (const char* r : {"r1", "r2", "r3"}) EXPECT_LE(row[column(e, r)].get<double>(), 1.0 + 1e-9);
        EXPECT_LE(row[column(e, "max_containment_excess")].get<double>(), 1e-9);
    }
    const json pts = read_json("out/reachable_points.json");
    EXPECT_EQ(pts.at("rows").size(), 5u * 32u);
}

TEST_F(CliTest, AccessReportsCertificate) {
    json doc = base_config();
    doc["interaction"]["alphas"] = {0, 0, 0, 1};
    ASSERT_EQ(run("access", doc), kSuccess) << log_.str();
    const json r = read_json("out/access.json").at("report");
    EXPECT_EQ(r.at("status"), "AccessibleSufficient");
    EXPECT_NEAR(r.at("certificate").get<double>(), 0.17578125, 1e-12);
    EXPECT_EQ(r.at("conditions").size(), 3u);

    doc["interaction"]["alphas"] = {1, 2, 3, 4};
    ASSERT_EQ(run("access", doc), kSuccess) << log_.str();
    const json r2 = read_json("out/access.json").at("report");
    EXPECT_EQ(r2.at("status"), "Inconclusive");
    // Reported alongside the verdict; one squared-gap factor vanishes exactly.
    EXPECT_LT(std::abs(r2.at("certificate").get<double>()), 1e-12);
    EXPECT_FALSE(r2.at("conditions")[0].at("holds").get<bool>());
}

TEST_F(CliTest, ControlSearchListsOddMultiples) {
    ASSERT_EQ(run("control-search", base_config()), kSuccess) << log_.str();
    const json s = read_json("out/swap_solutions.json");
    // alpha4^2 phi(2 pi j) / pi = j, odd j only.
    ASSERT_EQ(s.at("rows").size(), 3u);
    for (int i = 0; i < 3; ++i) {
        const auto& row = s.at("rows")[i];
        EXPECT_NEAR(row[column(s, "t_hat")].get<double>(), 2 * pi * (2 * i + 1), 1e-9);
        EXPECT_EQ(row[column(s, "k1")].get<long long>(), i);
        EXPECT_LE(row[column(s, "err_A_minus_I_inf")].get<double>(), 1e-9);
        EXPECT_LE(row[column(s, "err_a_norm")].get<double>(), 1e-9);
    }
}

TEST_F(CliTest, DesignRecoversFrozenAlpha) {
    ASSERT_EQ(run("design", base_config()), kSuccess) << log_.str();
    const json r = read_json("out/design.json").at("report");
    EXPECT_NEAR(r.at("alpha4").get<double>(), std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(r.at("t_hat").get<double>(), 2 * pi, 1e-14);
    EXPECT_TRUE(r.at("round_trip").get<bool>());

    CommandOptions opts;
    opts.k1 = 1;
    opts.k2 = std::vector<long long>{2};
    ASSERT_EQ(run("design", base_config(), "out", opts), kSuccess) << log_.str();
    // alpha4^2 = (2 k1 + 1) / (2 k2 (g/omega)^2) = 3 / 1
    EXPECT_NEAR(read_json("out/design.json").at("report").at("alpha4").get<double>(), std::sqrt(3.0), 1e-14);

    opts.k2 = std::vector<long long>{1, 1};
    EXPECT_EQ(run("design", base_config(), "out", opts), kConfigError);
}

TEST_F(CliTest, VerifyWithoutCouplingHasZeroDelta) {
    json doc = base_config();
    doc["bath"]["modes"][0]["g"] = 0.0;
    doc["oracle"]["cutoffs"] = {4};
    ASSERT_EQ(run("verify", doc), kSuccess) << log_.str();
    const json r = read_json("out/verify_summary.json").at("report");
    EXPECT_LT(r.at("max_abs_delta").get<double>(), 1e-13);
}

TEST_F(CliTest, VerifyAgreesWithOracleAndReportsDoubledCutoff) {
    ASSERT_EQ(run("verify", base_config()), kSuccess) << log_.str();
    const json r = read_json("out/verify_summary.json").at("report");
    EXPECT_LE(r.at("max_abs_delta").get<double>(), 1e-6);
    EXPECT_EQ(r.at("doubled_cutoffs"), json::array({60}));
    EXPECT_LE(r.at("max_abs_delta_doubled_cutoff").get<double>(), 1e-6);
    EXPECT_TRUE(r.at("pass").get<bool>());
}

TEST_F(CliTest, ExitCodes) {
    json bad_cut = base_config();
    bad_cut["bath"]["modes"][0]["g"] = 1.5;
    bad_cut["oracle"]["cutoffs"] = {3};
    EXPECT_EQ(run("verify", bad_cut), kOracleMismatch);
    EXPECT_TRUE(read_json("out/verify_summary.json").at("report").at("pass") == false);

    json incommensurate = base_config();
    incommensurate["bath"]["modes"].push_back({{"omega", pi}, {"g", 0.2}, {"nbar", 0.0}});
    incommensurate["design"] = nullptr;
    EXPECT_EQ(run("control-search", incommensurate), kConfigError);

    std::ostringstream sink;
    EXPECT_EQ(exit_code_for(std::make_exception_ptr(PhysicalityError("x")), sink), kPhysicsViolation);
    EXPECT_EQ(exit_code_for(std::make_exception_ptr(ConfigError("x")), sink), kConfigError);
    EXPECT_EQ(exit_code_for(std::make_exception_ptr(std::runtime_error("x")), sink), 1);
    EXPECT_EQ(run_command("simulate", (root_ / "missing.json").string(), {}, sink), kConfigError);
}

TEST_F(CliTest, ExecutableExitCodes) {
    const auto status = [&](const std::string& args) {
        const std::string cmd = std::string(ENVCTRL_EXECUTABLE) + " " + args + " 2>/dev/null";
        const int raw = std::system(cmd.c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    const fs::path good = write(base_config(), "good.json");
    json bad = base_config();
    bad["time_grid"]["steps"] = 0;
    const fs::path badp = write(bad, "bad.json");
    const std::string out = " --out " + (root_ / "exe").string();
    EXPECT_EQ(status("design --config " + good.string() + out), 0);
    EXPECT_EQ(status("design --config " + badp.string() + out), 2);
    EXPECT_EQ(status("simulate --config " + (root_ / "nope.json").string()), 2);
    EXPECT_EQ(status("frobnicate --config " + good.string()), 2);
    EXPECT_TRUE(fs::exists(root_ / "exe/design.json"));
}

TEST_F(CliTest, RerunsAreByteIdentical) {
    CommandOptions opts;
    opts.seed = 7;
    for (const char* cmd : {"simulate", "reachable", "access", "control-search", "design", "verify"}) {
        ASSERT_EQ(run(cmd, base_config(), "a", opts), kSuccess) << cmd << ": " << log_.str();
        ASSERT_EQ(run(cmd, base_config(), "b", opts), kSuccess) << cmd << ": " << log_.str();
    }
    int files = 0;
    for (const auto& entry : fs::directory_iterator(root_ / "a")) {
        const fs::path other = root_ / "b" / entry.path().filename();
        ASSERT_TRUE(fs::exists(other)) << other;
        EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path().filename();
        ++files;
    }
    EXPECT_EQ(files, 13);
}

} // namespace
} // namespace envctrl::cli
