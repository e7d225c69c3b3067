// test_cli.cpp — Configuration parsing and end-to-end command runs of the floquet-if tool

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "app.hpp"
#include "floquet_if/errors.hpp"
#include "run_config.hpp"

using namespace floquet;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string parse_error(const json& doc) {
    try {
        app::parse_config(doc);
    } catch (const InputError& e) {
        return e.what();
    }
    return {};
}

class CliRun : public ::testing::Test {
protected:
    void SetUp() override {
        root_ = fs::temp_directory_path() / ("floquet_if_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(root_);
        fs::create_directories(root_);
    }
    void TearDown() override { fs::remove_all(root_); }

    fs::path write_config(json doc) const {
        doc["cache"] = {{"path", (root_ / "cache").string()}};
        const auto p = root_ / "config.json";
        std::ofstream(p) << doc.dump(2);
        return p;
    }

    fs::path root_;
};

json small_quench() {
    return json{{"bath", {{"alpha", 0.1}, {"omega_c", 2.5}, {"fit_terms", 2}}},
                {"system", {{"preset", "single-spin"}, {"drive_type", "transversal"}, {"eps_d", 1.0}, {"omega_d", 6.0}}},
                {"grid", {{"dt", 0.1}, {"t_final", 2.0}}},
                {"workers", 1}};
}

}  // namespace

TEST(Config, DefaultsRoundTrip) {
    const auto cfg = app::parse_config(json::object());
    EXPECT_EQ(cfg.bath.fit_terms, 4);
    EXPECT_EQ(cfg.system.preset, "single-spin");
    const auto again = app::parse_config(app::to_json(cfg));
    EXPECT_EQ(app::to_json(again), app::to_json(cfg));
}

TEST(Config, ErrorsNameTheField) {
    EXPECT_NE(parse_error({{"bath", {{"alpha", -1.0}}}}).find("bath.alpha"), std::string::npos);
    EXPECT_NE(parse_error({{"grid", {{"dt", "fast"}}}}).find("grid.dt"), std::string::npos);
    EXPECT_NE(parse_error({{"system", {{"drive_type", "diagonal"}}}}).find("system.drive_type"), std::string::npos);
    EXPECT_NE(parse_error({{"bath", {{"alpah", 0.1}}}}).find("bath.alpah"), std::string::npos);
    EXPECT_NE(parse_error({{"colour", 1}}).find("colour"), std::string::npos);
    EXPECT_NE(parse_error({{"sweep", {{"omega_d", {2.0, 1.0}}}}}).find("sweep.omega_d"), std::string::npos);
}

TEST(Commands, KnownNames) {
    for (const char* c : {"fit-bath", "build-if", "quench", "spectrum", "steady", "heat-current", "total-current-sweep",
                          "concurrence-map", "spectral-analysis", "benchmark"})
        EXPECT_TRUE(app::is_command(c)) << c;
    EXPECT_FALSE(app::is_command("launch"));
}

TEST_F(CliRun, QuenchWritesDeterministicArtifacts) {
    app::AppOptions opt;
    opt.command = "quench";
    opt.config_path = write_config(small_quench()).string();
    opt.out_dir = (root_ / "out").string();
    std::ostringstream log;
    app::run(opt, log);

    const auto traj = slurp(root_ / "out" / "trajectory.csv");
    EXPECT_EQ(traj.substr(0, traj.find('\n')), "t,sx,sy,sz");
    EXPECT_GT(std::count(traj.begin(), traj.end(), '\n'), 10);

    const auto meta = json::parse(slurp(root_ / "out" / "metadata.json"));
    EXPECT_EQ(meta.at("command"), "quench");
    EXPECT_TRUE(meta.contains("version"));
    EXPECT_EQ(meta.at("config").at("bath").at("alpha"), 0.1);
    EXPECT_EQ(meta.at("fit").at("terms").size(), 2u);
    EXPECT_TRUE(meta.at("fit").contains("hash"));
    EXPECT_EQ(meta.at("cache").at("misses"), 1);

    // Rerun: served from the cache, byte-identical trajectory.
    app::run(opt, log);
    EXPECT_EQ(slurp(root_ / "out" / "trajectory.csv"), traj);
    EXPECT_EQ(json::parse(slurp(root_ / "out" / "metadata.json")).at("cache").at("hits"), 1);
}

TEST_F(CliRun, FailuresSurfaceAsExceptions) {
    app::AppOptions opt;
    opt.command = "launch";
    opt.config_path = write_config(small_quench()).string();
    opt.out_dir = (root_ / "out").string();
    std::ostringstream log;
    EXPECT_THROW(app::run(opt, log), InputError);

    opt.command = "concurrence-map";  // needs the two-spin preset
    EXPECT_THROW(app::run(opt, log), InputError);

    opt.command = "quench";
    opt.config_path = (root_ / "missing.json").string();
    EXPECT_THROW(app::run(opt, log), InputError);
}
