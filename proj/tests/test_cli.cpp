#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cmfg_tools/run.hpp"

using namespace cmfg::tools;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::current_path() / "cli_scratch" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const std::string& body) {
    const fs::path path = dir / "run.cfg";
    std::ofstream(path) << body << "output_dir = " << (dir / "out").string() << "\n";
    return path;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Json report(const fs::path& dir) { return Json::parse(slurp(dir / "out" / "report.json")); }

}  // namespace

TEST(Config, ParsesKeysCommentsAndLists) {
    const RunConfig c = parse_config_text(
        "# comment\nmode = scaling\ndimension = 2\ncells = 64\ngamma = 3\nalpha = 0.3\n"
        "sigma_list = 0.04, 0.06,0.08 , 0.1, 0.12\nC_f = 1\n");
    EXPECT_EQ(c.mode, Mode::Scaling);
    EXPECT_EQ(c.dimension, 2);
    EXPECT_DOUBLE_EQ(c.gamma, 3.0);
    EXPECT_EQ(c.sigma_list.size(), 5u);
    EXPECT_DOUBLE_EQ(c.sigma_list[2], 0.08);
}

TEST(Config, RejectsBadInput) {
    EXPECT_THROW(parse_config_text("gamma = 2\ngamma = 3\n"), ConfigError);
    EXPECT_THROW(parse_config_text("gama = 2\n"), ConfigError);
    EXPECT_THROW(parse_config_text("cells = twelve\n"), ConfigError);
    EXPECT_THROW(parse_config_text("mode = explore\n"), ConfigError);
    EXPECT_THROW(parse_config_text("cells\n"), ConfigError);
    try {
        parse_config_text("gamma = 0.5\n").validate();
        FAIL();
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("gamma"), std::string::npos);
        EXPECT_NE(what.find("gamma > 1"), std::string::npos);
    }
}

TEST(Config, ReferenceListsEveryKey) {
    const std::string ref = config_reference();
    for (const auto& [key, value] : config_entries(RunConfig{})) EXPECT_NE(ref.find(key), std::string::npos) << key;
}

TEST(Run, UncoupledSolveWritesUniformDensity) {
    const fs::path dir = scratch("solve");
    std::ostringstream err;
    ASSERT_EQ(run(write_config(dir, "mode = solve\ncells = 64\nC_f = 0\n"), {}, err), kExitOk) << err.str();
    std::istringstream csv(slurp(dir / "out" / "fields.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "x,m,u");
    int rows = 0;
    while (std::getline(csv, line)) {
        const auto a = line.find(',');
        const auto b = line.find(',', a + 1);
        EXPECT_NEAR(std::stod(line.substr(a + 1, b - a - 1)), 1.0, 1e-10);
        ++rows;
    }
    EXPECT_EQ(rows, 64);
    const Json r = report(dir);
    EXPECT_EQ(r["exit_code"], 0);
    EXPECT_EQ(r["payload"]["regime"], "H5");
}

TEST(Run, MalformedConfigIsExitOne) {
    const fs::path dir = scratch("bad");
    std::ostringstream err;
    EXPECT_EQ(run(write_config(dir, "gamma = 0.5\n"), {}, err), kExitConfigError);
    EXPECT_NE(err.str().find("gamma"), std::string::npos);
    EXPECT_NE(err.str().find("gamma > 1"), std::string::npos);
    std::ostringstream err2;
    EXPECT_EQ(run(dir / "missing.cfg", {}, err2), kExitConfigError);
}

TEST(Run, NonConvergenceIsExitTwo) {
    const fs::path dir = scratch("cap");
    std::ostringstream err;
    EXPECT_EQ(run(write_config(dir, "C_f = 0.1\ncells = 64\nmax_outer_iterations = 2\n"), {}, err),
              kExitNotConverged);
    EXPECT_FALSE(report(dir)["payload"]["solution"]["converged"].get<bool>());
}

TEST(Run, ScalingModeReproducesSlopes) {
    const fs::path dir = scratch("scaling");
    std::ostringstream err;
    const fs::path cfg = write_config(dir,
                                      "mode = scaling\ndimension = 2\ncells = 64\ngamma = 3\nalpha = 0.3\nC_f = 1\n"
                                      "sigma_list = 0.04, 0.06, 0.08, 0.1, 0.12\n");
    ASSERT_EQ(run(cfg, {}, err), kExitOk) << err.str();
    const Json p = report(dir)["payload"];
    EXPECT_NEAR(p["kinetic_slope"].get<double>(), -1.5, 0.07 * 1.5);
    EXPECT_NEAR(p["potential_slope"].get<double>(), -1.7, 0.07 * 1.7);
    EXPECT_EQ(p["energy_sign_trend"], "unbounded_below");
    EXPECT_EQ(p["regime"], "H3");
    EXPECT_TRUE(fs::exists(dir / "out" / "scaling.csv"));
}

TEST(Run, ScalingWithoutSigmaIsConfigError) {
    const fs::path dir = scratch("scaling_empty");
    std::ostringstream err;
    EXPECT_EQ(run(write_config(dir, "mode = scaling\n"), {}, err), kExitConfigError);
    EXPECT_NE(err.str().find("sigma_list"), std::string::npos);
}

TEST(Run, OverridesApply) {
    const fs::path dir = scratch("override");
    const fs::path other = dir / "elsewhere";
    RunOverrides o;
    o.mode = Mode::Solve;
    o.output_dir = other;
    o.seed = 5;
    std::ostringstream err;
    ASSERT_EQ(run(write_config(dir, "mode = verify\ncells = 32\n"), o, err), kExitOk) << err.str();
    const Json r = Json::parse(slurp(other / "report.json"));
    EXPECT_EQ(r["mode"], "solve");
    EXPECT_EQ(r["config"]["rng_seed"], "5");
}

TEST(VerifyAll, DefaultConfigPassesAndIsDeterministic) {
    const fs::path dir = scratch("verify");
    const fs::path cfg = write_config(dir, "C_f = 0.1\ncells = 128\n");
    std::ostringstream err;
    ASSERT_EQ(verify_all(cfg, err), kExitOk) << err.str();
    const std::string first = report(dir)["payload"].dump();
    ASSERT_EQ(verify_all(cfg, err), kExitOk);
    EXPECT_EQ(report(dir)["payload"].dump(), first);
}

TEST(VerifyAll, ImpossibleToleranceNamesFailingSuite) {
    const fs::path dir = scratch("verify_tol");
    std::ostringstream err;
    EXPECT_EQ(verify_all(write_config(dir, "C_f = 0.1\ncells = 64\ntol = 1e-30\n"), err), kExitSuiteFailed);
    EXPECT_NE(err.str().find("solve"), std::string::npos);
}
