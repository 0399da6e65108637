#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "acrobot/csv.hpp"

namespace fs = std::filesystem;
using namespace acrobot;

namespace {

const std::string kCli = ACROBOT_CLI;
const std::string kConfigs = std::string(ACROBOT_SOURCE_DIR) + "/configs/";

struct Outcome {
    int status = -1;
    std::string out;
    std::string err;
};

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "acrobot_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

Outcome run(const std::string& args, const std::string& env = "") {
    const fs::path dir = fs::temp_directory_path() / "acrobot_cli_test";
    fs::create_directories(dir);
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string command = env + " '" + kCli + "' " + args + " >'" + out.string() + "' 2>'" +
                                err.string() + "'";
    const int raw = std::system(command.c_str());
    Outcome o;
    o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    o.out = slurp(out);
    o.err = slurp(err);
    return o;
}

const std::string kShort = "--set episode.episodes=3 --set episode.steps=300";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("list-configs prints the catalog") {
    const Outcome o = run("list-configs");
    CHECK(o.status == 0);
    CHECK(o.out.find("ICO  states=1441") != std::string::npos);
    CHECK(o.out.find("rotation") != std::string::npos);
    CHECK(o.out.find("el4") != std::string::npos);
}

TEST_CASE("usage errors exit with 1") {
    CHECK(run("").status == 1);
    CHECK(run("frobnicate").status == 1);
    CHECK(run("train").status == 1);
    CHECK(run("train --config /nonexistent/file.cfg").status == 1);
    CHECK(run("train --config " + kConfigs + "ico_exp.cfg --set nonsense").status == 1);
    CHECK(run("train --config " + kConfigs + "ico_exp.cfg --set episode.bogus=1").status == 1);
    CHECK(run("train --config " + kConfigs + "ico_exp.cfg --runs 0").status == 1);
    CHECK(run("--help").status == 0);
}

TEST_CASE("config errors name the line") {
    const fs::path dir = scratch("bad_config");
    std::ofstream(dir / "empty.cfg") << "";
    const Outcome empty = run("train --config " + (dir / "empty.cfg").string());
    CHECK(empty.status == 1);
    CHECK(empty.err.find("missing required section") != std::string::npos);

    std::string text = slurp(kConfigs + "ico.cfg");
    const auto pos = text.find("dtheta = 10 deg");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 15, "dtheta = 7 deg");
    std::ofstream(dir / "bad.cfg") << text;
    const Outcome bad = run("train --config " + (dir / "bad.cfg").string());
    CHECK(bad.status == 1);
    CHECK(bad.err.find("line 17") != std::string::npos);
    CHECK(bad.err.find("angular bin width") != std::string::npos);
}

TEST_CASE("train writes every output and reruns are byte-identical") {
    const fs::path a = scratch("train_a");
    const fs::path b = scratch("train_b");
    const std::string args = "train --config " + kConfigs + "ico_exp.cfg " + kShort + " --runs 2";
    REQUIRE(run(args + " --out " + a.string()).status == 0);
    REQUIRE(run(args + " --out " + b.string()).status == 0);
    for (const char* name : {"learning_curve.csv", "aggregate.csv", "energy.csv",
                             "phase_split.csv", "value_function.csv", "trajectory.csv"}) {
        REQUIRE_MESSAGE(fs::exists(a / name), name);
        CHECK_MESSAGE(slurp(a / name) == slurp(b / name), name);
    }
    const CsvTable curve = read_csv_file((a / "learning_curve.csv").string());
    CHECK(curve.rows.size() == 6);
    const CsvTable agg = read_csv_file((a / "aggregate.csv").string());
    CHECK(agg.rows.size() == 3);

    const std::string manifest = slurp(a / "manifest.txt");
    CHECK(manifest.find("study: ICO_exp") != std::string::npos);
    CHECK(manifest.find("seed: 1") != std::string::npos);
    CHECK(manifest.find("version: ") != std::string::npos);
    CHECK(manifest.find("wall_time_s: ") != std::string::npos);
    CHECK(manifest.find("steps = 300") != std::string::npos);
}

TEST_CASE("seed precedence: flag over environment over config") {
    const std::string args = "train --config " + kConfigs + "ico_exp.cfg " + kShort;
    const fs::path env = scratch("seed_env");
    const fs::path flag = scratch("seed_flag");
    const fs::path bad = scratch("seed_bad");
    REQUIRE(run(args + " --out " + env.string(), "ACROBOT_SEED=41").status == 0);
    CHECK(slurp(env / "manifest.txt").find("seed: 41") != std::string::npos);
    REQUIRE(run(args + " --seed 5 --out " + flag.string(), "ACROBOT_SEED=41").status == 0);
    CHECK(slurp(flag / "manifest.txt").find("seed: 5") != std::string::npos);
    CHECK(run(args + " --out " + bad.string(), "ACROBOT_SEED=abc").status == 1);
}

TEST_CASE("catalog names work as configs and study writes one directory per study") {
    const fs::path dir = scratch("study");
    const Outcome o = run("study --config ICO_exp --config C_idle " + kShort + " --runs 1 --out " +
                          dir.string());
    CHECK(o.status == 0);
    CHECK(fs::exists(dir / "ICO_exp" / "aggregate.csv"));
    CHECK(fs::exists(dir / "C_idle" / "aggregate.csv"));
    CHECK(run("study --config NoSuchStudy --out " + dir.string()).status == 1);
}

TEST_CASE("a runtime failure exits with 2") {
    const fs::path dir = scratch("failure");
    const Outcome o = run("train --config ICO " + kShort +
                          " --set dynamics.model=explicit --set dynamics.m1=1 --set dynamics.m2=10"
                          " --set dynamics.l1=1 --set dynamics.l2=1 --set dynamics.lc1=1"
                          " --set dynamics.lc2=3 --set dynamics.J1=1 --set dynamics.J2=0.1"
                          " --out " + dir.string());
    CHECK(o.status == 2);
    CHECK(o.err.find("inertia") != std::string::npos);
}

TEST_CASE("calibrate reports the estimated coefficient") {
    const Outcome o = run("calibrate --config " + kConfigs +
                          "ico.cfg --set dynamics.d1=0 --set dynamics.m2=0 --theta-start 60deg");
    CHECK(o.status == 0);
    CHECK(o.out.find("c_exp 2.452") != std::string::npos);
    CHECK(run("calibrate --config ICO --theta-start 200deg").status == 1);
    CHECK(run("calibrate --config ICO --theta-start sideways").status == 1);
}

TEST_CASE("plot renders SVG and rejects bad input") {
    const fs::path dir = scratch("plot");
    REQUIRE(run("train --config " + kConfigs + "ico_exp.cfg " + kShort + " --out " + dir.string())
                .status == 0);
    CHECK(run("plot " + (dir / "aggregate.csv").string() + " --kind learning-curve").status == 0);
    CHECK(slurp(dir / "aggregate.svg").find("<svg") != std::string::npos);
    CHECK(run("plot " + (dir / "trajectory.csv").string() + " --kind phase -o " +
              (dir / "phase.svg").string())
              .status == 0);
    CHECK(fs::exists(dir / "phase.svg"));
    CHECK(run("plot " + (dir / "energy.csv").string() + " --kind energy").status == 0);
    CHECK(run("plot " + (dir / "value_function.csv").string() + " --kind value-function")
              .status == 0);
    CHECK(run("plot " + (dir / "aggregate.csv").string() + " --kind pie").status == 1);
    CHECK(run("plot " + (dir / "missing.csv").string() + " --kind energy").status == 1);
    CHECK(run("plot " + (dir / "aggregate.csv").string() + " --kind phase").status == 2);
}

TEST_CASE("ten baseline runs aggregate to one row per episode") {
    const fs::path dir = scratch("ten_runs");
    const Outcome o = run("train --config " + kConfigs +
                          "ico.cfg --runs 10 --seed 7 --set episode.steps=100 --out " +
                          dir.string());
    REQUIRE(o.status == 0);
    const CsvTable agg = read_csv_file((dir / "aggregate.csv").string());
    CHECK(agg.header == std::vector<std::string>{"episode", "mean", "std", "lc30"});
    CHECK(agg.rows.size() == 300);
    CHECK(read_csv_file((dir / "learning_curve.csv").string()).rows.size() == 3000);
}

}
