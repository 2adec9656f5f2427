#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

std::string cli_path() {
    const char* p = std::getenv("CHAINSEL_CLI");
    REQUIRE_MESSAGE(p != nullptr, "CHAINSEL_CLI must point at the binary");
    return p;
}

fs::path scratch_dir() {
    const char* p = std::getenv("CHAINSEL_TMP");
    fs::path dir = p ? fs::path(p) : fs::temp_directory_path() / "chainsel_cli_tests";
    fs::create_directories(dir);
    return dir;
}

int run(const std::string& args, const fs::path& stdout_file = {}) {
    std::string cmd = cli_path() + " " + args;
    if (!stdout_file.empty()) cmd += " > " + stdout_file.string();
    cmd += " 2>/dev/null";
    int status = std::system(cmd.c_str());
    return (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("solve writes the grid CSV with the documented header") {
    auto dir = scratch_dir();
    auto grid = dir / "grid.csv";
    CHECK(run("solve --zmax 20 --step 0.004 --out " + grid.string()) == 0);
    std::ifstream in(grid);
    std::string line;
    bool header_found = false;
    bool config_found = false;
    while (std::getline(in, line)) {
        if (line.rfind("# zmax=", 0) == 0) config_found = true;
        if (line[0] == '#') continue;
        header_found = (line == "z,u,u_prime,theta_star");
        break;
    }
    CHECK(header_found);
    CHECK(config_found);
}

TEST_CASE("identical command lines produce byte-identical outputs") {
    auto dir = scratch_dir();
    auto out1 = dir / "sim1.csv", out2 = dir / "sim2.csv";
    auto json1 = dir / "sim1.json", json2 = dir / "sim2.json";
    std::string args = "simulate --strategy phi0 --t 500 --reps 300 --seed 11 --out ";
    CHECK(run(args + out1.string(), json1) == 0);
    CHECK(run(args + out2.string(), json2) == 0);
    CHECK(slurp(out1) == slurp(out2));
    CHECK(slurp(json1) == slurp(json2));
    CHECK(slurp(json1).find("\"mean\"") != std::string::npos);

    // thread count must not change the result
    auto json4 = dir / "sim4.json";
    CHECK(run(args + out2.string() + " --threads 4", json4) == 0);
    CHECK(slurp(json4).find("\"threads\": \"4\"") != std::string::npos);
    auto strip_cfg = [](std::string s) {
        auto pos = s.find("\"threads\"");
        if (pos != std::string::npos) s.erase(pos, s.find('\n', pos) - pos);
        return s;
    };
    CHECK(strip_cfg(slurp(json4)) == strip_cfg(slurp(json2)));
}

TEST_CASE("bad configuration exits with code 2") {
    CHECK(run("simulate --strategy nosuch --t 10 --reps 200") == 2);
    CHECK(run("simulate --strategy greedy --t 10 --reps 5") == 2);
    CHECK(run("solve --zmax 20 --step 0.5") == 2);
    CHECK(run("clt --control theta0 --z 10 --reps 200") == 2);  // z below CLT domain
    CHECK(run("bogus-subcommand") == 2);
}

TEST_CASE("pdmp dumps a path and aggregates counts") {
    auto dir = scratch_dir();
    auto path_csv = dir / "path.csv";
    CHECK(run("pdmp --control theta0 --z 50 --reps 1 --seed 3 --out " + path_csv.string()) == 0);
    std::string content = slurp(path_csv);
    CHECK(content.find("jump_point,gap_size") != std::string::npos);

    auto counts_json = dir / "counts.json";
    CHECK(run("pdmp --control gamma:0.25 --z 50 --reps 500 --seed 3", counts_json) == 0);
    CHECK(slurp(counts_json).find("\"summary\"") != std::string::npos);
}

TEST_CASE("moments, coverage, renewal, clt, compare and fit run end to end") {
    auto dir = scratch_dir();
    auto moments_csv = dir / "moments.csv";
    CHECK(run("moments --control theta0 --zmax 20 --step 0.004 --out " +
              moments_csv.string()) == 0);
    CHECK(slurp(moments_csv).find("z,u_theta,var") != std::string::npos);

    auto cov_csv = dir / "cov.csv";
    CHECK(run("coverage --control theta0 --z 50 --gridstep 2 --reps 1000 --seed 5 --out " +
              cov_csv.string()) == 0);
    CHECK(slurp(cov_csv).find("z,p_hat,stderr") != std::string::npos);

    auto ren_json = dir / "ren.json";
    CHECK(run("renewal --z 150 --reps 2000 --seed 5", ren_json) == 0);
    CHECK(slurp(ren_json).find("\"step\"") != std::string::npos);
    CHECK(run("renewal --z 150 --reps 2000 --seed 5 --control theta0 --dominance "
              "--zlower 50") == 0);

    auto clt_json = dir / "clt.json";
    CHECK(run("clt --control theta0 --z 150 --reps 2000 --seed 5", clt_json) == 0);
    CHECK(slurp(clt_json).find("\"ks_distance\"") != std::string::npos);

    CHECK(run("compare --strategy phi0 --t 200 --reps 1000 --seed 5") == 0);
    CHECK(run("compare --strategy greedy --t 200 --reps 1000 --seed 5") == 2);

    auto grid = dir / "fitgrid.csv";
    auto fit_json = dir / "fit.json";
    CHECK(run("solve --zmax 150 --step 0.002 --out " + grid.string()) == 0);
    CHECK(run("fit --in " + grid.string() +
              " --x z --y u --basis z,logz,const --window 100 --window-hi 150",
              fit_json) == 0);
    std::string fit_out = slurp(fit_json);
    CHECK(fit_out.find("\"logz\"") != std::string::npos);
    CHECK(fit_out.find("\"residual_max\"") != std::string::npos);
}

TEST_CASE("a precomputed grid is picked up from CHAINSEL_GRID") {
    auto dir = scratch_dir();
    auto grid = dir / "env_grid.csv";
    CHECK(run("solve --zmax 20 --step 0.004 --out " + grid.string()) == 0);
    auto out = dir / "env_sim.json";
    std::string cmd = "CHAINSEL_GRID=" + grid.string() + " " + cli_path() +
                      " simulate --strategy optimal --t 350 --reps 200 --seed 2 > " +
                      out.string() + " 2>/dev/null";
    int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(slurp(out).find("\"mean\"") != std::string::npos);

    // horizon beyond the precomputed grid is a config error
    std::string cmd2 = "CHAINSEL_GRID=" + grid.string() + " " + cli_path() +
                       " simulate --strategy optimal --t 10000 --reps 200 --seed 2 " \
                       ">/dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd2.c_str())) == 2);
}
