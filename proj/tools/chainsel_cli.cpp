// chainsel: command-line front end wiring the solver, the simulators and the
// renewal diagnostics into reproducible experiments. Every subcommand prints
// one summary JSON object to stdout; file outputs are written atomically and
// embed the resolved configuration as comment lines.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "chainsel/ein.hpp"
#include "chainsel/pdmp.hpp"
#include "chainsel/planar_sim.hpp"
#include "chainsel/renewal.hpp"
#include "chainsel/stats.hpp"
#include "chainsel/strategies.hpp"
#include "chainsel/value_solver.hpp"

using json = nlohmann::json;
using namespace chainsel;

namespace {

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out << content;
        if (!out.flush()) throw std::runtime_error("write to " + tmp + " failed");
    }
    std::filesystem::rename(tmp, path);
}

std::string config_comment(const std::string& command,
                           const std::map<std::string, std::string>& cfg) {
    std::ostringstream os;
    os << "# chainsel " << command << "\n";
    for (const auto& [k, v] : cfg) os << "# " << k << "=" << v << "\n";
    return os.str();
}

json config_json(const std::map<std::string, std::string>& cfg) {
    json j;
    for (const auto& [k, v] : cfg) j[k] = v;
    return j;
}

json summary_json(const SummaryStats& s) {
    return json{{"reps", s.reps},
                {"mean", s.mean},
                {"variance", s.variance},
                {"std_error", s.std_error}};
}

// --- grid plumbing -----------------------------------------------------

std::string grid_csv(const ValueGrid& g, const std::map<std::string, std::string>& cfg) {
    std::ostringstream os;
    os << config_comment("solve", cfg);
    os << "z,u,u_prime,theta_star\n";
    for (std::size_t i = 0; i < g.size(); ++i)
        os << num17(g.z_at(i)) << ',' << num17(g.u[i]) << ',' << num17(g.u_prime[i]) << ','
           << num17(g.theta_star[i]) << '\n';
    return os.str();
}

ValueGrid load_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read grid file " + path);
    std::string line;
    std::vector<std::array<double, 4>> rows;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "z,u,u_prime,theta_star")
                throw std::invalid_argument("grid file has unexpected header: " + line);
            header_seen = true;
            continue;
        }
        std::array<double, 4> row{};
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &row[0], &row[1], &row[2], &row[3]) != 4)
            throw std::invalid_argument("grid file has a malformed row: " + line);
        rows.push_back(row);
    }
    if (rows.size() < 3) throw std::invalid_argument("grid file too short");
    ValueGrid g;
    g.h = rows[1][0] - rows[0][0];
    g.z_max = rows.back()[0];
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (std::abs(rows[i][0] - static_cast<double>(i) * g.h) > 1e-9 * (1.0 + g.z_max))
            throw std::invalid_argument("grid file nodes are not uniformly spaced");
        g.u.push_back(rows[i][1]);
        g.u_prime.push_back(rows[i][2]);
        g.theta_star.push_back(rows[i][3]);
    }
    if (g.z_max >= 90.0) {
        auto f = expansion_residuals(g, {std::max(20.0, g.z_max / 3.0), g.z_max});
        g.c_star_estimate = f.c;
    } else {
        g.c_star_estimate = g.u.back() - std::sqrt(2.0) * g.z_max + std::log(g.z_max) / 6.0;
    }
    return g;
}

// The env var CHAINSEL_GRID points at a previously solved grid CSV; without
// it the grid is solved on demand at (zmax, step).
std::shared_ptr<const ValueGrid> obtain_grid(double zmax, double step) {
    if (const char* env = std::getenv("CHAINSEL_GRID"))
        return std::make_shared<const ValueGrid>(load_grid_csv(env));
    return std::make_shared<const ValueGrid>(solve_value(zmax, step));
}

// --- strategy / control parsing ----------------------------------------

bool parse_gamma(const std::string& name, double& gamma) {
    if (name.rfind("gamma:", 0) != 0) return false;
    try {
        std::size_t used = 0;
        gamma = std::stod(name.substr(6), &used);
        if (used != name.size() - 6) return false;
    } catch (const std::exception&) {
        return false;
    }
    return true;
}

AcceptanceWindow make_strategy(const std::string& name, double t, double zmax, double step) {
    double gamma = 0.0;
    if (name == "greedy") return make_greedy(t);
    if (name == "stationary") return make_stationary(t);
    if (name == "phi0") return make_phi0(t);
    if (name == "optimal") return make_optimal(t, obtain_grid(zmax, step));
    if (parse_gamma(name, gamma)) return make_gamma(t, gamma);
    throw std::invalid_argument("unknown strategy '" + name +
                                "' (expected greedy|stationary|phi0|optimal|gamma:<g>)");
}

ControlFunction make_control(const std::string& name, double zmax, double step) {
    double gamma = 0.0;
    if (name == "theta0") return make_theta0();
    if (name == "optimal") return make_optimal_control(obtain_grid(zmax, step));
    if (parse_gamma(name, gamma)) return make_gamma_control(gamma);
    throw std::invalid_argument("unknown control '" + name +
                                "' (expected theta0|optimal|gamma:<g>)");
}

std::string per_replicate_csv(const std::string& command,
                              const std::map<std::string, std::string>& cfg,
                              const std::vector<double>& values,
                              const std::string& column = "length") {
    std::ostringstream os;
    os << config_comment(command, cfg);
    os << "replicate," << column << "\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        os << i << ',' << num17(values[i]) << '\n';
    return os.str();
}

// Tiny CSV reader for the fit subcommand: comment lines start with '#', the
// first remaining line is the header.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;  // per column

    const std::vector<double>& column(const std::string& name) const {
        for (std::size_t c = 0; c < columns.size(); ++c)
            if (columns[c] == name) return data[c];
        throw std::invalid_argument("no column named '" + name + "'");
    }
};

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read " + path);
    CsvTable t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        if (t.columns.empty()) {
            while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
            t.data.resize(t.columns.size());
            continue;
        }
        std::size_t c = 0;
        while (std::getline(ss, cell, ',') && c < t.columns.size())
            t.data[c++].push_back(std::stod(cell));
    }
    if (t.columns.empty()) throw std::invalid_argument(path + " has no header row");
    return t;
}

std::vector<BasisTerm> parse_basis(const std::string& spec) {
    std::vector<BasisTerm> basis;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok == "z")
            basis.push_back(BasisTerm::Z);
        else if (tok == "logz")
            basis.push_back(BasisTerm::LogZ);
        else if (tok == "const" || tok == "1")
            basis.push_back(BasisTerm::One);
        else if (tok == "invz")
            basis.push_back(BasisTerm::InvZ);
        else
            throw std::invalid_argument("unknown basis term '" + tok +
                                        "' (expected z|logz|const|invz)");
    }
    if (basis.empty()) throw std::invalid_argument("empty basis");
    return basis;
}

void emit(const json& j) { std::cout << j.dump(2) << std::endl; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"online increasing-subsequence selection: optimality-equation solver, "
                 "planar and PDMP simulators, renewal diagnostics"};
    app.require_subcommand(1);

    // shared option storage
    std::string strategy = "phi0", control = "theta0", out, in_file, xcol = "z", ycol = "u";
    std::string basis_spec = "z,logz,const";
    double t = 1e4, z = 100.0, zmax = 300.0, step = 1e-3, gridstep = 1.0, zlower = 50.0;
    double win_lo = 100.0, win_hi = 300.0;
    long long reps = 10000, nfixed = 10000;
    std::uint64_t seed = 1;
    int threads = 1;
    bool dominance = false;

    auto* solve_cmd = app.add_subcommand("solve", "solve the optimality equation on a grid");
    solve_cmd->add_option("--zmax", zmax, "grid end in the size variable z");
    solve_cmd->add_option("--step", step, "grid step h");
    solve_cmd->add_option("--out", out, "grid CSV path (z,u,u_prime,theta_star)");

    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo planar selection lengths");
    sim_cmd->add_option("--strategy", strategy, "greedy|stationary|phi0|optimal|gamma:<g>");
    sim_cmd->add_option("--t", t, "horizon");
    sim_cmd->add_option("--reps", reps, "replicates");
    sim_cmd->add_option("--seed", seed, "stream seed");
    sim_cmd->add_option("--threads", threads, "worker threads");
    sim_cmd->add_option("--zmax", zmax, "grid end when solving for the optimal strategy");
    sim_cmd->add_option("--step", step, "grid step for the optimal strategy");
    sim_cmd->add_option("--out", out, "per-replicate CSV (replicate,length)");

    auto* fix_cmd = app.add_subcommand("fixedn", "fixed sample-size selection");
    fix_cmd->add_option("--n", nfixed, "number of observations");
    fix_cmd->add_option("--reps", reps, "replicates");
    fix_cmd->add_option("--seed", seed, "stream seed");
    fix_cmd->add_option("--threads", threads, "worker threads");
    fix_cmd->add_option("--out", out, "per-replicate CSV (replicate,length)");

    auto* pdmp_cmd = app.add_subcommand("pdmp", "simulate the decreasing jump process Z");
    pdmp_cmd->add_option("--control", control, "theta0|optimal|gamma:<g>");
    pdmp_cmd->add_option("--z", z, "initial state z0");
    pdmp_cmd->add_option("--reps", reps, "replicates (1 dumps a path)");
    pdmp_cmd->add_option("--seed", seed, "stream seed");
    pdmp_cmd->add_option("--threads", threads, "worker threads");
    pdmp_cmd->add_option("--zmax", zmax, "grid end for the optimal control");
    pdmp_cmd->add_option("--step", step, "grid step for the optimal control");
    pdmp_cmd->add_option("--out", out, "path CSV (jump_point,gap_size) or counts CSV");

    auto* mom_cmd = app.add_subcommand("moments", "deterministic first/second moment curves");
    mom_cmd->add_option("--control", control, "theta0|optimal|gamma:<g>");
    mom_cmd->add_option("--zmax", zmax, "solve up to this z");
    mom_cmd->add_option("--step", step, "grid step h");
    mom_cmd->add_option("--out", out, "moments CSV (z,u_theta,var)");

    auto* cov_cmd = app.add_subcommand("coverage", "drift-point coverage probabilities");
    cov_cmd->add_option("--control", control, "theta0|optimal|gamma:<g>");
    cov_cmd->add_option("--z", z, "initial state z0");
    cov_cmd->add_option("--gridstep", gridstep, "spacing of probe points");
    cov_cmd->add_option("--reps", reps, "replicates");
    cov_cmd->add_option("--seed", seed, "stream seed");
    cov_cmd->add_option("--threads", threads, "worker threads");
    cov_cmd->add_option("--zmax", zmax, "grid end for the optimal control");
    cov_cmd->add_option("--step", step, "grid step for the optimal control");
    cov_cmd->add_option("--out", out, "coverage CSV (z,p_hat,stderr)");

    auto* ren_cmd = app.add_subcommand("renewal", "renewal step moments, counts, dominance");
    ren_cmd->add_option("--z", z, "level for counts / cycle endpoint");
    ren_cmd->add_option("--reps", reps, "replicates");
    ren_cmd->add_option("--seed", seed, "stream seed");
    ren_cmd->add_option("--threads", threads, "worker threads");
    auto* ren_ctrl = ren_cmd->add_option("--control", control,
                                         "adds cycle moments at --z for this control");
    ren_cmd->add_flag("--dominance", dominance, "run the renewal sandwich check");
    ren_cmd->add_option("--zlower", zlower, "truncation level for --dominance");
    ren_cmd->add_option("--zmax", zmax, "grid end for the optimal control");
    ren_cmd->add_option("--step", step, "grid step for the optimal control");

    auto* clt_cmd = app.add_subcommand("clt", "KS distance of normalized jump counts");
    clt_cmd->add_option("--control", control, "theta0|optimal|gamma:<g>");
    clt_cmd->add_option("--z", z, "initial state z0");
    clt_cmd->add_option("--reps", reps, "replicates");
    clt_cmd->add_option("--seed", seed, "stream seed");
    clt_cmd->add_option("--threads", threads, "worker threads");
    clt_cmd->add_option("--zmax", zmax, "grid end for the optimal control");
    clt_cmd->add_option("--step", step, "grid step for the optimal control");

    auto* cmp_cmd = app.add_subcommand("compare", "planar vs PDMP law equivalence");
    cmp_cmd->add_option("--strategy", strategy, "phi0|optimal|gamma:<g> (self-similar)");
    cmp_cmd->add_option("--t", t, "horizon");
    cmp_cmd->add_option("--reps", reps, "replicates per side");
    cmp_cmd->add_option("--seed", seed, "stream seed");
    cmp_cmd->add_option("--threads", threads, "worker threads");
    cmp_cmd->add_option("--zmax", zmax, "grid end for the optimal strategy");
    cmp_cmd->add_option("--step", step, "grid step for the optimal strategy");

    auto* fit_cmd = app.add_subcommand("fit", "least-squares expansion fit on a CSV column");
    fit_cmd->add_option("--in", in_file, "input CSV")->required();
    fit_cmd->add_option("--x", xcol, "abscissa column name");
    fit_cmd->add_option("--y", ycol, "data column name");
    fit_cmd->add_option("--basis", basis_spec, "comma list of z|logz|const|invz");
    fit_cmd->add_option("--window", win_lo, "window lower edge");
    fit_cmd->add_option("--window-hi", win_hi, "window upper edge");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 2;
    }

    try {
        if (solve_cmd->parsed()) {
            std::map<std::string, std::string> cfg{{"zmax", num17(zmax)},
                                                   {"step", num17(step)},
                                                   {"out", out}};
            ValueGrid g = solve_value(zmax, step);
            if (!out.empty()) atomic_write(out, grid_csv(g, cfg));
            json j{{"command", "solve"},
                   {"config", config_json(cfg)},
                   {"c_star_estimate", g.c_star_estimate},
                   {"switch_t", g.switch_t()},
                   {"u_zmax", g.u.back()},
                   {"nodes", g.size()}};
            if (zmax >= 150.0) {
                auto f = expansion_residuals(g, {std::max(20.0, zmax / 3.0), zmax});
                j["expansion"] = {{"a", f.a},
                                  {"b", f.b},
                                  {"c", f.c},
                                  {"d", f.d},
                                  {"window", {f.fit_window.first, f.fit_window.second}},
                                  {"residual_max", f.residual_max}};
            }
            emit(j);
        } else if (sim_cmd->parsed()) {
            if (reps < 100) throw std::invalid_argument("simulate: need --reps >= 100");
            std::map<std::string, std::string> cfg{
                {"strategy", strategy}, {"t", num17(t)},          {"reps", std::to_string(reps)},
                {"seed", std::to_string(seed)}, {"threads", std::to_string(threads)}};
            AcceptanceWindow w = make_strategy(strategy, t, zmax, step);
            auto lengths = sample_lengths(w, t, reps, seed, threads);
            if (!out.empty()) atomic_write(out, per_replicate_csv("simulate", cfg, lengths));
            auto s = summarize(lengths);
            json j{{"command", "simulate"}, {"config", config_json(cfg)},
                   {"strategy", strategy},  {"t", t},
                   {"reps", s.reps},        {"seed", seed},
                   {"mean", s.mean},        {"variance", s.variance},
                   {"std_error", s.std_error}};
            emit(j);
        } else if (fix_cmd->parsed()) {
            if (reps < 100) throw std::invalid_argument("fixedn: need --reps >= 100");
            std::map<std::string, std::string> cfg{{"n", std::to_string(nfixed)},
                                                   {"reps", std::to_string(reps)},
                                                   {"seed", std::to_string(seed)},
                                                   {"threads", std::to_string(threads)}};
            auto lengths = fixed_n_lengths(nfixed, reps, seed, threads);
            if (!out.empty()) atomic_write(out, per_replicate_csv("fixedn", cfg, lengths));
            auto s = summarize(lengths);
            double pred = std::sqrt(2.0 * static_cast<double>(nfixed)) -
                          std::log(static_cast<double>(nfixed)) / 12.0;
            json j{{"command", "fixedn"},
                   {"config", config_json(cfg)},
                   {"n", nfixed},
                   {"summary", summary_json(s)},
                   {"mean_minus_expansion", s.mean - pred}};
            emit(j);
        } else if (pdmp_cmd->parsed()) {
            std::map<std::string, std::string> cfg{{"control", control},
                                                   {"z", num17(z)},
                                                   {"reps", std::to_string(reps)},
                                                   {"seed", std::to_string(seed)},
                                                   {"threads", std::to_string(threads)}};
            ControlFunction c = make_control(control, zmax, step);
            if (reps <= 1) {
                PDMPPath path = simulate_Z(c, z, seed);
                if (!out.empty()) {
                    std::ostringstream os;
                    os << config_comment("pdmp", cfg) << "jump_point,gap_size\n";
                    for (std::size_t k = 0; k < path.jump_points.size(); ++k)
                        os << num17(path.jump_points[k]) << ',' << num17(path.gap_sizes[k])
                           << '\n';
                    atomic_write(out, os.str());
                }
                emit(json{{"command", "pdmp"},
                          {"config", config_json(cfg)},
                          {"z0", z},
                          {"n_jumps", path.n_jumps}});
            } else {
                auto counts = sample_jump_counts(c, z, reps, seed, threads);
                if (!out.empty())
                    atomic_write(out, per_replicate_csv("pdmp", cfg, counts, "n_jumps"));
                emit(json{{"command", "pdmp"},
                          {"config", config_json(cfg)},
                          {"z0", z},
                          {"summary", summary_json(summarize(counts))}});
            }
        } else if (mom_cmd->parsed()) {
            std::map<std::string, std::string> cfg{{"control", control},
                                                   {"zmax", num17(zmax)},
                                                   {"step", num17(step)}};
            ControlFunction c = make_control(control, zmax, step);
            MomentCurves mc = solve_moments(c, zmax, step);
            if (!out.empty()) {
                std::ostringstream os;
                os << config_comment("moments", cfg) << "z,u_theta,var\n";
                for (std::size_t i = 0; i < mc.size(); ++i)
                    os << num17(mc.z_at(i)) << ',' << num17(mc.u_theta[i]) << ','
                       << num17(mc.var[i]) << '\n';
                atomic_write(out, os.str());
            }
            json j{{"command", "moments"},
                   {"config", config_json(cfg)},
                   {"u_theta_zmax", mc.u_theta.back()},
                   {"var_zmax", mc.var.back()},
                   {"var_over_z", mc.var.back() / zmax}};
            emit(j);
        } else if (cov_cmd->parsed()) {
            std::map<std::string, std::string> cfg{
                {"control", control},   {"z", num17(z)},
                {"gridstep", num17(gridstep)}, {"reps", std::to_string(reps)},
                {"seed", std::to_string(seed)}, {"threads", std::to_string(threads)}};
            ControlFunction c = make_control(control, zmax, step);
            CoverageEstimate est = estimate_coverage(c, z, gridstep, reps, seed, threads);
            if (!out.empty()) {
                std::ostringstream os;
                os << config_comment("coverage", cfg) << "z,p_hat,stderr\n";
                for (std::size_t k = 0; k < est.grid.size(); ++k)
                    os << num17(est.grid[k]) << ',' << num17(est.p_hat[k]) << ','
                       << num17(est.std_err[k]) << '\n';
                atomic_write(out, os.str());
            }
            emit(json{{"command", "coverage"},
                      {"config", config_json(cfg)},
                      {"z0", est.z0},
                      {"points", est.grid.size()},
                      {"exp_fit", {{"a", est.exp_fit.first}, {"alpha", est.exp_fit.second}}}});
        } else if (ren_cmd->parsed()) {
            std::map<std::string, std::string> cfg{{"z", num17(z)},
                                                   {"reps", std::to_string(reps)},
                                                   {"seed", std::to_string(seed)},
                                                   {"threads", std::to_string(threads)}};
            json j{{"command", "renewal"}, {"config", config_json(cfg)}};
            {
                CounterRng rng(seed, 0);
                RunningMoments h;
                for (long long i = 0; i < reps; ++i) h.add(sample_H(rng));
                j["step"] = {{"mean", h.mean()},
                             {"variance", h.variance()},
                             {"sigma2_over_mu3", h.variance() / std::pow(h.mean(), 3.0)}};
            }
            if (z > 0.0) {
                auto counts = sample_renewal_counts(z, reps, seed, threads);
                auto stat = clt_statistic(counts, z);
                auto s = summarize(stat);
                j["counts"] = {{"z", z},
                               {"reps", reps},
                               {"ks_distance", ks_distance(stat)},
                               {"mean", s.mean},
                               {"variance", s.variance}};
            }
            if (*ren_ctrl) {
                ControlFunction c = make_control(control, zmax, step);
                cfg["control"] = control;
                j["config"] = config_json(cfg);
                if (dominance) {
                    DominanceReport rep = dominance_check(c, zlower, z, reps, seed);
                    double worst_lo = 1e300, worst_up = 1e300;
                    for (double m : rep.margin_lower) worst_lo = std::min(worst_lo, m);
                    for (double m : rep.margin_upper) worst_up = std::min(worst_up, m);
                    j["dominance"] = {{"z_lower", rep.z_lower},
                                      {"z", rep.z},
                                      {"c_envelope", rep.c_envelope},
                                      {"quantiles", rep.quantiles},
                                      {"failures", rep.failures},
                                      {"min_margin_lower_se", worst_lo},
                                      {"min_margin_upper_se", worst_up},
                                      {"pass", rep.pass()}};
                } else {
                    CycleDistributions cd(c, z);
                    CounterRng rng(seed, 1);
                    RunningMoments dm, jm, cm;
                    for (long long i = 0; i < reps; ++i) {
                        auto [d, gap] = sample_cycle(cd, rng);
                        dm.add(d);
                        jm.add(gap);
                        cm.add(d + gap);
                    }
                    j["cycle"] = {{"z", z},
                                  {"drift_mean", dm.mean()},
                                  {"gap_mean", jm.mean()},
                                  {"cycle_mean", cm.mean()}};
                }
            }
            emit(j);
        } else if (clt_cmd->parsed()) {
            std::map<std::string, std::string> cfg{{"control", control},
                                                   {"z", num17(z)},
                                                   {"reps", std::to_string(reps)},
                                                   {"seed", std::to_string(seed)},
                                                   {"threads", std::to_string(threads)}};
            ControlFunction c = make_control(control, zmax, step);
            auto counts = sample_jump_counts(c, z, reps, seed, threads);
            auto stat = clt_statistic(counts, z);
            auto s = summarize(stat);
            std::vector<double> stud(stat.size());
            for (std::size_t i = 0; i < stat.size(); ++i)
                stud[i] = (stat[i] - s.mean) / std::sqrt(s.variance);
            emit(json{{"command", "clt"},
                      {"config", config_json(cfg)},
                      {"z", z},
                      {"reps", reps},
                      {"ks_distance", ks_distance(stat)},
                      {"studentized_ks", ks_distance(stud)},
                      {"mean", s.mean},
                      {"variance", s.variance}});
        } else if (cmp_cmd->parsed()) {
            std::map<std::string, std::string> cfg{{"strategy", strategy},
                                                   {"t", num17(t)},
                                                   {"reps", std::to_string(reps)},
                                                   {"seed", std::to_string(seed)},
                                                   {"threads", std::to_string(threads)}};
            AcceptanceWindow w = make_strategy(strategy, t, zmax, step);
            if (w.kind == StrategyKind::Greedy || w.kind == StrategyKind::Stationary)
                throw std::invalid_argument("compare: strategy must be self-similar");
            auto phi = [&w](double tau) { return phi_of(w, tau); };
            CompareReport rep = compare_planar_pdmp(phi, t, reps, seed, threads);
            emit(json{{"command", "compare"},
                      {"config", config_json(cfg)},
                      {"planar", summary_json(rep.planar)},
                      {"pdmp", summary_json(rep.pdmp)},
                      {"mean_diff_se", rep.mean_diff_se},
                      {"var_diff_se", rep.var_diff_se},
                      {"chi2",
                       {{"statistic", rep.chi2.statistic},
                        {"dof", rep.chi2.dof},
                        {"critical", rep.chi2.critical},
                        {"pass", rep.chi2.pass}}}});
        } else if (fit_cmd->parsed()) {
            std::map<std::string, std::string> cfg{{"in", in_file}, {"x", xcol},
                                                   {"y", ycol},     {"basis", basis_spec},
                                                   {"window_lo", num17(win_lo)},
                                                   {"window_hi", num17(win_hi)}};
            CsvTable table = read_csv(in_file);
            auto basis = parse_basis(basis_spec);
            FitModel m = fit(table.column(xcol), table.column(ycol), basis, {win_lo, win_hi});
            json coef = json::object();
            for (std::size_t k = 0; k < basis.size(); ++k)
                coef[basis_name(basis[k])] = m.coefficients[k];
            emit(json{{"command", "fit"},
                      {"config", config_json(cfg)},
                      {"coefficients", coef},
                      {"residual_max", m.residual_max}});
        }
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime fault: " << e.what() << std::endl;
        return 1;
    }
}
