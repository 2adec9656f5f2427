#include "chainsel/pdmp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chainsel/parallel.hpp"
#include "chainsel/planar_sim.hpp"
#include "window_ode.hpp"

namespace chainsel {

namespace {

constexpr std::uint64_t kSecondaryStream = 0x8000000000000000ULL;

template <class OnJump>
long long run_pdmp(const ControlFunction& ctrl, double z0, CounterRng& rng, OnJump&& on_jump) {
    if (!(z0 >= 0.0) || !std::isfinite(z0))
        throw std::domain_error("simulate_Z: z0 must be finite and non-negative");
    if (!(std::isfinite(ctrl.lambda_bar)) || ctrl.lambda_bar <= 0.0)
        throw std::invalid_argument("simulate_Z: rate bound is not finite and positive");
    const double lam_bar = ctrl.lambda_bar;
    const double total_rate = 4.0 * lam_bar;
    double z = z0;
    long long jumps = 0;
    while (z > 0.0) {
        z -= rng.exponential(total_rate);
        if (z <= 0.0) break;
        double th = ctrl.theta(z);
        if (!(th > 0.0) || th > z * (1.0 + 1e-12))
            throw std::domain_error("simulate_Z: control left (0, z]");
        double lam = th - th * th / (2.0 * z);
        if (rng.uniform() * lam_bar < lam) {
            double x = std::min(1.0, 2.0 * rng.uniform_pos() * lam / z);
            double y = z * x / (1.0 + std::sqrt(1.0 - x));  // exact inverse of the jump CDF
            on_jump(z, y);
            ++jumps;
            z -= y;
        }
    }
    return jumps;
}

}  // namespace

ControlFunction make_theta0() {
    ControlFunction c;
    c.theta = [](double z) { return std::min(z, kInvSqrt2); };
    c.theta_bar = kInvSqrt2;
    c.lambda_bar = kInvSqrt2;
    c.name = "theta0";
    return c;
}

ControlFunction make_gamma_control(double gamma) {
    ControlFunction c;
    c.theta = [gamma](double z) { return theta_gamma(gamma, z); };
    // θ rises along z until it crosses 1/√2 + γ/z, then decreases (γ ≥ 0),
    // so the crossing point is the supremum.
    double cross = 0.5 * (kInvSqrt2 + std::sqrt(0.5 + 4.0 * std::max(0.0, gamma)));
    c.theta_bar = std::max(cross, kInvSqrt2 + std::max(0.0, gamma));
    c.lambda_bar = c.theta_bar;
    c.name = "gamma:" + std::to_string(gamma);
    return c;
}

ControlFunction make_optimal_control(std::shared_ptr<const ValueGrid> grid) {
    if (!grid) throw std::invalid_argument("make_optimal_control: missing value grid");
    double bar = *std::max_element(grid->theta_star.begin(), grid->theta_star.end());
    ControlFunction c;
    c.theta = [g = std::move(grid)](double z) {
        if (z <= g->z_max) return std::min(g->theta_at(z), z);
        return kInvSqrt2 + 1.0 / (12.0 * z);
    };
    c.theta_bar = bar;
    c.lambda_bar = bar;
    c.name = "optimal";
    return c;
}

ControlFunction make_control_from_phi(std::function<double(double)> phi, double z_hi,
                                      std::string name) {
    if (!(z_hi > 0.0)) throw std::invalid_argument("make_control_from_phi: need z_hi > 0");
    auto theta = [phi](double z) { return theta_from_phi(phi, z); };
    // Geometric scan for the suprema, padded; θ ≤ z kills the bound near 0.
    double t_bar = 0.0, l_bar = 0.0;
    const int points = 8192;
    double lo = std::min(1e-6, z_hi * 1e-6);
    double ratio = std::pow(z_hi / lo, 1.0 / (points - 1));
    double z = lo;
    for (int k = 0; k < points; ++k, z *= ratio) {
        double th = theta(std::min(z, z_hi));
        t_bar = std::max(t_bar, th);
        l_bar = std::max(l_bar, th - th * th / (2.0 * std::min(z, z_hi)));
    }
    ControlFunction c;
    c.theta = std::move(theta);
    c.theta_bar = t_bar * 1.0001;
    c.lambda_bar = l_bar * 1.0001;
    c.name = std::move(name);
    return c;
}

PDMPPath simulate_Z(const ControlFunction& ctrl, double z0, std::uint64_t seed) {
    PDMPPath path;
    path.z0 = z0;
    CounterRng rng(seed, 0);
    path.n_jumps = run_pdmp(ctrl, z0, rng, [&path](double z, double y) {
        path.jump_points.push_back(z);
        path.gap_sizes.push_back(y);
    });
    return path;
}

long long jump_count(const ControlFunction& ctrl, double z0, CounterRng& rng) {
    return run_pdmp(ctrl, z0, rng, [](double, double) {});
}

std::vector<double> sample_jump_counts(const ControlFunction& ctrl, double z0, long long reps,
                                       std::uint64_t seed, int threads) {
    std::vector<double> out(static_cast<std::size_t>(reps));
    parallel_for(reps, threads, [&](long long i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        out[static_cast<std::size_t>(i)] = static_cast<double>(jump_count(ctrl, z0, rng));
    });
    return out;
}

namespace {

std::size_t checked_steps(double z_max, double h, const char* who) {
    if (!(h > 0.0) || h > 1e-2 * (1.0 + 1e-12))
        throw std::invalid_argument(std::string(who) + ": need 0 < h <= 1e-2");
    if (!(z_max > 0.0)) throw std::invalid_argument(std::string(who) + ": need z_max > 0");
    double ratio = z_max / h;
    auto steps = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * ratio)
        throw std::invalid_argument(std::string(who) + ": z_max/h must be an integer");
    return steps;
}

double checked_theta(const ControlFunction& ctrl, double z, const char* who) {
    double th = ctrl.theta(z);
    if (!(th > 0.0) || th > z * (1.0 + 1e-9))
        throw std::domain_error(std::string(who) + ": control left (0, z] at a grid node");
    return std::min(th, z);
}

// Heun predictor-corrector sharing the window integral; Addend supplies the
// inhomogeneous term at history nodes.
template <class MakeAddend>
std::vector<double> solve_window_ode(const ControlFunction& ctrl, double z_max, double h,
                                     const char* who, MakeAddend&& make_addend) {
    std::size_t steps = checked_steps(z_max, h, who);
    std::vector<double> w(steps + 1, 0.0);
    double slope = 0.0;
    for (std::size_t n = 0; n < steps; ++n) {
        std::size_t m = n + 1;
        double zm = static_cast<double>(m) * h;
        double th = checked_theta(ctrl, zm, who);
        auto addend = make_addend(m);
        double pred = w[n] + h * slope;
        w[m] = pred;
        double fp = detail::window_integral(w.data(), m, h, pred, th, addend);
        w[m] = w[n] + 0.5 * h * (slope + fp);
        slope = detail::window_integral(w.data(), m, h, w[m], th, addend);
    }
    return w;
}

}  // namespace

std::vector<double> solve_reward(const ControlFunction& ctrl,
                                 const std::function<double(double)>& reward, double z_max,
                                 double h) {
    return solve_window_ode(ctrl, z_max, h, "solve_reward", [&](std::size_t m) {
        double r = reward(static_cast<double>(m) * h);
        if (!std::isfinite(r)) throw std::domain_error("solve_reward: reward not finite");
        return detail::ConstAddend{r};
    });
}

std::vector<double> solve_second_moment(const ControlFunction& ctrl,
                                        std::span<const double> u_theta, double z_max,
                                        double h) {
    std::size_t steps = checked_steps(z_max, h, "solve_second_moment");
    if (u_theta.size() != steps + 1)
        throw std::runtime_error(
            "solve_second_moment: first moment missing or not on the same grid");
    const double* table = u_theta.data();
    return solve_window_ode(ctrl, z_max, h, "solve_second_moment", [table](std::size_t) {
        return detail::TableAddend{table, 1.0, 2.0};
    });
}

double MomentCurves::u_at(double z) const {
    return detail::lerp_grid(u_theta.data(), u_theta.size() - 1, h, z);
}

double MomentCurves::var_at(double z) const {
    return detail::lerp_grid(var.data(), var.size() - 1, h, z);
}

MomentCurves solve_moments(const ControlFunction& ctrl, double z_max, double h) {
    MomentCurves mc;
    mc.z_max = z_max;
    mc.h = h;
    mc.u_theta = solve_reward(ctrl, [](double) { return 1.0; }, z_max, h);
    mc.w2 = solve_second_moment(ctrl, mc.u_theta, z_max, h);
    mc.var.resize(mc.u_theta.size());
    for (std::size_t i = 0; i < mc.var.size(); ++i)
        mc.var[i] = mc.w2[i] - mc.u_theta[i] * mc.u_theta[i];
    return mc;
}

CoverageEstimate estimate_coverage(const ControlFunction& ctrl, double z0, double grid_step,
                                   long long reps, std::uint64_t seed, int threads) {
    if (!(z0 >= 50.0)) throw std::invalid_argument("estimate_coverage: need z0 >= 50");
    if (reps < 1000) throw std::invalid_argument("estimate_coverage: need reps >= 1000");
    if (!(grid_step > 0.0)) throw std::invalid_argument("estimate_coverage: need grid_step > 0");

    auto run = [&](double start, std::uint64_t stream_base) {
        auto npts = static_cast<std::size_t>(std::floor(start / grid_step)) + 1;
        bool extra = (static_cast<double>(npts - 1) * grid_step) < start - 1e-12;
        std::size_t total = npts + (extra ? 1 : 0);
        std::vector<double> zs(total);
        for (std::size_t j = 0; j < npts; ++j) zs[j] = static_cast<double>(j) * grid_step;
        if (extra) zs.back() = start;

        int workers = plan_workers(reps, threads);
        std::vector<std::vector<long long>> covered(
            static_cast<std::size_t>(workers), std::vector<long long>(total, 0));
        parallel_chunks(reps, threads, [&](int wkr, long long lo, long long hi) {
            std::vector<char> in_gap(total, 0);
            auto& tally = covered[static_cast<std::size_t>(wkr)];
            for (long long i = lo; i < hi; ++i) {
                std::fill(in_gap.begin(), in_gap.end(), 0);
                CounterRng rng(seed, stream_base + static_cast<std::uint64_t>(i));
                run_pdmp(ctrl, start, rng, [&](double z, double y) {
                    double glo = z - y;
                    auto j_lo = static_cast<long long>(std::floor(glo / grid_step)) + 1;
                    auto j_hi = static_cast<long long>(std::floor(z / grid_step));
                    j_lo = std::max<long long>(j_lo, 0);
                    j_hi = std::min<long long>(j_hi, static_cast<long long>(npts) - 1);
                    for (long long j = j_lo; j <= j_hi; ++j)
                        in_gap[static_cast<std::size_t>(j)] = 1;
                });
                for (std::size_t j = 0; j < total; ++j)
                    if (!in_gap[j]) ++tally[j];
            }
        });
        std::vector<double> p(total), se(total);
        for (std::size_t j = 0; j < total; ++j) {
            long long sum = 0;
            for (auto& tally : covered) sum += tally[j];
            p[j] = static_cast<double>(sum) / static_cast<double>(reps);
            se[j] = std::sqrt(p[j] * (1.0 - p[j]) / static_cast<double>(reps));
        }
        return std::tuple(zs, p, se);
    };

    auto [zs, p1, se1] = run(z0, 0);
    auto [zs2, p2, se2] = run(2.0 * z0, kSecondaryStream);

    CoverageEstimate est;
    est.z0 = z0;
    est.grid = zs;
    est.p_hat = p1;
    est.std_err = se1;

    // Exponential-closeness fit, descriptive only: walk down from z0 while
    // the two runs differ beyond noise; isolated exceedances further out are
    // noise and would flatten the slope.
    std::vector<double> xs, ys;
    for (std::size_t k = zs.size(); k-- > 0;) {
        if (zs[k] >= z0 - grid_step * 0.5) continue;
        double diff = std::abs(p1[k] - p2[k]);
        double pooled = std::sqrt(se1[k] * se1[k] + se2[k] * se2[k]);
        if (!(diff > 3.0 * pooled) || diff <= 0.0) break;
        xs.push_back(z0 - zs[k]);
        ys.push_back(std::log(diff));
    }
    if (xs.size() >= 3) {
        RunningMoments mx, my;
        for (double x : xs) mx.add(x);
        for (double yv : ys) my.add(yv);
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            sxx += (xs[k] - mx.mean()) * (xs[k] - mx.mean());
            sxy += (xs[k] - mx.mean()) * (ys[k] - my.mean());
        }
        if (sxx > 0.0) {
            double slope = sxy / sxx;
            est.exp_fit = {std::exp(my.mean() - slope * mx.mean()), -slope};
        }
    }
    return est;
}

CompareReport compare_planar_pdmp(const std::function<double(double)>& phi, double t,
                                  long long reps, std::uint64_t seed, int threads) {
    if (!(t >= 100.0)) throw std::invalid_argument("compare_planar_pdmp: need t >= 100");
    double z0 = std::sqrt(t);

    AcceptanceWindow window = make_self_similar(t, phi);
    std::vector<double> planar = sample_lengths(window, t, reps, seed, threads);

    ControlFunction ctrl = make_control_from_phi(phi, z0);
    std::vector<double> counts(static_cast<std::size_t>(reps));
    parallel_for(reps, threads, [&](long long i) {
        CounterRng rng(seed, kSecondaryStream + static_cast<std::uint64_t>(i));
        counts[static_cast<std::size_t>(i)] = static_cast<double>(jump_count(ctrl, z0, rng));
    });

    CompareReport rep;
    rep.planar = summarize(planar);
    rep.pdmp = summarize(counts);
    double n = static_cast<double>(reps);
    double se_mean = std::sqrt(rep.planar.variance / n + rep.pdmp.variance / n);
    rep.mean_diff_se = std::abs(rep.planar.mean - rep.pdmp.mean) / se_mean;
    auto var_se = [n](const SummaryStats& s) {
        double m4 = s.extra.at("m4");
        return std::sqrt(std::max(0.0, m4 - s.variance * s.variance) / n);
    };
    double se_var = std::hypot(var_se(rep.planar), var_se(rep.pdmp));
    rep.var_diff_se = std::abs(rep.planar.variance - rep.pdmp.variance) / se_var;
    rep.chi2 = chi_square_two_sample(planar, counts);
    return rep;
}

}  // namespace chainsel
