#include "chainsel/value_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chainsel/numerics.hpp"
#include "chainsel/stats.hpp"
#include "window_ode.hpp"

namespace chainsel {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

double threshold_root(const double* u, std::size_t i, double h, double u_z) {
    double z = static_cast<double>(i) * h;
    if (u_z <= 1.0) return z;
    auto q = [&](double y) { return detail::lerp_grid(u, i, h, z - y) + 1.0 - u_z; };
    return bisect(q, 0.0, z, 1e-12);
}

// Least squares of u − √2 z + (1/6) log z against {1, 1/z} on [lo, hi].
struct TailFit {
    double c = 0.0;
    double d = 0.0;
    double residual_max = 0.0;
};

TailFit fit_tail(const ValueGrid& g, double lo, double hi) {
    std::vector<double> zs, r1;
    for (std::size_t i = 1; i < g.size(); ++i) {
        double z = g.z_at(i);
        if (z < lo || z > hi) continue;
        zs.push_back(z);
        r1.push_back(g.u[i] - kSqrt2 * z + std::log(z) / 6.0);
    }
    const BasisTerm basis[] = {BasisTerm::One, BasisTerm::InvZ};
    FitModel m = fit(zs, r1, basis, {lo, hi});
    return {m.coefficients[0], m.coefficients[1], m.residual_max};
}

}  // namespace

SolverFault::SolverFault(double z_)
    : std::runtime_error("value solve lost monotonicity at z = " + std::to_string(z_)), z(z_) {}

PlateauDriftError::PlateauDriftError(double drift_)
    : std::runtime_error("constant term drifts across the fit window by " + std::to_string(drift_)),
      drift(drift_) {}

double ValueGrid::u_at(double z) const {
    return detail::lerp_grid(u.data(), u.size() - 1, h, z);
}

double ValueGrid::u_prime_at(double z) const {
    return detail::lerp_grid(u_prime.data(), u_prime.size() - 1, h, z);
}

double ValueGrid::theta_at(double z) const {
    return detail::lerp_grid(theta_star.data(), theta_star.size() - 1, h, z);
}

double ValueGrid::switch_t() const {
    for (std::size_t i = 1; i < u.size(); ++i) {
        if (u[i] > 1.0) {
            double frac = (1.0 - u[i - 1]) / (u[i] - u[i - 1]);
            double z = (static_cast<double>(i - 1) + frac) * h;
            return z * z;
        }
    }
    return z_max * z_max;
}

ValueGrid solve_value(double z_max, double h) {
    if (!(h > 0.0) || h > 1e-2 * (1.0 + 1e-12))
        throw std::invalid_argument("solve_value: need 0 < h <= 1e-2");
    if (!(z_max >= 10.0)) throw std::invalid_argument("solve_value: need z_max >= 10");
    double ratio = z_max / h;
    auto steps = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * ratio)
        throw std::invalid_argument("solve_value: z_max/h must be an integer");

    ValueGrid g;
    g.z_max = z_max;
    g.h = h;
    g.u.assign(steps + 1, 0.0);
    g.u_prime.assign(steps + 1, 0.0);
    g.theta_star.assign(steps + 1, 0.0);

    double* u = g.u.data();
    const detail::ConstAddend one{1.0};
    for (std::size_t n = 0; n < steps; ++n) {
        std::size_t m = n + 1;
        double fn = g.u_prime[n];
        double pred = u[n] + h * fn;
        u[m] = pred;
        double theta_p = threshold_root(u, m, h, pred);
        double fp = detail::window_integral(u, m, h, pred, theta_p, one);
        double corrected = u[n] + 0.5 * h * (fn + fp);
        u[m] = corrected;
        if (!(corrected > u[n])) throw SolverFault(static_cast<double>(m) * h);
        double theta_c = threshold_root(u, m, h, corrected);
        g.theta_star[m] = theta_c;
        g.u_prime[m] = detail::window_integral(u, m, h, corrected, theta_c, one);
    }

    if (z_max >= 60.0) {
        TailFit tail = fit_tail(g, std::max(20.0, z_max / 3.0), z_max);
        g.c_star_estimate = tail.c;
    } else {
        g.c_star_estimate = g.u.back() - kSqrt2 * z_max + std::log(z_max) / 6.0;
    }
    return g;
}

double apply_I(const std::function<double(double)>& g, double z) {
    if (!(z > 0.0) || !std::isfinite(z))
        throw std::domain_error("apply_I: z must be positive and finite");
    double gz = g(z);
    if (!std::isfinite(gz)) throw std::domain_error("apply_I: g(z) is not finite");
    auto rho = [&](double y) {
        double v = g(z - y) + 1.0 - gz;
        if (!std::isfinite(v)) throw std::domain_error("apply_I: g produced a non-finite value");
        return v;
    };
    auto weighted = [&](double y) { return rho(y) * (1.0 - y / z); };

    const int scan = 1024;
    const double step = z / scan;
    double total = 0.0;
    double y_prev = 0.0;
    double r_prev = rho(0.0);  // equals 1
    double seg_start = r_prev > 0.0 ? 0.0 : -1.0;
    for (int k = 1; k <= scan; ++k) {
        double y = (k == scan) ? z : step * k;
        double r = rho(y);
        if ((r > 0.0) != (r_prev > 0.0)) {
            double root = bisect(rho, y_prev, y, 1e-13 * std::max(1.0, z));
            if (r_prev > 0.0) {
                total += adaptive_simpson(weighted, seg_start, root, 1e-13);
                seg_start = -1.0;
            } else {
                seg_start = root;
            }
        }
        y_prev = y;
        r_prev = r;
    }
    if (seg_start >= 0.0) total += adaptive_simpson(weighted, seg_start, z, 1e-13);
    return 4.0 * total;
}

ExpansionFit expansion_residuals(const ValueGrid& grid, std::pair<double, double> fit_window) {
    auto [lo, hi] = fit_window;
    if (!(lo >= 20.0) || !(hi <= grid.z_max * (1.0 + 1e-12)) || !(hi - lo >= 50.0))
        throw std::invalid_argument(
            "expansion_residuals: fit window must lie in [20, z_max] and span at least 50");

    TailFit tail = fit_tail(grid, lo, hi);

    // Drift of the de-trended constant between the outer thirds of the window.
    RunningMoments first, last;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        double z = grid.z_at(i);
        if (z < lo || z > hi) continue;
        double r = grid.u[i] - kSqrt2 * z + std::log(z) / 6.0 - tail.d / z;
        if (z <= lo + (hi - lo) / 3.0) first.add(r);
        if (z >= hi - (hi - lo) / 3.0) last.add(r);
    }
    double drift = last.mean() - first.mean();
    if (std::abs(drift) > 1e-2) throw PlateauDriftError(drift);

    ExpansionFit out;
    out.a = kSqrt2;
    out.b = -1.0 / 6.0;
    out.c = tail.c;
    out.d = tail.d;
    out.fit_window = fit_window;
    out.residual_max = tail.residual_max;
    return out;
}

}  // namespace chainsel
