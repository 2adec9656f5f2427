#include "chainsel/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chainsel {

AcceptanceWindow make_greedy(double t) {
    AcceptanceWindow w;
    w.kind = StrategyKind::Greedy;
    w.horizon = t;
    w.name = "greedy";
    return w;
}

AcceptanceWindow make_stationary(double t) {
    return make_stationary(t, std::min(1.0, std::sqrt(2.0 / t)));
}

AcceptanceWindow make_stationary(double t, double delta) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::domain_error("make_stationary: delta must be in (0,1]");
    AcceptanceWindow w;
    w.kind = StrategyKind::Stationary;
    w.horizon = t;
    w.delta = delta;
    w.name = "stationary";
    return w;
}

AcceptanceWindow make_phi0(double t) {
    auto w = make_self_similar(
        t, [](double tau) { return tau > 2.0 ? std::sqrt(2.0 / tau) : 1.0; }, "phi0");
    return w;
}

AcceptanceWindow make_self_similar(double t, std::function<double(double)> phi,
                                   std::string name) {
    AcceptanceWindow w;
    w.kind = StrategyKind::SelfSimilar;
    w.horizon = t;
    w.phi = std::move(phi);
    w.name = std::move(name);
    return w;
}

AcceptanceWindow make_optimal(double t, std::shared_ptr<const ValueGrid> grid) {
    if (!grid) throw std::invalid_argument("make_optimal: missing value grid");
    if (t > grid->z_max * grid->z_max * (1.0 + 1e-12))
        throw std::out_of_range("make_optimal: horizon beyond the solved grid");
    AcceptanceWindow w;
    w.kind = StrategyKind::Optimal;
    w.horizon = t;
    w.grid = std::move(grid);
    w.name = "optimal";
    return w;
}

AcceptanceWindow make_gamma(double t, double gamma) {
    AcceptanceWindow w;
    w.kind = StrategyKind::GammaFamily;
    w.horizon = t;
    w.gamma = gamma;
    w.name = "gamma:" + std::to_string(gamma);
    return w;
}

double phi_of(const AcceptanceWindow& w, double tau) {
    switch (w.kind) {
        case StrategyKind::SelfSimilar: {
            double p = w.phi(tau);
            if (!(p >= -1e-12 && p <= 1.0 + 1e-12))
                throw std::domain_error("phi value outside [0,1]");
            return std::clamp(p, 0.0, 1.0);
        }
        case StrategyKind::Optimal:
            return phi_star(*w.grid, tau);
        case StrategyKind::GammaFamily: {
            double z = std::sqrt(tau);
            if (z <= 0.0) return 1.0;
            double x = theta_gamma(w.gamma, z) / z;
            return x * (2.0 - x);
        }
        default:
            throw std::logic_error("phi_of: strategy is not self-similar");
    }
}

double window_width(const AcceptanceWindow& w, double t, double s, double y) {
    if (!(s >= 0.0 && s <= t)) throw std::domain_error("window_width: need 0 <= s <= t");
    if (!(y >= 0.0 && y < 1.0)) throw std::domain_error("window_width: need 0 <= y < 1");
    double rem = 1.0 - y;
    switch (w.kind) {
        case StrategyKind::Greedy:
            return rem;
        case StrategyKind::Stationary:
            return std::min(rem, w.delta);
        default:
            return rem * phi_of(w, (t - s) * rem);
    }
}

double phi_star(const ValueGrid& grid, double t) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw std::domain_error("phi_star: t must be finite and non-negative");
    if (t > grid.z_max * grid.z_max * (1.0 + 1e-12))
        throw std::out_of_range("phi_star: t beyond the solved grid");
    double z = std::sqrt(t);
    if (z <= grid.h) return 1.0;
    double x = grid.theta_at(z) / z;
    return x * (2.0 - x);
}

double theta_from_phi(const std::function<double(double)>& phi, double z) {
    double p = phi(z * z);
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("theta_from_phi: phi outside [0,1]");
    // z(1 − √(1−p)) in the cancellation-free form.
    return z * p / (1.0 + std::sqrt(1.0 - p));
}

double phi_from_theta(const std::function<double(double)>& theta, double t) {
    double z = std::sqrt(t);
    double th = theta(z);
    if (!(th > 0.0 && th <= z * (1.0 + 1e-12)))
        throw std::domain_error("phi_from_theta: theta outside (0, z]");
    double x = th / z;
    return x * (2.0 - x);
}

double theta_gamma(double gamma, double z) {
    if (!(z > 0.0)) throw std::domain_error("theta_gamma: z must be positive");
    double v = kInvSqrt2 + gamma / z;
    return std::min(z, std::max(v, std::min(z, 1e-9)));
}

}  // namespace chainsel
