#pragma once

#include <functional>
#include <memory>
#include <string>

#include "chainsel/value_solver.hpp"

namespace chainsel {

inline constexpr double kInvSqrt2 = 0.7071067811865476;

enum class StrategyKind { Greedy, Stationary, SelfSimilar, Optimal, GammaFamily };

// An acceptance-window strategy for the planar selection problem. The
// self-similar kinds are described by a fraction φ(τ) of the remaining mark
// range, where τ is the area of the remaining rectangle; φ must take values
// in [0,1] and be non-increasing in τ.
struct AcceptanceWindow {
    StrategyKind kind = StrategyKind::Greedy;
    double horizon = 0.0;
    double delta = 0.0;                              // Stationary
    std::function<double(double)> phi;               // SelfSimilar
    std::shared_ptr<const ValueGrid> grid;           // Optimal
    double gamma = 0.0;                              // GammaFamily
    std::string name = "greedy";
};

AcceptanceWindow make_greedy(double t);
// δ defaults to the rate-balancing width √(2/t), clamped into (0,1].
AcceptanceWindow make_stationary(double t);
AcceptanceWindow make_stationary(double t, double delta);
AcceptanceWindow make_phi0(double t);
AcceptanceWindow make_self_similar(double t, std::function<double(double)> phi,
                                   std::string name = "phi");
AcceptanceWindow make_optimal(double t, std::shared_ptr<const ValueGrid> grid);
AcceptanceWindow make_gamma(double t, double gamma);

// Window width ψ(t,s,y) for the state (time s, running maximum y).
double window_width(const AcceptanceWindow& w, double t, double s, double y);

// The acceptance fraction φ for the self-similar kinds, evaluated at
// remaining area τ.
double phi_of(const AcceptanceWindow& w, double tau);

// Optimal acceptance fraction φ*(t): 1 inside the full-window regime, and
// otherwise 2θ*/z − (θ*/z)² with z = √t read from the grid.
double phi_star(const ValueGrid& grid, double t);

// PDMP control induced by a planar window fraction: θ(z) = z(1−√(1−φ(z²))).
double theta_from_phi(const std::function<double(double)>& phi, double z);

// Planar window fraction induced by a control: φ(t) = 2θ/z − (θ/z)², z = √t.
double phi_from_theta(const std::function<double(double)>& theta, double t);

// θ(z) = min(z, 1/√2 + γ/z), clipped positive.
double theta_gamma(double gamma, double z);

}  // namespace chainsel
