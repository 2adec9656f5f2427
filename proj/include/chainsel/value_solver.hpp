#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace chainsel {

// Raised when the value iteration loses strict monotonicity, which would
// break uniqueness of the threshold root.
struct SolverFault : std::runtime_error {
    double z;
    explicit SolverFault(double z_);
};

// Raised by expansion_residuals when the constant term has not settled on
// the fit window.
struct PlateauDriftError : std::runtime_error {
    double drift;
    explicit PlateauDriftError(double drift_);
};

// Grid solution of the selection optimality equation in the size variable
// z = √t: values u(z_i) = v(z_i²), the derivative, and the threshold θ*(z_i).
struct ValueGrid {
    double z_max = 0.0;
    double h = 0.0;
    std::vector<double> u;
    std::vector<double> u_prime;
    std::vector<double> theta_star;
    double c_star_estimate = 0.0;

    std::size_t size() const { return u.size(); }
    double z_at(std::size_t i) const { return static_cast<double>(i) * h; }
    double u_at(double z) const;
    double u_prime_at(double z) const;
    double theta_at(double z) const;
    // Smallest t = z² with u(z) = 1, i.e. where the full-window regime ends.
    double switch_t() const;
};

struct ExpansionFit {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    std::pair<double, double> fit_window{0.0, 0.0};
    double residual_max = 0.0;
};

// Solves u'(z) = 4∫₀^{θ*(z)} (u(z−y)+1−u(z))(1−y/z) dy, u(0)=0, with
// θ*(z) = z while u(z) ≤ 1 and otherwise the root of u(z−y)+1−u(z) = 0.
// Heun predictor-corrector on a uniform grid with linear history
// interpolation; the threshold root is found by bisection to 1e-12.
ValueGrid solve_value(double z_max, double h);

// Integral operator 𝓘g(z) = 4∫₀ᶻ (g(z−y)+1−g(z))₊ (1−y/z) dy for continuous
// g; sign changes of the clamped term are located first so each smooth
// stretch is integrated by adaptive quadrature.
double apply_I(const std::function<double(double)>& g, double z);

// Fits u(z) ≈ a z + b log z + c + d/z on the window with a = √2 and
// b = −1/6 held fixed; c and d come from least squares on the residual.
ExpansionFit expansion_residuals(const ValueGrid& grid, std::pair<double, double> fit_window);

}  // namespace chainsel
