#include "chainsel/ein.hpp"

#include <cmath>
#include <stdexcept>

#include "chainsel/numerics.hpp"

namespace chainsel {

double ein(double t) {
    if (!std::isfinite(t) || t < 0.0)
        throw std::domain_error("ein: t must be finite and non-negative");
    if (t == 0.0) return 0.0;
    auto integrand = [](double s) { return s == 0.0 ? 1.0 : -std::expm1(-s) / s; };
    return adaptive_simpson(integrand, 0.0, t, 1e-12);
}

}  // namespace chainsel
