#pragma once

namespace chainsel {

// Entire exponential integral Ein(t) = ∫₀ᵗ (1 − e^{−s})/s ds. The integrand
// is evaluated through expm1 so the removable singularity at 0 causes no
// cancellation; quadrature is adaptive with absolute error below 1e-10.
double ein(double t);

}  // namespace chainsel
