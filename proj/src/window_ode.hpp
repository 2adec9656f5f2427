#pragma once

#include <cstddef>

namespace chainsel::detail {

// Inhomogeneous addends for the window integral below. The reward equations
// differ only in this term: a constant per step for the first moment, an
// affine image of the stored first moment for the second.
struct ConstAddend {
    double value;
    double at(std::size_t) const noexcept { return value; }
};

struct TableAddend {
    const double* table;
    double offset;
    double scale;
    double at(std::size_t j) const noexcept { return offset + scale * table[j]; }
};

// 4 ∫₀^θ (W(z−y) + A(z−y) − w_z)(1 − y/z) dy at z = i·h, where W is the grid
// function w[0..i] (linear between nodes) and A the addend evaluated the same
// way. Full cells use the trapezoid rule on the exact node values; the
// partial cell [Kh, θ] integrates the interpolated linear integrand times the
// linear weight exactly, so the threshold position carries no O(h) bias.
template <class Addend>
double window_integral(const double* w, std::size_t i, double h, double w_z, double theta,
                       Addend add) {
    if (i == 0 || theta <= 0.0) return 0.0;
    const double z = static_cast<double>(i) * h;
    std::size_t cells = static_cast<std::size_t>(theta / h);
    if (cells > i) cells = i;
    const double inv_i = 1.0 / static_cast<double>(i);

    double full = 0.0;
    if (cells >= 1) {
        double acc = 0.5 * (w[i] + add.at(i) - w_z);  // y = 0, weight 1
        for (std::size_t k = 1; k < cells; ++k) {
            std::size_t j = i - k;
            acc += (w[j] + add.at(j) - w_z) * (static_cast<double>(j) * inv_i);
        }
        std::size_t jk = i - cells;
        acc += 0.5 * (w[jk] + add.at(jk) - w_z) * (static_cast<double>(jk) * inv_i);
        full = h * acc;
    }

    double part = 0.0;
    const double len = theta - static_cast<double>(cells) * h;
    if (len > 0.0 && cells < i) {
        std::size_t j = i - cells;
        double qa = w[j] + add.at(j) - w_z;
        double qb = w[j - 1] + add.at(j - 1) - w_z;
        double slope = (qb - qa) / h;
        double wa = static_cast<double>(j) * inv_i;  // weight at the cell's left edge
        part = qa * wa * len + (slope * wa - qa / z) * 0.5 * len * len -
               slope * len * len * len / (3.0 * z);
    }
    return 4.0 * (full + part);
}

// Linear interpolation of grid values v[0..n] at x ∈ [0, n·h].
inline double lerp_grid(const double* v, std::size_t n, double h, double x) {
    if (x <= 0.0) return v[0];
    double pos = x / h;
    auto j = static_cast<std::size_t>(pos);
    if (j >= n) return v[n];
    double frac = pos - static_cast<double>(j);
    return v[j] + frac * (v[j + 1] - v[j]);
}

}  // namespace chainsel::detail
