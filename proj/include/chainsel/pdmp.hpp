#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "chainsel/rng.hpp"
#include "chainsel/stats.hpp"
#include "chainsel/strategies.hpp"
#include "chainsel/value_solver.hpp"

namespace chainsel {

// Control for the decreasing jump process: θ(z) is the maximal jump size
// from state z (0 < θ(z) ≤ z) and induces the rate factor
// λ(z) = θ(z) − θ(z)²/(2z). theta_bar bounds θ, lambda_bar bounds λ; both
// must be finite for exact thinning.
struct ControlFunction {
    std::function<double(double)> theta;
    double theta_bar = 0.0;
    double lambda_bar = 0.0;
    std::string name;

    double lambda(double z) const {
        double th = theta(z);
        return th - th * th / (2.0 * z);
    }
};

ControlFunction make_theta0();                       // θ(z) = min(z, 1/√2)
ControlFunction make_gamma_control(double gamma);    // θ(z) = min(z, 1/√2 + γ/z)
// θ*(z) interpolated from the grid; beyond the grid the control continues
// with its asymptote 1/√2 + 1/(12z).
ControlFunction make_optimal_control(std::shared_ptr<const ValueGrid> grid);
// Control matched to a planar window fraction through 4λ(z) = 2zφ(z²);
// bounds are scanned on (0, z_hi].
ControlFunction make_control_from_phi(std::function<double(double)> phi, double z_hi,
                                      std::string name = "phi-matched");

// One path of Z|z0: states just before each jump, the jump sizes, and the
// jump count. Gaps (z_k − y_k, z_k] are disjoint by construction.
struct PDMPPath {
    double z0 = 0.0;
    std::vector<double> jump_points;
    std::vector<double> gap_sizes;
    long long n_jumps = 0;
};

PDMPPath simulate_Z(const ControlFunction& ctrl, double z0, std::uint64_t seed);
long long jump_count(const ControlFunction& ctrl, double z0, CounterRng& rng);
std::vector<double> sample_jump_counts(const ControlFunction& ctrl, double z0, long long reps,
                                       std::uint64_t seed, int threads = 1);

// Grid solution of w'(z) = 4∫₀^{θ(z)} (w(z−y) + r(z) − w(z))(1−y/z) dy,
// w(0) = 0. With r ≡ 1 this is the expected jump count u_θ.
std::vector<double> solve_reward(const ControlFunction& ctrl,
                                 const std::function<double(double)>& reward, double z_max,
                                 double h);

// Second moment solve: the inhomogeneous term is 1 + 2 u_θ(z−y) with u_θ
// interpolated from the prior first-moment solve on the same grid.
std::vector<double> solve_second_moment(const ControlFunction& ctrl,
                                        std::span<const double> u_theta, double z_max,
                                        double h);

struct MomentCurves {
    double z_max = 0.0;
    double h = 0.0;
    std::vector<double> u_theta;  // E N(z)
    std::vector<double> w2;       // E N(z)²
    std::vector<double> var;      // w2 − u_theta²

    std::size_t size() const { return u_theta.size(); }
    double z_at(std::size_t i) const { return static_cast<double>(i) * h; }
    double u_at(double z) const;
    double var_at(double z) const;
};

MomentCurves solve_moments(const ControlFunction& ctrl, double z_max, double h);

struct CoverageEstimate {
    double z0 = 0.0;
    std::vector<double> grid;
    std::vector<double> p_hat;
    std::vector<double> std_err;
    // (a, alpha) of |p(z0,z) − p(z)| ≈ a e^{−α(z0−z)}, with the limit proxied
    // by a run from 2 z0; (0,0) when too few points rise above noise.
    std::pair<double, double> exp_fit{0.0, 0.0};
};

// Monte Carlo coverage probabilities: the fraction of replicates in which
// each grid point lies in a drift interval of Z|z0.
CoverageEstimate estimate_coverage(const ControlFunction& ctrl, double z0, double grid_step,
                                   long long reps, std::uint64_t seed, int threads = 1);

struct CompareReport {
    SummaryStats planar;
    SummaryStats pdmp;
    double mean_diff_se = 0.0;  // |Δmean| / pooled SE
    double var_diff_se = 0.0;   // |Δvar| / pooled SE
    ChiSquareResult chi2;
};

// Planar selection under the self-similar window φ versus Z|√t under the
// matched control; the counts share one law, which the report quantifies.
CompareReport compare_planar_pdmp(const std::function<double(double)>& phi, double t,
                                  long long reps, std::uint64_t seed, int threads = 1);

}  // namespace chainsel
