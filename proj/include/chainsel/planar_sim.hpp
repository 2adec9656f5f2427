#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "chainsel/rng.hpp"
#include "chainsel/stats.hpp"
#include "chainsel/strategies.hpp"

namespace chainsel {

// One realization of the planar selection process: the selected chain in
// time order, its length, and the terminal running maximum.
struct SelectionRun {
    double t = 0.0;
    std::vector<std::pair<double, double>> chain;  // (s, x)
    std::size_t length = 0;
    double final_y = 0.0;
};

// Exact-distribution simulation generating acceptance events only: from
// state (s, y) the acceptances form an inhomogeneous Poisson process of rate
// ψ(t,·,y), sampled by thinning, and the accepted mark is uniform on the
// window above y.
SelectionRun simulate_selection(const AcceptanceWindow& w, double t, std::uint64_t seed);

// Selection count of a single replicate, using the caller's stream.
long long selection_count(const AcceptanceWindow& w, double t, CounterRng& rng);

// Lengths of `reps` independent replicates; replicate i uses the stream
// (seed, i), so the result is independent of thread count.
std::vector<double> sample_lengths(const AcceptanceWindow& w, double t, long long reps,
                                   std::uint64_t seed, int threads = 1);

SummaryStats monte_carlo_length(const AcceptanceWindow& w, double t, long long reps,
                                std::uint64_t seed, int threads = 1);

// Fixed sample-size variant: n uniform marks observed in sequence, accepted
// when the normalized increment falls below √(2/((n−m+1)(1−y))) ∧ 1.
long long simulate_fixed_n(long long n, std::uint64_t seed);
std::vector<double> fixed_n_lengths(long long n, long long reps, std::uint64_t seed,
                                    int threads = 1);

// Moments of √3 (L₀(t) − √(2t)) / (2t)^{1/4} under the stationary strategy.
SummaryStats stationary_limit_stat(double t, long long reps, std::uint64_t seed,
                                   int threads = 1);

}  // namespace chainsel
