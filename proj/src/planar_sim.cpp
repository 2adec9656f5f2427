#include "chainsel/planar_sim.hpp"

#include <cmath>
#include <stdexcept>

#include "chainsel/parallel.hpp"

namespace chainsel {

namespace {

// Below this remaining area the proposal bound is the trivial ψ ≤ 1−y over
// the rest of the horizon; above it, lookahead windows over which the area
// at most halves keep the bound within a constant factor of the true rate.
constexpr double kTailArea = 4.0;

template <class OnAccept>
void run_self_similar(const AcceptanceWindow& w, double t, CounterRng& rng, OnAccept&& accept) {
    double s = 0.0;
    double y = 0.0;
    while (s < t) {
        double rem = 1.0 - y;
        if (rem <= 0.0) break;
        double tau = (t - s) * rem;
        if (tau <= 0.0) break;
        double s_end, bound;
        if (tau <= kTailArea) {
            s_end = t;
            bound = rem;
        } else {
            s_end = s + 0.5 * tau / rem;  // area halves over [s, s_end]
            bound = rem * phi_of(w, 0.5 * tau);
        }
        if (bound <= 0.0) {
            s = s_end;
            continue;
        }
        double gap = rng.exponential(bound);
        if (s + gap > s_end) {
            s = s_end;
            continue;
        }
        s += gap;
        double rate = rem * phi_of(w, (t - s) * rem);
        if (rng.uniform() * bound < rate) {
            double x = y + rng.uniform_oo() * rate;  // ψ(t,s,y) == rate here
            accept(s, x);
            y = x;
        }
    }
}

template <class OnAccept>
void run_constant_rate(const AcceptanceWindow& w, double t, CounterRng& rng, OnAccept&& accept) {
    double s = 0.0;
    double y = 0.0;
    while (true) {
        double rem = 1.0 - y;
        double width = (w.kind == StrategyKind::Greedy) ? rem : std::min(rem, w.delta);
        if (width <= 0.0) break;
        s += rng.exponential(width);
        if (s > t) break;
        double x = y + rng.uniform_oo() * width;
        accept(s, x);
        y = x;
    }
}

template <class OnAccept>
void run_selection(const AcceptanceWindow& w, double t, CounterRng& rng, OnAccept&& accept) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw std::domain_error("simulate_selection: t must be finite and non-negative");
    if (t == 0.0) return;
    if (w.kind == StrategyKind::Greedy || w.kind == StrategyKind::Stationary)
        run_constant_rate(w, t, rng, accept);
    else
        run_self_similar(w, t, rng, accept);
}

}  // namespace

SelectionRun simulate_selection(const AcceptanceWindow& w, double t, std::uint64_t seed) {
    SelectionRun run;
    run.t = t;
    CounterRng rng(seed, 0);
    run_selection(w, t, rng, [&run](double s, double x) {
        run.chain.emplace_back(s, x);
        run.final_y = x;
    });
    run.length = run.chain.size();
    return run;
}

long long selection_count(const AcceptanceWindow& w, double t, CounterRng& rng) {
    long long n = 0;
    run_selection(w, t, rng, [&n](double, double) { ++n; });
    return n;
}

std::vector<double> sample_lengths(const AcceptanceWindow& w, double t, long long reps,
                                   std::uint64_t seed, int threads) {
    std::vector<double> out(static_cast<std::size_t>(reps));
    parallel_for(reps, threads, [&](long long i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        out[static_cast<std::size_t>(i)] =
            static_cast<double>(selection_count(w, t, rng));
    });
    return out;
}

SummaryStats monte_carlo_length(const AcceptanceWindow& w, double t, long long reps,
                                std::uint64_t seed, int threads) {
    if (reps < 100) throw std::invalid_argument("monte_carlo_length: need reps >= 100");
    return summarize(sample_lengths(w, t, reps, seed, threads));
}

long long simulate_fixed_n(long long n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("simulate_fixed_n: need n >= 1");
    CounterRng rng(seed, 0);
    long long count = 0;
    double y = 0.0;
    for (long long m = 1; m <= n; ++m) {
        double x = rng.uniform();
        double rem = 1.0 - y;
        double norm = (x - y) / rem;
        if (norm <= 0.0) continue;
        double width = std::min(1.0, std::sqrt(2.0 / (static_cast<double>(n - m + 1) * rem)));
        if (norm < width) {
            ++count;
            y = x;
        }
    }
    return count;
}

std::vector<double> fixed_n_lengths(long long n, long long reps, std::uint64_t seed,
                                    int threads) {
    if (n < 1) throw std::invalid_argument("fixed_n_lengths: need n >= 1");
    std::vector<double> out(static_cast<std::size_t>(reps));
    parallel_for(reps, threads, [&](long long i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        long long count = 0;
        double y = 0.0;
        for (long long m = 1; m <= n; ++m) {
            double x = rng.uniform();
            double rem = 1.0 - y;
            double norm = (x - y) / rem;
            if (norm <= 0.0) continue;
            double width =
                std::min(1.0, std::sqrt(2.0 / (static_cast<double>(n - m + 1) * rem)));
            if (norm < width) {
                ++count;
                y = x;
            }
        }
        out[static_cast<std::size_t>(i)] = static_cast<double>(count);
    });
    return out;
}

SummaryStats stationary_limit_stat(double t, long long reps, std::uint64_t seed, int threads) {
    if (!(t >= 1e4)) throw std::invalid_argument("stationary_limit_stat: need t >= 1e4");
    AcceptanceWindow w = make_stationary(t);
    double center = std::sqrt(2.0 * t);
    double scale = std::pow(2.0 * t, 0.25);
    std::vector<double> stats(static_cast<std::size_t>(reps));
    parallel_for(reps, threads, [&](long long i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        double len = static_cast<double>(selection_count(w, t, rng));
        stats[static_cast<std::size_t>(i)] = std::sqrt(3.0) * (len - center) / scale;
    });
    return summarize(stats);
}

}  // namespace chainsel
