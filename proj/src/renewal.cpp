#include "chainsel/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chainsel/numerics.hpp"
#include "chainsel/parallel.hpp"

namespace chainsel {

namespace {

constexpr double kTwoSqrt2 = 2.8284271247461903;

double rate4(const ControlFunction& ctrl, double z) {
    if (z <= 0.0) return 0.0;
    double th = ctrl.theta(z);
    return 4.0 * (th - th * th / (2.0 * z));
}

}  // namespace

CycleDistributions::CycleDistributions(ControlFunction ctrl, double z, double cache_step)
    : ctrl_(std::move(ctrl)), z_(z) {
    if (!(z > 0.0)) throw std::invalid_argument("CycleDistributions: need z > 0");
    if (!(cache_step > 0.0))
        throw std::invalid_argument("CycleDistributions: need cache_step > 0");
    auto cells = static_cast<std::size_t>(std::ceil(z / cache_step));
    cells = std::max<std::size_t>(cells, 8);
    step_ = z / static_cast<double>(cells);
    cum_.assign(cells + 1, 0.0);
    for (std::size_t j = 0; j < cells; ++j) {
        double a = static_cast<double>(j) * step_;
        double b = a + step_;
        double m = 0.5 * (a + b);
        cum_[j + 1] = cum_[j] + step_ / 6.0 *
                                    (rate4(ctrl_, a) + 4.0 * rate4(ctrl_, m) + rate4(ctrl_, b));
    }
}

double CycleDistributions::cumulative_from_zero(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= z_) return cum_.back();
    auto j = static_cast<std::size_t>(x / step_);
    double a = static_cast<double>(j) * step_;
    double len = x - a;
    if (len <= 0.0) return cum_[j];
    double m = a + 0.5 * len;
    return cum_[j] +
           len / 6.0 * (rate4(ctrl_, a) + 4.0 * rate4(ctrl_, m) + rate4(ctrl_, x));
}

double CycleDistributions::integrated_hazard(double y) const {
    return cum_.back() - cumulative_from_zero(z_ - y);
}

double CycleDistributions::sample_drift(CounterRng& rng) const {
    double target = -std::log(rng.uniform_oo());
    if (target >= integrated_hazard(z_)) return z_;  // drifted to 0
    auto shifted = [&](double y) { return integrated_hazard(y) - target; };
    return bisect(shifted, 0.0, z_, 1e-10);
}

double CycleDistributions::sample_gap(double ze, CounterRng& rng) const {
    if (ze <= 0.0) return 0.0;
    double th = ctrl_.theta(ze);
    double lam = th - th * th / (2.0 * ze);
    double x = std::min(1.0, 2.0 * rng.uniform_pos() * lam / ze);
    return ze * x / (1.0 + std::sqrt(1.0 - x));
}

std::pair<double, double> sample_cycle(const CycleDistributions& cd, CounterRng& rng) {
    double d = cd.sample_drift(rng);
    double rest = cd.z() - d;
    double j = rest > 0.0 ? cd.sample_gap(rest, rng) : 0.0;
    return {d, j};
}

double sample_H(CounterRng& rng) {
    return -std::log(rng.uniform_oo()) / kTwoSqrt2 + rng.uniform() * kInvSqrt2;
}

long long renewal_count(double z, CounterRng& rng) {
    if (!(z >= 0.0)) throw std::domain_error("renewal_count: need z >= 0");
    long long n = 0;
    double total = sample_H(rng);
    while (total <= z) {
        ++n;
        total += sample_H(rng);
    }
    return n;
}

long long renewal_count_scaled(double z, double step_scale, CounterRng& rng) {
    if (!(step_scale > 0.0))
        throw std::domain_error("renewal_count_scaled: need step_scale > 0");
    if (!(z >= 0.0)) throw std::domain_error("renewal_count_scaled: need z >= 0");
    long long n = 0;
    double total = step_scale * sample_H(rng);
    while (total <= z) {
        ++n;
        total += step_scale * sample_H(rng);
    }
    return n;
}

std::vector<double> sample_renewal_counts(double z, long long reps, std::uint64_t seed,
                                          int threads) {
    std::vector<double> out(static_cast<std::size_t>(reps));
    parallel_for(reps, threads, [&](long long i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        out[static_cast<std::size_t>(i)] = static_cast<double>(renewal_count(z, rng));
    });
    return out;
}

std::vector<double> clt_statistic(std::span<const double> counts, double z) {
    if (!(z >= 100.0)) throw std::invalid_argument("clt_statistic: need z >= 100");
    const double center = z / kStepMean;
    const double scale =
        std::sqrt(kStepVariance) * std::pow(kStepMean, -1.5) * std::sqrt(z);
    std::vector<double> out(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) out[i] = (counts[i] - center) / scale;
    return out;
}

DominanceReport dominance_check(const ControlFunction& ctrl, double z_lower, double z,
                                long long reps, std::uint64_t seed) {
    if (!(z_lower > 0.0) || !(z >= z_lower))
        throw std::invalid_argument("dominance_check: need 0 < z_lower <= z");
    if (reps < 1000) throw std::invalid_argument("dominance_check: need reps >= 1000");

    // Smallest c with both envelopes valid on [z_lower, ∞). The residuals
    // decay like 1/z for controls obeying θ = 1/√2 + O(1/z), so a long
    // geometric scan captures the supremum.
    double worst = 0.0;
    const int points = 20000;
    double hi = std::max(4.0 * z, 1000.0 * z_lower);
    double ratio = std::pow(hi / z_lower, 1.0 / (points - 1));
    double zz = z_lower;
    for (int k = 0; k < points; ++k, zz *= ratio) {
        double th = ctrl.theta(zz);
        if (!(th > 0.0) || !std::isfinite(th))
            throw std::domain_error("dominance_check: control violates the rate condition");
        double lam = th - th * th / (2.0 * zz);
        double res = std::max(std::abs(std::sqrt(2.0) * lam - 1.0),
                              std::abs(1.0 / (std::sqrt(2.0) * th) - 1.0));
        worst = std::max(worst, res);
    }
    double c = worst * z_lower * (1.0 + 1e-9);
    if (!(c < z_lower))
        throw std::domain_error("dominance_check: envelope constant exceeds z_lower");

    DominanceReport rep;
    rep.z_lower = z_lower;
    rep.z = z;
    rep.reps = reps;
    rep.c_envelope = c;

    const double cap = z - z_lower;
    const double scale_lo = 1.0 / (1.0 + c / z_lower);
    const double scale_hi = 1.0 / (1.0 - c / z_lower);
    const double n = static_cast<double>(reps);

    CycleDistributions cd(ctrl, z);
    std::vector<double> cyc(static_cast<std::size_t>(reps));
    std::vector<double> lower(static_cast<std::size_t>(reps));
    std::vector<double> upper(static_cast<std::size_t>(reps));
    CounterRng rng_c(seed, 1);
    CounterRng rng_h(seed, 2);
    for (long long i = 0; i < reps; ++i) {
        auto [d, j] = sample_cycle(cd, rng_c);
        cyc[static_cast<std::size_t>(i)] = std::min(d + j, cap);
        double hstep = sample_H(rng_h);
        lower[static_cast<std::size_t>(i)] = std::min(scale_lo * hstep, cap);
        upper[static_cast<std::size_t>(i)] = scale_hi * hstep;
    }
    std::sort(cyc.begin(), cyc.end());
    std::sort(lower.begin(), lower.end());
    std::vector<double> upper_sorted = upper;
    std::sort(upper_sorted.begin(), upper_sorted.end());

    auto ecdf = [n](const std::vector<double>& sorted, double q) {
        auto it = std::upper_bound(sorted.begin(), sorted.end(), q);
        return static_cast<double>(it - sorted.begin()) / n;
    };
    auto se_of = [n](double p) { return std::sqrt(std::max(p * (1.0 - p), 0.0) / n); };

    rep.quantiles = 99;
    for (int p = 1; p <= 99; ++p) {
        double q = upper_sorted[static_cast<std::size_t>(
            std::min<long long>(reps - 1, (reps * p) / 100))];
        double fl = ecdf(lower, q);
        double fc = ecdf(cyc, q);
        double fu = ecdf(upper_sorted, q);
        // Lower bound <=st cycle: F_lower >= F_cycle; cycle <=st upper:
        // F_cycle >= F_upper. Margins in pooled-SE units, 3 SE slack.
        double se_lc = std::hypot(se_of(fl), se_of(fc));
        double se_cu = std::hypot(se_of(fc), se_of(fu));
        double m_lo = se_lc > 0.0 ? (fl - fc) / se_lc + 3.0 : (fl >= fc ? 3.0 : -3.0);
        double m_up = se_cu > 0.0 ? (fc - fu) / se_cu + 3.0 : (fc >= fu ? 3.0 : -3.0);
        rep.margin_lower.push_back(m_lo);
        rep.margin_upper.push_back(m_up);
        if (m_lo < 0.0 || m_up < 0.0) ++rep.failures;
    }
    return rep;
}

}  // namespace chainsel
