#include "chainsel/stats.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chainsel {

void RunningMoments::add(double x) noexcept {
    ++n_;
    double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
}

void RunningMoments::merge(const RunningMoments& other) noexcept {
    if (other.n_ == 0) return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    double na = static_cast<double>(n_);
    double nb = static_cast<double>(other.n_);
    double delta = other.mean_ - mean_;
    double total = na + nb;
    mean_ += delta * nb / total;
    m2_ += other.m2_ + delta * delta * na * nb / total;
    n_ += other.n_;
}

double RunningMoments::variance() const noexcept {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

SummaryStats RunningMoments::to_summary() const {
    SummaryStats s;
    s.reps = n_;
    s.mean = mean_;
    s.variance = variance();
    s.std_error = n_ > 0 ? std::sqrt(s.variance / static_cast<double>(n_)) : 0.0;
    return s;
}

SummaryStats summarize(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("summarize: empty sample");
    RunningMoments acc;
    for (double v : values) acc.add(v);
    SummaryStats s = acc.to_summary();
    double m4 = 0.0;
    for (double v : values) {
        double d = v - s.mean;
        double d2 = d * d;
        m4 += d2 * d2;
    }
    s.extra["m4"] = m4 / static_cast<double>(values.size());
    return s;
}

double basis_value(BasisTerm term, double z) {
    switch (term) {
        case BasisTerm::Z: return z;
        case BasisTerm::LogZ: return std::log(z);
        case BasisTerm::One: return 1.0;
        case BasisTerm::InvZ: return 1.0 / z;
    }
    return 0.0;
}

const char* basis_name(BasisTerm term) {
    switch (term) {
        case BasisTerm::Z: return "z";
        case BasisTerm::LogZ: return "logz";
        case BasisTerm::One: return "const";
        case BasisTerm::InvZ: return "invz";
    }
    return "?";
}

FitModel fit(std::span<const double> z, std::span<const double> data,
             std::span<const BasisTerm> basis, std::pair<double, double> window) {
    if (z.size() != data.size()) throw std::invalid_argument("fit: size mismatch");
    if (basis.empty()) throw std::invalid_argument("fit: empty basis");

    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < z.size(); ++i)
        if (z[i] >= window.first && z[i] <= window.second) idx.push_back(i);
    if (idx.size() < 10) throw std::invalid_argument("fit: fewer than 10 points in window");

    const auto rows = static_cast<Eigen::Index>(idx.size());
    const auto cols = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd rhs(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        double zr = z[idx[static_cast<std::size_t>(r)]];
        for (Eigen::Index c = 0; c < cols; ++c)
            design(r, c) = basis_value(basis[static_cast<std::size_t>(c)], zr);
        rhs(r) = data[idx[static_cast<std::size_t>(r)]];
    }

    // Column scaling keeps the QR well conditioned when the basis spans
    // magnitudes like z vs 1/z.
    Eigen::VectorXd scale(cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        double m = design.col(c).cwiseAbs().maxCoeff();
        scale(c) = m > 0.0 ? m : 1.0;
        design.col(c) /= scale(c);
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < cols) throw std::runtime_error("fit: design matrix rank-deficient on window");
    Eigen::VectorXd coef = qr.solve(rhs).cwiseQuotient(scale);

    FitModel model;
    model.basis.assign(basis.begin(), basis.end());
    model.coefficients.assign(coef.data(), coef.data() + cols);
    model.window = window;
    double worst = 0.0;
    for (std::size_t i : idx) {
        double pred = 0.0;
        for (std::size_t c = 0; c < basis.size(); ++c)
            pred += model.coefficients[c] * basis_value(basis[c], z[i]);
        worst = std::max(worst, std::abs(data[i] - pred));
    }
    model.residual_max = worst;
    return model;
}

double ks_distance(std::span<const double> samples) {
    if (samples.size() < 100) throw std::invalid_argument("ks_distance: need at least 100 samples");
    std::vector<double> s(samples.begin(), samples.end());
    std::sort(s.begin(), s.end());
    double n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        double cdf = normal_cdf(s[i]);
        double hi = (static_cast<double>(i) + 1.0) / n - cdf;
        double lo = cdf - static_cast<double>(i) / n;
        d = std::max({d, hi, lo});
    }
    return d;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must be in (0,1)");
    // Acklam's rational approximation, then one Halley step against erfc.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double e = normal_cdf(x) - p;
    double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

double chi_square_quantile(double p, int dof) {
    if (dof < 1) throw std::domain_error("chi_square_quantile: dof must be >= 1");
    double k = static_cast<double>(dof);
    double zq = normal_quantile(p);
    double t = 1.0 - 2.0 / (9.0 * k) + zq * std::sqrt(2.0 / (9.0 * k));
    return k * t * t * t;
}

ChiSquareResult chi_square_two_sample(std::span<const double> a, std::span<const double> b,
                                      double level) {
    if (a.empty() || b.empty()) throw std::invalid_argument("chi_square_two_sample: empty sample");
    auto bounds = [](std::span<const double> s) {
        auto [lo, hi] = std::minmax_element(s.begin(), s.end());
        return std::pair<long long, long long>(std::llround(*lo), std::llround(*hi));
    };
    auto [alo, ahi] = bounds(a);
    auto [blo, bhi] = bounds(b);
    long long lo = std::min(alo, blo);
    long long hi = std::max(ahi, bhi);
    std::size_t nbins = static_cast<std::size_t>(hi - lo + 1);
    std::vector<double> ca(nbins, 0.0), cb(nbins, 0.0);
    for (double v : a) ca[static_cast<std::size_t>(std::llround(v) - lo)] += 1.0;
    for (double v : b) cb[static_cast<std::size_t>(std::llround(v) - lo)] += 1.0;

    // Pool adjacent bins until each carries a combined count >= 10.
    std::vector<std::pair<double, double>> bins;
    double accA = 0.0, accB = 0.0;
    for (std::size_t i = 0; i < nbins; ++i) {
        accA += ca[i];
        accB += cb[i];
        if (accA + accB >= 10.0) {
            bins.emplace_back(accA, accB);
            accA = accB = 0.0;
        }
    }
    if (accA + accB > 0.0) {
        if (!bins.empty()) {
            bins.back().first += accA;
            bins.back().second += accB;
        } else {
            bins.emplace_back(accA, accB);
        }
    }

    ChiSquareResult res;
    if (bins.size() < 2) {
        res.dof = 0;
        res.pass = true;
        return res;
    }
    double na = static_cast<double>(a.size());
    double nb = static_cast<double>(b.size());
    double sa = std::sqrt(nb / na);
    double sb = std::sqrt(na / nb);
    double stat = 0.0;
    for (auto& [oa, ob] : bins) {
        double diff = sa * oa - sb * ob;
        stat += diff * diff / (oa + ob);
    }
    res.statistic = stat;
    res.dof = static_cast<int>(bins.size()) - 1;
    res.critical = chi_square_quantile(1.0 - level, res.dof);
    res.pass = stat < res.critical;
    return res;
}

}  // namespace chainsel
