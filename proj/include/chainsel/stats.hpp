#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace chainsel {

struct SummaryStats {
    long long reps = 0;
    double mean = 0.0;
    double variance = 0.0;   // unbiased sample variance
    double std_error = 0.0;  // sqrt(variance / reps)
    std::map<std::string, double> extra;
};

// Streaming mean/variance accumulator. add() is the Welford update; merge()
// combines independent partials and is associative and commutative up to
// rounding.
class RunningMoments {
public:
    void add(double x) noexcept;
    void merge(const RunningMoments& other) noexcept;
    long long count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept;  // unbiased; 0 when n < 2
    SummaryStats to_summary() const;

private:
    long long n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Summary of a sample, with the fourth central moment in extra["m4"]
// (needed for standard errors of variance estimates).
SummaryStats summarize(std::span<const double> values);

enum class BasisTerm { Z, LogZ, One, InvZ };

double basis_value(BasisTerm term, double z);
const char* basis_name(BasisTerm term);

struct FitModel {
    std::vector<BasisTerm> basis;
    std::vector<double> coefficients;
    std::pair<double, double> window{0.0, 0.0};
    double residual_max = 0.0;
};

// Ordinary least squares of data on the chosen basis, restricted to
// z inside the window. Needs at least 10 points and a full-rank design.
FitModel fit(std::span<const double> z, std::span<const double> data,
             std::span<const BasisTerm> basis, std::pair<double, double> window);

// Sup distance between the empirical CDF of the samples and the standard
// normal CDF. Needs at least 100 samples.
double ks_distance(std::span<const double> samples);

double normal_cdf(double x);
double normal_quantile(double p);

// Wilson-Hilferty approximation; adequate for the moderate dof used here.
double chi_square_quantile(double p, int dof);

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double critical = 0.0;
    bool pass = true;
};

// Two-sample chi-square on integer-valued samples. Adjacent bins are pooled
// until each holds a combined count of at least 10; `level` is the test
// size.
ChiSquareResult chi_square_two_sample(std::span<const double> a, std::span<const double> b,
                                      double level = 0.01);

}  // namespace chainsel
