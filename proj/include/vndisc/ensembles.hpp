#pragma once

// Haar-random Monte Carlo studies: the two-query perfect-discrimination
// failure rate against its 2^{1-d} typicality bound, and a goodness-of-fit
// check of |U_11|^2 against the beta law (d-1)(1-x)^{d-2}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "arc.hpp"
#include "core.hpp"
#include "discrimination.hpp"
#include "errors.hpp"

namespace vndisc {

struct HistogramBin {
    double left;
    double right;
    std::int64_t count;
};

struct EnsembleStudy {
    int dim;
    int samples;
    std::uint64_t seed;
    double empirical_failure_rate;
    double bound;  // 2^{1-d}
    std::pair<double, double> wilson_interval;
    std::vector<HistogramBin> histogram;  // two-query distances over [0, 2]
};

struct BetaCheck {
    int dim;
    int samples;
    std::uint64_t seed;
    double ks_statistic;
    double ks_critical;  // 1.628 / sqrt(n), alpha = 0.01
    bool ks_pass;
    double tail_empirical;  // Pr(|U_11|^2 >= 1/2)
    double tail_expected;   // 2^{1-d}
    bool insufficient_samples;
    std::vector<HistogramBin> histogram;  // |U_11|^2 over [0, 1]
};

namespace detail {

constexpr double kWilsonZ = 1.959963984540054;  // 97.5% normal quantile
constexpr int kHistogramBins = 50;

inline std::pair<double, double> wilson_interval(std::int64_t hits, std::int64_t n) {
    const double z2 = kWilsonZ * kWilsonZ;
    const double nn = static_cast<double>(n);
    const double phat = static_cast<double>(hits) / nn;
    const double denom = 1.0 + z2 / nn;
    const double center = (phat + z2 / (2.0 * nn)) / denom;
    const double half =
        kWilsonZ * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

inline std::vector<HistogramBin> make_histogram(const std::vector<double>& values, double lo,
                                                double hi) {
    std::vector<HistogramBin> bins;
    const double width = (hi - lo) / kHistogramBins;
    for (int b = 0; b < kHistogramBins; ++b)
        bins.push_back({lo + b * width, lo + (b + 1) * width, 0});
    for (double v : values) {
        int b = static_cast<int>((v - lo) / width);
        b = std::clamp(b, 0, kHistogramBins - 1);
        ++bins[static_cast<size_t>(b)].count;
    }
    return bins;
}

}  // namespace detail

// Fraction of Haar samples whose two-query measurement distance falls short
// of 2.  For any diagonal E the numerical range of UE contains every U_jj
// E_jj, so cos(upsilon/2) <= min_j |U_jj|; a sample with any diagonal
// modulus <= 1/sqrt(2) therefore has upsilon >= pi/2 and a certified
// two-query distance of exactly 2 (the optimizer returns an upper bound on
// upsilon, so it would report the same).  The phase optimization only runs
// on the rare all-diagonals-large remainder.
inline EnsembleStudy two_query_failure_rate(int dim, int samples, std::uint64_t seed,
                                            const OptimizerOptions& opts = {}) {
    if (dim < 2) throw BadParamsError("two_query_failure_rate: dim must be >= 2");
    if (samples < 100)
        throw InsufficientSamplesError("two_query_failure_rate: need at least 100 samples");

    std::int64_t failures = 0;
    std::vector<double> distances;
    distances.reserve(static_cast<size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        const Unitary u = haar_unitary(dim, split_seed(seed, static_cast<std::uint64_t>(i)));
        const double min_diag = u.mat().diagonal().cwiseAbs().minCoeff();
        const double dist =
            min_diag <= 1.0 / std::sqrt(2.0) ? 2.0 : multishot_distance(u, 2, opts);
        if (dist < 2.0 - 1e-9) ++failures;
        distances.push_back(dist);
    }

    return EnsembleStudy{dim,
                         samples,
                         seed,
                         static_cast<double>(failures) / samples,
                         std::pow(0.5, dim - 1),
                         detail::wilson_interval(failures, samples),
                         detail::make_histogram(distances, 0.0, 2.0)};
}

// Kolmogorov-Smirnov check of |U_11|^2 against the CDF 1 - (1-x)^{d-1},
// plus the exact tail probability at 1/2.
inline BetaCheck u11_beta_check(int dim, int samples, std::uint64_t seed) {
    if (dim < 2) throw BadParamsError("u11_beta_check: dim must be >= 2");
    if (samples < 1) throw InsufficientSamplesError("u11_beta_check: need at least 1 sample");

    std::vector<double> values;
    values.reserve(static_cast<size_t>(samples));
    std::int64_t tail_hits = 0;
    for (int i = 0; i < samples; ++i) {
        const Unitary u = haar_unitary(dim, split_seed(seed, static_cast<std::uint64_t>(i)));
        const double x = std::norm(u.mat()(0, 0));
        values.push_back(x);
        if (x >= 0.5) ++tail_hits;
    }
    const auto histogram = detail::make_histogram(values, 0.0, 1.0);

    std::sort(values.begin(), values.end());
    const double nn = static_cast<double>(samples);
    double ks = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double cdf = 1.0 - std::pow(1.0 - values[static_cast<size_t>(i)], dim - 1);
        ks = std::max(ks, std::fabs((i + 1) / nn - cdf));
        ks = std::max(ks, std::fabs(i / nn - cdf));
    }
    const double crit = 1.628 / std::sqrt(nn);

    return BetaCheck{dim,
                     samples,
                     seed,
                     ks,
                     crit,
                     ks <= crit,
                     static_cast<double>(tail_hits) / nn,
                     std::pow(0.5, dim - 1),
                     samples < 100,
                     histogram};
}

}  // namespace vndisc
