#ifndef POC_TESTS_HELPERS_HPP
#define POC_TESTS_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include <poc/moments.hpp>
#include <poc/rng.hpp>

namespace poc::testing {

/// Random population moment series of the given length satisfying A1-A4,
/// with a mix of strict and non-strict transitions. Covariances are built
/// backwards so they stay non-increasing and inside the Cauchy-Schwarz
/// envelope of the shrinking variances.
inline std::vector<MomentSummary> random_a1a4_series(RngStream& rng,
                                                     long length) {
    std::vector<double> mu(length), sd2(length), se2(length), cov(length);
    mu[0] = 5.0 * rng.uniform();
    sd2[0] = 0.1 + 4.0 * rng.uniform();
    se2[0] = 0.1 + 4.0 * rng.uniform();
    for (long t = 1; t < length; ++t) {
        bool move = rng.uniform() < 0.7; // keep some non-strict steps
        mu[t] = mu[t - 1] + (move ? rng.uniform() : 0.0);
        sd2[t] = sd2[t - 1] * (rng.uniform() < 0.7
                                   ? 0.6 + 0.39 * rng.uniform()
                                   : 1.0);
        se2[t] = se2[t - 1] * (rng.uniform() < 0.7
                                   ? 0.6 + 0.39 * rng.uniform()
                                   : 1.0);
    }
    double last_bound = std::sqrt(sd2[length - 1] * se2[length - 1]);
    cov[length - 1] = (2.0 * rng.uniform() - 1.0) * last_bound;
    for (long t = length - 2; t >= 0; --t) {
        double bound = std::sqrt(sd2[t] * se2[t]);
        double head = bound - cov[t + 1]; // >= 0: bound grows backwards
        double inc = rng.uniform() < 0.6 ? rng.uniform() * head : 0.0;
        cov[t] = cov[t + 1] + inc;
    }
    std::vector<MomentSummary> out(length);
    for (long t = 0; t < length; ++t) {
        out[t].t = t;
        out[t].mu = mu[t];
        out[t].sigma_d2 = sd2[t];
        out[t].sigma_eps2 = se2[t];
        out[t].cov_d_eps = cov[t];
        out[t].source = SummarySource::Population;
    }
    return out;
}

inline double mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double sample_variance(const std::vector<double>& xs) {
    double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return ss / static_cast<double>(xs.size() - 1);
}

inline double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

/// Bootstrap standard error of a statistic over resamples of xs.
template <typename Stat>
inline double bootstrap_se(const std::vector<double>& xs, Stat stat,
                           int resamples, RngStream& rng) {
    std::size_t n = xs.size();
    std::vector<double> stats;
    stats.reserve(resamples);
    std::vector<double> draw(n);
    for (int b = 0; b < resamples; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            draw[i] = xs[rng.uniform_index(n)];
        }
        stats.push_back(stat(draw));
    }
    double m = mean(stats);
    double ss = 0.0;
    for (double s : stats) ss += (s - m) * (s - m);
    return std::sqrt(ss / static_cast<double>(stats.size() - 1));
}

} // namespace poc::testing

#endif // POC_TESTS_HELPERS_HPP
