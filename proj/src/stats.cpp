#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace cellevac::stats {

double mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(const std::vector<double>& xs) {
    const size_t n = xs.size();
    if (n < 2) return 0.0;
    const double m = mean(xs);
    double s = 0.0;
    for (const double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(n - 1);
}

double population_variance(const std::vector<double>& xs) {
    const size_t n = xs.size();
    if (n == 0) return 0.0;
    const double m = mean(xs);
    double s = 0.0;
    for (const double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(n);
}

double median(std::vector<double> xs) {
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    const size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double t_quantile(double p, double df) {
    boost::math::students_t_distribution<double> dist(df);
    return boost::math::quantile(dist, p);
}

double t_ci_half_width(const std::vector<double>& xs, double confidence) {
    const size_t n = xs.size();
    if (n < 2) return std::numeric_limits<double>::infinity();
    const double s = std::sqrt(sample_variance(xs));
    if (s == 0.0) return 0.0;
    const double t = t_quantile(0.5 * (1.0 + confidence), static_cast<double>(n - 1));
    return t * s / std::sqrt(static_cast<double>(n));
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

namespace {

// Average ranks, ties shared.
std::vector<double> ranks(const std::vector<double>& xs) {
    const size_t n = xs.size();
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return xs[a] < xs[b]; });
    std::vector<double> r(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && xs[idx[j + 1]] == xs[idx[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double mx = mean(xs);
    const double my = mean(ys);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double spearman_rho(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw std::invalid_argument("spearman_rho: mismatched or too-short inputs");
    }
    return pearson(ranks(xs), ranks(ys));
}

double rank_sum_p_less(const std::vector<double>& a, const std::vector<double>& b) {
    const size_t na = a.size();
    const size_t nb = b.size();
    if (na == 0 || nb == 0) throw std::invalid_argument("rank_sum_p_less: empty sample");

    std::vector<double> pooled;
    pooled.reserve(na + nb);
    pooled.insert(pooled.end(), a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::vector<double> r = ranks(pooled);

    double ra = 0.0;
    for (size_t i = 0; i < na; ++i) ra += r[i];
    // U for sample a: small U means a-values rank low (a < b).
    const double u = ra - static_cast<double>(na) * (static_cast<double>(na) + 1.0) / 2.0;

    const double n = static_cast<double>(na + nb);
    const double mu = static_cast<double>(na) * static_cast<double>(nb) / 2.0;

    // Tie correction for the variance.
    std::vector<double> sorted(pooled);
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    size_t i = 0;
    while (i < sorted.size()) {
        size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    const double var = static_cast<double>(na) * static_cast<double>(nb) / 12.0 *
                       ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (var <= 0.0) return u < mu ? 0.0 : 1.0;

    const double z = (u - mu + 0.5) / std::sqrt(var);  // continuity-corrected
    return 1.0 - q_function(z);                        // P(Z <= z)
}

}  // namespace cellevac::stats
