#pragma once

// Distribution summaries used to derive filtering bounds: streaming
// mean/variance/skewness, interpolated quantiles, and the inverse normal
// CDF backing QQ data.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ngramchain/util.hpp"

namespace ngramchain {

struct DistributionStats {
    std::uint64_t count = 0;
    double mean = 0.0;
    double std_dev = 0.0;  // population
    double min = 0.0;
    double max = 0.0;
    double skewness = 0.0;  // third standardized central moment; 0 when std_dev == 0
    std::vector<std::pair<double, double>> quantiles;
};

inline constexpr double kDefaultQuantiles[] = {0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99};

/// Single-pass central moments up to order three (Welford-style updates).
class StreamingMoments {
public:
    void add(double x) {
        const double n1 = static_cast<double>(count_);
        ++count_;
        const double n = static_cast<double>(count_);
        const double delta = x - mean_;
        const double delta_n = delta / n;
        const double term = delta * delta_n * n1;
        mean_ += delta_n;
        m3_ += term * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
        m2_ += term;
        if (count_ == 1) {
            min_ = max_ = x;
        } else {
            min_ = std::min(min_, x);
            max_ = std::max(max_, x);
        }
    }

    std::uint64_t count() const { return count_; }
    double mean() const { return mean_; }
    double min() const { return min_; }
    double max() const { return max_; }

    double population_variance() const {
        return count_ == 0 ? 0.0 : m2_ / static_cast<double>(count_);
    }
    double population_std() const { return std::sqrt(population_variance()); }

    double skewness() const {
        if (count_ == 0) return 0.0;
        const double sd = population_std();
        if (sd == 0.0) return 0.0;
        return (m3_ / static_cast<double>(count_)) / (sd * sd * sd);
    }

private:
    std::uint64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double m3_ = 0.0;
    double min_ = 0.0;
    double max_ = 0.0;
};

/// Quantile of a sorted sample by linear interpolation at h = q * (count - 1).
inline double sorted_quantile(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw EmptyInput("quantile of empty sample");
    const double h = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline DistributionStats compute_stats(std::span<const double> values) {
    if (values.empty()) throw EmptyInput("no values to summarize");
    StreamingMoments moments;
    for (double v : values) moments.add(v);

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    DistributionStats stats;
    stats.count = moments.count();
    stats.mean = moments.mean();
    stats.std_dev = moments.population_std();
    stats.min = moments.min();
    stats.max = moments.max();
    stats.skewness = moments.skewness();
    for (double q : kDefaultQuantiles)
        stats.quantiles.emplace_back(q, sorted_quantile(sorted, q));
    return stats;
}

/// Inverse of the standard normal CDF (rational approximation, AS 241
/// PPND16 variant); good to well below 1e-8 over (0, 1).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw Error("normal_quantile: p must be in (0, 1)");

    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }

    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                    3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                  4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                  2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                  5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-9) * r +
                      1.84631831751005468180e-6) * r + 7.86869131145613259100e-4) * r +
                    1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -value : value;
}

/// QQ points against the fitted normal: empirical quantiles are the sorted
/// values; theoretical are mean + std * Phi^-1((i - 0.5) / count).
inline std::vector<std::pair<double, double>> qq_points(std::span<const double> values) {
    if (values.size() < 2) throw EmptyInput("qq data needs at least two values");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    StreamingMoments moments;
    for (double v : sorted) moments.add(v);
    const double mu = moments.mean();
    const double sigma = moments.population_std();

    std::vector<std::pair<double, double>> points;
    points.reserve(sorted.size());
    const double n = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double p = (static_cast<double>(i) + 0.5) / n;
        points.emplace_back(mu + sigma * normal_quantile(p), sorted[i]);
    }
    return points;
}

inline void write_qq_csv(std::ostream& out,
                         const std::vector<std::pair<double, double>>& points) {
    out << "theoretical,empirical\n";
    for (const auto& [t, e] : points) out << format_double(t) << "," << format_double(e) << "\n";
}

inline nlohmann::json stats_to_json(const DistributionStats& stats) {
    nlohmann::json quantiles = nlohmann::json::array();
    for (const auto& [q, v] : stats.quantiles) quantiles.push_back({q, v});
    return nlohmann::json{{"count", stats.count},   {"mean", stats.mean},
                          {"std", stats.std_dev},   {"min", stats.min},
                          {"max", stats.max},       {"quantiles", quantiles},
                          {"skewness", stats.skewness}};
}

}  // namespace ngramchain
