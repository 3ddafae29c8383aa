#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace nsl {

// Standard normal CDF via the Abramowitz-Stegun 26.2.17 rational
// approximation (absolute error < 7.5e-8). Implemented in-module so results
// are bit-stable across platforms.
inline double standard_normal_cdf(double x) {
    if (x < 0.0) return 1.0 - standard_normal_cdf(-x);
    const double p = 0.2316419;
    const double b1 = 0.319381530, b2 = -0.356563782, b3 = 1.781477937;
    const double b4 = -1.821255978, b5 = 1.330274429;
    const double t = 1.0 / (1.0 + p * x);
    const double poly = ((((b5 * t + b4) * t + b3) * t + b2) * t + b1) * t;
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    return 1.0 - pdf * poly;
}

inline double normal_cdf(double x, double mean, double variance) {
    return standard_normal_cdf((x - mean) / std::sqrt(variance));
}

// Bernstein concentration bound on the Monte Carlo error of one bin:
// P(|error| > delta) <= 2 exp(-N delta^2 / (2 (1 + delta/3))).
inline double bernstein_bound(std::int64_t n, double delta) {
    if (n < 1 || delta <= 0.0) throw std::invalid_argument("bernstein_bound: need N >= 1, delta > 0");
    return 2.0 * std::exp(-static_cast<double>(n) * delta * delta / (2.0 * (1.0 + delta / 3.0)));
}

// Smallest delta whose Bernstein bound is below 1 - confidence, by bisection
// (the bound is monotone decreasing in delta).
inline double bernstein_delta(std::int64_t n, double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0))
        throw std::invalid_argument("bernstein_delta: confidence must be in (0,1)");
    const double target = 1.0 - confidence;
    double lo = 0.0, hi = 1.0;
    while (bernstein_bound(n, hi) > target) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (bernstein_bound(n, mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

// Estimated nodal-surplus distribution over {0,...,beta} together with the
// per-sample covariance needed for Monte Carlo error bars.
struct SurplusDistribution {
    std::vector<double> probs;
    std::int64_t n_samples = 0;
    std::int64_t n_eigenpairs = 0; // accepted eigenpairs behind the estimate
    std::int64_t n_discarded = 0;  // discarded eigenpairs (degeneracy/kernel anomalies)
    double discard_fraction = 0.0;
    // covariance of the per-sample normalized bin vectors; SE^2 = cov/n
    Eigen::MatrixXd sample_covariance;

    int beta() const { return static_cast<int>(probs.size()) - 1; }

    double mean() const {
        double m = 0.0;
        for (std::size_t s = 0; s < probs.size(); ++s) m += static_cast<double>(s) * probs[s];
        return m;
    }

    double variance() const {
        const double m = mean();
        double v = 0.0;
        for (std::size_t s = 0; s < probs.size(); ++s) {
            const double d = static_cast<double>(s) - m;
            v += d * d * probs[s];
        }
        return v;
    }

    double bernstein_delta_at(double confidence) const {
        return bernstein_delta(n_samples, confidence);
    }

    // standard error of a linear functional sum_s coeff[s] * probs[s]
    double se_linear(const Eigen::VectorXd& coeff) const {
        if (sample_covariance.size() == 0 || n_samples < 2) return 0.0;
        const double var = coeff.dot(sample_covariance * coeff);
        return std::sqrt(std::max(0.0, var) / static_cast<double>(n_samples));
    }

    double se_bin(int s) const {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(probs.size());
        c[s] = 1.0;
        return se_linear(c);
    }

    double se_bin_difference(int s1, int s2) const {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(probs.size());
        c[s1] += 1.0;
        c[s2] -= 1.0;
        return se_linear(c);
    }

    // delta-method standard error of variance(): gradient of sum s^2 p_s - mean^2
    double se_variance() const {
        const double m = mean();
        Eigen::VectorXd c(probs.size());
        for (std::size_t s = 0; s < probs.size(); ++s) {
            const double x = static_cast<double>(s);
            c[static_cast<int>(s)] = x * x - 2.0 * m * x;
        }
        return se_linear(c);
    }
};

// Exact Kolmogorov-Smirnov distance between a distribution on {0..beta} and
// the Gaussian with the same mean and variance. The supremum of the CDF gap
// is attained at a one-sided limit of the step CDF, so 2(beta+1) evaluations
// suffice.
inline double ks_to_gaussian(const std::vector<double>& probs, double mean, double variance) {
    if (!(variance > 0.0)) throw std::invalid_argument("ks_to_gaussian: variance must be positive");
    double sup = 0.0, cdf = 0.0;
    for (std::size_t s = 0; s < probs.size(); ++s) {
        const double phi = normal_cdf(static_cast<double>(s), mean, variance);
        sup = std::max(sup, std::fabs(cdf - phi));       // left limit at the atom
        cdf += probs[s];
        sup = std::max(sup, std::fabs(cdf - phi));       // right value at the atom
    }
    return sup;
}

inline double ks_to_gaussian(const SurplusDistribution& d) {
    return ks_to_gaussian(d.probs, d.mean(), d.variance());
}

inline double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("total_variation: size mismatch");
    double tv = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) tv += std::fabs(a[i] - b[i]);
    return tv / 2.0;
}

} // namespace nsl
