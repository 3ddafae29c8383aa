#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "nsl/distribution.hpp"
#include "nsl/secular.hpp"

namespace nsl {

// Bin(n, 1/2) pmf via the Pascal recurrence in extended precision.
inline std::vector<double> binomial_law(int n) {
    if (n < 0) throw std::invalid_argument("binomial_law: need n >= 0");
    std::vector<long double> row{1.0L};
    for (int k = 1; k <= n; ++k) {
        std::vector<long double> next(k + 1, 0.0L);
        for (int j = 0; j <= k; ++j) {
            if (j > 0) next[j] += row[j - 1];
            if (j < k) next[j] += row[j];
        }
        row.swap(next);
    }
    const long double norm = std::pow(2.0L, static_cast<long double>(-n));
    std::vector<double> pmf(n + 1);
    for (int j = 0; j <= n; ++j) pmf[j] = static_cast<double>(row[j] * norm);
    return pmf;
}

// Closed-form surplus of a stower at an on-manifold point: the number of loop
// coordinates in the open half (pi, 2pi). Boundary values count as outside.
inline int stower_surplus(const Eigen::VectorXd& kappa, const std::vector<int>& loop_indices) {
    int count = 0;
    for (int e : loop_indices) {
        const double k = wrap_phase(kappa[e]);
        if (k > std::numbers::pi && k < two_pi) ++count;
    }
    return count;
}

struct WindowCheckReport {
    bool pass = true;
    double worst_violation = 0.0; // CDF amount by which the sandwich failed
    int worst_t = 0;
};

// CDF sandwich P(X <= t - shift) <= P(sigma <= t) <= P(X <= t + shift) with
// X ~ Bin(n_trials, 1/2), checked at every integer t with Monte Carlo slack
// added on both sides.
inline WindowCheckReport binomial_window_check(const SurplusDistribution& sampled, int n_trials,
                                               int shift, double mc_slack_sigmas = 3.0) {
    const auto x = binomial_law(n_trials);
    auto x_cdf = [&](int t) {
        if (t < 0) return 0.0;
        double c = 0.0;
        for (int j = 0; j <= std::min(t, n_trials); ++j) c += x[j];
        return std::min(c, 1.0);
    };

    WindowCheckReport rep;
    const int beta = sampled.beta();
    double cdf = 0.0;
    for (int t = -1; t <= beta; ++t) {
        if (t >= 0) cdf += sampled.probs[t];
        Eigen::VectorXd coeff = Eigen::VectorXd::Zero(beta + 1);
        for (int s = 0; s <= std::min(t, beta); ++s) coeff[s] = 1.0;
        const double slack = mc_slack_sigmas * sampled.se_linear(coeff) + 1e-12;
        const double lo = x_cdf(t - shift) - slack;
        const double hi = x_cdf(t + shift) + slack;
        const double viol = std::max(lo - cdf, cdf - hi);
        if (viol > rep.worst_violation) {
            rep.worst_violation = viol;
            rep.worst_t = t;
        }
        if (viol > 0.0) rep.pass = false;
    }
    return rep;
}

// mandarin with m edges: +-3 window against Bin(beta, 1/2), beta = m - 1
inline WindowCheckReport mandarin_window_check(const SurplusDistribution& sampled, int m) {
    if (sampled.beta() != m - 1)
        throw std::invalid_argument("mandarin_window_check: distribution beta != m - 1");
    return binomial_window_check(sampled, m - 1, 3);
}

// stower with `loops` loops: +-1 window against Bin(beta - 1, 1/2), beta = loops
inline WindowCheckReport stower_window_check(const SurplusDistribution& sampled, int loops) {
    if (sampled.beta() != loops)
        throw std::invalid_argument("stower_window_check: distribution beta != loops");
    return binomial_window_check(sampled, loops - 1, 1);
}

} // namespace nsl
