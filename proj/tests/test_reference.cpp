#include <catch2/catch_amalgamated.hpp>

#include "nsl/reference.hpp"

namespace {

// brute-force pmf via factorial ratios in long double
long double choose(int n, int k) {
    long double c = 1.0L;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

nsl::SurplusDistribution exact_distribution(std::vector<double> probs) {
    nsl::SurplusDistribution d;
    d.probs = std::move(probs);
    d.n_samples = 1000000; // effectively no Monte Carlo slack
    const int bins = static_cast<int>(d.probs.size());
    d.sample_covariance = Eigen::MatrixXd::Zero(bins, bins);
    return d;
}

} // namespace

TEST_CASE("binomial law matches brute force and the small cases", "[reference]") {
    const auto b2 = nsl::binomial_law(2);
    CHECK(b2[0] == Catch::Approx(0.25));
    CHECK(b2[1] == Catch::Approx(0.5));
    CHECK(b2[2] == Catch::Approx(0.25));

    const auto b1 = nsl::binomial_law(1);
    CHECK(b1[0] == Catch::Approx(0.5));
    CHECK(b1[1] == Catch::Approx(0.5));

    for (int n : {5, 12, 21, 30}) {
        const auto pmf = nsl::binomial_law(n);
        double sum = 0.0, var = 0.0;
        for (int s = 0; s <= n; ++s) {
            const double direct =
                static_cast<double>(choose(n, s) * std::pow(2.0L, static_cast<long double>(-n)));
            CHECK(pmf[s] == Catch::Approx(direct).epsilon(1e-14));
            sum += pmf[s];
            var += (s - n / 2.0) * (s - n / 2.0) * pmf[s];
        }
        CHECK(sum == Catch::Approx(1.0).margin(1e-13));
        CHECK(var == Catch::Approx(n / 4.0).margin(1e-10)); // Bin(n,1/2) variance
        for (int s = 0; s <= n; ++s) CHECK(pmf[s] == Catch::Approx(pmf[n - s]).margin(0.0));
    }
}

TEST_CASE("stower surplus counts loop coordinates in the open upper half", "[reference]") {
    Eigen::VectorXd kappa(5);
    kappa << 4.0, 1.0, 5.0, 2.0, 6.0;
    CHECK(nsl::stower_surplus(kappa, {0, 1, 2}) == 2);
    CHECK(nsl::stower_surplus(kappa, {1, 3}) == 0);
    // tail coordinates are irrelevant: permuting them changes nothing
    Eigen::VectorXd kappa2 = kappa;
    std::swap(kappa2[3], kappa2[4]);
    CHECK(nsl::stower_surplus(kappa2, {0, 1, 2}) == nsl::stower_surplus(kappa, {0, 1, 2}));
    // boundary values count as outside
    Eigen::VectorXd edge(2);
    edge << std::numbers::pi, 0.0;
    CHECK(nsl::stower_surplus(edge, {0, 1}) == 0);
}

TEST_CASE("mandarin window check accepts the degenerate and exact cases", "[reference]") {
    // mandarin 3: point mass at 1, window trivially wide
    auto point = exact_distribution({0.0, 1.0, 0.0});
    CHECK(nsl::mandarin_window_check(point, 3).pass);

    // exact binomial passes with shift 0 <= 3
    auto exact = exact_distribution(nsl::binomial_law(9));
    CHECK(nsl::mandarin_window_check(exact, 10).pass);
}

TEST_CASE("uniform distribution violates the +-3 window at beta = 20", "[reference]") {
    std::vector<double> uniform(21, 1.0 / 21.0);
    auto d = exact_distribution(uniform);
    const auto rep = nsl::binomial_window_check(d, 20, 3);
    CHECK_FALSE(rep.pass);
    CHECK(rep.worst_violation > 0.01);
}

TEST_CASE("stower window uses Bin(beta - 1, 1/2) with shift 1", "[reference]") {
    auto exact = exact_distribution(nsl::binomial_law(12));
    // a stower with 12 loops has beta = 12; compare against Bin(11, 1/2)
    CHECK(nsl::stower_window_check(exact, 12).pass);
    CHECK_THROWS_AS(nsl::stower_window_check(exact, 11), std::invalid_argument);
}
