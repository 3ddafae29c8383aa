#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nsl/distribution.hpp"
#include "nsl/reference.hpp"

TEST_CASE("normal cdf approximation stays within 1e-7 of erf", "[distribution]") {
    double worst = 0.0;
    for (double x = -8.0; x <= 8.0; x += 0.0173) {
        const double exact = 0.5 * std::erfc(-x / std::sqrt(2.0));
        worst = std::max(worst, std::fabs(nsl::standard_normal_cdf(x) - exact));
    }
    CHECK(worst < 1e-7);
}

TEST_CASE("bernstein bound at the paper's example point", "[distribution]") {
    const double bound = nsl::bernstein_bound(1000000, 0.01);
    const double expected = 2.0 * std::exp(-100.0 / (2.0 * (1.0 + 0.01 / 3.0)));
    CHECK(bound == Catch::Approx(expected).epsilon(1e-15));
    CHECK(std::log(bound / 2.0) == Catch::Approx(-49.833887043189375).epsilon(1e-12));

    // delta -> 0 gives the trivial bound 2
    CHECK(nsl::bernstein_bound(1000, 1e-12) == Catch::Approx(2.0).epsilon(1e-9));

    // doubling N doubles the exponent
    const double b1 = nsl::bernstein_bound(5000, 0.02);
    const double b2 = nsl::bernstein_bound(10000, 0.02);
    CHECK(std::log(b2 / 2.0) == Catch::Approx(2.0 * std::log(b1 / 2.0)).epsilon(1e-12));
}

TEST_CASE("bernstein delta inverts the bound", "[distribution]") {
    for (std::int64_t n : {1000ll, 100000ll}) {
        const double delta = nsl::bernstein_delta(n, 0.99);
        CHECK(nsl::bernstein_bound(n, delta) <= 0.01 + 1e-12);
        CHECK(nsl::bernstein_bound(n, delta * 0.99) > 0.01);
    }
    // reference scale: N = 1e5 at 99% confidence is about 0.0103
    CHECK(nsl::bernstein_delta(100000, 0.99) == Catch::Approx(0.0103).margin(3e-4));
}

TEST_CASE("ks distance of a point mass against its Gaussian is 1/2", "[distribution]") {
    // point mass at beta/2 has the Gaussian's mean; at the atom the step CDF
    // jumps from 0 to 1 across Phi = 0.5
    std::vector<double> probs{0.0, 1.0, 0.0};
    CHECK(nsl::ks_to_gaussian(probs, 1.0, 1e-2) == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("ks distance matches a dense grid oracle on Bin(20, 1/2)", "[distribution]") {
    const auto pmf = nsl::binomial_law(20);
    const double mean = 10.0, var = 5.0;

    // brute-force grid over t
    double grid_sup = 0.0;
    for (double t = -5.0; t <= 25.0; t += 1e-4) {
        double cdf = 0.0;
        for (int s = 0; s <= 20 && s <= static_cast<int>(std::floor(t)); ++s) cdf += pmf[s];
        grid_sup = std::max(grid_sup, std::fabs(cdf - nsl::normal_cdf(t, mean, var)));
    }
    const double exact = nsl::ks_to_gaussian(pmf, mean, var);
    CHECK(exact == Catch::Approx(grid_sup).margin(1e-6));
    CHECK(exact >= grid_sup - 1e-12); // the atom-limit evaluation dominates any grid
}

TEST_CASE("ks distance is reflection symmetric", "[distribution]") {
    std::vector<double> probs{0.1, 0.15, 0.5, 0.15, 0.1};
    std::vector<double> reflected(probs.rbegin(), probs.rend());
    const double a = nsl::ks_to_gaussian(probs, 2.0, 1.2);
    const double b = nsl::ks_to_gaussian(reflected, 2.0, 1.2);
    CHECK(a == Catch::Approx(b).margin(1e-9));
}

TEST_CASE("zero variance is rejected", "[distribution]") {
    std::vector<double> probs{0.0, 1.0, 0.0};
    CHECK_THROWS_AS(nsl::ks_to_gaussian(probs, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("moments of a surplus distribution", "[distribution]") {
    nsl::SurplusDistribution d;
    d.probs = {0.25, 0.5, 0.25};
    CHECK(d.mean() == Catch::Approx(1.0));
    CHECK(d.variance() == Catch::Approx(0.5));
    CHECK(d.beta() == 2);
}

TEST_CASE("total variation", "[distribution]") {
    CHECK(nsl::total_variation({0.5, 0.5}, {0.5, 0.5}) == 0.0);
    CHECK(nsl::total_variation({1.0, 0.0}, {0.0, 1.0}) == Catch::Approx(1.0));
    CHECK_THROWS_AS(nsl::total_variation({1.0}, {0.5, 0.5}), std::invalid_argument);
}
