#include <catch2/catch_amalgamated.hpp>

#include "nsl/generate.hpp"
#include "nsl/reference.hpp"
#include "nsl/sampler.hpp"

namespace {

nsl::SamplerOutput run(const nsl::Graph& g, std::int64_t n, std::uint64_t seed,
                       bool per_edge = false, int workers = 1) {
    nsl::SamplerConfig cfg;
    cfg.samples = n;
    cfg.master_seed = seed;
    cfg.per_edge = per_edge;
    cfg.workers = workers;
    return nsl::run_sampler(g, nsl::build_scattering(g), cfg);
}

} // namespace

TEST_CASE("lollipop matches Bin(1, 1/2) within the 99% Bernstein delta", "[sampler]") {
    const auto g = nsl::make_lollipop();
    const auto out = run(g, 20000, 7);
    const double delta = out.distribution.bernstein_delta_at(0.99);
    CHECK(out.distribution.probs.size() == 2);
    CHECK(std::fabs(out.distribution.probs[0] - 0.5) < delta);
    CHECK(std::fabs(out.distribution.probs[1] - 0.5) < delta);
    CHECK(out.distribution.discard_fraction < 1e-3);
    double sum = 0.0;
    for (double p : out.distribution.probs) sum += p;
    CHECK(sum == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("dumbbell matches Bin(2, 1/2)", "[sampler]") {
    const auto g = nsl::make_dumbbell();
    const auto out = run(g, 20000, 11);
    const double delta = out.distribution.bernstein_delta_at(0.99);
    const auto ref = nsl::binomial_law(2);
    for (int s = 0; s <= 2; ++s)
        CHECK(std::fabs(out.distribution.probs[s] - ref[s]) < delta);
    CHECK(out.distribution.mean() == Catch::Approx(1.0).margin(0.05));
    CHECK(out.distribution.variance() == Catch::Approx(0.5).margin(0.05));
}

TEST_CASE("mandarin 3 is a point mass at 1", "[sampler]") {
    const auto g = nsl::make_mandarin(3);
    const auto out = run(g, 5000, 3);
    CHECK(out.distribution.probs[1] > 0.999);
    CHECK(out.distribution.probs[0] + out.distribution.probs[2] < 1e-3);
    CHECK(out.distribution.discard_fraction < 1e-3);
}

TEST_CASE("results are bit-identical across worker counts", "[sampler]") {
    const auto g = nsl::make_stower(2, 1);
    const auto a = run(g, 3000, 99, true, 1);
    const auto b = run(g, 3000, 99, true, 3);
    const auto c = run(g, 3000, 99, true, 8);
    REQUIRE(a.distribution.probs.size() == b.distribution.probs.size());
    for (std::size_t s = 0; s < a.distribution.probs.size(); ++s) {
        CHECK(a.distribution.probs[s] == b.distribution.probs[s]);
        CHECK(a.distribution.probs[s] == c.distribution.probs[s]);
    }
    CHECK((a.edge_tally - b.edge_tally).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.edge_tally - c.edge_tally).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.discards.gap == c.discards.gap);
    CHECK(a.discards.kernel == c.discards.kernel);
}

TEST_CASE("changing the seed changes the stream", "[sampler]") {
    const auto g = nsl::make_lollipop();
    const auto a = run(g, 500, 1);
    const auto b = run(g, 500, 2);
    CHECK(a.distribution.probs[0] != b.distribution.probs[0]);
}

TEST_CASE("weighted estimate is the exact convex combination of edge tallies", "[sampler]") {
    const auto g = nsl::make_mandarin(4); // no loops: c_e = 2 throughout
    const int E = g.edge_count();
    Eigen::VectorXd lengths(E);
    lengths << 1.0, 1.3, 0.7, 2.1;

    nsl::SamplerConfig cfg;
    cfg.samples = 2000;
    cfg.master_seed = 5;
    cfg.weights = lengths;
    cfg.per_edge = true;
    const auto out = nsl::run_sampler(g, nsl::build_scattering(g), cfg);

    // reconstruct P_l from the raw per-edge tallies on the same stream
    const Eigen::VectorXd numer = out.edge_tally.transpose() * lengths;
    const double mass = numer.sum();
    for (int s = 0; s <= g.betti(); ++s)
        CHECK(out.distribution.probs[s] == numer[s] / mass); // bitwise

    // and the c_e-weighted convex combination of normalized W_e agrees
    for (int s = 0; s <= g.betti(); ++s) {
        double acc = 0.0, norm = 0.0;
        for (int e = 0; e < E; ++e) {
            const double we = out.edges.by_edge.at(e).probs[s];
            acc += lengths[e] * out.edge_mass[e] * we;
            norm += lengths[e] * out.edge_mass[e];
        }
        CHECK(out.distribution.probs[s] == Catch::Approx(acc / norm).margin(1e-14));
    }
}

TEST_CASE("every sampled distribution is symmetric within Monte Carlo error", "[sampler]") {
    for (const auto& g : {nsl::make_mandarin(5), nsl::make_complete(4)}) {
        const auto out = run(g, 4000, 21);
        const int beta = g.betti();
        for (int s = 0; s <= beta / 2; ++s) {
            const double diff =
                std::fabs(out.distribution.probs[s] - out.distribution.probs[beta - s]);
            const double se = out.distribution.se_bin_difference(s, beta - s);
            CHECK(diff < 3.0 * se + 1e-9);
        }
    }
}

TEST_CASE("per-edge distributions of one orbit agree", "[sampler]") {
    const auto g = nsl::make_complete(4);
    nsl::SamplerConfig cfg;
    cfg.samples = 4000;
    cfg.master_seed = 13;
    cfg.all_edges = true;
    const auto out = nsl::run_sampler(g, nsl::build_scattering(g), cfg);
    REQUIRE(out.edges.tracked.size() == 6);
    const auto& w0 = out.edges.by_edge.at(0);
    const auto& w5 = out.edges.by_edge.at(5);
    const double tv = nsl::total_variation(w0.probs, w5.probs);
    const double delta = nsl::bernstein_delta(cfg.samples, 0.99);
    CHECK(tv < 2.0 * 2.0 * delta);
}

TEST_CASE("stower per-edge distributions give loop and tail representatives", "[sampler]") {
    const auto g = nsl::make_stower(3, 4);
    nsl::SamplerConfig cfg;
    cfg.samples = 1500;
    cfg.master_seed = 17;
    const auto edges = nsl::estimate_edge_distributions(g, nsl::build_scattering(g), cfg);
    REQUIRE(edges.tracked.size() == 2); // loops orbit + tails orbit
    CHECK(edges.c[edges.tracked[0]] == 1);
    CHECK(edges.c[edges.tracked[1]] == 2);
    // tail W_e must be symmetric about beta/2
    const auto& tail = edges.by_edge.at(edges.tracked[1]);
    for (int s = 0; s <= 1; ++s) {
        const double diff = std::fabs(tail.probs[s] - tail.probs[3 - s]);
        CHECK(diff < 3.0 * tail.se_bin_difference(s, 3 - s) + 1e-9);
    }
}

TEST_CASE("conjecture bounds on identical edge distributions collapse", "[sampler]") {
    nsl::SurplusDistribution d;
    d.probs = {0.25, 0.5, 0.25};
    d.n_samples = 1000;
    const auto cb = nsl::conjecture_bounds({d, d});
    CHECK(cb.epsilon == 0.0);
    CHECK(cb.var_min == cb.var_max);
    CHECK(cb.ks_upper == Catch::Approx(nsl::ks_to_gaussian(d)));
}

TEST_CASE("invalid configurations are rejected", "[sampler]") {
    const auto g = nsl::make_lollipop();
    const auto sm = nsl::build_scattering(g);
    nsl::SamplerConfig cfg;
    cfg.samples = 0;
    CHECK_THROWS_AS(nsl::run_sampler(g, sm, cfg), std::invalid_argument);
    cfg.samples = 10;
    cfg.weights = Eigen::VectorXd::Zero(2);
    CHECK_THROWS_AS(nsl::run_sampler(g, sm, cfg), std::invalid_argument);
    cfg.weights = Eigen::VectorXd::Ones(3);
    CHECK_THROWS_AS(nsl::run_sampler(g, sm, cfg), std::invalid_argument);
}
