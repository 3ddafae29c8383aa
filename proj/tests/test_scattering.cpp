#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "nsl/generate.hpp"
#include "nsl/rng.hpp"
#include "nsl/scattering.hpp"
#include "nsl/secular.hpp"

namespace {

Eigen::VectorXd random_kappa(int E, std::uint64_t seed) {
    nsl::Rng rng = nsl::stream(seed, 0);
    Eigen::VectorXd kappa(E);
    for (int e = 0; e < E; ++e) kappa[e] = rng.next_unit() * nsl::two_pi;
    return kappa;
}

} // namespace

TEST_CASE("3-star scattering entries", "[scattering]") {
    nsl::Graph star;
    star.vertex_count = 4;
    star.edges = {{0, 1}, {0, 2}, {0, 3}};
    const auto sm = nsl::build_scattering(star);
    const int E = 3;

    // bond 0 starts at the center; its reversal is bond 3 = 0+E
    CHECK(sm.S(0, 0 + E) == Catch::Approx(2.0 / 3.0 - 1.0)); // back-reflection at center
    CHECK(sm.S(0, 1 + E) == Catch::Approx(2.0 / 3.0));       // transmission at center
    CHECK(sm.S(0, 2 + E) == Catch::Approx(2.0 / 3.0));
    // leaf vertex of edge 0 has degree 1: total reflection
    CHECK(sm.S(0 + E, 0) == Catch::Approx(1.0));
    CHECK(sm.S(0 + E, 1) == 0.0);
}

TEST_CASE("S is orthogonal and satisfies JSJ = S^T on every family", "[scattering]") {
    const auto graphs = {nsl::make_complete(5),  nsl::make_ladder(4),   nsl::make_lattice(3),
                         nsl::make_mandarin(4),  nsl::make_stower(3, 4), nsl::make_dumbbell(),
                         nsl::make_lollipop(),   nsl::make_flower(3),
                         nsl::make_regular(5, 8, 3), nsl::make_erdos_renyi(8, 0.7, 5)};
    for (const auto& g : graphs) {
        const auto sm = nsl::build_scattering(g);
        const int B = 2 * g.edge_count();
        const double orth =
            (sm.S.transpose() * sm.S - Eigen::MatrixXd::Identity(B, B)).cwiseAbs().maxCoeff();
        CHECK(orth < 1e-12);
        const double tr = (sm.J * sm.S * sm.J - sm.S.transpose()).cwiseAbs().maxCoeff();
        CHECK(tr < 1e-12);
        // sparsity: S_{j,i} != 0 only when bond i terminates at bond j's origin
        for (int j = 0; j < B; ++j)
            for (int i = 0; i < B; ++i)
                if (g.bond_terminus(i) != g.bond_origin(j)) CHECK(sm.S(j, i) == 0.0);
    }
}

TEST_CASE("unitary_at reduces to S at kappa = 0 and is unitary", "[scattering]") {
    const auto g = nsl::make_dumbbell();
    const auto sm = nsl::build_scattering(g);
    const int E = g.edge_count(), B = 2 * E;

    const auto U0 = nsl::unitary_at(sm, Eigen::VectorXd::Zero(E));
    CHECK((U0 - sm.S.cast<std::complex<double>>()).cwiseAbs().maxCoeff() < 1e-15);

    const auto kappa = random_kappa(E, 11);
    const auto U = nsl::unitary_at(sm, kappa);
    const double uni =
        (U.adjoint() * U - Eigen::MatrixXcd::Identity(B, B)).cwiseAbs().maxCoeff();
    CHECK(uni < 1e-12);
}

TEST_CASE("det U_kappa = e^{2i sum kappa} det S", "[scattering]") {
    const auto g = nsl::make_mandarin(3);
    const auto sm = nsl::build_scattering(g);
    const int E = g.edge_count();
    const auto kappa = random_kappa(E, 23);
    const std::complex<double> detU = nsl::unitary_at(sm, kappa).determinant();
    const double detS = sm.S.determinant();
    const double phase = 2.0 * kappa.sum();
    const std::complex<double> expected =
        detS * std::complex<double>(std::cos(phase), std::sin(phase));
    CHECK(std::abs(detU - expected) < 1e-10);
}
