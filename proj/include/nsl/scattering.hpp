#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

#include "nsl/graph.hpp"

namespace nsl {

// Bond scattering data of a standard (Neumann-Kirchhoff) graph.
// S is 2E x 2E real orthogonal; J is the bond-reversal permutation.
// S_{j,i} is nonzero only when bond i terminates where bond j originates:
// 2/deg v off the back-scattering entry, 2/deg v - 1 on it.
struct ScatteringMatrix {
    Eigen::MatrixXd S;
    Eigen::MatrixXd J;
};

inline ScatteringMatrix build_scattering(const Graph& g) {
    if (auto viol = validate(g)) throw std::invalid_argument("build_scattering: " + *viol);
    const int E = g.edge_count();
    const int B = 2 * E;
    const auto deg = g.degrees();

    ScatteringMatrix sm;
    sm.S = Eigen::MatrixXd::Zero(B, B);
    sm.J = Eigen::MatrixXd::Zero(B, B);
    for (int j = 0; j < B; ++j) sm.J(j, g.reversed_bond(j)) = 1.0;

    for (int j = 0; j < B; ++j) {
        const int v = g.bond_origin(j);
        for (int i = 0; i < B; ++i) {
            if (g.bond_terminus(i) != v) continue;
            sm.S(j, i) = 2.0 / deg[v] - (i == g.reversed_bond(j) ? 1.0 : 0.0);
        }
    }
    return sm;
}

// U_kappa = e^{i kappa-hat} S with the kappa diagonal repeated over both bond
// copies of every edge.
inline Eigen::MatrixXcd unitary_at(const ScatteringMatrix& sm, const Eigen::VectorXd& kappa) {
    const int B = static_cast<int>(sm.S.rows());
    const int E = B / 2;
    if (kappa.size() != E) throw std::invalid_argument("unitary_at: kappa must have E entries");
    Eigen::VectorXcd phase(B);
    for (int e = 0; e < E; ++e) {
        const std::complex<double> z(std::cos(kappa[e]), std::sin(kappa[e]));
        phase[e] = z;
        phase[e + E] = z;
    }
    return phase.asDiagonal() * sm.S;
}

} // namespace nsl
