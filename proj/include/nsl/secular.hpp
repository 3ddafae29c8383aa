#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "nsl/graph.hpp"
#include "nsl/scattering.hpp"

namespace nsl {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline double wrap_phase(double t) {
    t = std::fmod(t, two_pi);
    return t < 0 ? t + two_pi : t;
}

inline double circular_distance(double a, double b) {
    const double d = std::fabs(wrap_phase(a) - wrap_phase(b));
    return std::min(d, two_pi - d);
}

// Numerical tolerances of the secular pipeline. Phases closer than tau_deg
// collapse into one eigenspace; an eigenpair whose phase has a foreign phase
// within tau_gap is discarded; |lambda| <= tau_zero_rel * max|H| counts as
// kernel; the kernel must be separated from the rest by kernel_gap_ratio.
struct DiscardPolicy {
    double tau_deg = 1e-8;
    double tau_gap = 1e-6;
    double tau_zero_rel = 1e-7;
    double kernel_gap_ratio = 1e3;
};

// Eigendecomposition of U_kappa with the antisymmetric loop subspace split
// off exactly. Phases are sorted ascending in [0, 2pi); eigenvector columns
// are orthonormal, with degenerate clusters re-orthogonalized.
struct SecularSample {
    Eigen::VectorXd kappa;
    Eigen::VectorXd theta;
    Eigen::MatrixXcd vectors;
    std::vector<char> antisymmetric;
    std::vector<int> cluster_id;
    std::vector<double> foreign_gap; // circular distance to nearest phase of another cluster
    double min_phase_gap = 0.0;      // smallest gap between distinct eigenphases
    bool valid = false;
    std::string failure;

    int size() const { return static_cast<int>(theta.size()); }
};

namespace secdetail {

// maximal runs of consecutive sorted phases with circular gap <= tau_deg,
// merged across the 0/2pi wrap
inline std::vector<int> cluster_phases(const Eigen::VectorXd& theta, double tau_deg) {
    const int B = static_cast<int>(theta.size());
    std::vector<int> cid(B, 0);
    int next = 0;
    for (int i = 1; i < B; ++i) {
        if (theta[i] - theta[i - 1] > tau_deg) ++next;
        cid[i] = next;
    }
    if (B > 1 && next > 0 && (theta[0] + two_pi - theta[B - 1]) <= tau_deg) {
        const int last = cid[B - 1];
        for (int i = B - 1; i >= 0 && cid[i] == last; --i) cid[i] = 0;
    }
    // renumber to consecutive ids in first-appearance order
    std::vector<int> remap(next + 1, -1);
    int fresh = 0;
    for (int i = 0; i < B; ++i) {
        if (remap[cid[i]] < 0) remap[cid[i]] = fresh++;
        cid[i] = remap[cid[i]];
    }
    return cid;
}

} // namespace secdetail

// Full eigendecomposition of U at a torus point. Residual and orthonormality
// failures mark the sample invalid for the caller to discard and count.
inline SecularSample decompose(const Eigen::MatrixXcd& U, const Graph& g,
                               const Eigen::VectorXd& kappa,
                               const DiscardPolicy& pol = {}) {
    SecularSample s;
    s.kappa = kappa;
    const int B = static_cast<int>(U.rows());
    const int E = B / 2;

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(U, true);
    if (solver.info() != Eigen::Success) {
        s.failure = "eigensolver did not converge";
        return s;
    }

    std::vector<int> order(B);
    std::vector<double> phase(B);
    for (int i = 0; i < B; ++i) {
        order[i] = i;
        phase[i] = wrap_phase(std::arg(solver.eigenvalues()[i]));
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) { return phase[a] < phase[b]; });

    s.theta.resize(B);
    s.vectors.resize(B, B);
    for (int i = 0; i < B; ++i) {
        s.theta[i] = phase[order[i]];
        s.vectors.col(i) = solver.eigenvectors().col(order[i]).normalized();
    }

    s.cluster_id = secdetail::cluster_phases(s.theta, pol.tau_deg);
    const int n_clusters = 1 + *std::max_element(s.cluster_id.begin(), s.cluster_id.end());
    std::vector<std::vector<int>> members(n_clusters);
    for (int i = 0; i < B; ++i) members[s.cluster_id[i]].push_back(i);

    // exact antisymmetric loop vectors, matched to clusters by phase
    const auto loop_edges = g.loops();
    s.antisymmetric.assign(B, 0);
    std::vector<std::vector<int>> cluster_loops(n_clusters);
    for (int e : loop_edges) {
        const double le_phase = wrap_phase(kappa[e]);
        int home = -1;
        for (int i = 0; i < B && home < 0; ++i)
            if (circular_distance(s.theta[i], le_phase) <= pol.tau_deg) home = s.cluster_id[i];
        if (home < 0) {
            s.failure = "loop eigenphase not found in spectrum";
            return s;
        }
        cluster_loops[home].push_back(e);
    }

    for (int c = 0; c < n_clusters; ++c) {
        const auto& mem = members[c];
        const auto& lps = cluster_loops[c];
        if (lps.empty()) continue;
        if (static_cast<int>(lps.size()) > static_cast<int>(mem.size())) {
            s.failure = "antisymmetric multiplicity exceeds cluster size";
            return s;
        }
        Eigen::MatrixXcd L(B, lps.size());
        L.setZero();
        for (std::size_t i = 0; i < lps.size(); ++i) {
            L(lps[i], static_cast<int>(i)) = std::numbers::sqrt2 / 2.0;
            L(lps[i] + E, static_cast<int>(i)) = -std::numbers::sqrt2 / 2.0;
        }
        const int m = static_cast<int>(mem.size());
        const int r = m - static_cast<int>(lps.size());
        if (r == 0) {
            for (int i = 0; i < m; ++i) {
                s.vectors.col(mem[i]) = L.col(i);
                s.antisymmetric[mem[i]] = 1;
            }
            continue;
        }
        Eigen::MatrixXcd C(B, m);
        for (int i = 0; i < m; ++i) C.col(i) = s.vectors.col(mem[i]);
        // split the cluster eigenspace exactly into V_as and its complement
        Eigen::MatrixXcd P = C - L * (L.adjoint() * C);
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(P, Eigen::ComputeThinU);
        for (std::size_t i = 0; i < lps.size(); ++i) {
            s.vectors.col(mem[i]) = L.col(i);
            s.antisymmetric[mem[i]] = 1;
        }
        for (int i = 0; i < r; ++i)
            s.vectors.col(mem[lps.size() + i]) = svd.matrixU().col(i);
    }

    // re-orthonormalize purely symmetric degenerate clusters as well
    for (int c = 0; c < n_clusters; ++c) {
        const auto& mem = members[c];
        if (mem.size() < 2 || !cluster_loops[c].empty()) continue;
        Eigen::MatrixXcd C(B, mem.size());
        for (std::size_t i = 0; i < mem.size(); ++i) C.col(i) = s.vectors.col(mem[i]);
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(C);
        Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(B, mem.size());
        for (std::size_t i = 0; i < mem.size(); ++i) s.vectors.col(mem[i]) = Q.col(i);
    }

    // secondary antisymmetric detection by projection, per the stated policy
    if (!loop_edges.empty()) {
        int flagged = 0;
        for (int i = 0; i < B; ++i) {
            if (!s.antisymmetric[i]) {
                double proj = 0.0;
                for (int e : loop_edges) {
                    const std::complex<double> amp =
                        (s.vectors(e, i) - s.vectors(e + E, i)) * (std::numbers::sqrt2 / 2.0);
                    proj += std::norm(amp);
                }
                if (proj > 1.0 - 1e-8) s.antisymmetric[i] = 1;
            }
            flagged += s.antisymmetric[i];
        }
        if (flagged != static_cast<int>(loop_edges.size())) {
            s.failure = "antisymmetric flag count != number of loops";
            return s;
        }
    }

    // residual and orthonormality guards
    Eigen::VectorXcd eig(B);
    for (int i = 0; i < B; ++i)
        eig[i] = std::complex<double>(std::cos(s.theta[i]), std::sin(s.theta[i]));
    const Eigen::MatrixXcd R = U * s.vectors - s.vectors * eig.asDiagonal();
    if (R.colwise().norm().maxCoeff() > 1e-10) {
        s.failure = "eigenpair residual above 1e-10";
        return s;
    }
    const Eigen::MatrixXcd G =
        s.vectors.adjoint() * s.vectors - Eigen::MatrixXcd::Identity(B, B);
    if (G.cwiseAbs().maxCoeff() > 1e-10) {
        s.failure = "eigenbasis not orthonormal to 1e-10";
        return s;
    }

    // gaps between distinct eigenphases
    s.min_phase_gap = two_pi;
    s.foreign_gap.assign(B, two_pi);
    if (n_clusters > 1) {
        for (int i = 0; i < B; ++i) {
            const int prev = (i + B - 1) % B;
            const int next = (i + 1) % B;
            double gap = two_pi;
            if (s.cluster_id[prev] != s.cluster_id[i])
                gap = std::min(gap, circular_distance(s.theta[prev], s.theta[i]));
            if (s.cluster_id[next] != s.cluster_id[i])
                gap = std::min(gap, circular_distance(s.theta[next], s.theta[i]));
            s.foreign_gap[i] = gap;
            s.min_phase_gap = std::min(s.min_phase_gap, gap);
        }
    } else {
        s.min_phase_gap = 0.0;
        std::fill(s.foreign_gap.begin(), s.foreign_gap.end(), 0.0);
    }

    s.valid = true;
    return s;
}

inline SecularSample decompose_at(const ScatteringMatrix& sm, const Graph& g,
                                  const Eigen::VectorXd& kappa,
                                  const DiscardPolicy& pol = {}) {
    return decompose(unitary_at(sm, kappa), g, kappa, pol);
}

} // namespace nsl
