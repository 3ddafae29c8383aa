#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "nsl/secular.hpp"

namespace nsl {

// Real symmetric E x E eigenvalue-stability matrix of one eigenpair, with its
// inertia split by the relative zero threshold.
struct HessianSurrogate {
    Eigen::MatrixXd H;
    Eigen::VectorXd eigenvalues;
    int positive_count = 0;
    int negative_count = 0;
    int near_zero_count = 0;
    double hermiticity_residual = 0.0;
    bool kernel_gap_ok = true;
};

struct InertiaCounts {
    int positive = 0;
    int negative = 0;
    int near_zero = 0;
};

inline InertiaCounts classify_inertia(const Eigen::VectorXd& eigenvalues, double tau_zero) {
    InertiaCounts c;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        const double lam = eigenvalues[i];
        if (std::fabs(lam) <= tau_zero)
            ++c.near_zero;
        else if (lam > 0)
            ++c.positive;
        else
            ++c.negative;
    }
    return c;
}

// g(e^{-i theta_n} U) as the cot-weighted spectral sum over eigenvectors whose
// phase differs from theta_n by more than tau_deg. The kernel eigenspace
// (phases within tau_deg of theta_n, including a_n itself) is excluded, which
// is the Moore-Penrose convention of the defining formula.
inline Eigen::MatrixXcd g_apply(const SecularSample& s, int n, double tau_deg = 1e-8) {
    const int B = s.size();
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(B, B);
    int kernel_dim = 0;
    for (int m = 0; m < B; ++m) {
        if (circular_distance(s.theta[m], s.theta[n]) <= tau_deg) {
            ++kernel_dim;
            continue;
        }
        const double w = 1.0 / std::tan((s.theta[n] - s.theta[m]) / 2.0);
        G.noalias() += w * (s.vectors.col(m) * s.vectors.col(m).adjoint());
    }
    (void)kernel_dim;
    return G;
}

// H_n without forming g explicitly: H = C W C^* where column m of C is the
// Z-sliced overlap c_m[j] = conj(a_n[j]) a_m[j] - conj(a_n[j+E]) a_m[j+E]
// and W holds the cot weights. The complex assembly is Hermitian and real up
// to roundoff; the real part is taken after recording the residual.
inline HessianSurrogate hessian(const SecularSample& s, int n, int beta,
                                const DiscardPolicy& pol = {}) {
    const int B = s.size();
    const int E = B / 2;

    Eigen::VectorXcd an_top = s.vectors.col(n).head(E).conjugate();
    Eigen::VectorXcd an_bot = s.vectors.col(n).tail(E).conjugate();

    Eigen::MatrixXcd C(E, B);
    Eigen::VectorXd w(B);
    int used = 0;
    for (int m = 0; m < B; ++m) {
        if (s.cluster_id[m] == s.cluster_id[n]) continue;
        C.col(used) = an_top.cwiseProduct(s.vectors.col(m).head(E)) -
                      an_bot.cwiseProduct(s.vectors.col(m).tail(E));
        w[used] = 1.0 / std::tan((s.theta[n] - s.theta[m]) / 2.0);
        ++used;
    }
    Eigen::MatrixXcd Hc =
        C.leftCols(used) * w.head(used).asDiagonal() * C.leftCols(used).adjoint();

    HessianSurrogate out;
    const double scale = std::max(1.0, Hc.cwiseAbs().maxCoeff());
    out.hermiticity_residual =
        std::max((Hc - Hc.adjoint()).cwiseAbs().maxCoeff() / 2.0, Hc.imag().cwiseAbs().maxCoeff()) /
        scale;
    out.H = 0.5 * (Hc.real() + Hc.real().transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.H, Eigen::EigenvaluesOnly);
    out.eigenvalues = es.eigenvalues();

    // the unit floor keeps the classification sane when H vanishes identically
    // (beta = 0, where the kernel is everything and max|H| is pure roundoff)
    const double tau_zero = pol.tau_zero_rel * std::max(out.H.cwiseAbs().maxCoeff(), 1.0);
    const InertiaCounts counts = classify_inertia(out.eigenvalues, tau_zero);
    out.positive_count = counts.positive;
    out.negative_count = counts.negative;
    out.near_zero_count = counts.near_zero;

    // generic points carry a kernel of dimension exactly E - beta, separated
    // from the rest of the spectrum by a wide gap
    const int kernel_expected = E - beta;
    if (out.near_zero_count != kernel_expected) {
        out.kernel_gap_ok = false;
    } else if (kernel_expected > 0 && kernel_expected < E) {
        std::vector<double> mags(E);
        for (int i = 0; i < E; ++i) mags[i] = std::fabs(out.eigenvalues[i]);
        std::sort(mags.begin(), mags.end());
        const double lo = mags[kernel_expected - 1];
        const double hi = mags[kernel_expected];
        if (hi < pol.kernel_gap_ratio * lo) out.kernel_gap_ok = false;
    }
    return out;
}

// nodal surplus of the eigenpair: the number of strictly positive eigenvalues
inline int surplus_index(const HessianSurrogate& h) { return h.positive_count; }

// a_n^* L a_n / denominator with L = diag(l, l). The denominator defaults to
// the loop-aware partial trace 2L - L_loops; pass tr L explicitly for the
// no-loop normalization (they coincide when the graph has no loops).
inline double edge_weight(const SecularSample& s, int n, const Eigen::VectorXd& weights,
                          const Graph& g, double denominator = -1.0) {
    const int E = static_cast<int>(weights.size());
    if (weights.size() == 0 || weights.maxCoeff() <= 0.0 || weights.minCoeff() < 0.0)
        throw std::invalid_argument("edge_weight: weights must be non-negative and not all zero");
    if (denominator <= 0.0) {
        double total = 2.0 * weights.sum();
        for (int e : g.loops()) total -= weights[e];
        denominator = total;
    }
    double num = 0.0;
    for (int e = 0; e < E; ++e)
        num += weights[e] * (std::norm(s.vectors(e, n)) + std::norm(s.vectors(e + E, n)));
    return num / denominator;
}

} // namespace nsl
