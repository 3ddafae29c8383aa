#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "nsl/distribution.hpp"
#include "nsl/graph.hpp"
#include "nsl/rng.hpp"
#include "nsl/scattering.hpp"
#include "nsl/secular.hpp"

namespace nsl {

struct MetricGraph {
    Graph graph;
    Eigen::VectorXd lengths;

    double total_length() const { return lengths.sum(); }
    double loop_length() const {
        double t = 0.0;
        for (int e : graph.loops()) t += lengths[e];
        return t;
    }
};

// iid uniform lengths in [1, 2]: a.s. rationally independent, bounded mesh ratio
inline MetricGraph with_random_lengths(const Graph& g, std::uint64_t lengths_seed) {
    MetricGraph mg;
    mg.graph = g;
    mg.lengths.resize(g.edge_count());
    Rng rng = stream(lengths_seed, 0xBEEF);
    for (int e = 0; e < g.edge_count(); ++e) mg.lengths[e] = 1.0 + rng.next_unit();
    return mg;
}

struct ModeRecord {
    int n = 0;            // global ordinal, counting every eigenvalue
    double k = 0.0;       // square-root eigenvalue
    int multiplicity = 1; // dim ker(1 - U_{k l}) estimate
    bool generic = false;
    std::string nongeneric_reason; // constant | multiple | vertex_zero | numerical
    int zero_count = -1;           // phi_n, generic modes only
    int surplus = 0;               // sigma(n) = phi_n - (n - 1), generic only
    double min_vertex_value = 0.0; // relative to the eigenfunction sup norm
    double phase_gap = 0.0;        // gap between the root phase and the next eigenphase
};

struct SpectralSequence {
    std::vector<ModeRecord> modes;
    double k_max = 0.0;
    int beta = 0;
    double total_length = 0.0;
    double max_continuity_residual = 0.0;
    double max_kirchhoff_residual = 0.0;

    std::int64_t root_count_with_multiplicity() const {
        std::int64_t c = 0;
        for (const auto& m : modes)
            if (m.k > 0.0) ++c; // each record is one ordinal
        return c;
    }

    double weyl_residual() const {
        return std::fabs(static_cast<double>(root_count_with_multiplicity()) -
                         total_length * k_max / std::numbers::pi);
    }

    std::int64_t generic_count() const {
        std::int64_t c = 0;
        for (const auto& m : modes) c += m.generic;
        return c;
    }

    // empirical surplus distribution over generic modes
    SurplusDistribution distribution() const {
        SurplusDistribution d;
        d.probs.assign(beta + 1, 0.0);
        std::int64_t n = 0;
        for (const auto& m : modes) {
            if (!m.generic) continue;
            if (m.surplus < 0 || m.surplus > beta)
                throw std::runtime_error("oracle: surplus outside [0, beta]");
            d.probs[m.surplus] += 1.0;
            ++n;
        }
        if (n == 0) throw std::runtime_error("oracle: no generic modes");
        for (auto& p : d.probs) p /= static_cast<double>(n);
        d.n_samples = n;
        d.n_eigenpairs = n;
        // multinomial covariance, for error reporting only
        const int bins = beta + 1;
        d.sample_covariance.resize(bins, bins);
        for (int i = 0; i < bins; ++i)
            for (int j = 0; j < bins; ++j)
                d.sample_covariance(i, j) =
                    (i == j ? d.probs[i] : 0.0) - d.probs[i] * d.probs[j];
        return d;
    }
};

namespace oracdetail {

inline double principal_phase_sum(const Eigen::MatrixXcd& U) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(U, false);
    double sum = 0.0;
    for (int i = 0; i < U.rows(); ++i) sum += wrap_phase(std::arg(solver.eigenvalues()[i]));
    return sum;
}

struct SecularScan {
    const ScatteringMatrix* sm = nullptr;
    const MetricGraph* mg = nullptr;

    Eigen::MatrixXcd unitary(double k) const {
        return unitary_at(*sm, (k * mg->lengths).unaryExpr([](double t) { return wrap_phase(t); }));
    }

    double phase_sum(double k) const { return principal_phase_sum(unitary(k)); }

    // number of eigenphases of U_{k l} crossing 0 for k in (k1, k2]
    int wraps(double k1, double s1, double k2, double s2) const {
        const double total = 2.0 * mg->total_length() * (k2 - k1);
        const double w = (total - (s2 - s1)) / two_pi;
        const double r = std::round(w);
        if (std::fabs(w - r) > 0.05) return -1; // numerically ambiguous; caller refines
        return static_cast<int>(r);
    }
};

struct RawRoot {
    double k = 0.0;
    int multiplicity = 1;
};

// Bisects a bracket known to contain exactly `count` crossings down to width
// `width_tol`; recursion splits multi-crossing cells until isolated.
inline void isolate_roots(const SecularScan& scan, double a, double sa, double b, double sb,
                          int count, int depth, std::vector<RawRoot>& out) {
    constexpr int max_depth = 60;
    const double width_tol = 1e-12;
    if (count <= 0) return;
    if (b - a < width_tol || depth >= max_depth) {
        out.push_back({0.5 * (a + b), count});
        return;
    }
    double mid = 0.5 * (a + b);
    double smid = scan.phase_sum(mid);
    int left = scan.wraps(a, sa, mid, smid);
    if (left < 0) { // crossing-count ambiguity: retry off-center once
        mid = a + 0.5001 * (b - a);
        smid = scan.phase_sum(mid);
        left = scan.wraps(a, sa, mid, smid);
        if (left < 0) throw std::runtime_error("secular scan: phase-sum counting ambiguous");
    }
    left = std::clamp(left, 0, count);
    const int right = count - left;
    if (left > 0) isolate_roots(scan, a, sa, mid, smid, left, depth + 1, out);
    if (right > 0) isolate_roots(scan, mid, smid, b, sb, right, depth + 1, out);
}

} // namespace oracdetail

// All square-root eigenvalues in (0, k_max], found by counting eigenphase
// crossings of 1 on a grid fine enough for the monotone lifted phases and
// bisecting each crossing. Returns roots sorted ascending with multiplicity.
inline std::vector<oracdetail::RawRoot> find_roots(const MetricGraph& mg, double k_max,
                                                   int workers = 1) {
    if (auto viol = validate(mg.graph)) throw std::invalid_argument("find_roots: " + *viol);
    if (!(k_max > 0.0)) throw std::invalid_argument("find_roots: need k_max > 0");
    if (mg.lengths.minCoeff() <= 0.0) throw std::invalid_argument("find_roots: lengths must be positive");

    const ScatteringMatrix sm = build_scattering(mg.graph);
    oracdetail::SecularScan scan{&sm, &mg};
    const double L = mg.total_length();

    // the cube corner k = 0 carries beta + 1 spurious zero phases; start just
    // above it so they have detached from 0
    const double k_start = 1e-7 * std::numbers::pi / L;
    const double step = std::numbers::pi / (20.0 * L);
    const std::int64_t n_cells =
        static_cast<std::int64_t>(std::ceil((k_max - k_start) / step));

    std::vector<std::vector<oracdetail::RawRoot>> cell_roots(n_cells);
    std::atomic<std::int64_t> next_cell{0};

    auto worker = [&]() {
        std::int64_t have = -1;
        double sa = 0.0;
        for (;;) {
            const std::int64_t c = next_cell.fetch_add(1);
            if (c >= n_cells) break;
            const double a = k_start + step * static_cast<double>(c);
            const double b = std::min(k_max, a + step);
            if (have != c) sa = scan.phase_sum(a);
            const double sb = scan.phase_sum(b);
            int w = scan.wraps(a, sa, b, sb);
            if (w < 0) w = 2; // force refinement on ambiguity
            if (w > 0) oracdetail::isolate_roots(scan, a, sa, b, sb, w, 0, cell_roots[c]);
            have = c + 1;
            sa = sb;
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<oracdetail::RawRoot> roots;
    for (auto& cr : cell_roots)
        for (auto& r : cr) roots.push_back(r);
    std::sort(roots.begin(), roots.end(),
              [](const auto& x, const auto& y) { return x.k < y.k; });
    return roots;
}

namespace oracdetail {

struct Analysis {
    bool generic = false;
    std::string reason;
    int zero_count = -1;
    double min_vertex_value = 0.0;
    double continuity_residual = 0.0;
    double kirchhoff_residual = 0.0;
};

// Eigenfunction of the eigenvalue-1 vector of U_{k l}: on edge e with bonds
// j (u->v) and j+E, f_e(x) = a_j e^{ik(x-l_e)} + a_{j+E} e^{-ikx}. The global
// phase is fixed by the time-reversal involution a -> e^{ik l-hat} J conj(a),
// making f real; zeros are counted analytically from the cosine form.
inline Analysis analyze_root(const MetricGraph& mg, const ScatteringMatrix& sm, double k,
                             double tau_simple) {
    const Graph& g = mg.graph;
    const int E = g.edge_count();
    Analysis an;

    Eigen::VectorXd kappa =
        (k * mg.lengths).unaryExpr([](double t) { return wrap_phase(t); });
    const SecularSample s = decompose(unitary_at(sm, kappa), g, kappa);
    if (!s.valid) {
        an.reason = "numerical: " + s.failure;
        return an;
    }

    int root_idx = 0;
    double best = two_pi;
    for (int i = 0; i < s.size(); ++i) {
        const double d = circular_distance(s.theta[i], 0.0);
        if (d < best) {
            best = d;
            root_idx = i;
        }
    }
    double gap = two_pi;
    for (int i = 0; i < s.size(); ++i) {
        if (i == root_idx) continue;
        gap = std::min(gap, circular_distance(s.theta[i], s.theta[root_idx]));
    }
    if (gap <= tau_simple) {
        an.reason = "multiple";
        return an;
    }

    Eigen::VectorXcd a = s.vectors.col(root_idx);

    // time-reversal gauge: w = e^{ik l-hat} J conj(a) spans the same line
    Eigen::VectorXcd w(2 * E);
    for (int j = 0; j < E; ++j) {
        const std::complex<double> ph(std::cos(k * mg.lengths[j]), std::sin(k * mg.lengths[j]));
        w[j] = ph * std::conj(a[j + E]);
        w[j + E] = ph * std::conj(a[j]);
    }
    const std::complex<double> overlap = a.dot(w); // conj(a) . w
    const double half = 0.5 * std::arg(overlap);
    a *= std::complex<double>(std::cos(half), std::sin(half));
    for (int j = 0; j < E; ++j) {
        const std::complex<double> ph(std::cos(k * mg.lengths[j]), std::sin(k * mg.lengths[j]));
        w[j] = ph * std::conj(a[j + E]);
        w[j + E] = ph * std::conj(a[j]);
    }
    const double gauge_residual = (w - a).cwiseAbs().maxCoeff();

    // c_e: coefficient of e^{ikx} on edge e; f_e = 2 Re(c_e e^{ikx})
    Eigen::VectorXcd c(E);
    double sup_norm = 0.0;
    for (int e = 0; e < E; ++e) {
        const std::complex<double> ph(std::cos(-k * mg.lengths[e]), std::sin(-k * mg.lengths[e]));
        c[e] = ph * a[e];
        sup_norm = std::max(sup_norm, 2.0 * std::abs(c[e]));
    }
    if (sup_norm <= 0.0) {
        an.reason = "numerical: vanishing amplitude";
        return an;
    }
    if (gauge_residual > 1e-7 * sup_norm + 1e-9) {
        an.reason = "numerical: phase-fixing residual";
        return an;
    }

    // vertex values 2 A_v / deg v, continuity and Kirchhoff residuals
    const auto deg = g.degrees();
    Eigen::VectorXcd incoming = Eigen::VectorXcd::Zero(g.vertex_count);
    Eigen::VectorXcd outflow = Eigen::VectorXcd::Zero(g.vertex_count);
    for (int b = 0; b < 2 * E; ++b) {
        const int e = b % E;
        const std::complex<double> ab = a[b];
        incoming[g.bond_terminus(b)] += ab;
        // outgoing derivative at the bond origin is ik (c_bond - a_reversed)
        const std::complex<double> c_bond =
            a[b] * std::complex<double>(std::cos(-k * mg.lengths[e]), std::sin(-k * mg.lengths[e]));
        outflow[g.bond_origin(b)] += c_bond - a[g.reversed_bond(b)];
    }

    double min_vertex = std::numeric_limits<double>::max();
    double cont_res = 0.0, kirch_res = 0.0;
    for (int v = 0; v < g.vertex_count; ++v) {
        const std::complex<double> fv = 2.0 * incoming[v] / static_cast<double>(deg[v]);
        min_vertex = std::min(min_vertex, std::abs(fv));
        kirch_res = std::max(kirch_res, std::abs(outflow[v]));
    }
    for (int b = 0; b < 2 * E; ++b) {
        // endpoint value of the edge seen from the origin of bond b
        const int e = b % E;
        const std::complex<double> c_bond =
            a[b] * std::complex<double>(std::cos(-k * mg.lengths[e]), std::sin(-k * mg.lengths[e]));
        const std::complex<double> end_val = c_bond + a[g.reversed_bond(b)];
        const int v = g.bond_origin(b);
        const std::complex<double> fv = 2.0 * incoming[v] / static_cast<double>(deg[v]);
        cont_res = std::max(cont_res, std::abs(end_val - fv));
    }
    an.continuity_residual = cont_res / sup_norm;
    an.kirchhoff_residual = kirch_res / sup_norm;
    an.min_vertex_value = min_vertex / sup_norm;

    if (an.min_vertex_value < 1e-6) {
        an.reason = "vertex_zero";
        return an;
    }

    // analytic zero count: f_e = 2|c| cos(kx + psi), zeros strictly inside (0, l)
    int zeros = 0;
    for (int e = 0; e < E; ++e) {
        const double psi = std::arg(c[e]);
        const double alpha = (psi - std::numbers::pi / 2.0) / std::numbers::pi;
        const double omega = (k * mg.lengths[e] + psi - std::numbers::pi / 2.0) / std::numbers::pi;
        const long long m_min = static_cast<long long>(std::floor(alpha)) + 1;
        const long long m_max = static_cast<long long>(std::ceil(omega)) - 1;
        if (m_max >= m_min) zeros += static_cast<int>(m_max - m_min + 1);
    }
    an.generic = true;
    an.zero_count = zeros;
    return an;
}

} // namespace oracdetail

// k values only, as a SpectralSequence skeleton (ordinals and multiplicities,
// no eigenfunction analysis).
inline SpectralSequence find_eigenvalues(const MetricGraph& mg, double k_max, int workers = 1) {
    SpectralSequence seq;
    seq.beta = mg.graph.betti();
    seq.k_max = k_max;
    seq.total_length = mg.total_length();

    ModeRecord constant;
    constant.n = 1;
    constant.k = 0.0;
    constant.generic = false;
    constant.nongeneric_reason = "constant";
    constant.zero_count = 0;
    seq.modes.push_back(constant);

    int ordinal = 1;
    for (const auto& root : find_roots(mg, k_max, workers)) {
        for (int m = 0; m < root.multiplicity; ++m) {
            ModeRecord rec;
            rec.n = ++ordinal;
            rec.k = root.k;
            rec.multiplicity = root.multiplicity;
            rec.generic = false;
            if (root.multiplicity > 1) rec.nongeneric_reason = "multiple";
            seq.modes.push_back(rec);
        }
    }
    return seq;
}

// Full surplus sequence: locate roots up to k_max, analyze each simple root's
// eigenfunction, count zeros and assign sigma(n) = phi_n - (n - 1).
inline SpectralSequence surplus_sequence(const MetricGraph& mg, double k_max,
                                         double tau_simple = 1e-6, int workers = 1) {
    SpectralSequence seq = find_eigenvalues(mg, k_max, workers);
    const ScatteringMatrix sm = build_scattering(mg.graph);

    for (auto& rec : seq.modes) {
        if (rec.k == 0.0 || rec.multiplicity > 1) continue;
        auto an = oracdetail::analyze_root(mg, sm, rec.k, tau_simple);
        rec.min_vertex_value = an.min_vertex_value;
        seq.max_continuity_residual =
            std::max(seq.max_continuity_residual, an.continuity_residual);
        seq.max_kirchhoff_residual =
            std::max(seq.max_kirchhoff_residual, an.kirchhoff_residual);
        if (!an.generic) {
            rec.generic = false;
            rec.nongeneric_reason = an.reason;
            continue;
        }
        rec.generic = true;
        rec.zero_count = an.zero_count;
        rec.surplus = an.zero_count - (rec.n - 1);
    }
    return seq;
}

// Extends the scan window until at least `target_generic` generic modes are
// available. Returns the sequence truncated to the first such modes.
inline SpectralSequence surplus_sequence_modes(const MetricGraph& mg,
                                               std::int64_t target_generic,
                                               double tau_simple = 1e-6, int workers = 1) {
    const double L = mg.total_length();
    const double generic_fraction =
        std::max(0.05, 1.0 - mg.loop_length() / (2.0 * L));
    double k_max = std::numbers::pi *
                   (static_cast<double>(target_generic) / generic_fraction * 1.05 + 10.0) / L;
    for (int attempt = 0; attempt < 12; ++attempt) {
        SpectralSequence seq = surplus_sequence(mg, k_max, tau_simple, workers);
        std::int64_t count = 0;
        for (std::size_t i = 0; i < seq.modes.size(); ++i) {
            if (seq.modes[i].generic) ++count;
            if (count == target_generic) {
                seq.modes.resize(i + 1);
                return seq;
            }
        }
        k_max *= 1.25;
    }
    throw std::runtime_error("surplus_sequence_modes: scan budget exhausted");
}

struct CompareReport {
    std::vector<double> per_bin_delta;
    double total_variation = 0.0;
    double tolerance = 0.03;
    bool pass = false;
};

// Cross-check of the eigenfunction-counting distribution against the sampled
// one; this is the headline equivalence both routes must agree on.
inline CompareReport compare_distributions(const SurplusDistribution& oracle,
                                           const SurplusDistribution& sampled,
                                           double tolerance = 0.03) {
    if (oracle.beta() != sampled.beta())
        throw std::invalid_argument("compare: beta mismatch between distributions");
    CompareReport rep;
    rep.tolerance = tolerance;
    rep.per_bin_delta.resize(oracle.probs.size());
    for (std::size_t s = 0; s < oracle.probs.size(); ++s)
        rep.per_bin_delta[s] = oracle.probs[s] - sampled.probs[s];
    rep.total_variation = total_variation(oracle.probs, sampled.probs);
    rep.pass = rep.total_variation < tolerance;
    return rep;
}

} // namespace nsl
