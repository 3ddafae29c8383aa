#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <thread>
#include <vector>

#include "nsl/distribution.hpp"
#include "nsl/graph.hpp"
#include "nsl/hessian.hpp"
#include "nsl/orbits.hpp"
#include "nsl/rng.hpp"
#include "nsl/scattering.hpp"
#include "nsl/secular.hpp"

namespace nsl {

struct SamplerConfig {
    std::int64_t samples = 0;
    std::uint64_t master_seed = 0;
    Eigen::VectorXd weights; // size E, or empty for uniform (all ones)
    bool per_edge = false;   // estimate W_e for one representative per orbit
    bool all_edges = false;  // estimate W_e for every edge
    DiscardPolicy policy;
    int workers = 1;
};

struct EdgeDistributionSet {
    EdgeOrbitPartition orbits;
    std::vector<int> tracked;                  // edges with an estimated W_e
    std::map<int, SurplusDistribution> by_edge;
    std::vector<int> c;                        // c_e: 1 for loops, 2 otherwise
};

struct DiscardStats {
    std::int64_t gap = 0;         // foreign phase within tau_gap
    std::int64_t hermiticity = 0; // complex assembly residual too large
    std::int64_t kernel = 0;      // kernel dimension/gap anomaly
    std::int64_t failed_samples = 0;

    std::int64_t eigenpairs(std::int64_t per_sample) const {
        return gap + hermiticity + kernel + failed_samples * per_sample;
    }
};

struct SamplerOutput {
    SurplusDistribution distribution; // the length-weighted estimate
    Eigen::MatrixXd edge_tally;       // E x (beta+1) raw accepted tallies
    Eigen::VectorXd edge_mass;        // accepted mass per edge
    EdgeDistributionSet edges;        // filled in per-edge mode
    DiscardStats discards;
};

struct ConjectureBounds {
    double ks_upper = 0.0;
    double var_min = 0.0;
    double var_max = 0.0;
    double epsilon = 0.0;
};

// max_e d_KS(omega_e, N(omega_e)) + epsilon with epsilon from the variance
// spread; the inputs are one distribution per edge orbit.
inline ConjectureBounds conjecture_bounds(const std::vector<SurplusDistribution>& reps) {
    if (reps.empty()) throw std::invalid_argument("conjecture_bounds: no edge distributions");
    ConjectureBounds out;
    out.var_min = out.var_max = reps.front().variance();
    double ks_max = 0.0;
    for (const auto& d : reps) {
        const double v = d.variance();
        if (!(v > 0.0)) throw std::invalid_argument("conjecture_bounds: degenerate variance");
        out.var_min = std::min(out.var_min, v);
        out.var_max = std::max(out.var_max, v);
        ks_max = std::max(ks_max, ks_to_gaussian(d));
    }
    out.epsilon = std::sqrt(out.var_max / out.var_min) - 1.0;
    out.ks_upper = ks_max + out.epsilon;
    return out;
}

namespace samdetail {

struct BlockPartial {
    Eigen::MatrixXd tally;  // E x bins
    Eigen::VectorXd agg1;   // sum of per-sample normalized bin vectors
    Eigen::MatrixXd agg2;   // sum of their outer products
    std::vector<Eigen::VectorXd> edge1;
    std::vector<Eigen::MatrixXd> edge2;
    DiscardStats disc;
    bool touched = false;

    void init(int E, int bins, int tracked) {
        tally = Eigen::MatrixXd::Zero(E, bins);
        agg1 = Eigen::VectorXd::Zero(bins);
        agg2 = Eigen::MatrixXd::Zero(bins, bins);
        edge1.assign(tracked, Eigen::VectorXd::Zero(bins));
        edge2.assign(tracked, Eigen::MatrixXd::Zero(bins, bins));
        touched = true;
    }
};

// order-independent reduction: blocks merged in index order, one Kahan
// accumulator per output cell
class KahanMatrix {
  public:
    KahanMatrix(Eigen::Index r, Eigen::Index c)
        : sum_(Eigen::MatrixXd::Zero(r, c)), comp_(Eigen::MatrixXd::Zero(r, c)) {}

    void add(const Eigen::MatrixXd& x) {
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            for (Eigen::Index i = 0; i < x.rows(); ++i) {
                const double y = x(i, j) - comp_(i, j);
                const double t = sum_(i, j) + y;
                comp_(i, j) = (t - sum_(i, j)) - y;
                sum_(i, j) = t;
            }
    }

    const Eigen::MatrixXd& value() const { return sum_; }

  private:
    Eigen::MatrixXd sum_, comp_;
};

inline Eigen::MatrixXd covariance_from_moments(const Eigen::VectorXd& m1,
                                               const Eigen::MatrixXd& m2, std::int64_t n) {
    if (n < 2) return Eigen::MatrixXd::Zero(m1.size(), m1.size());
    const Eigen::VectorXd mean = m1 / static_cast<double>(n);
    Eigen::MatrixXd cov = m2 / static_cast<double>(n) - mean * mean.transpose();
    return cov;
}

} // namespace samdetail

// Monte Carlo estimator of the nodal-surplus torus integrals. One stream of
// kappa samples feeds the length-weighted distribution and every requested
// per-edge distribution simultaneously; the weighted estimate is derived from
// the per-edge tallies, which realizes the convex decomposition identically.
// Results are bit-identical for fixed (master_seed, samples) regardless of
// the worker count.
inline SamplerOutput run_sampler(const Graph& g, const ScatteringMatrix& sm,
                                 const SamplerConfig& cfg) {
    if (auto viol = validate(g)) throw std::invalid_argument("run_sampler: " + *viol);
    if (cfg.samples < 1) throw std::invalid_argument("run_sampler: need samples >= 1");
    if (cfg.workers < 1) throw std::invalid_argument("run_sampler: need workers >= 1");

    const int E = g.edge_count();
    const int B = 2 * E;
    const int beta = g.betti();
    const int bins = beta + 1;

    Eigen::VectorXd weights = cfg.weights;
    if (weights.size() == 0) weights = Eigen::VectorXd::Ones(E);
    if (weights.size() != E)
        throw std::invalid_argument("run_sampler: weights length must equal E");
    if (weights.minCoeff() < 0.0 || weights.maxCoeff() <= 0.0)
        throw std::invalid_argument("run_sampler: weights must be non-negative, not all zero");

    std::vector<int> c_edge(E, 2);
    for (int e : g.loops()) c_edge[e] = 1;
    const int n_loops = static_cast<int>(g.loops().size());
    const int sym_per_sample = B - n_loops;

    // expected accepted mass per sample of the weighted aggregate
    double mass_expected = 0.0;
    for (int e = 0; e < E; ++e) mass_expected += weights[e] * c_edge[e] / 2.0;

    EdgeDistributionSet edges;
    if (cfg.per_edge || cfg.all_edges) {
        edges.orbits = edge_orbits(g);
        edges.c = c_edge;
        if (cfg.all_edges) {
            edges.tracked.resize(E);
            std::iota(edges.tracked.begin(), edges.tracked.end(), 0);
        } else {
            for (const auto& orbit : edges.orbits.orbits) edges.tracked.push_back(orbit.front());
        }
    }
    const int n_tracked = static_cast<int>(edges.tracked.size());

    constexpr std::int64_t block_size = 256;
    const std::int64_t n_blocks = (cfg.samples + block_size - 1) / block_size;
    std::vector<samdetail::BlockPartial> blocks(n_blocks);
    std::atomic<std::int64_t> next_block{0};

    auto worker = [&]() {
        Eigen::VectorXd kappa(E);
        Eigen::MatrixXd raw(E, bins);
        Eigen::VectorXd agg(bins);
        for (;;) {
            const std::int64_t b = next_block.fetch_add(1);
            if (b >= n_blocks) break;
            auto& part = blocks[b];
            part.init(E, bins, n_tracked);
            const std::int64_t lo = b * block_size;
            const std::int64_t hi = std::min(cfg.samples, lo + block_size);
            for (std::int64_t i = lo; i < hi; ++i) {
                Rng rng = stream(cfg.master_seed, static_cast<std::uint64_t>(i));
                for (int e = 0; e < E; ++e) kappa[e] = rng.next_unit() * two_pi;
                const SecularSample sample = decompose_at(sm, g, kappa, cfg.policy);
                if (!sample.valid) {
                    part.disc.failed_samples += 1;
                    continue;
                }
                raw.setZero();
                for (int n = 0; n < B; ++n) {
                    if (sample.antisymmetric[n]) continue;
                    if (sample.foreign_gap[n] <= cfg.policy.tau_gap) {
                        part.disc.gap += 1;
                        continue;
                    }
                    const HessianSurrogate h = hessian(sample, n, beta, cfg.policy);
                    if (h.hermiticity_residual > 1e-8) {
                        part.disc.hermiticity += 1;
                        continue;
                    }
                    const int s = surplus_index(h);
                    if (!h.kernel_gap_ok || s > beta) {
                        part.disc.kernel += 1;
                        continue;
                    }
                    for (int e = 0; e < E; ++e)
                        raw(e, s) +=
                            0.5 * (std::norm(sample.vectors(e, n)) +
                                   std::norm(sample.vectors(e + E, n)));
                }
                part.tally += raw;
                agg.noalias() = raw.transpose() * weights / mass_expected;
                part.agg1 += agg;
                part.agg2.noalias() += agg * agg.transpose();
                for (int t = 0; t < n_tracked; ++t) {
                    const int e = edges.tracked[t];
                    const Eigen::VectorXd q = raw.row(e).transpose() / (c_edge[e] / 2.0);
                    part.edge1[t] += q;
                    part.edge2[t].noalias() += q * q.transpose();
                }
            }
        }
    };

    if (cfg.workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < cfg.workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // deterministic merge in block order
    samdetail::KahanMatrix tally(E, bins), agg1(bins, 1), agg2(bins, bins);
    std::vector<samdetail::KahanMatrix> e1(n_tracked, samdetail::KahanMatrix(bins, 1));
    std::vector<samdetail::KahanMatrix> e2(n_tracked, samdetail::KahanMatrix(bins, bins));
    DiscardStats disc;
    for (const auto& part : blocks) {
        if (!part.touched) continue;
        tally.add(part.tally);
        agg1.add(part.agg1);
        agg2.add(part.agg2);
        for (int t = 0; t < n_tracked; ++t) {
            e1[t].add(part.edge1[t]);
            e2[t].add(part.edge2[t]);
        }
        disc.gap += part.disc.gap;
        disc.hermiticity += part.disc.hermiticity;
        disc.kernel += part.disc.kernel;
        disc.failed_samples += part.disc.failed_samples;
    }

    SamplerOutput out;
    out.edge_tally = tally.value();
    out.edge_mass = out.edge_tally.rowwise().sum();
    out.discards = disc;

    const std::int64_t discarded = disc.eigenpairs(sym_per_sample);
    const std::int64_t total_slots = cfg.samples * sym_per_sample;

    const Eigen::VectorXd weighted_tally = out.edge_tally.transpose() * weights;
    const double weighted_mass = weighted_tally.sum();
    if (!(weighted_mass > 0.0))
        throw std::runtime_error("run_sampler: all samples discarded; thresholds pathological");

    auto finalize = [&](const Eigen::VectorXd& bins_raw, double mass,
                        const Eigen::VectorXd& m1, const Eigen::MatrixXd& m2) {
        SurplusDistribution d;
        d.probs.resize(bins);
        for (int s = 0; s < bins; ++s) d.probs[s] = bins_raw[s] / mass;
        d.n_samples = cfg.samples;
        d.n_eigenpairs = total_slots - discarded;
        d.n_discarded = discarded;
        d.discard_fraction = static_cast<double>(discarded) / static_cast<double>(total_slots);
        d.sample_covariance = samdetail::covariance_from_moments(m1, m2, cfg.samples);
        return d;
    };

    out.distribution = finalize(weighted_tally, weighted_mass,
                                agg1.value().col(0), agg2.value());
    for (int t = 0; t < n_tracked; ++t) {
        const int e = edges.tracked[t];
        out.edges.by_edge[e] = finalize(out.edge_tally.row(e).transpose(), out.edge_mass[e],
                                        e1[t].value().col(0), e2[t].value());
    }
    if (cfg.per_edge || cfg.all_edges) {
        out.edges.orbits = std::move(edges.orbits);
        out.edges.tracked = std::move(edges.tracked);
        out.edges.c = std::move(edges.c);
    }
    return out;
}

inline SurplusDistribution estimate_distribution(const Graph& g, const ScatteringMatrix& sm,
                                                 const SamplerConfig& cfg) {
    return run_sampler(g, sm, cfg).distribution;
}

inline EdgeDistributionSet estimate_edge_distributions(const Graph& g, const ScatteringMatrix& sm,
                                                       SamplerConfig cfg) {
    if (!cfg.all_edges) cfg.per_edge = true;
    SamplerOutput out = run_sampler(g, sm, cfg);
    return std::move(out.edges);
}

} // namespace nsl
