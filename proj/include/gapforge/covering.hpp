#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gapforge/concentration.hpp"
#include "gapforge/maynard.hpp"
#include "gapforge/rng.hpp"

namespace gapforge {

// A random finite subset of the vertex set. `sample_within` draws the edge
// conditioned on lying inside the given survivor set; that conditioning is
// what turns plain unions into the semi-random covering schedule.
class EdgeSampler {
public:
    virtual ~EdgeSampler() = default;
    virtual std::vector<uint32_t> sample(SplitMix64& rng) const = 0;
    virtual std::vector<uint32_t> sample_within(std::span<const uint32_t> alive,
                                                SplitMix64& rng) const;
    virtual bool analytic() const { return true; }
    virtual double prob_contains(uint32_t v) const = 0;
    // P(v1 and v2 both in the edge); -1 when not analytically available.
    virtual double prob_pair(uint32_t v1, uint32_t v2) const { (void)v1, (void)v2; return -1; }
    virtual uint64_t size_bound() const = 0;
};

// Uniformly random subset of fixed size.
class UniformSubsetSampler : public EdgeSampler {
public:
    UniformSubsetSampler(uint32_t num_vertices, uint32_t edge_size);
    std::vector<uint32_t> sample(SplitMix64& rng) const override;
    std::vector<uint32_t> sample_within(std::span<const uint32_t> alive,
                                        SplitMix64& rng) const override;
    double prob_contains(uint32_t) const override;
    double prob_pair(uint32_t, uint32_t) const override;
    uint64_t size_bound() const override { return edge_size_; }

private:
    uint32_t num_vertices_;
    uint32_t edge_size_;
};

// Each vertex joins independently with probability pi.
class BernoulliSampler : public EdgeSampler {
public:
    BernoulliSampler(uint32_t num_vertices, double pi) : num_vertices_(num_vertices), pi_(pi) {}
    std::vector<uint32_t> sample(SplitMix64& rng) const override;
    double prob_contains(uint32_t) const override { return pi_; }
    double prob_pair(uint32_t, uint32_t) const override { return pi_ * pi_; }
    uint64_t size_bound() const override { return num_vertices_; }

private:
    uint32_t num_vertices_;
    double pi_;
};

// Deterministic one-vertex edge.
class SingletonSampler : public EdgeSampler {
public:
    explicit SingletonSampler(uint32_t v) : v_(v) {}
    std::vector<uint32_t> sample(SplitMix64&) const override { return {v_}; }
    double prob_contains(uint32_t v) const override { return v == v_ ? 1.0 : 0.0; }
    double prob_pair(uint32_t, uint32_t) const override { return 0.0; }
    uint64_t size_bound() const override { return 1; }

private:
    uint32_t v_;
};

struct CoverInstance {
    uint32_t num_vertices = 0;
    std::vector<std::unique_ptr<EdgeSampler>> edges;
    std::vector<std::vector<size_t>> rounds; // disjoint edge-id sets
    bool condition_on_survivors = false;
    double sparsity_cap = -1.0; // audit thresholds; negative = not audited
    double codegree_cap = -1.0;
    std::vector<uint32_t> vertex_values; // optional labels (primes q)
};

struct DegreeProfile {
    // d[j][v] = sum of P(v in e_i) over edges of round j (1-based j shifted
    // to 0-based storage); P[j][v] per the covering recursion, j = 0..m.
    std::vector<std::vector<double>> d;
    std::vector<std::vector<double>> P;
};

DegreeProfile degree_profile(const CoverInstance& instance, uint64_t probe_samples = 0,
                             uint64_t probe_seed = 1);

struct ResidualStats {
    std::vector<double> fractions; // per replicate
    double mean = 0;
    double sd = 0;
    double covering_sum_mean = 0; // mean over v of total degree
    double covering_sum_sd = 0;
    std::vector<std::string> warnings;
};

// Runs the per-round schedule `replicates` times. Rounds sample against the
// start-of-round survivor snapshot; shape-cap violations become warnings,
// never failures.
ResidualStats simulate_cover(const CoverInstance& instance, uint64_t m, uint64_t seed,
                             uint64_t replicates);

// Synthetic instance calibrated so round j applies per-survivor coverage
// log 5, i.e. nominal degree C * (4/5) * 5^{1-j} with C = (5/4) log 5 in
// total; survivor conditioning on.
CoverInstance make_calibrated_synthetic(uint32_t num_vertices, double C, uint64_t m,
                                        uint32_t edge_size);

// Weight-driven sampler: one edge per p in P, drawing n ~ w(p,.) and
// forming {n + h_i p} within Q cap S(a). Primes with zero total weight are
// dropped and reported.
struct WeightedSamplerResult {
    CoverInstance instance;
    std::vector<uint64_t> dropped_primes;
};

WeightedSamplerResult weighted_edge_sampler(const SieveContext& ctx,
                                            const std::vector<WeightTable>& tables,
                                            const std::map<uint64_t, uint64_t>& a_classes,
                                            std::span<const uint64_t> tuple, uint64_t seed);

struct CoveringReport {
    std::vector<double> sums; // per vertex: sum over p of P(q in e_p)
    double mean = 0;
    double sd = 0;
    uint64_t outside_band = 0; // |sum - mean| > band
    double band = 0;
};

CoveringReport uniform_covering_report(const CoverInstance& instance, double band);

} // namespace gapforge
