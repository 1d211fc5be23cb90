#include "gapforge/covering.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include <omp.h>

#include "gapforge/errors.hpp"

namespace gapforge {

std::vector<uint32_t> EdgeSampler::sample_within(std::span<const uint32_t> alive,
                                                 SplitMix64& rng) const {
    // Default: rejection against the survivor set.
    std::unordered_set<uint32_t> keep(alive.begin(), alive.end());
    std::vector<uint32_t> e = sample(rng);
    std::erase_if(e, [&](uint32_t v) { return !keep.count(v); });
    return e;
}

UniformSubsetSampler::UniformSubsetSampler(uint32_t num_vertices, uint32_t edge_size)
    : num_vertices_(num_vertices), edge_size_(edge_size) {
    if (edge_size > num_vertices)
        throw ConfigError("UniformSubsetSampler: edge size exceeds vertex count");
}

namespace {

std::vector<uint32_t> distinct_picks(uint32_t universe, uint32_t count, SplitMix64& rng) {
    std::vector<uint32_t> out;
    out.reserve(count);
    while (out.size() < count) {
        uint32_t v = static_cast<uint32_t>(rng.below(universe));
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    return out;
}

} // namespace

std::vector<uint32_t> UniformSubsetSampler::sample(SplitMix64& rng) const {
    return distinct_picks(num_vertices_, edge_size_, rng);
}

std::vector<uint32_t> UniformSubsetSampler::sample_within(std::span<const uint32_t> alive,
                                                          SplitMix64& rng) const {
    if (alive.size() <= edge_size_) return {alive.begin(), alive.end()};
    std::vector<uint32_t> idx = distinct_picks(static_cast<uint32_t>(alive.size()), edge_size_, rng);
    std::vector<uint32_t> out;
    out.reserve(idx.size());
    for (uint32_t i : idx) out.push_back(alive[i]);
    return out;
}

double UniformSubsetSampler::prob_contains(uint32_t) const {
    return static_cast<double>(edge_size_) / static_cast<double>(num_vertices_);
}

double UniformSubsetSampler::prob_pair(uint32_t, uint32_t) const {
    double n = num_vertices_, l = edge_size_;
    return l * (l - 1) / (n * (n - 1));
}

std::vector<uint32_t> BernoulliSampler::sample(SplitMix64& rng) const {
    std::vector<uint32_t> out;
    for (uint32_t v = 0; v < num_vertices_; ++v)
        if (rng.uniform01() < pi_) out.push_back(v);
    return out;
}

DegreeProfile degree_profile(const CoverInstance& instance, uint64_t probe_samples,
                             uint64_t probe_seed) {
    DegreeProfile profile;
    size_t m = instance.rounds.size();
    uint32_t V = instance.num_vertices;
    profile.d.assign(m, std::vector<double>(V, 0.0));

    for (size_t j = 0; j < m; ++j) {
        for (size_t ei : instance.rounds[j]) {
            const EdgeSampler& e = *instance.edges[ei];
            if (e.analytic()) {
                for (uint32_t v = 0; v < V; ++v) profile.d[j][v] += e.prob_contains(v);
            } else {
                if (probe_samples == 0)
                    throw ConfigError("degree_profile: sampler needs probe_samples > 0");
                std::vector<uint64_t> hits(V, 0);
                SplitMix64 rng(derive_seed(probe_seed, ei));
                for (uint64_t s = 0; s < probe_samples; ++s)
                    for (uint32_t v : e.sample(rng)) ++hits[v];
                for (uint32_t v = 0; v < V; ++v)
                    profile.d[j][v] +=
                        static_cast<double>(hits[v]) / static_cast<double>(probe_samples);
            }
        }
    }

    profile.P.assign(m + 1, std::vector<double>(V, 1.0));
    for (size_t j = 0; j < m; ++j)
        for (uint32_t v = 0; v < V; ++v) {
            double prev = profile.P[j][v];
            profile.P[j + 1][v] = prev * std::exp(-profile.d[j][v] / prev);
        }
    return profile;
}

ResidualStats simulate_cover(const CoverInstance& instance, uint64_t m, uint64_t seed,
                             uint64_t replicates) {
    if (m > instance.rounds.size())
        throw ConfigError("simulate_cover: m exceeds the instance round count");
    ResidualStats stats;
    uint32_t V = instance.num_vertices;

    // Shape audits on nominal probabilities (warnings only).
    if (instance.sparsity_cap >= 0 || instance.codegree_cap >= 0) {
        for (size_t j = 0; j < m; ++j) {
            double denom = std::sqrt(static_cast<double>(instance.rounds[j].size()));
            for (size_t ei : instance.rounds[j]) {
                const EdgeSampler& e = *instance.edges[ei];
                if (!e.analytic()) continue;
                double worst = 0;
                for (uint32_t v = 0; v < V; ++v) worst = std::max(worst, e.prob_contains(v));
                if (instance.sparsity_cap >= 0 && worst > instance.sparsity_cap / denom) {
                    stats.warnings.push_back("sparsity cap exceeded in round " +
                                             std::to_string(j + 1));
                    break;
                }
            }
            if (instance.codegree_cap >= 0 && V >= 2) {
                // spot-check pair codegrees on a deterministic sample
                SplitMix64 rng(0xc0decafeULL + j);
                for (int pairs = 0; pairs < 200; ++pairs) {
                    uint32_t v1 = static_cast<uint32_t>(rng.below(V));
                    uint32_t v2 = static_cast<uint32_t>(rng.below(V));
                    if (v1 == v2) continue;
                    double co = 0;
                    for (size_t ei : instance.rounds[j]) {
                        double pp = instance.edges[ei]->prob_pair(v1, v2);
                        if (pp > 0) co += pp;
                    }
                    if (co > instance.codegree_cap) {
                        stats.warnings.push_back("codegree cap exceeded in round " +
                                                 std::to_string(j + 1));
                        break;
                    }
                }
            }
        }
    }

    // Covering-sum statistic over the full schedule (nominal degrees).
    {
        bool analytic = true;
        for (const auto& e : instance.edges)
            if (!e->analytic()) analytic = false;
        if (analytic && V > 0) {
            double sum = 0, sumsq = 0;
            for (uint32_t v = 0; v < V; ++v) {
                double dv = 0;
                for (size_t j = 0; j < m; ++j)
                    for (size_t ei : instance.rounds[j]) dv += instance.edges[ei]->prob_contains(v);
                sum += dv;
                sumsq += dv * dv;
            }
            stats.covering_sum_mean = sum / V;
            stats.covering_sum_sd =
                std::sqrt(std::max(0.0, sumsq / V - stats.covering_sum_mean * stats.covering_sum_mean));
        }
    }

    stats.fractions.assign(replicates, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int64_t rep = 0; rep < static_cast<int64_t>(replicates); ++rep) {
        std::vector<uint8_t> alive(V, 1);
        uint64_t rep_seed = derive_seed(seed, static_cast<uint64_t>(rep));
        for (size_t j = 0; j < m; ++j) {
            // snapshot: every edge in the round samples against the same
            // survivor set
            std::vector<uint32_t> snapshot;
            snapshot.reserve(V);
            for (uint32_t v = 0; v < V; ++v)
                if (alive[v]) snapshot.push_back(v);
            if (snapshot.empty()) break;
            std::vector<uint32_t> covered;
            for (size_t ei : instance.rounds[j]) {
                SplitMix64 rng(derive_seed(rep_seed, ei));
                std::vector<uint32_t> e = instance.condition_on_survivors
                                              ? instance.edges[ei]->sample_within(snapshot, rng)
                                              : instance.edges[ei]->sample(rng);
                covered.insert(covered.end(), e.begin(), e.end());
            }
            for (uint32_t v : covered)
                if (v < V) alive[v] = 0;
        }
        uint64_t survivors = 0;
        for (uint8_t a : alive) survivors += a;
        stats.fractions[static_cast<size_t>(rep)] =
            V ? static_cast<double>(survivors) / static_cast<double>(V) : 0.0;
    }

    double sum = 0;
    for (double f : stats.fractions) sum += f;
    stats.mean = replicates ? sum / static_cast<double>(replicates) : 0.0;
    double var = 0;
    for (double f : stats.fractions) var += (f - stats.mean) * (f - stats.mean);
    stats.sd = replicates > 1 ? std::sqrt(var / static_cast<double>(replicates - 1)) : 0.0;
    return stats;
}

CoverInstance make_calibrated_synthetic(uint32_t num_vertices, double C, uint64_t m,
                                        uint32_t edge_size) {
    CoverInstance inst;
    inst.num_vertices = num_vertices;
    inst.condition_on_survivors = true;
    for (uint64_t j = 1; j <= m; ++j) {
        double dj = C * 0.8 * std::pow(5.0, 1.0 - static_cast<double>(j));
        uint64_t edges = static_cast<uint64_t>(
            std::llround(dj * static_cast<double>(num_vertices) / edge_size));
        edges = std::max<uint64_t>(edges, 1);
        std::vector<size_t> round;
        for (uint64_t i = 0; i < edges; ++i) {
            round.push_back(inst.edges.size());
            inst.edges.push_back(std::make_unique<UniformSubsetSampler>(num_vertices, edge_size));
        }
        inst.rounds.push_back(std::move(round));
    }
    return inst;
}

namespace {

// Edge for one prime p: n is drawn from the weight distribution, the edge
// is {n + h_i p} intersected with the labelled vertex set.
class WeightedShiftSampler : public EdgeSampler {
public:
    WeightedShiftSampler(uint64_t p, std::vector<int64_t> support, std::vector<double> weights,
                         std::vector<int64_t> shifts,
                         std::shared_ptr<const std::unordered_map<int64_t, uint32_t>> vertex_of)
        : p_(p), support_(std::move(support)), weights_(std::move(weights)),
          shifts_(std::move(shifts)), vertex_of_(std::move(vertex_of)) {
        cdf_.reserve(weights_.size());
        double acc = 0;
        for (double w : weights_) {
            acc += w;
            cdf_.push_back(acc);
        }
        total_ = acc;
    }

    double total_weight() const { return total_; }

    std::vector<uint32_t> sample(SplitMix64& rng) const override {
        double u = rng.uniform01() * total_;
        size_t idx = std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin();
        if (idx >= support_.size()) idx = support_.size() - 1;
        int64_t n = support_[idx];
        std::vector<uint32_t> out;
        for (int64_t h : shifts_) {
            auto it = vertex_of_->find(n + h);
            if (it != vertex_of_->end()) out.push_back(it->second);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    double prob_contains(uint32_t v) const override {
        auto it = value_of_.find(v);
        if (it == value_of_.end()) return 0.0;
        double mass = 0;
        for (int64_t h : shifts_) {
            int64_t n = it->second - h;
            auto w = weight_at(n);
            mass += w;
        }
        return mass / total_;
    }

    double prob_pair(uint32_t v1, uint32_t v2) const override {
        auto i1 = value_of_.find(v1), i2 = value_of_.find(v2);
        if (i1 == value_of_.end() || i2 == value_of_.end()) return 0.0;
        double mass = 0;
        for (int64_t h1 : shifts_)
            for (int64_t h2 : shifts_) {
                if (h1 == h2) continue;
                if (i1->second - h1 == i2->second - h2) mass += weight_at(i1->second - h1);
            }
        return mass / total_;
    }

    uint64_t size_bound() const override { return shifts_.size(); }

    void finalize_vertex_values() {
        for (const auto& [value, v] : *vertex_of_) value_of_[v] = value;
    }

private:
    double weight_at(int64_t n) const {
        auto it = std::lower_bound(support_.begin(), support_.end(), n);
        if (it == support_.end() || *it != n) return 0.0;
        return weights_[static_cast<size_t>(it - support_.begin())];
    }

    uint64_t p_;
    std::vector<int64_t> support_; // ascending
    std::vector<double> weights_;
    std::vector<double> cdf_;
    double total_ = 0;
    std::vector<int64_t> shifts_;
    std::shared_ptr<const std::unordered_map<int64_t, uint32_t>> vertex_of_;
    std::unordered_map<uint32_t, int64_t> value_of_;
};

} // namespace

WeightedSamplerResult weighted_edge_sampler(const SieveContext& ctx,
                                            const std::vector<WeightTable>& tables,
                                            const std::map<uint64_t, uint64_t>& a_classes,
                                            std::span<const uint64_t> tuple, uint64_t seed) {
    (void)seed; // sampling seeds come in at simulate time
    if (tables.size() != ctx.P.size())
        throw ConfigError("weighted_edge_sampler: one weight table per prime in P required");

    WeightedSamplerResult result;
    CoverInstance& inst = result.instance;

    // Vertex set: Q cap S(a).
    auto survives = [&](uint64_t q) {
        for (const auto& [s, cls] : a_classes)
            if (q % s == cls) return false;
        return true;
    };
    auto vertex_of = std::make_shared<std::unordered_map<int64_t, uint32_t>>();
    for (uint64_t q : ctx.Q) {
        if (!survives(q)) continue;
        uint32_t id = static_cast<uint32_t>(inst.vertex_values.size());
        inst.vertex_values.push_back(static_cast<uint32_t>(q));
        (*vertex_of)[static_cast<int64_t>(q)] = id;
    }
    inst.num_vertices = static_cast<uint32_t>(inst.vertex_values.size());

    std::vector<size_t> round;
    for (size_t pi = 0; pi < ctx.P.size(); ++pi) {
        uint64_t p = ctx.P[pi];
        const WeightTable& table = tables[pi];
        std::vector<int64_t> support;
        std::vector<double> weights;
        for (int64_t n = table.n_lo; n < table.n_hi; ++n) {
            double w = table.w_at(n);
            if (w > 0) {
                support.push_back(n);
                weights.push_back(w);
            }
        }
        if (support.empty()) {
            result.dropped_primes.push_back(p);
            continue;
        }
        std::vector<int64_t> shifts;
        for (uint64_t h : tuple) shifts.push_back(static_cast<int64_t>(h * p));
        auto sampler = std::make_unique<WeightedShiftSampler>(p, std::move(support),
                                                              std::move(weights),
                                                              std::move(shifts), vertex_of);
        sampler->finalize_vertex_values();
        round.push_back(inst.edges.size());
        inst.edges.push_back(std::move(sampler));
    }
    inst.rounds.push_back(std::move(round));
    inst.sparsity_cap = std::pow(static_cast<double>(ctx.x), -0.5 - 0.1);
    inst.codegree_cap = std::pow(static_cast<double>(ctx.x), -1.0 / 20.0);
    return result;
}

CoveringReport uniform_covering_report(const CoverInstance& instance, double band) {
    CoveringReport rep;
    rep.band = band;
    uint32_t V = instance.num_vertices;
    rep.sums.assign(V, 0.0);
    for (const auto& round : instance.rounds)
        for (size_t ei : round) {
            const EdgeSampler& e = *instance.edges[ei];
            for (uint32_t v = 0; v < V; ++v) rep.sums[v] += e.prob_contains(v);
        }
    if (V == 0) return rep;
    double sum = 0;
    for (double s : rep.sums) sum += s;
    rep.mean = sum / V;
    double var = 0;
    for (double s : rep.sums) var += (s - rep.mean) * (s - rep.mean);
    rep.sd = std::sqrt(var / V);
    for (double s : rep.sums)
        if (std::abs(s - rep.mean) > band) ++rep.outside_band;
    return rep;
}

} // namespace gapforge
