#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <omp.h>

#include "gapforge/context.hpp"
#include "gapforge/covering.hpp"
#include "gapforge/maynard.hpp"

using namespace gapforge;

namespace {

CoverInstance bernoulli_rounds(uint32_t V, const std::vector<double>& degrees,
                               uint64_t edges_per_round) {
    CoverInstance inst;
    inst.num_vertices = V;
    for (double d : degrees) {
        std::vector<size_t> round;
        double pi = d / static_cast<double>(edges_per_round);
        for (uint64_t i = 0; i < edges_per_round; ++i) {
            round.push_back(inst.edges.size());
            inst.edges.push_back(std::make_unique<BernoulliSampler>(V, pi));
        }
        inst.rounds.push_back(std::move(round));
    }
    return inst;
}

} // namespace

TEST_CASE("degree profile recursion closed forms") {
    // all degrees zero
    CoverInstance zero = bernoulli_rounds(50, {0.0, 0.0}, 4);
    DegreeProfile p0 = degree_profile(zero);
    for (const auto& row : p0.P)
        for (double v : row) CHECK(v == 1.0);

    // one round, degree 1: P_1 = e^{-1}
    CoverInstance one = bernoulli_rounds(50, {1.0}, 10);
    DegreeProfile p1 = degree_profile(one);
    for (uint32_t v = 0; v < 50; ++v) {
        CHECK(p1.d[0][v] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p1.P[1][v] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    }

    // two rounds, degrees (1, 1): P_2 = e^{-1} exp(-e)
    CoverInstance two = bernoulli_rounds(50, {1.0, 1.0}, 10);
    DegreeProfile p2 = degree_profile(two);
    double expect = std::exp(-1.0) * std::exp(-std::exp(1.0));
    for (uint32_t v = 0; v < 50; ++v)
        CHECK(p2.P[2][v] == doctest::Approx(expect).epsilon(1e-12));

    // constant-d instances up to three rounds match the iterated map
    CoverInstance three = bernoulli_rounds(20, {0.5, 0.25, 0.125}, 8);
    DegreeProfile p3 = degree_profile(three);
    double P = 1.0;
    for (double d : {0.5, 0.25, 0.125}) P = P * std::exp(-d / P);
    CHECK(p3.P[3][0] == doctest::Approx(P).epsilon(1e-12));
}

TEST_CASE("probed degrees agree with analytic ones") {
    CoverInstance inst = bernoulli_rounds(40, {0.8}, 5);
    DegreeProfile analytic = degree_profile(inst);
    // probing path: the same samplers behind a non-analytic facade
    class Probed : public BernoulliSampler {
    public:
        using BernoulliSampler::BernoulliSampler;
        bool analytic() const override { return false; }
    };
    CoverInstance probed;
    probed.num_vertices = 40;
    std::vector<size_t> round;
    for (uint64_t i = 0; i < 5; ++i) {
        round.push_back(probed.edges.size());
        probed.edges.push_back(std::make_unique<Probed>(40, 0.8 / 5.0));
    }
    probed.rounds.push_back(std::move(round));
    DegreeProfile mc = degree_profile(probed, 20000, 3);
    for (uint32_t v = 0; v < 40; ++v)
        CHECK(std::abs(mc.d[0][v] - analytic.d[0][v]) < 0.05);
    CHECK_THROWS(degree_profile(probed, 0));
}

TEST_CASE("simulate_cover trivial instances") {
    // no edges: everything survives
    CoverInstance none;
    none.num_vertices = 100;
    none.rounds.push_back({});
    ResidualStats s0 = simulate_cover(none, 1, 1, 5);
    for (double f : s0.fractions) CHECK(f == 1.0);

    // singleton edges covering every vertex: nothing survives
    CoverInstance full;
    full.num_vertices = 100;
    std::vector<size_t> round;
    for (uint32_t v = 0; v < 100; ++v) {
        round.push_back(full.edges.size());
        full.edges.push_back(std::make_unique<SingletonSampler>(v));
    }
    full.rounds.push_back(std::move(round));
    ResidualStats s1 = simulate_cover(full, 1, 1, 5);
    for (double f : s1.fractions) CHECK(f == 0.0);
}

TEST_CASE("simulate_cover is bit-reproducible across thread counts") {
    CoverInstance inst = make_calibrated_synthetic(2000, 1.25 * std::log(5.0), 2, 20);
    int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    ResidualStats one = simulate_cover(inst, 2, 99, 12);
    omp_set_num_threads(4);
    ResidualStats four = simulate_cover(inst, 2, 99, 12);
    omp_set_num_threads(saved);
    CHECK(one.fractions == four.fractions);
}

TEST_CASE("product-form independent edges match the Poissonized prediction") {
    // per-round survival exactly exp(-d): pi = 1 - exp(-d/E)
    const uint32_t V = 4000;
    const uint64_t E = 10;
    CoverInstance inst;
    inst.num_vertices = V;
    for (double d : {0.5, 0.3}) {
        std::vector<size_t> round;
        double pi = 1.0 - std::exp(-d / static_cast<double>(E));
        for (uint64_t i = 0; i < E; ++i) {
            round.push_back(inst.edges.size());
            inst.edges.push_back(std::make_unique<BernoulliSampler>(V, pi));
        }
        inst.rounds.push_back(std::move(round));
    }
    const uint64_t reps = 40;
    ResidualStats stats = simulate_cover(inst, 2, 2024, reps);
    double expect = std::exp(-0.8);
    double sigma = std::sqrt(expect * (1 - expect) / static_cast<double>(V) /
                             static_cast<double>(reps));
    CHECK(std::abs(stats.mean - expect) <= 3 * sigma);
}

TEST_CASE("calibrated synthetic instance follows the 5^-m residual law") {
    for (uint64_t m : {1ull, 2ull, 3ull}) {
        CoverInstance inst = make_calibrated_synthetic(10000, 1.25 * std::log(5.0), m, 25);
        ResidualStats stats = simulate_cover(inst, m, 7, 20);
        double target = std::pow(5.0, -static_cast<double>(m));
        CAPTURE(m);
        CAPTURE(stats.mean);
        CHECK(stats.mean >= 0.5 * target);
        CHECK(stats.mean <= 2.0 * target);
    }
}

TEST_CASE("covering sum statistic reports the calibrated budget") {
    double C = 1.25 * std::log(5.0);
    CoverInstance inst = make_calibrated_synthetic(10000, C, 3, 25);
    ResidualStats stats = simulate_cover(inst, 3, 7, 2);
    // total nominal degree approx C (1 - 5^-m)
    double expect = C * (1.0 - std::pow(5.0, -3.0));
    CHECK(stats.covering_sum_mean == doctest::Approx(expect).epsilon(0.02));
    CHECK(stats.covering_sum_sd == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("uniform covering report on a symmetric instance") {
    CoverInstance empty;
    empty.num_vertices = 10;
    empty.rounds.push_back({});
    CoveringReport r0 = uniform_covering_report(empty, 0.1);
    for (double s : r0.sums) CHECK(s == 0.0);

    CoverInstance sym = make_calibrated_synthetic(500, 2.0, 1, 10);
    CoveringReport r1 = uniform_covering_report(sym, 1e-9);
    for (double s : r1.sums) CHECK(s == doctest::Approx(r1.mean).epsilon(1e-12));
    CHECK(r1.outside_band == 0);
}

TEST_CASE("weighted sampler built from a toy pipeline") {
    ContextOverrides ov;
    ov.y = 1200;
    ov.z = 25;
    ov.s_floor = 3;
    SieveContext ctx = build_context(1000, 2, 1.0, 2.0, ov);
    ctx.P.erase(ctx.P.begin(), ctx.P.end() - 10); // keep 10 primes for speed
    GoodSetParams good = make_good_set_params(ctx);
    auto a_classes = sample_a(good, 5);
    auto tuple = find_admissible_tuple(3);

    int64_t lo = static_cast<int64_t>(ctx.x) + 1;
    int64_t hi = static_cast<int64_t>(ctx.y) - static_cast<int64_t>(tuple.back() * ctx.P.back());
    if (hi <= lo) hi = lo + 50;
    std::vector<WeightTable> tables;
    for (uint64_t p : ctx.P)
        tables.push_back(weight_table(LinearSystem::shifted_tuple(tuple, p), lo, hi, 30));

    auto result = weighted_edge_sampler(ctx, tables, a_classes, tuple, 1);
    const CoverInstance& inst = result.instance;
    CHECK(inst.num_vertices > 0);
    CHECK(inst.edges.size() + result.dropped_primes.size() == ctx.P.size());
    CHECK(inst.sparsity_cap == doctest::Approx(std::pow(1000.0, -0.6)));

    // per-edge inclusion probabilities are consistent with sampling
    SplitMix64 rng(10);
    for (const auto& e : inst.edges) {
        double total = 0;
        for (uint32_t v = 0; v < inst.num_vertices; ++v) total += e->prob_contains(v);
        CHECK(total <= static_cast<double>(e->size_bound()) + 1e-9);
        auto edge = e->sample(rng);
        CHECK(edge.size() <= e->size_bound());
        for (uint32_t v : edge) CHECK(e->prob_contains(v) > 0.0);
    }

    // codegree structure: a vertex pair can co-occur for at most one prime
    for (uint32_t v1 = 0; v1 + 1 < std::min<uint32_t>(inst.num_vertices, 12); ++v1)
        for (uint32_t v2 = v1 + 1; v2 < std::min<uint32_t>(inst.num_vertices, 12); ++v2) {
            int support = 0;
            for (const auto& e : inst.edges)
                if (e->prob_pair(v1, v2) > 0) ++support;
            CHECK(support <= 1);
        }
}

TEST_CASE("weighted sampler with a single-support table is deterministic") {
    ContextOverrides ov;
    ov.y = 1100;
    ov.z = 25;
    ov.s_floor = 3;
    SieveContext ctx = build_context(1000, 2, 1.0, 2.0, ov);
    ctx.P.resize(1);
    uint64_t p = ctx.P[0];
    GoodSetParams good = make_good_set_params(ctx);
    auto a_classes = sample_a(good, 5);
    std::vector<uint64_t> tuple = {0, 2};

    // hand-built table whose support is a single n
    WeightTable table;
    table.system = LinearSystem::shifted_tuple(tuple, p);
    table.R = 10;
    table.n_lo = 1001;
    table.n_hi = 1006;
    table.w = {0.0, 0.0, 1.0, 0.0, 0.0}; // only n = 1003
    std::vector<WeightTable> tables;
    tables.push_back(table);

    auto result = weighted_edge_sampler(ctx, tables, a_classes, tuple, 1);
    REQUIRE(result.instance.edges.size() == 1);
    SplitMix64 rng(3);
    auto first = result.instance.edges[0]->sample(rng);
    for (int i = 0; i < 10; ++i) CHECK(result.instance.edges[0]->sample(rng) == first);
}

TEST_CASE("zero-weight primes are dropped and reported") {
    ContextOverrides ov;
    ov.y = 1100;
    ov.z = 25;
    ov.s_floor = 3;
    SieveContext ctx = build_context(1000, 2, 1.0, 2.0, ov);
    ctx.P.resize(2);
    GoodSetParams good = make_good_set_params(ctx);
    auto a_classes = sample_a(good, 5);
    std::vector<uint64_t> tuple = {0, 2};

    WeightTable empty;
    empty.system = LinearSystem::shifted_tuple(tuple, ctx.P[0]);
    empty.n_lo = 1001;
    empty.n_hi = 1003;
    empty.w = {0.0, 0.0};
    WeightTable live = empty;
    live.system = LinearSystem::shifted_tuple(tuple, ctx.P[1]);
    live.w = {1.0, 2.0};

    std::vector<WeightTable> tables = {empty, live};
    auto result = weighted_edge_sampler(ctx, tables, a_classes, tuple, 1);
    CHECK(result.dropped_primes == std::vector<uint64_t>{ctx.P[0]});
    CHECK(result.instance.edges.size() == 1);
}
