// Compares the OpenMP kernels against their serial references.
// Usage: gapforge-bench [threads]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include <omp.h>

#include "gapforge/concentration.hpp"
#include "gapforge/context.hpp"
#include "gapforge/maynard.hpp"
#include "gapforge/pipeline.hpp"
#include "gapforge/primes.hpp"
#include "gapforge/reference.hpp"
#include "gapforge/rows.hpp"

using namespace gapforge;

namespace {

template <typename F>
double time_sec(F&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-28s serial %8.3fs   parallel %8.3fs   speedup %5.2fx\n", name, serial,
                parallel, parallel > 0 ? serial / parallel : 0.0);
}

} // namespace

int main(int argc, char** argv) {
    int threads = argc > 1 ? std::atoi(argv[1]) : omp_get_max_threads();
    std::printf("threads: %d\n", threads);

    // Segmented sieve vs one-thread run of the same kernel.
    {
        const uint64_t hi = 200'000'000;
        double serial = time_sec([&] {
            omp_set_num_threads(1);
            prime_range(0, hi);
        });
        double parallel = time_sec([&] {
            omp_set_num_threads(threads);
            prime_range(0, hi);
        });
        report("prime_range(2e8)", serial, parallel);
    }

    // Monte-Carlo membership: library kernel vs the single-stream reference.
    {
        ContextOverrides ov;
        ov.y = 1'060'000;
        ov.z = 300;
        ov.s_floor = 7;
        SieveContext ctx = build_context(1'000'000, 2, 1.0, 2.0, ov);
        GoodSetParams params = make_good_set_params(ctx);
        std::vector<int64_t> ns = {1'000'003, 1'000'033, 1'000'037};
        const uint64_t trials = 2'000'000;
        double est_par = 0, est_ser = 0;
        double serial = time_sec(
            [&] { est_ser = reference::mc_membership_serial(ns, params, trials, 42); });
        double parallel = time_sec([&] {
            omp_set_num_threads(threads);
            est_par = mc_membership(ns, params, trials, 42).estimate;
        });
        report("mc_membership(2e6)", serial, parallel);
        if (est_par != est_ser) std::printf("  WARNING: estimates differ (%g vs %g)\n", est_par, est_ser);
    }

    // Row scan: the same kernel at one thread vs all threads, plus an
    // equality check on the clean/dirty classification.
    {
        ContextOverrides ov;
        ov.y = 60;
        ov.z = 10;
        ov.s_floor = 3;
        SieveContext ctx = build_context(25, 2, 1.0, 2.0, ov);
        ResidueSystem sys = choose_vectors(ctx, Strategy::Greedy, 1);
        SiftedSet sifted = sift(ctx, sys);
        PairingResult pairing = pair_exceptions(ctx, sifted);
        M0Result m0 = assemble_m0(ctx, sys, pairing);
        const uint64_t rmax = 40'000;
        ScanReport a, b;
        double serial = time_sec([&] {
            omp_set_num_threads(1);
            a = scan_rows(ctx, m0.m0, m0.modulus, rmax);
        });
        double parallel = time_sec([&] {
            omp_set_num_threads(threads);
            b = scan_rows(ctx, m0.m0, m0.modulus, rmax);
        });
        report("scan_rows(4e4 toy rows)", serial, parallel);
        bool same = a.rows.size() == b.rows.size();
        for (size_t i = 0; same && i < a.rows.size(); ++i)
            same = a.rows[i].r == b.rows[i].r && a.rows[i].clean == b.rows[i].clean;
        if (!same) std::printf("  WARNING: scan results differ across thread counts\n");
    }

    // Weight table: per-n evaluation vs the naive lattice-scan reference on
    // a smaller window (the reference is quadratic in the lattice size).
    {
        auto tuple = find_admissible_tuple(2);
        LinearSystem sys = LinearSystem::shifted_tuple(tuple);
        const int64_t lo = 1, hi = 500'000;
        WeightTable table;
        double parallel = time_sec([&] {
            omp_set_num_threads(threads);
            table = weight_table(sys, lo, hi, 2000);
        });
        const int64_t naive_rows = 5'000;
        double serial = time_sec([&] {
            double acc = 0;
            for (int64_t n = lo; n < lo + naive_rows; ++n)
                acc += reference::weight_naive(table, n);
            (void)acc;
        });
        std::printf("%-28s naive %6.3fs/%ldk rows   kernel %6.3fs/%ldk rows (lambda=%zu)\n",
                    "weight_table", serial, naive_rows / 1000, parallel, (hi - lo) / 1000,
                    table.lambda.size());
    }

    return 0;
}
