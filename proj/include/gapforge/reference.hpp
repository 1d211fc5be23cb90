#pragma once

// Serial reference implementations. These are the independent oracles the
// test suite checks the production kernels against, and the baselines the
// benchmark compares them with. They favor obviousness over speed and must
// not share code with the paths they certify.

#include <cstdint>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "gapforge/context.hpp"
#include "gapforge/maynard.hpp"
#include "gapforge/modular.hpp"
#include "gapforge/pipeline.hpp"

namespace gapforge {
namespace reference {

// Trial-division prime enumeration over (lo, hi].
std::vector<uint64_t> prime_range_trial(uint64_t lo, uint64_t hi);

// Trial-division primality.
bool is_prime_trial(uint64_t n);

// CRT by exhaustive scan of 0..prod-1 (tiny moduli only).
uint64_t crt_scan(std::span<const Congruence> classes, uint64_t modulus_product);

// Smooth counting by factoring every integer.
uint64_t smooth_count_trial(uint64_t y, uint64_t z);

// prod (1 - 1/s) in exact rational arithmetic.
mpq_class sigma_exact(std::span<const uint64_t> primes);

// Survives-the-system check for a single n, re-deriving every class test.
bool sift_survives_naive(const SieveContext& ctx, const ResidueSystem& system, uint64_t n);

// w_n by scanning the whole lambda lattice for each n.
double weight_naive(const WeightTable& table, int64_t n);

// Row scan that ignores the sieve structure and primality-tests every
// matrix entry.
struct NaiveRow {
    uint64_t r;
    bool q0_prime;
    std::vector<uint64_t> prime_positions; // u in [2, y] with a_{r,u} prime
};
NaiveRow scan_row_naive(const mpz_class& m0, const mpz_class& modulus, uint64_t k, uint64_t r,
                        uint64_t y);

// Serial twin of mc_membership, one stream, no OpenMP.
double mc_membership_serial(std::span<const int64_t> n_list, const GoodSetParams& params,
                            uint64_t trials, uint64_t seed);

} // namespace reference
} // namespace gapforge
