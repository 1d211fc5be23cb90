#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "gapforge/context.hpp"
#include "gapforge/power_residues.hpp"

namespace gapforge {

// Per-u tables for the good-integer test: S_u groups the sieving primes by
// residue class mod k, d(u) = gcd(u-1, k), r*(u) = (1/d(u)) sum 1/s.
struct GoodSetParams {
    SieveContext ctx;
    double tolerance = 0.0;                    // the deviation bound actually applied
    std::map<uint64_t, std::vector<uint64_t>> S_u; // u -> primes s = u (mod k)
    std::map<uint64_t, uint64_t> d_u;
    std::map<uint64_t, double> r_star;
    // Class families for the S primes, shared by sampling and scoring.
    std::map<uint64_t, AdmissibleClassFamily> families;
};

// tolerance < 0 selects the asymptotic default (log x)^{-1/40}; at desk scale that is
// near 1 and the membership test is essentially vacuous, which is why an
// absolute mode exists.
GoodSetParams make_good_set_params(const SieveContext& ctx, double tolerance = -1.0);

// r(n, u) = sum of 1/s over s in S_u where the shifted power congruence is
// solvable at n.
double r_of(int64_t n, uint64_t u, const GoodSetParams& params);

// n is good iff |r(n,u) - r*(u)| <= tolerance for every u coprime to k.
bool in_G(int64_t n, const GoodSetParams& params);

// n is p-good iff n and all tuple translates n + (h_i - h_l) p are good.
// In strict mode a translate outside [x, y] counts as failing.
bool in_Gp(int64_t n, uint64_t p, std::span<const uint64_t> tuple, const GoodSetParams& params,
           bool strict = true);

// One uniformly random admissible class per s in S, seeded, reproducible.
std::map<uint64_t, uint64_t> sample_a(const GoodSetParams& params, uint64_t seed);

struct McResult {
    double estimate = 0;
    double stderr_ = 0;
    uint64_t trials = 0;
    uint64_t successes = 0;
};

// Monte-Carlo estimate of P(all n_i avoid every sampled class), to be
// compared with sigma^t. Trials parallelize over derived per-trial seeds;
// the count is bit-identical for a fixed seed at any thread count.
McResult mc_membership(std::span<const int64_t> n_list, const GoodSetParams& params,
                       uint64_t trials, uint64_t seed);

// Exact survival probability of the same event, by counting hit classes
// per prime. Rational-free but exact up to double rounding.
double exact_membership(std::span<const int64_t> n_list, const GoodSetParams& params);

struct SigmaValue {
    double sigma = 1.0;
    uint64_t terms = 0;
};

// prod (1 - 1/s) over S, multiplied in descending-prime order.
SigmaValue sigma(const GoodSetParams& params);

} // namespace gapforge
