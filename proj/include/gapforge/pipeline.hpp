#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <gmpxx.h>

#include "gapforge/context.hpp"

namespace gapforge {

// Chosen class plus its shift witness: cls = 1 - (wit+1)^k (mod prime),
// wit != -1 (mod prime).
struct WitnessedClass {
    uint64_t cls;
    uint64_t wit;
};

struct ResidueSystem {
    std::map<uint64_t, WitnessedClass> a; // s in S -> (a_s, c_s)
    std::map<uint64_t, WitnessedClass> b; // p in P -> (b_p, d_p)
};

enum class Strategy { Greedy, Random };

// Greedy: walks S u P in decreasing prime order and picks the admissible
// class hitting the most currently surviving Q elements (ties -> smallest
// class; class 0 when nothing is hit). Random: uniform over each class
// family, seeded.
ResidueSystem choose_vectors(const SieveContext& ctx, Strategy strategy, uint64_t seed);

enum class SurvivorKind : uint8_t { Smooth, QSurvivor };

struct SiftedSet {
    std::vector<uint64_t> members;          // ascending, in (x, y]
    std::vector<SurvivorKind> provenance;   // parallel to members
};

// Applies over n in (x, y]: n = a_s (mod s) for s in S, n = b_p (mod p) for
// p in P, and n = 0 (mod q) for the remaining primes q <= x. Every
// survivor is z-smooth or a prime in Q; that dichotomy is asserted.
SiftedSet sift(const SieveContext& ctx, const ResidueSystem& system);

struct PairingResult {
    std::map<uint64_t, std::pair<uint64_t, uint64_t>> pairs; // u -> (p_u, e_u)
    std::vector<uint64_t> exceptional;                       // V, ascending
};

// Greedy bipartite assignment of sifted elements to Ptilde primes, each
// prime used at most once. For even k a candidate prime must additionally
// have Legendre(-u/p) = 1. Unassignable elements land in V.
PairingResult pair_exceptions(const SieveContext& ctx, const SiftedSet& sifted);

struct M0Result {
    mpz_class m0;      // in [1, modulus]
    mpz_class modulus; // product of all primes <= C0*x
};

// CRT assembly of the base-point congruences: witnesses on S and P, zero on
// every other prime <= x, pairing witnesses on the used Ptilde primes, and
// zero on all remaining primes <= C0*x. A CRT output of zero is remapped
// to the modulus itself so q0 = m0 + 1 + r*modulus never collapses.
M0Result assemble_m0(const SieveContext& ctx, const ResidueSystem& system,
                     const PairingResult& pairing);

} // namespace gapforge
