#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <gmpxx.h>

namespace gapforge {

// Does n = 1 - (e+1)^k (mod p) have a solution with e != -1 (mod p)?
// Equivalently: is 1-n a nonzero k-th power residue mod p?
bool shift_solvable(int64_t n, uint64_t p, uint64_t k);
bool shift_solvable(const mpz_class& n, uint64_t p, uint64_t k);

// Smallest e in [0, p-2] with (e+1)^k = 1-n (mod p), std::nullopt when the
// congruence has no admissible solution. Deterministic by construction.
std::optional<uint64_t> shift_witness(int64_t n, uint64_t p, uint64_t k);
std::optional<uint64_t> shift_witness(const mpz_class& n, uint64_t p, uint64_t k);

// The character-sum indicator of solvability: s = ind_rho(1-n),
// D = gcd(p-1, k); returns 1 iff D | s. Must agree with shift_solvable.
int indicator_via_characters(int64_t n, uint64_t p, uint64_t k);

// All residues a mod s of the form 1 - (c+1)^k with c != -1, with the
// smallest witness per class. witnesses.at(a) = smallest e such that
// a = 1 - (e+1)^k (mod s).
struct AdmissibleClassFamily {
    uint64_t s = 0;
    uint64_t k = 0;
    std::vector<uint64_t> classes; // ascending
    std::map<uint64_t, uint64_t> witnesses;

    bool contains(uint64_t a) const;
};

// Full family for prime s >= 3; s = 2 degenerates to the single class {0}
// (witness 0, i.e. c = 1 in the shifted notation).
AdmissibleClassFamily admissible_classes(uint64_t s, uint64_t k);

// Window/congruence filter for the auxiliary prime set: x < p <= C0*x and
// p = 2 (mod 3) for odd k, p = 3 (mod 2k) for even k.
bool ptilde_member(uint64_t p, uint64_t x, double C0, uint64_t k);

// Counts p in ptilde with Legendre(-u/p) = 1; true iff the count exceeds
// delta_threshold (u is then *not* exceptional).
bool qr_good(uint64_t u, std::span<const uint64_t> ptilde, uint64_t delta_threshold);

} // namespace gapforge
