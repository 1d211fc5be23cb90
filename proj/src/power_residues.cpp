#include "gapforge/power_residues.hpp"

#include <algorithm>
#include <numeric>

#include "gapforge/errors.hpp"
#include "gapforge/modular.hpp"

namespace gapforge {

namespace {

uint64_t reduce_mod(int64_t n, uint64_t p) {
    int64_t pm = static_cast<int64_t>(p);
    int64_t r = n % pm;
    if (r < 0) r += pm;
    return static_cast<uint64_t>(r);
}

uint64_t reduce_mod(const mpz_class& n, uint64_t p) {
    mpz_class r = n % static_cast<unsigned long>(p);
    if (r < 0) r += static_cast<unsigned long>(p);
    return mpz_get_ui(r.get_mpz_t());
}

// target = (1-n) mod p. Solvability of c^k = target with p not dividing c.
bool solvable_res(uint64_t target, uint64_t p, uint64_t k) {
    if (target == 0) return false; // would force c = 0
    if (p < 100) {
        // gcd degeneracies (s = 2, p | k, ...) are cheap to brute-force
        for (uint64_t c = 1; c < p; ++c)
            if (powmod(c, k, p) == target) return true;
        return false;
    }
    uint64_t D = std::gcd(p - 1, k);
    return powmod(target, (p - 1) / D, p) == 1;
}

} // namespace

bool shift_solvable(int64_t n, uint64_t p, uint64_t k) {
    uint64_t nr = reduce_mod(n, p);
    uint64_t target = nr == 0 ? 1 % p : p + 1 - nr; // (1 - n) mod p
    if (target >= p) target -= p;
    return solvable_res(target, p, k);
}

bool shift_solvable(const mpz_class& n, uint64_t p, uint64_t k) {
    uint64_t nr = reduce_mod(n, p);
    uint64_t target = nr == 0 ? 1 % p : p + 1 - nr;
    if (target >= p) target -= p;
    return solvable_res(target, p, k);
}

namespace {

std::optional<uint64_t> witness_res(uint64_t target, uint64_t p, uint64_t k) {
    if (target == 0) return std::nullopt;
    if (p < 100000) {
        for (uint64_t c = 1; c < p; ++c)
            if (powmod(c, k, p) == target) return c - 1; // e = c - 1
        return std::nullopt;
    }
    // Large p: solve in the exponent. k*y = s (mod p-1) has solutions iff
    // D | s; they are y0 + j*(p-1)/D, and gcd(k/D, (p-1)/D) = 1 always.
    uint64_t D = std::gcd(p - 1, k);
    if (powmod(target, (p - 1) / D, p) != 1) return std::nullopt;
    uint64_t rho = primitive_root(p);
    uint64_t s = discrete_log(p, rho, target);
    if (s % D != 0) return std::nullopt;
    uint64_t n1 = (p - 1) / D;
    uint64_t kD = (k / D) % n1;
    uint64_t inv = 1;
    {
        // extended gcd for the inverse of k/D modulo n1
        int64_t t0 = 0, t1 = 1;
        int64_t r0 = static_cast<int64_t>(n1), r1 = static_cast<int64_t>(kD);
        while (r1 != 0) {
            int64_t q = r0 / r1;
            int64_t t2 = t0 - q * t1;
            t0 = t1;
            t1 = t2;
            int64_t r2 = r0 - q * r1;
            r0 = r1;
            r1 = r2;
        }
        inv = static_cast<uint64_t>(t0 < 0 ? t0 + static_cast<int64_t>(n1) : t0);
    }
    uint64_t y0 = mulmod((s / D) % n1, inv, n1);
    uint64_t best = p; // sentinel: no candidate yet
    uint64_t y = y0;
    for (uint64_t j = 0; j < D; ++j) {
        uint64_t c = powmod(rho, y, p);
        best = std::min(best, c);
        y += n1;
        if (y >= p - 1) y -= p - 1;
    }
    if (best == p) return std::nullopt;
    return best - 1;
}

} // namespace

std::optional<uint64_t> shift_witness(int64_t n, uint64_t p, uint64_t k) {
    uint64_t nr = reduce_mod(n, p);
    uint64_t target = nr == 0 ? 1 % p : p + 1 - nr;
    if (target >= p) target -= p;
    return witness_res(target, p, k);
}

std::optional<uint64_t> shift_witness(const mpz_class& n, uint64_t p, uint64_t k) {
    uint64_t nr = reduce_mod(n, p);
    uint64_t target = nr == 0 ? 1 % p : p + 1 - nr;
    if (target >= p) target -= p;
    return witness_res(target, p, k);
}

int indicator_via_characters(int64_t n, uint64_t p, uint64_t k) {
    uint64_t nr = reduce_mod(n, p);
    if (nr == 1 % p) return 0; // 1-n = 0 mod p: no unit solution
    uint64_t target = p + 1 - nr;
    if (target >= p) target -= p;
    if (p == 2) return 1; // trivial group, c = 1 always works
    uint64_t rho = primitive_root(p);
    uint64_t s = discrete_log(p, rho, target);
    uint64_t D = std::gcd(p - 1, k);
    return s % D == 0 ? 1 : 0;
}

bool AdmissibleClassFamily::contains(uint64_t a) const {
    return std::binary_search(classes.begin(), classes.end(), a % s);
}

AdmissibleClassFamily admissible_classes(uint64_t s, uint64_t k) {
    AdmissibleClassFamily fam;
    fam.s = s;
    fam.k = k;
    if (s == 2) {
        // Degenerate: c = 1 gives 1 - 1 = 0, the only admissible class.
        fam.classes = {0};
        fam.witnesses[0] = 0;
        return fam;
    }
    for (uint64_t c = 1; c < s; ++c) {
        uint64_t a = (1 + s - powmod(c, k, s)) % s;
        if (fam.witnesses.emplace(a, c - 1).second) fam.classes.push_back(a);
    }
    std::sort(fam.classes.begin(), fam.classes.end());
    return fam;
}

bool ptilde_member(uint64_t p, uint64_t x, double C0, uint64_t k) {
    if (p <= x) return false;
    if (static_cast<double>(p) > C0 * static_cast<double>(x)) return false;
    if (k % 2 == 1) return p % 3 == 2;
    return p % (2 * k) == 3;
}

bool qr_good(uint64_t u, std::span<const uint64_t> ptilde, uint64_t delta_threshold) {
    uint64_t count = 0;
    for (uint64_t p : ptilde) {
        uint64_t r = u % p;
        uint64_t neg = r == 0 ? 0 : p - r;
        if (neg != 0 && powmod(neg, (p - 1) / 2, p) == 1) ++count;
    }
    return count > delta_threshold;
}

} // namespace gapforge
