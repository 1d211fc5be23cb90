#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <gmpxx.h>

namespace gapforge {

// Residue class r mod m with 0 <= r < m, m >= 2.
struct Congruence {
    uint64_t residue;
    uint64_t modulus;
};

// Same, over big moduli (CRT outputs).
struct BigCongruence {
    mpz_class residue;
    mpz_class modulus;
};

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m);
uint64_t powmod(uint64_t base, uint64_t exp, uint64_t m);

// Legendre symbol (a/p) for odd prime p, via Euler's criterion.
int legendre_symbol(int64_t a, uint64_t p);
int legendre_symbol(const mpz_class& a, uint64_t p);

// The unique class mod prod(moduli) agreeing with every input class.
// Moduli must be pairwise coprime; a violation names the offending pair.
BigCongruence crt_combine(std::span<const Congruence> classes);

// Smallest generator of (Z/p)^*. p must be prime; p = 2 yields 1.
uint64_t primitive_root(uint64_t p);

// The unique s in [0, p-2] with rho^s = a (mod p). Baby-step/giant-step.
// rho must be a primitive root mod p; a must be nonzero mod p.
uint64_t discrete_log(uint64_t p, uint64_t rho, uint64_t a);

} // namespace gapforge
