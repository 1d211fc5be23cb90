#include "gapforge/modular.hpp"

#include <cmath>
#include <numeric>
#include <unordered_map>

#include "gapforge/errors.hpp"

namespace gapforge {

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

uint64_t powmod(uint64_t base, uint64_t exp, uint64_t m) {
    uint64_t r = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return r;
}

int legendre_symbol(int64_t a, uint64_t p) {
    int64_t pm = static_cast<int64_t>(p);
    int64_t r = a % pm;
    if (r < 0) r += pm;
    return legendre_symbol(mpz_class(static_cast<long>(r)), p);
}

int legendre_symbol(const mpz_class& a, uint64_t p) {
    if (p == 2) throw ConfigError("legendre_symbol: p must be an odd prime");
    mpz_class r = a % static_cast<unsigned long>(p);
    if (r < 0) r += static_cast<unsigned long>(p);
    uint64_t v = mpz_get_ui(r.get_mpz_t());
    if (v == 0) return 0;
    uint64_t e = powmod(v, (p - 1) / 2, p);
    return e == 1 ? 1 : -1;
}

namespace {

// Merges two congruences with coprime moduli (checked by the caller).
BigCongruence crt_pair(const BigCongruence& a, const BigCongruence& b) {
    mpz_class inv;
    if (mpz_invert(inv.get_mpz_t(), a.modulus.get_mpz_t(), b.modulus.get_mpz_t()) == 0)
        throw ConfigError("crt_combine: moduli not coprime");
    mpz_class diff = (b.residue - a.residue) % b.modulus;
    mpz_class t = diff * inv % b.modulus;
    if (t < 0) t += b.modulus;
    BigCongruence out;
    out.modulus = a.modulus * b.modulus;
    out.residue = a.residue + a.modulus * t;
    return out;
}

[[noreturn]] void report_non_coprime(std::span<const Congruence> classes) {
    for (size_t i = 0; i < classes.size(); ++i)
        for (size_t j = i + 1; j < classes.size(); ++j)
            if (std::gcd(classes[i].modulus, classes[j].modulus) != 1)
                throw ConfigError("crt_combine: moduli " + std::to_string(classes[i].modulus) +
                                  " and " + std::to_string(classes[j].modulus) +
                                  " are not coprime");
    throw ConfigError("crt_combine: moduli not coprime (pair not identified)");
}

} // namespace

BigCongruence crt_combine(std::span<const Congruence> classes) {
    if (classes.empty()) return BigCongruence{0, 1};
    std::vector<BigCongruence> layer;
    layer.reserve(classes.size());
    for (const auto& c : classes) {
        if (c.modulus < 2) throw ConfigError("crt_combine: modulus must be >= 2");
        if (c.residue >= c.modulus) throw ConfigError("crt_combine: residue out of range");
        layer.push_back(BigCongruence{mpz_class(static_cast<unsigned long>(c.residue)),
                                      mpz_class(static_cast<unsigned long>(c.modulus))});
    }
    // Balanced pairwise merging keeps the big-integer sizes in check.
    try {
        while (layer.size() > 1) {
            std::vector<BigCongruence> next;
            next.reserve((layer.size() + 1) / 2);
            for (size_t i = 0; i + 1 < layer.size(); i += 2)
                next.push_back(crt_pair(layer[i], layer[i + 1]));
            if (layer.size() % 2) next.push_back(layer.back());
            layer = std::move(next);
        }
    } catch (const ConfigError&) {
        report_non_coprime(classes);
    }
    return layer[0];
}

uint64_t primitive_root(uint64_t p) {
    if (p == 2) return 1;
    uint64_t phi = p - 1;
    // Prime factors of p-1 by trial division; p is desk-scale here.
    std::vector<uint64_t> factors;
    uint64_t m = phi;
    for (uint64_t d = 2; d * d <= m; d == 2 ? d = 3 : d += 2) {
        if (m % d == 0) {
            factors.push_back(d);
            while (m % d == 0) m /= d;
        }
    }
    if (m > 1) factors.push_back(m);
    for (uint64_t g = 2; g < p; ++g) {
        bool generates = true;
        for (uint64_t q : factors) {
            if (powmod(g, phi / q, p) == 1) {
                generates = false;
                break;
            }
        }
        if (generates) return g;
    }
    throw ConfigError("primitive_root: no generator found; is p prime?");
}

uint64_t discrete_log(uint64_t p, uint64_t rho, uint64_t a) {
    a %= p;
    if (a == 0) throw ConfigError("discrete_log: a is 0 mod p");
    if (p == 2) return 0; // group is trivial, a = 1
    uint64_t n = p - 1;
    uint64_t m = static_cast<uint64_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    std::unordered_map<uint64_t, uint64_t> baby;
    baby.reserve(m * 2);
    uint64_t cur = 1;
    for (uint64_t j = 0; j < m; ++j) {
        baby.emplace(cur, j); // keeps the smallest j on collision
        cur = mulmod(cur, rho, p);
    }
    // giant step factor rho^{-m} = rho^{n-m}
    uint64_t giant = powmod(rho, n - (m % n), p);
    cur = a;
    for (uint64_t i = 0; i <= m; ++i) {
        auto it = baby.find(cur);
        if (it != baby.end()) {
            uint64_t s = i * m + it->second;
            if (s < n) return s;
            return s % n;
        }
        cur = mulmod(cur, giant, p);
    }
    throw ConfigError("discrete_log: no solution; is rho a primitive root mod p?");
}

} // namespace gapforge
