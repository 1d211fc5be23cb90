#include "gapforge/reference.hpp"

#include "gapforge/concentration.hpp"
#include "gapforge/power_residues.hpp"
#include "gapforge/primality.hpp"
#include "gapforge/rng.hpp"

namespace gapforge {
namespace reference {

bool is_prime_trial(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::vector<uint64_t> prime_range_trial(uint64_t lo, uint64_t hi) {
    std::vector<uint64_t> out;
    for (uint64_t n = lo + 1; n <= hi && n >= lo + 1; ++n)
        if (is_prime_trial(n)) out.push_back(n);
    return out;
}

uint64_t crt_scan(std::span<const Congruence> classes, uint64_t modulus_product) {
    for (uint64_t m = 0; m < modulus_product; ++m) {
        bool ok = true;
        for (const auto& c : classes)
            if (m % c.modulus != c.residue) {
                ok = false;
                break;
            }
        if (ok) return m;
    }
    return modulus_product; // unreachable for consistent input
}

uint64_t smooth_count_trial(uint64_t y, uint64_t z) {
    uint64_t count = 0;
    for (uint64_t n = 1; n <= y; ++n) {
        uint64_t m = n;
        for (uint64_t p = 2; p <= z && m > 1; ++p)
            while (m % p == 0) m /= p;
        if (m == 1) ++count;
    }
    return count;
}

mpq_class sigma_exact(std::span<const uint64_t> primes) {
    mpq_class prod(1);
    for (uint64_t s : primes) {
        prod *= mpq_class(static_cast<unsigned long>(s - 1), static_cast<unsigned long>(s));
    }
    prod.canonicalize();
    return prod;
}

bool sift_survives_naive(const SieveContext& ctx, const ResidueSystem& system, uint64_t n) {
    for (const auto& [s, wc] : system.a)
        if (n % s == wc.cls) return false;
    for (const auto& [p, wc] : system.b)
        if (n % p == wc.cls) return false;
    for (uint64_t q = 2; q <= ctx.x; ++q) {
        if (!is_prime_trial(q)) continue;
        if (system.a.count(q) || system.b.count(q)) continue;
        if (n % q == 0) return false;
    }
    return true;
}

double weight_naive(const WeightTable& table, int64_t n) {
    // The weight vanishes off the W-coprime classes.
    for (uint64_t q = 2; q <= 2 * table.system.g() * table.system.g(); ++q) {
        if (!is_prime_trial(q) || table.system.B % q == 0) continue;
        for (const auto& f : table.system.forms)
            if (f.eval(n) % static_cast<int64_t>(q) == 0) return 0.0;
    }
    double sum = 0.0;
    for (const auto& [d, lam] : table.lambda) {
        bool divides = true;
        for (size_t i = 0; i < d.size() && divides; ++i) {
            int64_t v = table.system.forms[i].eval(n);
            uint64_t m = static_cast<uint64_t>(v < 0 ? -v : v);
            if (d[i] != 1 && (m == 0 || m % d[i] != 0)) divides = false;
        }
        if (divides) sum += lam;
    }
    return sum * sum;
}

NaiveRow scan_row_naive(const mpz_class& m0, const mpz_class& modulus, uint64_t k, uint64_t r,
                        uint64_t y) {
    NaiveRow row;
    row.r = r;
    mpz_class q0 = m0 + 1 + r * modulus;
    row.q0_prime = is_prime(q0);
    if (!row.q0_prime) return row;
    mpz_class q0k;
    mpz_pow_ui(q0k.get_mpz_t(), q0.get_mpz_t(), static_cast<unsigned long>(k));
    for (uint64_t u = 2; u <= y; ++u) {
        mpz_class a = q0k + (u - 1);
        if (is_prime(a)) row.prime_positions.push_back(u);
    }
    return row;
}

double mc_membership_serial(std::span<const int64_t> n_list, const GoodSetParams& params,
                            uint64_t trials, uint64_t seed) {
    if (n_list.empty()) return 1.0;
    uint64_t successes = 0;
    for (uint64_t trial = 0; trial < trials; ++trial) {
        SplitMix64 rng(derive_seed(seed, trial));
        bool survive = true;
        for (size_t si = 0; si < params.ctx.S.size() && survive; ++si) {
            uint64_t s = params.ctx.S[si];
            const auto& fam = params.families.at(s);
            uint64_t cls = fam.classes[rng.below(fam.classes.size())];
            for (int64_t n : n_list) {
                int64_t rres = n % static_cast<int64_t>(s);
                if (rres < 0) rres += static_cast<int64_t>(s);
                if (static_cast<uint64_t>(rres) == cls) {
                    survive = false;
                    break;
                }
            }
        }
        if (survive) ++successes;
    }
    return static_cast<double>(successes) / static_cast<double>(trials);
}

} // namespace reference
} // namespace gapforge
