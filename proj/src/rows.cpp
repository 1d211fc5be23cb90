#include "gapforge/rows.hpp"

#include <cmath>
#include <optional>

#include <omp.h>

#include "gapforge/errors.hpp"
#include "gapforge/modular.hpp"
#include "gapforge/primality.hpp"
#include "gapforge/primes.hpp"

namespace gapforge {

std::vector<uint64_t> forced_divisor_table(const SieveContext& ctx, const mpz_class& m0) {
    uint64_t c0x = static_cast<uint64_t>(std::floor(ctx.C0 * static_cast<double>(ctx.x)));
    // table[u-2] = smallest prime forcing position u, 0 if none
    std::vector<uint64_t> table(ctx.y >= 2 ? ctx.y - 1 : 0, 0);
    mpz_class m0p1 = m0 + 1;
    for (uint64_t pi : prime_range(0, c0x)) {
        uint64_t base = mpz_fdiv_ui(m0p1.get_mpz_t(), pi);
        uint64_t death = (1 + pi - powmod(base, ctx.k, pi)) % pi; // 1 - (m0+1)^k mod pi
        uint64_t first = death == 0 ? pi : death;                 // smallest u >= 1 in the class
        for (uint64_t u = first; u <= ctx.y; u += pi) {
            if (u < 2) continue;
            if (table[u - 2] == 0) table[u - 2] = pi;
        }
    }
    return table;
}

ScanReport scan_rows(const SieveContext& ctx, const mpz_class& m0, const mpz_class& modulus,
                     uint64_t r_max) {
    if (r_max < 1) throw ConfigError("scan_rows: r_max must be >= 1");

    auto forced = forced_divisor_table(ctx, m0);
    ScanReport report;
    report.r_max = r_max;
    for (uint64_t f : forced)
        if (f == 0) ++report.unforced_count;

    std::vector<std::optional<RowStatus>> slots(r_max);
    uint64_t bad_u = 0; // forced-position violation, reported after the loop

#pragma omp parallel for schedule(dynamic, 64)
    for (int64_t ri = 1; ri <= static_cast<int64_t>(r_max); ++ri) {
        uint64_t r = static_cast<uint64_t>(ri);
        mpz_class q0 = m0 + 1 + r * modulus;
        if (!is_prime(q0)) continue;

        RowStatus row;
        row.r = r;
        row.q0 = q0;

        mpz_class q0k;
        mpz_pow_ui(q0k.get_mpz_t(), q0.get_mpz_t(), static_cast<unsigned long>(ctx.k));
        mpz_class a;
        for (uint64_t u = 2; u <= ctx.y; ++u) {
            uint64_t pi = forced[u - 2];
            if (pi != 0) {
                // direct reduction of a_{r,u} = q0^k + u - 1 mod its class prime
                uint64_t q0r = mpz_fdiv_ui(q0.get_mpz_t(), pi);
                uint64_t val = (powmod(q0r, ctx.k, pi) + (u - 1) % pi) % pi;
                if (val != 0) {
#pragma omp critical
                    bad_u = u;
                }
                continue;
            }
            a = q0k + (u - 1);
            if (is_prime(a)) row.prime_positions.push_back(u);
        }
        row.clean = row.prime_positions.empty();
        slots[r - 1] = std::move(row);
    }

    if (bad_u != 0)
        throw ConfigError("scan_rows: forced position u=" + std::to_string(bad_u) +
                          " not divisible by its class prime");

    for (auto& slot : slots) {
        if (!slot) continue;
        ++report.rows_prime;
        report.rows.push_back(std::move(*slot));
    }
    return report;
}

} // namespace gapforge
