#pragma once

#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "gapforge/context.hpp"

namespace gapforge {

// One matrix row r with prime q0 = m0 + 1 + r*modulus. Positions u in
// [2, y] split into "forced" (covered by a residue class of some prime
// dividing the modulus; necessarily composite, divisor recorded) and
// "unforced" (tested individually). A row is clean when no unforced
// position is prime.
struct RowStatus {
    uint64_t r = 0;
    mpz_class q0;
    bool clean = false;
    std::vector<uint64_t> prime_positions; // u with a_{r,u} prime (dirty rows)
};

struct ScanReport {
    std::vector<RowStatus> rows; // rows with q0 prime, ascending r
    uint64_t r_max = 0;
    uint64_t rows_prime = 0;     // |R_0 within [1, r_max]|
    uint64_t unforced_count = 0; // positions in [2,y] not covered by any class
};

// Scans rows r = 1..r_max. Forced positions are re-verified by direct
// reduction of a_{r,u} each row; unforced ones get a primality test.
// Parallel over rows; output independent of thread count.
ScanReport scan_rows(const SieveContext& ctx, const mpz_class& m0, const mpz_class& modulus,
                     uint64_t r_max);

// Smallest forcing prime per position u in [2, y]: the death class of
// prime pi is 1 - (m0+1)^k mod pi, constant across rows. Zero = unforced.
std::vector<uint64_t> forced_divisor_table(const SieveContext& ctx, const mpz_class& m0);

} // namespace gapforge
