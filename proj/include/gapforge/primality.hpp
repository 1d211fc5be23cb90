#pragma once

#include <cstdint>
#include <optional>

#include <gmpxx.h>

namespace gapforge {

struct PrimalityOptions {
    // Strong-pseudoprime rounds for n >= 2^64; the witness schedule is the
    // first `rounds` primes, so results are reproducible run to run.
    int rounds = 24;
    // Adds a strong Lucas test (Selfridge parameters) after the MR rounds.
    bool lucas = true;
};

// Deterministic for n < 2^64 (fixed 12-witness Miller-Rabin); above that a
// fixed-witness strong-pseudoprime schedule plus a Lucas-type second test.
bool is_prime(const mpz_class& n, const PrimalityOptions& opts = {});
bool is_prime_u64(uint64_t n);

// How a composite was recognized, for certificate transcripts: either a
// nontrivial divisor, or the number of test rounds after which the fixed
// witness schedule exposed it.
struct CompositenessWitness {
    bool has_divisor = false;
    mpz_class divisor;  // valid iff has_divisor
    int prp_rounds = 0; // valid iff !has_divisor
};

// Returns a witness if n is composite, std::nullopt if n is (probably)
// prime. Trial division by primes <= trial_limit first, then the fixed
// witness schedule.
std::optional<CompositenessWitness> compositeness_witness(const mpz_class& n,
                                                          uint64_t trial_limit = 100000,
                                                          const PrimalityOptions& opts = {});

// Re-checks one transcript entry: a claimed divisor must be nontrivial and
// divide n; a prp_rounds claim is re-run against the same witness schedule.
bool check_compositeness_witness(const mpz_class& n, const CompositenessWitness& w,
                                 const PrimalityOptions& opts = {});

} // namespace gapforge
