#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "gapforge/primality.hpp"

namespace gapforge {

// g1(x) = log x * log2 x * log4 x / (log3 x)^2, natural logs throughout.
// NaN below the domain of the iterated logs.
double g1(double x);
// g2(x) = log x * log2 x * log4 x / log3 x.
double g2(double x);
// The same, evaluated from ln(x) so astronomically large arguments work.
double g2_from_ln(double ln_x);
// Natural log of a positive big integer.
double ln_mpz(const mpz_class& n);

struct TranscriptEntry {
    mpz_class n;
    CompositenessWitness witness;
};

// Machine-checkable record that q0^k sits strictly inside the maximal
// prime gap (left_prime, right_prime), with a compositeness witness for
// every interior integer.
struct GapCertificate {
    uint64_t x = 0;
    uint64_t k = 0;
    double c = 0;
    double C0 = 0;
    mpz_class m0;
    mpz_class P_x; // the CRT modulus, i.e. the row step
    uint64_t r = 0;
    mpz_class q0;
    mpz_class window_lo; // q0^k
    mpz_class window_hi; // q0^k + y - 1
    mpz_class left_prime;
    mpz_class right_prime;
    uint64_t gap_length = 0;
    double g2_value = 0;  // NaN when log4(left_prime) <= 0
    double ratio = 0;     // NaN when g2_value is NaN
    std::vector<TranscriptEntry> transcript;
};

// Walks outward from q0^k one integer at a time until both neighbouring
// primes are found, recording a witness for every composite in between.
// Fills only the gap-related fields; pipeline metadata is the caller's.
GapCertificate certify_gap(const mpz_class& q0, uint64_t k, uint64_t y_window);

std::string certificate_to_json(const GapCertificate& cert);
GapCertificate certificate_from_json(const std::string& text);

struct VerifyResult {
    bool ok = true;
    std::vector<std::string> issues;

    void fail(std::string why) {
        ok = false;
        issues.push_back(std::move(why));
    }
};

// Independent re-verification: fresh primality tests, fresh reductions,
// no reliance on scan-time state.
VerifyResult verify_certificate(const GapCertificate& cert);

} // namespace gapforge
