#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace gapforge {

struct ContextOverrides {
    std::optional<uint64_t> y;
    std::optional<uint64_t> z;
    std::optional<uint64_t> s_floor;
};

// Scale parameters plus the derived prime sets. S, P, Q are pairwise
// disjoint; Ptilde lives in (x, C0*x] and may overlap Q.
struct SieveContext {
    uint64_t x = 0;
    uint64_t k = 2;
    double c = 1.0;
    double C0 = 2.0;
    uint64_t y = 0;
    uint64_t z = 0;
    uint64_t s_floor = 0;
    std::vector<uint64_t> S;      // primes in (s_floor, z]
    std::vector<uint64_t> P;      // primes in (x/2, x]
    std::vector<uint64_t> Q;      // primes in (x, y]
    std::vector<uint64_t> Ptilde; // primes in (x, C0*x] meeting the k-parity congruence
};

// y/x from the default window formula, as a function of log x. Kept
// separate so the asymptotic formula can be unit-tested far beyond any
// buildable scale.
double default_y_factor(double log_x, double c);

// x^{log3(x) / (4 log2(x))}, the default smoothness bound, again via log x.
double default_z_value(double log_x);

// Builds the context. The default window formulas degenerate at desk
// scale; when they do, the missing values must be supplied via overrides
// and the error says exactly which formula gave out. With full overrides,
// x as small as 10 is accepted (the x >= 100 floor guards the defaults).
SieveContext build_context(uint64_t x, uint64_t k, double c, double C0,
                           const ContextOverrides& overrides = {});

} // namespace gapforge
