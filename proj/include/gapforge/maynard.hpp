#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "gapforge/concentration.hpp"

namespace gapforge {

// Admissible r-tuples -------------------------------------------------------

// Distinct shifts in [0, 2r^2] missing a residue class mod every prime
// <= r. Deterministic greedy smallest-next scan.
std::vector<uint64_t> find_admissible_tuple(uint64_t r);

bool is_admissible(std::span<const int64_t> tuple);

// Linear systems ------------------------------------------------------------

struct LinearForm {
    int64_t a = 1;
    int64_t b = 0;
    int64_t eval(int64_t n) const { return a * n + b; }
};

struct LinearSystem {
    std::vector<LinearForm> forms;
    uint64_t B = 1;
    double theta = 0.25;
    uint64_t W = 1; // prod of p <= 2g^2 with p not dividing B

    uint64_t g() const { return forms.size(); }

    static LinearSystem shifted_tuple(std::span<const uint64_t> tuple, uint64_t scale = 1,
                                      uint64_t B = 1);
    static LinearSystem from_forms(std::vector<LinearForm> forms, uint64_t B = 1);
};

bool is_admissible_system(const LinearSystem& sys);

// R = x^{theta/4} clamped into [x^{theta/10}, x^{theta/3}].
uint64_t default_weight_radius(uint64_t x, double theta = 0.25);

// omega / singular series ---------------------------------------------------

struct OmegaEntry {
    uint64_t omega = 0;
    std::vector<uint64_t> roots;   // elements of {1..p}, ascending
    std::vector<uint64_t> j_index; // parallel: least 1-based form index per root
};

struct OmegaTable {
    std::map<uint64_t, OmegaEntry> per_prime;
    const OmegaEntry& at(uint64_t p) const { return per_prime.at(p); }
};

OmegaTable omega_table(const LinearSystem& sys, uint64_t p_max);

struct SingularSeries {
    double value = 1.0;
    uint64_t excluded = 1; // the modulus D whose primes are skipped
    uint64_t cutoff = 0;
    double tail_bound = 0.0;
};

SingularSeries singular_series(const LinearSystem& sys, uint64_t D, uint64_t cutoff);

// Smooth cutoff -------------------------------------------------------------

// C-infinity non-increasing glue: 1 on [0, 1/10], 0 on [1, inf).
double psi_smooth(double t);

// F(t) = psi(sum t_i) * prod psi(t_i/U_g) / (1 + T_g t_i), with
// T_g = g log g and U_g = g^{-1/2}.
double F_eval(std::span<const double> t, uint64_t g);

// Weight tables -------------------------------------------------------------

using DTuple = std::vector<uint64_t>;

struct WeightTable {
    LinearSystem system;
    uint64_t R = 0;
    int64_t n_lo = 0, n_hi = 0; // weights cover [n_lo, n_hi)
    double T_g = 0, U_g = 0;
    std::map<DTuple, double> y;      // y_r over the support lattice
    std::map<DTuple, double> lambda; // nonzero lambda_d
    std::vector<double> w;           // w[n - n_lo]

    double w_at(int64_t n) const { return w[static_cast<size_t>(n - n_lo)]; }
    bool covers(int64_t n) const { return n >= n_lo && n < n_hi; }
};

struct WeightOptions {
    uint64_t lattice_budget = 4'000'000; // tuples; capacity error beyond
    uint64_t series_cutoff = 100'000;    // singular series exact cutoff
};

WeightTable weight_table(const LinearSystem& sys, int64_t n_lo, int64_t n_hi, uint64_t R,
                         const WeightOptions& opts = {});

// Restricted weights --------------------------------------------------------

// D * w_n when the shifted power congruence is solvable at n mod p, else 0,
// with D = gcd(p-1, k).
double w_star(uint64_t p, int64_t n, uint64_t k, const WeightTable& table);

// w*(p,n) gated by membership in G(p) for the given tuple.
double w_final(uint64_t p, int64_t n, uint64_t k, const WeightTable& table,
               const GoodSetParams& good, std::span<const uint64_t> tuple, bool strict = true);

// Integrals -----------------------------------------------------------------

struct IntegralResult {
    double value = 0;
    double error_estimate = 0;
};

using Integrand = std::function<double(std::span<const double>)>;

// I_g = int F^2 over [0,inf)^g; midpoint tensor quadrature for g <= 6.
IntegralResult I_g(uint64_t g);
IntegralResult I_g(uint64_t g, const Integrand& F, double axis_hi);
// J_g = int (int F dt_g)^2 over the first g-1 axes.
IntegralResult J_g(uint64_t g);
IntegralResult J_g(uint64_t g, const Integrand& F, double axis_hi);
// Independent Monte-Carlo route, used to cross-check the quadrature and for
// g beyond tensor reach.
IntegralResult I_g_mc(uint64_t g, uint64_t samples, uint64_t seed);
IntegralResult I_g_mc(uint64_t g, const Integrand& F, double axis_hi, uint64_t samples,
                      uint64_t seed);

// Empirical checks ----------------------------------------------------------

struct SumCheckReport {
    double weight_sum = 0;     // Sum w_n (or Sum 1_P w_n)
    double predicted = 0;      // main term
    double ratio = 0;          // weight_sum / predicted
    double integral = 0;       // I_g or J_g used
    double integral_error = 0;
    double series_value = 0;
    uint64_t count = 0;        // #A(x) resp. #P_{L,A}(x)
};

SumCheckReport weight_sum_check(const WeightTable& table);
SumCheckReport prime_weight_sum_check(const WeightTable& table, size_t form_index);

struct CharacterSumReport {
    double sum_w = 0;
    double sum_w_star = 0;
    double ratio = 0; // sum_w_star / sum_w
    double sum_w_prime = 0;      // Sum 1_P(L(n)) w_n
    double sum_w_star_prime = 0; // Sum 1_P(L(n)) w*(p,n)
    double ratio_prime = 0;
};

CharacterSumReport character_restricted_sum_check(uint64_t p, uint64_t k,
                                                  const WeightTable& table,
                                                  size_t form_index = 0);

struct MomentReport {
    double m0 = 0, m1 = 0, m2 = 0; // Sum w_n r(n~,u)^j for j = 0,1,2
    double r_star = 0;
    double centered_identity = 0; // m2 - 2 r* m1 + r*^2 m0
    double centered_direct = 0;   // Sum w_n (r - r*)^2
    double ratio1 = 0;            // m1 / (r* m0)
    double ratio2 = 0;            // m2 / (r*^2 m0)
};

// Moments of r(n + (h_i - h_l) p, u) against the weight table, optionally
// restricted to n with L(n) prime when prime_indicator is set.
MomentReport concentration_moment_check(const WeightTable& table, const GoodSetParams& good,
                                        uint64_t p, uint64_t u, size_t i, size_t l,
                                        bool prime_indicator = false, size_t form_index = 0);

} // namespace gapforge
