#include "gapforge/primality.hpp"

#include <array>

#include "gapforge/errors.hpp"
#include "gapforge/primes.hpp"

namespace gapforge {

namespace {

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

uint64_t powmod_u64(uint64_t base, uint64_t exp, uint64_t m) {
    uint64_t r = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) r = mulmod_u64(r, base, m);
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    return r;
}

bool mr_witness_u64(uint64_t n, uint64_t a, uint64_t d, int s) {
    uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) return false;
    for (int i = 1; i < s; ++i) {
        x = mulmod_u64(x, x, n);
        if (x == n - 1) return false;
    }
    return true; // a witnesses compositeness
}

// Valid deterministically for all n < 3.3e24, so in particular for u64.
constexpr std::array<uint64_t, 12> kU64Witnesses = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

// First primes, used as the fixed big-integer witness schedule.
constexpr std::array<uint64_t, 64> kSmallPrimes = {
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,
    59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107, 109, 113, 127, 131,
    137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223,
    227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311};

// Returns 0 when n passes all rounds, otherwise the 1-based round that
// exposed n as composite.
int mr_rounds_mpz(const mpz_class& n, int rounds) {
    mpz_class nm1 = n - 1;
    mpz_class d = nm1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
    mpz_class x;
    for (int round = 0; round < rounds; ++round) {
        mpz_class a = static_cast<unsigned long>(
            kSmallPrimes[static_cast<size_t>(round) % kSmallPrimes.size()]);
        if (mpz_divisible_p(n.get_mpz_t(), a.get_mpz_t())) return round + 1;
        mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
        if (x == 1 || x == nm1) continue;
        bool composite = true;
        for (unsigned long i = 1; i < s; ++i) {
            mpz_powm_ui(x.get_mpz_t(), x.get_mpz_t(), 2, n.get_mpz_t());
            if (x == nm1) {
                composite = false;
                break;
            }
        }
        if (composite) return round + 1;
    }
    return 0;
}

// Strong Lucas test with Selfridge's parameter choice. Assumes n odd,
// n > 3, not a perfect square, no tiny factors.
bool strong_lucas_prp(const mpz_class& n) {
    // Find D = 5, -7, 9, -11, ... with Jacobi(D, n) = -1.
    long d_abs = 5;
    int sign = 1;
    mpz_class D;
    for (;;) {
        D = sign * d_abs;
        int j = mpz_jacobi(D.get_mpz_t(), n.get_mpz_t());
        if (j == -1) break;
        if (j == 0) return false; // shares a factor with n
        d_abs += 2;
        sign = -sign;
        if (d_abs > 1000) return false; // unreachable for non-squares
    }
    // P = 1, Q = (1 - D) / 4.
    mpz_class Q = (1 - D) / 4;
    mpz_class delta = n + 1;
    unsigned long s = mpz_scan1(delta.get_mpz_t(), 0);
    mpz_class t = delta;
    mpz_fdiv_q_2exp(t.get_mpz_t(), t.get_mpz_t(), s);

    // Binary ladder for U_t, V_t (P=1).
    mpz_class U = 0, V = 2, Qk = 1;
    size_t bits = mpz_sizeinbase(t.get_mpz_t(), 2);
    mpz_class U2, V2, tmp;
    for (size_t i = bits; i-- > 0;) {
        // (U, V) <- (U*V, V^2 - 2*Q^k), doubling
        U2 = U * V % n;
        V2 = (V * V - 2 * Qk) % n;
        Qk = Qk * Qk % n;
        U = U2;
        V = V2;
        if (mpz_tstbit(t.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) {
            // (U, V) <- ((U + V)/2 mod n, (D*U + V)/2 mod n), increment
            tmp = U + V;
            if (mpz_odd_p(tmp.get_mpz_t())) tmp += n;
            tmp /= 2;
            V2 = D * U + V;
            if (mpz_odd_p(V2.get_mpz_t())) V2 += n;
            V2 /= 2;
            U = tmp % n;
            V = V2 % n;
            Qk = Qk * Q % n;
        }
    }
    if (U % n == 0 || V % n == 0) return true;
    for (unsigned long r = 1; r < s; ++r) {
        V = (V * V - 2 * Qk) % n;
        if (V % n == 0) return true;
        Qk = Qk * Qk % n;
    }
    return false;
}

} // namespace

bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : kU64Witnesses) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (uint64_t a : kU64Witnesses)
        if (mr_witness_u64(n, a, d, s)) return false;
    return true;
}

bool is_prime(const mpz_class& n, const PrimalityOptions& opts) {
    if (n < 0) throw ConfigError("is_prime: n must be >= 0");
    if (mpz_fits_ulong_p(n.get_mpz_t())) {
        unsigned long v = mpz_get_ui(n.get_mpz_t());
        if (v <= UINT64_MAX) return is_prime_u64(v);
    }
    if (mpz_sizeinbase(n.get_mpz_t(), 2) <= 64) {
        // 64-bit but does not fit ulong on this ABI; export manually.
        uint64_t v = 0;
        mpz_class tmp = n;
        for (int i = 0; i < 64 && tmp != 0; i += 32) {
            v |= static_cast<uint64_t>(mpz_get_ui(tmp.get_mpz_t()) & 0xffffffffUL) << i;
            mpz_fdiv_q_2exp(tmp.get_mpz_t(), tmp.get_mpz_t(), 32);
        }
        return is_prime_u64(v);
    }
    if (mpz_even_p(n.get_mpz_t())) return false;
    if (mpz_perfect_square_p(n.get_mpz_t())) return false;
    if (mr_rounds_mpz(n, opts.rounds) != 0) return false;
    if (opts.lucas && !strong_lucas_prp(n)) return false;
    return true;
}

std::optional<CompositenessWitness> compositeness_witness(const mpz_class& n,
                                                          uint64_t trial_limit,
                                                          const PrimalityOptions& opts) {
    if (n < 4) {
        if (n == 0 || n == 1) {
            CompositenessWitness w;
            w.has_divisor = true;
            w.divisor = n; // 0 and 1 are non-prime by convention; caller filters
            return w;
        }
        return std::nullopt; // 2, 3 prime
    }
    static const PrimeTable small = PrimeTable::build(100000);
    for (uint64_t p : small.primes()) {
        if (p > trial_limit) break;
        if (mpz_class(n % p) == 0) {
            if (n == static_cast<long>(p)) return std::nullopt;
            CompositenessWitness w;
            w.has_divisor = true;
            w.divisor = static_cast<unsigned long>(p);
            return w;
        }
        // No factor below cbrt-ish sizes to find; bail once p*p*... > n.
        if (mpz_class(p) * static_cast<unsigned long>(p) > n) return std::nullopt;
    }
    if (mpz_perfect_square_p(n.get_mpz_t())) {
        CompositenessWitness w;
        w.has_divisor = true;
        mpz_sqrt(w.divisor.get_mpz_t(), n.get_mpz_t());
        return w;
    }
    int round = mr_rounds_mpz(n, opts.rounds);
    if (round != 0) {
        CompositenessWitness w;
        w.has_divisor = false;
        w.prp_rounds = round;
        return w;
    }
    if (opts.lucas && !strong_lucas_prp(n)) {
        CompositenessWitness w;
        w.has_divisor = false;
        w.prp_rounds = opts.rounds + 1; // sentinel: exposed by the Lucas stage
        return w;
    }
    return std::nullopt;
}

bool check_compositeness_witness(const mpz_class& n, const CompositenessWitness& w,
                                 const PrimalityOptions& opts) {
    if (w.has_divisor) {
        if (n <= 1) return w.divisor == n;
        if (w.divisor <= 1 || w.divisor >= n) return false;
        return mpz_divisible_p(n.get_mpz_t(), w.divisor.get_mpz_t()) != 0;
    }
    if (w.prp_rounds == opts.rounds + 1)
        return mr_rounds_mpz(n, opts.rounds) == 0 && !strong_lucas_prp(n);
    return mr_rounds_mpz(n, w.prp_rounds) == w.prp_rounds;
}

} // namespace gapforge
