#include "gapforge/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "gapforge/errors.hpp"
#include "gapforge/modular.hpp"
#include "gapforge/power_residues.hpp"
#include "gapforge/primality.hpp"
#include "gapforge/primes.hpp"
#include "gapforge/rng.hpp"

namespace gapforge {

namespace {

// Survivor bitmap over (x, y]: index i stands for n = x + 1 + i.
struct Window {
    uint64_t x, y;
    std::vector<uint8_t> alive;

    explicit Window(const SieveContext& ctx) : x(ctx.x), y(ctx.y), alive(y - x, 1) {}

    void kill_class(uint64_t cls, uint64_t m) {
        // first n > x with n = cls (mod m)
        uint64_t r = (x + 1) % m;
        uint64_t first = x + 1 + (cls + m - r) % m;
        for (uint64_t n = first; n <= y; n += m) alive[n - x - 1] = 0;
    }

    uint64_t count() const {
        uint64_t c = 0;
        for (uint8_t v : alive) c += v;
        return c;
    }
};

WitnessedClass witnessed(uint64_t cls, uint64_t p, uint64_t k) {
    auto wit = shift_witness(static_cast<int64_t>(cls), p, k);
    if (!wit) throw ConfigError("internal: chosen class has no shift witness");
    return WitnessedClass{cls, *wit};
}

uint64_t pick_random_class(uint64_t p, uint64_t k, SplitMix64& rng) {
    if (p == 2) return 0;
    // Uniform over the class family: every class has exactly gcd(p-1,k)
    // witnesses c in [1, p-1], so a uniform c induces a uniform class.
    uint64_t c = 1 + rng.below(p - 1);
    return (1 + p - powmod(c, k, p)) % p;
}

} // namespace

ResidueSystem choose_vectors(const SieveContext& ctx, Strategy strategy, uint64_t seed) {
    ResidueSystem out;

    std::vector<uint64_t> order;
    order.reserve(ctx.S.size() + ctx.P.size());
    order.insert(order.end(), ctx.S.begin(), ctx.S.end());
    order.insert(order.end(), ctx.P.begin(), ctx.P.end());
    std::sort(order.begin(), order.end(), std::greater<>());

    if (strategy == Strategy::Random) {
        for (uint64_t p : order) {
            SplitMix64 rng(derive_seed(seed, p));
            uint64_t cls = pick_random_class(p, ctx.k, rng);
            auto wc = witnessed(cls, p, ctx.k);
            (std::binary_search(ctx.S.begin(), ctx.S.end(), p) ? out.a : out.b)[p] = wc;
        }
        return out;
    }

    // Greedy: track which Q members are still alive and, per prime, count
    // hits per admissible class among them.
    std::vector<uint64_t> survivors = ctx.Q;
    for (uint64_t p : order) {
        std::unordered_map<uint64_t, uint64_t> hits;
        for (uint64_t q : survivors) {
            uint64_t r = q % p;
            if (shift_solvable(static_cast<int64_t>(r), p, ctx.k)) ++hits[r];
        }
        uint64_t best_cls = 0, best_count = 0;
        for (const auto& [cls, count] : hits) {
            if (count > best_count || (count == best_count && count > 0 && cls < best_cls)) {
                best_cls = cls;
                best_count = count;
            }
        }
        auto wc = witnessed(best_cls, p, ctx.k);
        (std::binary_search(ctx.S.begin(), ctx.S.end(), p) ? out.a : out.b)[p] = wc;
        if (best_count > 0) {
            std::erase_if(survivors, [&](uint64_t q) { return q % p == best_cls; });
        }
    }
    return out;
}

SiftedSet sift(const SieveContext& ctx, const ResidueSystem& system) {
    for (uint64_t s : ctx.S)
        if (!system.a.count(s)) throw ConfigError("sift: system missing class for s=" + std::to_string(s));
    for (uint64_t p : ctx.P)
        if (!system.b.count(p)) throw ConfigError("sift: system missing class for p=" + std::to_string(p));

    Window w(ctx);
    for (const auto& [s, wc] : system.a) w.kill_class(wc.cls, s);
    for (const auto& [p, wc] : system.b) w.kill_class(wc.cls, p);
    // Remaining primes q <= x, q not in S u P, sieve the zero class.
    for (uint64_t q : prime_range(0, ctx.x)) {
        if (std::binary_search(ctx.S.begin(), ctx.S.end(), q)) continue;
        if (std::binary_search(ctx.P.begin(), ctx.P.end(), q)) continue;
        w.kill_class(0, q);
    }

    SiftedSet out;
    for (uint64_t i = 0; i < w.alive.size(); ++i) {
        if (!w.alive[i]) continue;
        uint64_t n = ctx.x + 1 + i;
        // Tag: z-smooth or prime. Anything else violates the survivor
        // dichotomy and means the sieve itself is broken.
        uint64_t m = n;
        for (uint64_t p = 2; p * p <= m && p <= ctx.z; ++p)
            while (m % p == 0) m /= p;
        bool smooth = m == 1 || m <= ctx.z;
        if (!smooth && !is_prime_u64(n))
            throw ConfigError("sift: survivor " + std::to_string(n) +
                              " is neither z-smooth nor prime");
        out.members.push_back(n);
        out.provenance.push_back(smooth ? SurvivorKind::Smooth : SurvivorKind::QSurvivor);
    }
    return out;
}

PairingResult pair_exceptions(const SieveContext& ctx, const SiftedSet& sifted) {
    PairingResult out;
    std::vector<uint8_t> used(ctx.Ptilde.size(), 0);
    for (uint64_t u : sifted.members) {
        bool assigned = false;
        for (size_t i = 0; i < ctx.Ptilde.size() && !assigned; ++i) {
            if (used[i]) continue;
            uint64_t p = ctx.Ptilde[i];
            if (!shift_solvable(static_cast<int64_t>(u % p), p, ctx.k)) continue;
            if (ctx.k % 2 == 0 && legendre_symbol(-static_cast<int64_t>(u % p), p) != 1)
                continue; // even k additionally needs (-u/p) = 1
            auto e = shift_witness(static_cast<int64_t>(u % p), p, ctx.k);
            if (!e) continue;
            used[i] = 1;
            out.pairs[u] = {p, *e};
            assigned = true;
        }
        if (!assigned) out.exceptional.push_back(u);
    }
    return out;
}

M0Result assemble_m0(const SieveContext& ctx, const ResidueSystem& system,
                     const PairingResult& pairing) {
    uint64_t c0x = static_cast<uint64_t>(std::floor(ctx.C0 * static_cast<double>(ctx.x)));

    std::map<uint64_t, uint64_t> residue_of; // prime -> residue for m0
    auto assign = [&](uint64_t p, uint64_t r) {
        auto [it, fresh] = residue_of.emplace(p, r);
        if (!fresh && it->second != r)
            throw ConfigError("assemble_m0: conflicting assignment for prime " +
                              std::to_string(p));
    };

    for (const auto& [s, wc] : system.a) assign(s, wc.wit % s);
    for (const auto& [p, wc] : system.b) assign(p, wc.wit % p);
    for (const auto& [u, pe] : pairing.pairs) assign(pe.first, pe.second % pe.first);
    for (uint64_t q : prime_range(0, c0x))
        if (!residue_of.count(q)) assign(q, 0); // g_p = 0 for everything else

    std::vector<Congruence> classes;
    classes.reserve(residue_of.size());
    for (const auto& [p, r] : residue_of) classes.push_back(Congruence{r, p});

    BigCongruence crt = crt_combine(classes);
    M0Result out;
    out.modulus = crt.modulus;
    out.m0 = crt.residue == 0 ? crt.modulus : crt.residue;
    return out;
}

} // namespace gapforge
