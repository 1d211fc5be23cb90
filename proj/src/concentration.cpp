#include "gapforge/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <omp.h>

#include "gapforge/errors.hpp"
#include "gapforge/rng.hpp"

namespace gapforge {

GoodSetParams make_good_set_params(const SieveContext& ctx, double tolerance) {
    GoodSetParams params;
    params.ctx = ctx;
    if (tolerance < 0) {
        double lx = std::log(static_cast<double>(ctx.x));
        params.tolerance = std::pow(lx, -1.0 / 40.0);
    } else {
        params.tolerance = tolerance;
    }
    uint64_t k = ctx.k;
    for (uint64_t u = 1; u <= k; ++u) {
        if (std::gcd(u, k) != 1) continue;
        params.S_u[u] = {};
        params.d_u[u] = std::gcd(u - 1, k); // gcd(0, k) = k covers u = 1
        params.r_star[u] = 0.0;
    }
    for (uint64_t s : ctx.S) {
        uint64_t u = s % k;
        auto it = params.S_u.find(u);
        if (it == params.S_u.end()) continue; // s | k; can't happen for s > k
        it->second.push_back(s);
        params.families.emplace(s, admissible_classes(s, k));
    }
    for (auto& [u, list] : params.S_u) {
        double sum = 0.0;
        for (uint64_t s : list) sum += 1.0 / static_cast<double>(s);
        params.r_star[u] = sum / static_cast<double>(params.d_u[u]);
    }
    return params;
}

double r_of(int64_t n, uint64_t u, const GoodSetParams& params) {
    auto it = params.S_u.find(u % params.ctx.k);
    if (it == params.S_u.end())
        throw ConfigError("r_of: u not coprime to k");
    double sum = 0.0;
    for (uint64_t s : it->second)
        if (shift_solvable(n, s, params.ctx.k)) sum += 1.0 / static_cast<double>(s);
    return sum;
}

bool in_G(int64_t n, const GoodSetParams& params) {
    if (n < static_cast<int64_t>(params.ctx.x) || n > static_cast<int64_t>(params.ctx.y))
        throw ConfigError("in_G: n outside [x, y]");
    for (const auto& [u, rs] : params.r_star)
        if (std::abs(r_of(n, u, params) - rs) > params.tolerance) return false;
    return true;
}

bool in_Gp(int64_t n, uint64_t p, std::span<const uint64_t> tuple, const GoodSetParams& params,
           bool strict) {
    int64_t x = static_cast<int64_t>(params.ctx.x);
    int64_t y = static_cast<int64_t>(params.ctx.y);
    auto good = [&](int64_t m) {
        if (m < x || m > y) return !strict; // lenient mode treats escapes as good
        return in_G(m, params);
    };
    if (!good(n)) return false;
    for (uint64_t hi : tuple)
        for (uint64_t hl : tuple) {
            if (hi == hl) continue;
            int64_t shift = (static_cast<int64_t>(hi) - static_cast<int64_t>(hl)) *
                            static_cast<int64_t>(p);
            if (!good(n + shift)) return false;
        }
    return true;
}

std::map<uint64_t, uint64_t> sample_a(const GoodSetParams& params, uint64_t seed) {
    std::map<uint64_t, uint64_t> out;
    for (uint64_t s : params.ctx.S) {
        const auto& fam = params.families.at(s);
        SplitMix64 rng(derive_seed(seed, s));
        out[s] = fam.classes[rng.below(fam.classes.size())];
    }
    return out;
}

McResult mc_membership(std::span<const int64_t> n_list, const GoodSetParams& params,
                       uint64_t trials, uint64_t seed) {
    McResult res;
    res.trials = trials;
    if (n_list.empty()) {
        res.estimate = 1.0;
        res.stderr_ = 0.0;
        res.successes = trials;
        return res;
    }
    // Residues per (s, i) precomputed; a trial just compares sampled
    // classes against them.
    const auto& S = params.ctx.S;
    std::vector<std::vector<uint64_t>> residues(S.size());
    for (size_t si = 0; si < S.size(); ++si) {
        residues[si].reserve(n_list.size());
        for (int64_t n : n_list) {
            int64_t r = n % static_cast<int64_t>(S[si]);
            if (r < 0) r += static_cast<int64_t>(S[si]);
            residues[si].push_back(static_cast<uint64_t>(r));
        }
    }
    std::vector<const AdmissibleClassFamily*> fams(S.size());
    for (size_t si = 0; si < S.size(); ++si) fams[si] = &params.families.at(S[si]);

    uint64_t successes = 0;
#pragma omp parallel for reduction(+ : successes) schedule(static)
    for (int64_t trial = 0; trial < static_cast<int64_t>(trials); ++trial) {
        SplitMix64 rng(derive_seed(seed, static_cast<uint64_t>(trial)));
        bool all_survive = true;
        for (size_t si = 0; si < S.size() && all_survive; ++si) {
            uint64_t cls = fams[si]->classes[rng.below(fams[si]->classes.size())];
            for (uint64_t r : residues[si]) {
                if (r == cls) {
                    all_survive = false;
                    break;
                }
            }
        }
        successes += all_survive ? 1 : 0;
    }
    res.successes = successes;
    res.estimate = trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0;
    res.stderr_ = trials ? std::sqrt(std::max(res.estimate * (1.0 - res.estimate), 0.0) /
                                     static_cast<double>(trials))
                         : 0.0;
    return res;
}

double exact_membership(std::span<const int64_t> n_list, const GoodSetParams& params) {
    double prob = 1.0;
    for (uint64_t s : params.ctx.S) {
        const auto& fam = params.families.at(s);
        std::vector<uint64_t> hit;
        for (int64_t n : n_list) {
            int64_t r = n % static_cast<int64_t>(s);
            if (r < 0) r += static_cast<int64_t>(s);
            uint64_t ru = static_cast<uint64_t>(r);
            if (fam.contains(ru) && std::find(hit.begin(), hit.end(), ru) == hit.end())
                hit.push_back(ru);
        }
        prob *= 1.0 - static_cast<double>(hit.size()) / static_cast<double>(fam.classes.size());
    }
    return prob;
}

SigmaValue sigma(const GoodSetParams& params) {
    SigmaValue out;
    out.terms = params.ctx.S.size();
    for (auto it = params.ctx.S.rbegin(); it != params.ctx.S.rend(); ++it)
        out.sigma *= 1.0 - 1.0 / static_cast<double>(*it);
    return out;
}

} // namespace gapforge
