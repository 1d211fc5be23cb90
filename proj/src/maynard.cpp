#include "gapforge/maynard.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <omp.h>

#include "gapforge/errors.hpp"
#include "gapforge/modular.hpp"
#include "gapforge/primality.hpp"
#include "gapforge/primes.hpp"
#include "gapforge/rng.hpp"

namespace gapforge {

// --- admissible tuples ------------------------------------------------------

namespace {

bool misses_class_everywhere(std::span<const int64_t> tuple, uint64_t p_max) {
    for (uint64_t p : prime_range(0, p_max)) {
        std::vector<uint8_t> covered(p, 0);
        for (int64_t h : tuple) {
            int64_t r = h % static_cast<int64_t>(p);
            if (r < 0) r += static_cast<int64_t>(p);
            covered[static_cast<size_t>(r)] = 1;
        }
        if (std::all_of(covered.begin(), covered.end(), [](uint8_t v) { return v != 0; }))
            return false;
    }
    return true;
}

} // namespace

bool is_admissible(std::span<const int64_t> tuple) {
    return misses_class_everywhere(tuple, tuple.size());
}

std::vector<uint64_t> find_admissible_tuple(uint64_t r) {
    if (r < 1) throw ConfigError("find_admissible_tuple: r must be >= 1");
    std::vector<uint64_t> tuple = {0};
    std::vector<int64_t> as_signed = {0};
    uint64_t bound = 2 * r * r;
    uint64_t candidate = 1;
    while (tuple.size() < r) {
        if (candidate > bound)
            throw ConfigError("find_admissible_tuple: no admissible tuple within [0, 2r^2]");
        as_signed.push_back(static_cast<int64_t>(candidate));
        if (misses_class_everywhere(as_signed, r)) {
            tuple.push_back(candidate);
        } else {
            as_signed.pop_back();
        }
        ++candidate;
    }
    return tuple;
}

// --- linear systems ---------------------------------------------------------

namespace {

uint64_t compute_W(uint64_t g, uint64_t B) {
    uint64_t w = 1;
    for (uint64_t p : prime_range(0, 2 * g * g))
        if (B % p != 0) w *= p;
    return w;
}

uint64_t euler_phi(uint64_t n) {
    uint64_t result = n;
    for (uint64_t p = 2; p * p <= n; p == 2 ? p = 3 : p += 2) {
        if (n % p == 0) {
            result -= result / p;
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) result -= result / n;
    return result;
}

} // namespace

LinearSystem LinearSystem::shifted_tuple(std::span<const uint64_t> tuple, uint64_t scale,
                                         uint64_t B) {
    LinearSystem sys;
    for (uint64_t h : tuple)
        sys.forms.push_back(LinearForm{1, static_cast<int64_t>(h * scale)});
    sys.B = B;
    sys.W = compute_W(sys.g(), B);
    return sys;
}

LinearSystem LinearSystem::from_forms(std::vector<LinearForm> forms, uint64_t B) {
    LinearSystem sys;
    sys.forms = std::move(forms);
    sys.B = B;
    sys.W = compute_W(sys.g(), B);
    return sys;
}

uint64_t default_weight_radius(uint64_t x, double theta) {
    double lx = std::log(static_cast<double>(x));
    double r = std::exp(lx * theta / 4.0);
    double lo = std::exp(lx * theta / 10.0);
    double hi = std::exp(lx * theta / 3.0);
    return static_cast<uint64_t>(std::max(2.0, std::clamp(r, lo, hi)));
}

namespace {

OmegaEntry omega_entry(const LinearSystem& sys, uint64_t p) {
    OmegaEntry e;
    std::set<uint64_t> roots; // stored in {1..p}
    for (const auto& f : sys.forms) {
        int64_t a = f.a % static_cast<int64_t>(p);
        if (a < 0) a += static_cast<int64_t>(p);
        int64_t b = f.b % static_cast<int64_t>(p);
        if (b < 0) b += static_cast<int64_t>(p);
        if (a == 0) {
            if (b == 0) { // form vanishes identically mod p
                e.omega = p;
                e.roots.clear();
                e.j_index.clear();
                for (uint64_t n = 1; n <= p; ++n) e.roots.push_back(n);
                return e;
            }
            continue; // constant nonzero: no root from this form
        }
        uint64_t inv = powmod(static_cast<uint64_t>(a), p - 2, p);
        uint64_t root = mulmod((p - static_cast<uint64_t>(b)) % p, inv, p);
        roots.insert(root == 0 ? p : root);
    }
    e.roots.assign(roots.begin(), roots.end());
    e.omega = e.roots.size();
    for (uint64_t root : e.roots) {
        uint64_t j = 0;
        for (size_t i = 0; i < sys.forms.size(); ++i) {
            int64_t v = sys.forms[i].eval(static_cast<int64_t>(root % p));
            int64_t r = v % static_cast<int64_t>(p);
            if (r == 0) {
                j = i + 1; // 1-based least index
                break;
            }
        }
        e.j_index.push_back(j);
    }
    return e;
}

} // namespace

OmegaTable omega_table(const LinearSystem& sys, uint64_t p_max) {
    OmegaTable table;
    for (uint64_t p : prime_range(0, p_max)) table.per_prime.emplace(p, omega_entry(sys, p));
    return table;
}

namespace {

// Primes where omega can differ from g: everything <= g plus the divisors
// of the coefficients and of the pairwise determinants.
std::vector<uint64_t> irregular_primes(const LinearSystem& sys) {
    std::set<uint64_t> out;
    for (uint64_t p : prime_range(0, sys.g())) out.insert(p);
    auto add_factors = [&](int64_t v) {
        uint64_t m = static_cast<uint64_t>(v < 0 ? -v : v);
        for (uint64_t d = 2; d * d <= m; d == 2 ? d = 3 : d += 2)
            if (m % d == 0) {
                out.insert(d);
                while (m % d == 0) m /= d;
            }
        if (m > 1) out.insert(m);
    };
    for (const auto& f : sys.forms) add_factors(f.a);
    for (size_t i = 0; i < sys.forms.size(); ++i)
        for (size_t j = i + 1; j < sys.forms.size(); ++j) {
            int64_t det = sys.forms[i].a * sys.forms[j].b - sys.forms[j].a * sys.forms[i].b;
            if (det != 0) add_factors(det);
        }
    return {out.begin(), out.end()};
}

} // namespace

bool is_admissible_system(const LinearSystem& sys) {
    if (sys.forms.empty()) return false;
    for (uint64_t p : irregular_primes(sys))
        if (omega_entry(sys, p).omega >= p) return false;
    return true;
}

SingularSeries singular_series(const LinearSystem& sys, uint64_t D, uint64_t cutoff) {
    SingularSeries out;
    out.excluded = D == 0 ? 1 : D;
    out.cutoff = cutoff;
    double g = static_cast<double>(sys.g());
    double log_value = 0.0;
    auto factor_ln = [&](uint64_t p) {
        OmegaEntry e = omega_entry(sys, p);
        if (e.omega >= p)
            throw ConfigError("singular_series: omega(p) = p at p=" + std::to_string(p) +
                              "; system is inadmissible");
        double pp = static_cast<double>(p);
        return std::log1p(-static_cast<double>(e.omega) / pp) - g * std::log1p(-1.0 / pp);
    };
    for (uint64_t p : prime_range(0, cutoff)) {
        if (out.excluded % p == 0) continue;
        log_value += factor_ln(p);
    }
    // Irregular primes above the cutoff still get exact factors so the tail
    // really is the omega = g regime.
    for (uint64_t p : irregular_primes(sys)) {
        if (p <= cutoff || out.excluded % p == 0) continue;
        log_value += factor_ln(p);
    }
    out.value = std::exp(log_value);
    out.tail_bound = out.value * std::expm1(2.0 * g * g / static_cast<double>(cutoff));
    return out;
}

// --- smooth cutoff ----------------------------------------------------------

double psi_smooth(double t) {
    if (t <= 0.1) return 1.0;
    if (t >= 1.0) return 0.0;
    double s = (t - 0.1) / 0.9;
    double a = std::exp(-1.0 / (1.0 - s));
    double b = std::exp(-1.0 / s);
    return a / (a + b);
}

double F_eval(std::span<const double> t, uint64_t g) {
    if (t.size() != g) throw ConfigError("F_eval: dimension mismatch");
    double Tg = static_cast<double>(g) * std::log(static_cast<double>(g));
    double Ug = 1.0 / std::sqrt(static_cast<double>(g));
    double sum = 0.0;
    double prod = 1.0;
    for (double ti : t) {
        if (ti < 0) throw ConfigError("F_eval: components must be >= 0");
        sum += ti;
        prod *= psi_smooth(ti / Ug) / (1.0 + Tg * ti);
    }
    return psi_smooth(sum) * prod;
}

// --- weight tables ----------------------------------------------------------

namespace {

struct LatticePrime {
    uint64_t p;
    std::vector<uint32_t> slots; // 0-based form indices allowed for p
    double phi_omega;            // p - omega(p)
};

struct LatticePoint {
    DTuple r;
    double product;
    std::vector<std::pair<uint64_t, uint32_t>> assignment; // (prime, slot)
};

void enumerate_lattice(const std::vector<LatticePrime>& primes, uint64_t g, uint64_t R,
                       uint64_t budget, std::vector<LatticePoint>& out) {
    DTuple current(g, 1);
    std::vector<std::pair<uint64_t, uint32_t>> assignment;
    uint64_t product = 1;

    // Iterative DFS via recursion; depth bounded by the number of primes in
    // any product <= R, which is tiny.
    std::function<void(size_t)> walk = [&](size_t idx) {
        if (out.size() >= budget)
            throw CapacityError("weight_table: lattice exceeds budget of " +
                                std::to_string(budget) + " tuples");
        out.push_back(LatticePoint{current, static_cast<double>(product), assignment});
        for (size_t i = idx; i < primes.size(); ++i) {
            const auto& lp = primes[i];
            if (product > R / lp.p) break; // ascending primes: the rest are larger
            for (uint32_t slot : lp.slots) {
                current[slot] *= lp.p;
                assignment.emplace_back(lp.p, slot);
                product *= lp.p;
                walk(i + 1);
                product /= lp.p;
                assignment.pop_back();
                current[slot] /= lp.p;
            }
        }
    };
    walk(0);
}

} // namespace

WeightTable weight_table(const LinearSystem& sys, int64_t n_lo, int64_t n_hi, uint64_t R,
                         const WeightOptions& opts) {
    if (R < 2) throw ConfigError("weight_table: R must be >= 2");
    if (n_hi < n_lo) throw ConfigError("weight_table: empty range");
    WeightTable table;
    table.system = sys;
    table.R = R;
    table.n_lo = n_lo;
    table.n_hi = n_hi;
    uint64_t g = sys.g();
    table.T_g = static_cast<double>(g) * std::log(static_cast<double>(g));
    table.U_g = 1.0 / std::sqrt(static_cast<double>(g));

    uint64_t WB = sys.W * sys.B;
    OmegaTable omega = omega_table(sys, R);

    std::vector<LatticePrime> lattice_primes;
    for (uint64_t p : prime_range(0, R)) {
        if (WB % p == 0) continue;
        const OmegaEntry& e = omega.at(p);
        if (e.omega == 0) continue; // no designated slot: p never usable
        LatticePrime lp;
        lp.p = p;
        for (uint64_t j : e.j_index) lp.slots.push_back(static_cast<uint32_t>(j - 1));
        std::sort(lp.slots.begin(), lp.slots.end());
        lp.slots.erase(std::unique(lp.slots.begin(), lp.slots.end()), lp.slots.end());
        lp.phi_omega = static_cast<double>(p) - static_cast<double>(e.omega);
        lattice_primes.push_back(std::move(lp));
    }

    std::vector<LatticePoint> lattice;
    enumerate_lattice(lattice_primes, g, R, opts.lattice_budget, lattice);

    SingularSeries series = singular_series(sys, WB, opts.series_cutoff);
    double phi_WB = static_cast<double>(euler_phi(WB));
    double prefactor =
        std::pow(static_cast<double>(WB) / phi_WB, static_cast<double>(g)) * series.value;
    double lnR = std::log(static_cast<double>(R));

    std::map<uint64_t, double> phi_omega_of; // prime -> p - omega(p)
    for (const auto& lp : lattice_primes) phi_omega_of[lp.p] = lp.phi_omega;

    // y_r, then lambda_d by pushing y_r / Phi_omega(r) down to every
    // divisor tuple of r.
    std::map<DTuple, double> acc;
    std::vector<double> targs(g);
    for (const auto& pt : lattice) {
        for (uint64_t i = 0; i < g; ++i)
            targs[i] = std::log(static_cast<double>(pt.r[i])) / lnR;
        double F = F_eval(targs, g);
        double yr = prefactor * F;
        table.y[pt.r] = yr;
        if (yr == 0.0) continue;
        double phi_r = 1.0;
        for (const auto& [p, slot] : pt.assignment) phi_r *= phi_omega_of[p];
        double term = yr / phi_r;
        size_t m = pt.assignment.size();
        for (uint64_t mask = 0; mask < (uint64_t(1) << m); ++mask) {
            DTuple d(g, 1);
            for (size_t bit = 0; bit < m; ++bit)
                if (mask & (uint64_t(1) << bit)) d[pt.assignment[bit].second] *= pt.assignment[bit].first;
            acc[d] += term;
        }
    }
    for (auto& [d, sum] : acc) {
        uint64_t prod = 1;
        int omega_d = 0;
        for (uint64_t di : d) {
            prod *= di;
            uint64_t m = di;
            for (const auto& lp : lattice_primes) {
                if (m == 1) break;
                if (m % lp.p == 0) {
                    ++omega_d;
                    m /= lp.p;
                }
            }
        }
        double mu = (omega_d % 2 == 0) ? 1.0 : -1.0;
        double lam = mu * static_cast<double>(prod) * sum;
        if (lam != 0.0) table.lambda[d] = lam;
    }

    // w_n = (sum over divisor tuples of the lambda values)^2 when
    // prod L_i(n) is coprime to W, 0 otherwise; evaluated in fixed blocks
    // so the result is independent of thread count.
    size_t count = static_cast<size_t>(n_hi - n_lo);
    table.w.assign(count, 0.0);
    std::vector<uint64_t> allowed;
    for (const auto& lp : lattice_primes) allowed.push_back(lp.p);
    std::vector<uint64_t> w_primes;
    for (uint64_t p : prime_range(0, 2 * g * g))
        if (sys.B % p != 0) w_primes.push_back(p);

    constexpr int64_t kBlock = 4096;
    int64_t nblocks = (static_cast<int64_t>(count) + kBlock - 1) / kBlock;

#pragma omp parallel for schedule(dynamic)
    for (int64_t blk = 0; blk < nblocks; ++blk) {
        std::vector<std::vector<uint64_t>> form_primes(g);
        DTuple d(g, 1);
        for (int64_t n = n_lo + blk * kBlock;
             n < std::min(n_hi, n_lo + (blk + 1) * kBlock); ++n) {
            bool w_coprime = true;
            for (uint64_t q : w_primes) {
                for (uint64_t i = 0; i < g && w_coprime; ++i)
                    if (sys.forms[i].eval(n) % static_cast<int64_t>(q) == 0) w_coprime = false;
                if (!w_coprime) break;
            }
            if (!w_coprime) continue; // w_n = 0 outside the W-coprime classes
            for (uint64_t i = 0; i < g; ++i) {
                form_primes[i].clear();
                int64_t v = sys.forms[i].eval(n);
                uint64_t m = static_cast<uint64_t>(v < 0 ? -v : v);
                for (uint64_t p : allowed) {
                    if (p > m) break;
                    if (m % p == 0) {
                        form_primes[i].push_back(p);
                        while (m % p == 0) m /= p;
                    }
                }
            }
            // walk all per-form squarefree divisor combinations
            double total = 0.0;
            std::function<void(uint64_t)> walk = [&](uint64_t fi) {
                if (fi == g) {
                    auto it = table.lambda.find(d);
                    if (it != table.lambda.end()) total += it->second;
                    return;
                }
                std::function<void(size_t)> pick = [&](size_t idx) {
                    if (idx == form_primes[fi].size()) {
                        walk(fi + 1);
                        return;
                    }
                    pick(idx + 1); // without this prime
                    uint64_t p = form_primes[fi][idx];
                    if (d[fi] <= table.R / p) {
                        d[fi] *= p;
                        pick(idx + 1);
                        d[fi] /= p;
                    }
                };
                pick(0);
            };
            walk(0);
            table.w[static_cast<size_t>(n - n_lo)] = total * total;
        }
    }
    return table;
}

double w_star(uint64_t p, int64_t n, uint64_t k, const WeightTable& table) {
    if (!table.covers(n)) throw ConfigError("w_star: n outside the table range");
    if (!shift_solvable(n, p, k)) return 0.0;
    uint64_t D = std::gcd(p - 1, k);
    return static_cast<double>(D) * table.w_at(n);
}

double w_final(uint64_t p, int64_t n, uint64_t k, const WeightTable& table,
               const GoodSetParams& good, std::span<const uint64_t> tuple, bool strict) {
    if (!in_Gp(n, p, tuple, good, strict)) return 0.0;
    return w_star(p, n, k, table);
}

// --- integrals --------------------------------------------------------------

namespace {

Integrand default_F(uint64_t g) {
    return [g](std::span<const double> t) { return F_eval(t, g); };
}

double default_axis_hi(uint64_t g) {
    return std::min(1.0, 1.0 / std::sqrt(static_cast<double>(g)));
}

int default_nodes(uint64_t g) {
    switch (g) {
        case 1: return 4096;
        case 2: return 512;
        case 3: return 128;
        case 4: return 48;
        case 5: return 24;
        default: return 14;
    }
}

// Tensor midpoint rule of F^2 over [0, hi]^g.
double midpoint_Fsq(uint64_t g, const Integrand& F, double hi, int nodes) {
    double h = hi / nodes;
    std::vector<double> t(g, 0.0);
    double sum = 0.0;
    std::vector<int> idx(g, 0);
    for (;;) {
        for (uint64_t i = 0; i < g; ++i) t[i] = (idx[i] + 0.5) * h;
        double v = F(t);
        sum += v * v;
        uint64_t carry = 0;
        while (carry < g && ++idx[carry] == nodes) {
            idx[carry] = 0;
            ++carry;
        }
        if (carry == g) break;
    }
    return sum * std::pow(h, static_cast<double>(g));
}

// Tensor midpoint of (int F dt_g)^2 over the first g-1 axes.
double midpoint_Jsq(uint64_t g, const Integrand& F, double hi, int nodes) {
    double h = hi / nodes;
    std::vector<double> t(g, 0.0);
    if (g == 1) {
        double inner = 0.0;
        for (int i = 0; i < nodes; ++i) {
            t[0] = (i + 0.5) * h;
            inner += F(t);
        }
        inner *= h;
        return inner * inner;
    }
    std::vector<int> idx(g - 1, 0);
    double sum = 0.0;
    for (;;) {
        for (uint64_t i = 0; i + 1 < g; ++i) t[i] = (idx[i] + 0.5) * h;
        double inner = 0.0;
        for (int i = 0; i < nodes; ++i) {
            t[g - 1] = (i + 0.5) * h;
            inner += F(t);
        }
        inner *= h;
        sum += inner * inner;
        uint64_t carry = 0;
        while (carry + 1 < g && ++idx[carry] == nodes) {
            idx[carry] = 0;
            ++carry;
        }
        if (carry + 1 == g) break;
    }
    return sum * std::pow(h, static_cast<double>(g - 1));
}

} // namespace

IntegralResult I_g(uint64_t g, const Integrand& F, double axis_hi) {
    int nodes = default_nodes(g);
    double fine = midpoint_Fsq(g, F, axis_hi, nodes);
    double coarse = midpoint_Fsq(g, F, axis_hi, nodes / 2);
    return IntegralResult{fine, std::abs(fine - coarse)};
}

IntegralResult I_g(uint64_t g) { return I_g(g, default_F(g), default_axis_hi(g)); }

IntegralResult J_g(uint64_t g, const Integrand& F, double axis_hi) {
    int nodes = default_nodes(g);
    double fine = midpoint_Jsq(g, F, axis_hi, nodes);
    double coarse = midpoint_Jsq(g, F, axis_hi, nodes / 2);
    return IntegralResult{fine, std::abs(fine - coarse)};
}

IntegralResult J_g(uint64_t g) { return J_g(g, default_F(g), default_axis_hi(g)); }

IntegralResult I_g_mc(uint64_t g, const Integrand& F, double axis_hi, uint64_t samples,
                      uint64_t seed) {
    double vol = std::pow(axis_hi, static_cast<double>(g));
    double sum = 0.0, sumsq = 0.0;
    std::vector<double> t(g);
    for (uint64_t i = 0; i < samples; ++i) {
        SplitMix64 rng(derive_seed(seed, i));
        for (uint64_t j = 0; j < g; ++j) t[j] = rng.uniform01() * axis_hi;
        double v = F(t);
        v *= v;
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / static_cast<double>(samples);
    double var = std::max(0.0, sumsq / static_cast<double>(samples) - mean * mean);
    return IntegralResult{vol * mean,
                          vol * std::sqrt(var / static_cast<double>(samples))};
}

IntegralResult I_g_mc(uint64_t g, uint64_t samples, uint64_t seed) {
    return I_g_mc(g, default_F(g), default_axis_hi(g), samples, seed);
}

// --- empirical checks -------------------------------------------------------

SumCheckReport weight_sum_check(const WeightTable& table) {
    SumCheckReport rep;
    for (double w : table.w) rep.weight_sum += w;
    rep.count = static_cast<uint64_t>(table.n_hi - table.n_lo);
    const LinearSystem& sys = table.system;
    SingularSeries series = singular_series(sys, sys.B, 100000);
    rep.series_value = series.value;
    auto ig = I_g(sys.g());
    rep.integral = ig.value;
    rep.integral_error = ig.error_estimate;
    double Bf = static_cast<double>(sys.B);
    double lnR = std::log(static_cast<double>(table.R));
    rep.predicted = std::pow(Bf / static_cast<double>(euler_phi(sys.B)),
                             static_cast<double>(sys.g())) *
                    series.value * static_cast<double>(rep.count) *
                    std::pow(lnR, static_cast<double>(sys.g())) * ig.value;
    rep.ratio = rep.predicted != 0 ? rep.weight_sum / rep.predicted : 0.0;
    return rep;
}

SumCheckReport prime_weight_sum_check(const WeightTable& table, size_t form_index) {
    SumCheckReport rep;
    const LinearSystem& sys = table.system;
    const LinearForm& L = sys.forms.at(form_index);
    uint64_t prime_count = 0;
    double sum = 0.0;
    for (int64_t n = table.n_lo; n < table.n_hi; ++n) {
        int64_t v = L.eval(n);
        if (v >= 2 && is_prime_u64(static_cast<uint64_t>(v))) {
            ++prime_count;
            sum += table.w_at(n);
        }
    }
    rep.weight_sum = sum;
    rep.count = prime_count;
    SingularSeries series = singular_series(sys, sys.B, 100000);
    rep.series_value = series.value;
    auto jg = J_g(sys.g());
    rep.integral = jg.value;
    rep.integral_error = jg.error_estimate;
    double lnR = std::log(static_cast<double>(table.R));
    double am_factor = 1.0;
    {
        uint64_t m = static_cast<uint64_t>(L.a < 0 ? -L.a : L.a);
        for (uint64_t p = 2; p <= m; p == 2 ? p = 3 : p += 2) {
            if (p * p > m && m > 1) p = m;
            if (m % p == 0) {
                if (sys.B % p != 0)
                    am_factor *= (static_cast<double>(p) - 1.0) / static_cast<double>(p);
                while (m % p == 0) m /= p;
            }
            if (m == 1) break;
        }
    }
    rep.predicted = std::pow(static_cast<double>(sys.B) /
                                 static_cast<double>(euler_phi(sys.B)),
                             static_cast<double>(sys.g()) - 1.0) *
                    series.value * static_cast<double>(prime_count) *
                    std::pow(lnR, static_cast<double>(sys.g()) + 1.0) * jg.value * am_factor;
    rep.ratio = rep.predicted != 0 ? rep.weight_sum / rep.predicted : 0.0;
    return rep;
}

CharacterSumReport character_restricted_sum_check(uint64_t p, uint64_t k,
                                                  const WeightTable& table,
                                                  size_t form_index) {
    CharacterSumReport rep;
    const LinearForm& L = table.system.forms.at(form_index);
    for (int64_t n = table.n_lo; n < table.n_hi; ++n) {
        double w = table.w_at(n);
        double ws = w_star(p, n, k, table);
        rep.sum_w += w;
        rep.sum_w_star += ws;
        int64_t v = L.eval(n);
        if (v >= 2 && is_prime_u64(static_cast<uint64_t>(v))) {
            rep.sum_w_prime += w;
            rep.sum_w_star_prime += ws;
        }
    }
    rep.ratio = rep.sum_w != 0 ? rep.sum_w_star / rep.sum_w : 0.0;
    rep.ratio_prime = rep.sum_w_prime != 0 ? rep.sum_w_star_prime / rep.sum_w_prime : 0.0;
    return rep;
}

MomentReport concentration_moment_check(const WeightTable& table, const GoodSetParams& good,
                                        uint64_t p, uint64_t u, size_t i, size_t l,
                                        bool prime_indicator, size_t form_index) {
    MomentReport rep;
    const auto& forms = table.system.forms;
    int64_t shift = forms.at(i).b - forms.at(l).b;
    (void)p; // the shift (h_i - h_l) p is already baked into the form constants
    rep.r_star = good.r_star.at(u % good.ctx.k);
    const LinearForm& L = forms.at(form_index);
    for (int64_t n = table.n_lo; n < table.n_hi; ++n) {
        double w = table.w_at(n);
        if (w == 0) continue;
        if (prime_indicator) {
            int64_t v = L.eval(n);
            if (v < 2 || !is_prime_u64(static_cast<uint64_t>(v))) continue;
        }
        double r = r_of(n + shift, u, good);
        rep.m0 += w;
        rep.m1 += w * r;
        rep.m2 += w * r * r;
        double dev = r - rep.r_star;
        rep.centered_direct += w * dev * dev;
    }
    rep.centered_identity = rep.m2 - 2 * rep.r_star * rep.m1 + rep.r_star * rep.r_star * rep.m0;
    rep.ratio1 = rep.m0 != 0 && rep.r_star != 0 ? rep.m1 / (rep.r_star * rep.m0) : 0.0;
    rep.ratio2 =
        rep.m0 != 0 && rep.r_star != 0 ? rep.m2 / (rep.r_star * rep.r_star * rep.m0) : 0.0;
    return rep;
}

} // namespace gapforge
