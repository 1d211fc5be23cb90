#include "gapforge/smooth.hpp"

#include <cmath>
#include <vector>

#include "gapforge/errors.hpp"
#include "gapforge/primes.hpp"

namespace gapforge {

namespace {

constexpr int kUnits = 96; // grid covers [0, kUnits]; rho(96) underflows anyway

// Tabulates rho on [0, kUnits] with `per_unit` samples per unit interval.
// The integrand rho(t-1)/t is always at least one unit behind the frontier,
// so the quadrature marches explicitly: two steps via Simpson, odd steps via
// the 3-point cubic rule.
std::vector<double> build_grid(int per_unit) {
    const double h = 1.0 / per_unit;
    const size_t n = static_cast<size_t>(kUnits) * per_unit;
    std::vector<double> rho(n + 1, 0.0);
    for (int i = 0; i <= per_unit; ++i) rho[static_cast<size_t>(i)] = 1.0;
    auto f = [&](size_t i) {
        double u = static_cast<double>(i) * h;
        return rho[i - static_cast<size_t>(per_unit)] / u;
    };
    for (size_t i = static_cast<size_t>(per_unit); i + 2 <= n; i += 2) {
        double f0 = f(i), f1 = f(i + 1), f2 = f(i + 2);
        rho[i + 1] = rho[i] - h / 12.0 * (5.0 * f0 + 8.0 * f1 - f2);
        rho[i + 2] = rho[i] - h / 3.0 * (f0 + 4.0 * f1 + f2);
    }
    return rho;
}

double interpolate(const std::vector<double>& grid, int per_unit, double u) {
    const double h = 1.0 / per_unit;
    double x = u / h;
    size_t i = static_cast<size_t>(x);
    if (i + 1 >= grid.size()) return grid.back();
    // Cubic 4-point stencil, kept inside one unit interval so it never
    // straddles the derivative jumps at integer u.
    size_t unit = static_cast<size_t>(u);
    size_t lo_bound = unit * static_cast<size_t>(per_unit);
    size_t hi_bound = lo_bound + static_cast<size_t>(per_unit);
    size_t s = (i == 0) ? 0 : i - 1;
    if (s < lo_bound) s = lo_bound;
    if (s + 3 > hi_bound) s = hi_bound >= 3 ? hi_bound - 3 : 0;
    if (s + 3 >= grid.size()) s = grid.size() - 4;
    double t = x - static_cast<double>(s);
    double c0 = -(t - 1) * (t - 2) * (t - 3) / 6.0;
    double c1 = t * (t - 2) * (t - 3) / 2.0;
    double c2 = -t * (t - 1) * (t - 3) / 2.0;
    double c3 = t * (t - 1) * (t - 2) / 6.0;
    return c0 * grid[s] + c1 * grid[s + 1] + c2 * grid[s + 2] + c3 * grid[s + 3];
}

} // namespace

double dickman_rho(double u) {
    if (u < 0) throw ConfigError("dickman_rho: u must be >= 0");
    if (u <= 1.0) return 1.0;
    if (u >= kUnits) return 0.0; // below 1e-8 absolute long before this
    static const std::vector<double> coarse = build_grid(512);
    static const std::vector<double> fine = build_grid(1024);
    double a = interpolate(coarse, 512, u);
    double b = interpolate(fine, 1024, u);
    return b + (b - a) / 15.0; // Richardson, 4th-order base scheme
}

uint64_t smooth_count_exact(uint64_t y, uint64_t z) {
    if (y < 2 || z < 2) throw ConfigError("smooth_count_exact: y, z must be >= 2");
    if (y > 100'000'000)
        throw CapacityError("smooth_count_exact: y exceeds the 1e8 oracle scale");
    if (z >= y) return y;
    // A number in [1,y] is z-smooth iff it is a multiple of no prime > z.
    std::vector<bool> rough(y + 1, false);
    auto primes = prime_range(z, y);
    for (uint64_t p : primes)
        for (uint64_t m = p; m <= y; m += p) rough[m] = true;
    uint64_t count = 0;
    for (uint64_t n = 1; n <= y; ++n)
        if (!rough[n]) ++count;
    return count;
}

} // namespace gapforge
