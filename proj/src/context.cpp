#include "gapforge/context.hpp"

#include <cmath>
#include <string>

#include "gapforge/errors.hpp"
#include "gapforge/power_residues.hpp"
#include "gapforge/primes.hpp"

namespace gapforge {

double default_y_factor(double log_x, double c) {
    double log2x = std::log(log_x);
    double log3x = std::log(log2x);
    return c * log_x * log3x / log2x;
}

double default_z_value(double log_x) {
    double log2x = std::log(log_x);
    double log3x = std::log(log2x);
    return std::exp(log_x * log3x / (4.0 * log2x));
}

SieveContext build_context(uint64_t x, uint64_t k, double c, double C0,
                           const ContextOverrides& overrides) {
    bool fully_overridden = overrides.y && overrides.z && overrides.s_floor;
    if (x < (fully_overridden ? 10u : 100u))
        throw ConfigError("build_context: x too small (x >= 100, or >= 10 with full overrides)");
    if (k < 2) throw ConfigError("build_context: k must be >= 2");
    if (!(c > 0)) throw ConfigError("build_context: c must be > 0");
    if (!(C0 > 1)) throw ConfigError("build_context: C0 must be > 1");

    double log_x = std::log(static_cast<double>(x));
    double log2x = std::log(log_x);
    double log3x = log2x > 0 ? std::log(log2x) : -1.0;
    bool logs_ok = log2x > 0 && log3x > 0;

    std::string degenerate;

    SieveContext ctx;
    ctx.x = x;
    ctx.k = k;
    ctx.c = c;
    ctx.C0 = C0;

    if (overrides.y) {
        ctx.y = *overrides.y;
    } else if (!logs_ok) {
        degenerate += " window formula for y: log3(x) <= 0;";
    } else {
        ctx.y = static_cast<uint64_t>(std::ceil(static_cast<double>(x) * default_y_factor(log_x, c)));
        if (ctx.y < x + 2) degenerate += " window formula for y: y < x + 2 at this scale;";
    }

    if (overrides.z) {
        ctx.z = *overrides.z;
    } else if (!logs_ok) {
        degenerate += " smoothness formula for z: log3(x) <= 0;";
    } else {
        ctx.z = static_cast<uint64_t>(std::ceil(default_z_value(log_x)));
    }

    if (overrides.s_floor) {
        ctx.s_floor = *overrides.s_floor;
    } else if (!logs_ok) {
        degenerate += " s-floor formula: log(x) degenerate;";
    } else {
        double sf = std::pow(log_x, 20.0);
        ctx.s_floor = sf > 1e18 ? UINT64_MAX : std::max<uint64_t>(7, static_cast<uint64_t>(sf));
    }

    if (degenerate.empty() && ctx.z != 0 && ctx.s_floor >= ctx.z && !overrides.s_floor &&
        !overrides.z)
        degenerate += " s-floor >= z: S would be empty at this scale;";

    if (!degenerate.empty())
        throw ConfigError("build_context: default formulas degenerate at x=" + std::to_string(x) +
                          ":" + degenerate + " supply explicit overrides");

    if (ctx.y < x + 2) throw ConfigError("build_context: y must be >= x + 2");
    if (ctx.z > x / 2)
        throw ConfigError("build_context: z > x/2 would make S and P overlap");

    uint64_t c0x = static_cast<uint64_t>(std::floor(C0 * static_cast<double>(x)));

    if (ctx.s_floor < ctx.z) ctx.S = prime_range(ctx.s_floor, ctx.z);
    ctx.P = prime_range(x / 2, x);
    ctx.Q = prime_range(x, ctx.y);
    for (uint64_t p : prime_range(x, c0x))
        if (ptilde_member(p, x, C0, k)) ctx.Ptilde.push_back(p);
    return ctx;
}

} // namespace gapforge
