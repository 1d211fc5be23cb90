// gapforge: construct and verify prime-gap certificates, plus the
// supporting sieve-weight, concentration, and covering simulations.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include "gapforge/certificate.hpp"
#include "gapforge/concentration.hpp"
#include "gapforge/context.hpp"
#include "gapforge/covering.hpp"
#include "gapforge/errors.hpp"
#include "gapforge/maynard.hpp"
#include "gapforge/pipeline.hpp"
#include "gapforge/primes.hpp"
#include "gapforge/rows.hpp"
#include "gapforge/smooth.hpp"

using nlohmann::json;
using namespace gapforge;

namespace {

constexpr const char* kVersion = "gapforge 0.1.0";
constexpr const char* kPsiVariant = "psi-smoothstep-exp-v1";

struct Emitter {
    std::string command;
    json config;
    json result;
    json stages = json::object(); // wall-clock only, kept out of `result`
    double seconds = 0;
    std::string output_path;

    int emit(int exit_code) const {
        json report;
        report["command"] = command;
        report["version"] = kVersion;
        report["psi_variant"] = kPsiVariant;
        report["config"] = config;
        report["timings"] = {{"total_sec", seconds}, {"stages", stages}};
        report["result"] = result;
        std::string text = report.dump(2);
        if (output_path.empty()) {
            std::cout << text << "\n";
        } else {
            std::ofstream out(output_path);
            out << text << "\n";
        }
        return exit_code;
    }
};

std::optional<std::pair<int64_t, int64_t>> parse_range(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) return std::nullopt;
    try {
        int64_t lo = std::stoll(text.substr(0, colon));
        int64_t hi = std::stoll(text.substr(colon + 1));
        if (hi <= lo) return std::nullopt;
        return std::make_pair(lo, hi);
    } catch (...) {
        return std::nullopt;
    }
}

std::vector<uint64_t> parse_tuple(const std::string& text, uint64_t g) {
    if (text == "auto") return find_admissible_tuple(g);
    std::vector<uint64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
    return out;
}

json mpz_str(const mpz_class& v) { return v.get_str(); }

// ---------------------------------------------------------------- construct

int run_construct(uint64_t x, uint64_t k, double c, double C0, std::optional<uint64_t> y,
                  std::optional<uint64_t> z, std::optional<uint64_t> s_floor,
                  const std::string& strategy, uint64_t seed, uint64_t rmax,
                  const std::string& cert_out, const std::string& cache_dir, bool verbose,
                  Emitter& em) {
    auto note = [&](const char* what) {
        if (verbose) std::cerr << "construct: " << what << "\n";
    };
    auto stage_start = std::chrono::steady_clock::now();
    auto stage = [&](const char* name) {
        auto now = std::chrono::steady_clock::now();
        em.stages[name] = std::chrono::duration<double>(now - stage_start).count();
        stage_start = now;
    };
    if (!cache_dir.empty()) {
        uint64_t c0x = static_cast<uint64_t>(std::floor(C0 * static_cast<double>(x)));
        note("warming prime cache");
        set_global_prime_cache(cached_prime_table(cache_dir, c0x));
        stage("prime_cache");
    }
    note("building context");
    ContextOverrides ov;
    ov.y = y;
    ov.z = z;
    ov.s_floor = s_floor;
    SieveContext ctx = build_context(x, k, c, C0, ov);
    stage("context");

    em.result["context"] = {{"x", ctx.x},         {"k", ctx.k},
                            {"y", ctx.y},         {"z", ctx.z},
                            {"s_floor", ctx.s_floor}, {"S_size", ctx.S.size()},
                            {"P_size", ctx.P.size()}, {"Q_size", ctx.Q.size()},
                            {"Ptilde_size", ctx.Ptilde.size()}};

    note("choosing sieving vectors");
    ResidueSystem system = choose_vectors(
        ctx, strategy == "random" ? Strategy::Random : Strategy::Greedy, seed);
    stage("choose_vectors");
    note("sifting");
    SiftedSet sifted = sift(ctx, system);
    stage("sift");

    double logx = std::log(static_cast<double>(ctx.x));
    em.result["sifted"] = {
        {"count", sifted.members.size()},
        {"count_logx_over_x",
         static_cast<double>(sifted.members.size()) * logx / static_cast<double>(ctx.x)}};

    note("pairing exceptions");
    PairingResult pairing = pair_exceptions(ctx, sifted);
    stage("pair_exceptions");
    em.result["pairing"] = {
        {"pairs", pairing.pairs.size()},
        {"exceptional", pairing.exceptional.size()},
        {"exceptional_scale_x_half",
         static_cast<double>(pairing.exceptional.size()) / std::sqrt(static_cast<double>(ctx.x))}};

    note("assembling m0");
    M0Result m0 = assemble_m0(ctx, system, pairing);
    stage("assemble_m0");
    em.result["m0_bits"] = mpz_sizeinbase(m0.m0.get_mpz_t(), 2);
    em.result["modulus_bits"] = mpz_sizeinbase(m0.modulus.get_mpz_t(), 2);

    note("scanning rows");
    ScanReport scan = scan_rows(ctx, m0.m0, m0.modulus, rmax);
    stage("scan_rows");
    uint64_t clean = 0;
    const RowStatus* first_clean = nullptr;
    for (const auto& row : scan.rows) {
        if (row.clean) {
            ++clean;
            if (!first_clean) first_clean = &row;
        }
    }
    // Dirichlet-density reference for the R_0 count: primes in the
    // progression occur at rate (M/phi(M)) / ln(q0) among the rows.
    double ln_q0_mid = ln_mpz(m0.m0 + 1 + (rmax / 2) * m0.modulus);
    double m_over_phi = 1.0;
    uint64_t c0x_floor = static_cast<uint64_t>(std::floor(ctx.C0 * static_cast<double>(ctx.x)));
    for (uint64_t p : prime_range(0, c0x_floor))
        m_over_phi *= static_cast<double>(p) / (static_cast<double>(p) - 1.0);
    em.result["scan"] = {{"r_max", scan.r_max},
                         {"rows_prime", scan.rows_prime},
                         {"rows_clean", clean},
                         {"unforced_positions", scan.unforced_count},
                         {"r0_density",
                          static_cast<double>(scan.rows_prime) / static_cast<double>(scan.r_max)},
                         {"r0_density_dirichlet", m_over_phi / ln_q0_mid}};

    if (!first_clean) {
        em.result["certificate"] = nullptr;
        std::cerr << "no clean row within r_max; increase --rmax\n";
        return 1;
    }

    note("certifying the gap");
    GapCertificate cert = certify_gap(first_clean->q0, ctx.k, ctx.y);
    stage("certify_gap");
    cert.x = ctx.x;
    cert.c = ctx.c;
    cert.C0 = ctx.C0;
    cert.m0 = m0.m0;
    cert.P_x = m0.modulus;
    cert.r = first_clean->r;

    std::ofstream out(cert_out);
    if (!out) {
        std::cerr << "cannot write certificate to " << cert_out << "\n";
        return 2;
    }
    out << certificate_to_json(cert) << "\n";

    em.result["certificate"] = {{"path", cert_out},
                                {"r", cert.r},
                                {"q0", mpz_str(cert.q0)},
                                {"gap_length", cert.gap_length},
                                {"g2_value", std::isnan(cert.g2_value) ? json(nullptr)
                                                                       : json(cert.g2_value)},
                                {"ratio", std::isnan(cert.ratio) ? json(nullptr)
                                                                 : json(cert.ratio)},
                                {"transcript_entries", cert.transcript.size()}};
    return 0;
}

// ------------------------------------------------------------------- verify

int run_verify(const std::string& path, Emitter& em) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot open " << path << "\n";
        return 2;
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    GapCertificate cert = certificate_from_json(text); // throws ConfigError on parse issues
    VerifyResult res = verify_certificate(cert);
    em.result["ok"] = res.ok;
    em.result["issues"] = res.issues;
    em.result["q0"] = mpz_str(cert.q0);
    em.result["gap_length"] = cert.gap_length;
    if (!res.ok)
        for (const auto& issue : res.issues) std::cerr << "verify: " << issue << "\n";
    return res.ok ? 0 : 1;
}

// ------------------------------------------------------------------ weights

int run_weights(uint64_t g, const std::string& tuple_text, uint64_t R, const std::string& range,
                uint64_t p, uint64_t k, const std::string& check, uint64_t B, size_t form_index,
                uint64_t x, uint64_t z, uint64_t s_floor, uint64_t u, size_t mi, size_t ml,
                Emitter& em) {
    auto rng = parse_range(range);
    if (!rng) {
        std::cerr << "--range must be lo:hi with lo < hi\n";
        return 2;
    }
    auto [lo, hi] = *rng;

    std::vector<uint64_t> tuple = parse_tuple(tuple_text, g);
    if (tuple.size() != g) {
        std::cerr << "tuple size does not match --g\n";
        return 2;
    }
    LinearSystem sys = LinearSystem::shifted_tuple(tuple, p == 0 ? 1 : p, B);
    if (!is_admissible_system(sys)) {
        std::cerr << "system is not admissible\n";
        return 2;
    }
    WeightTable table = weight_table(sys, lo, hi, R);
    em.result["lattice"] = {{"lambda_entries", table.lambda.size()},
                            {"y_entries", table.y.size()},
                            {"R", R},
                            {"tuple", tuple}};

    if (check == "77") {
        auto rep = weight_sum_check(table);
        em.result["check"] = {{"name", "sum w_n vs main term"},
                              {"weight_sum", rep.weight_sum},
                              {"predicted", rep.predicted},
                              {"ratio", rep.ratio},
                              {"I_g", rep.integral},
                              {"I_g_error", rep.integral_error},
                              {"series", rep.series_value},
                              {"count", rep.count}};
    } else if (check == "78") {
        auto rep = prime_weight_sum_check(table, form_index);
        em.result["check"] = {{"name", "sum 1_P(L(n)) w_n vs main term"},
                              {"weight_sum", rep.weight_sum},
                              {"predicted", rep.predicted},
                              {"ratio", rep.ratio},
                              {"J_g", rep.integral},
                              {"J_g_error", rep.integral_error},
                              {"series", rep.series_value},
                              {"prime_count", rep.count}};
    } else if (check == "711" || check == "713") {
        if (p == 0) {
            std::cerr << "--p required for the restricted-sum checks\n";
            return 2;
        }
        auto rep = character_restricted_sum_check(p, k, table, form_index);
        em.result["check"] = {{"name", "restricted weight sums"},
                              {"sum_w", rep.sum_w},
                              {"sum_w_star", rep.sum_w_star},
                              {"ratio", rep.ratio},
                              {"sum_w_prime", rep.sum_w_prime},
                              {"sum_w_star_prime", rep.sum_w_star_prime},
                              {"ratio_prime", rep.ratio_prime}};
    } else if (check == "moments") {
        if (p == 0 || x == 0 || z == 0 || s_floor == 0) {
            std::cerr << "--p, --x, --z, --s-floor required for the moment check\n";
            return 2;
        }
        SieveContext cctx;
        cctx.x = x;
        cctx.k = k;
        cctx.y = x + 2;
        cctx.z = z;
        cctx.s_floor = s_floor;
        cctx.S = prime_range(s_floor, z);
        GoodSetParams good = make_good_set_params(cctx);
        auto rep = concentration_moment_check(table, good, p, u, mi, ml, check == "713",
                                              form_index);
        em.result["check"] = {{"name", "weighted power-residue moments"},
                              {"m0", rep.m0},
                              {"m1", rep.m1},
                              {"m2", rep.m2},
                              {"r_star", rep.r_star},
                              {"centered", rep.centered_identity},
                              {"centered_direct", rep.centered_direct},
                              {"ratio1", rep.ratio1},
                              {"ratio2", rep.ratio2}};
    } else if (!check.empty()) {
        std::cerr << "unknown --check " << check << "\n";
        return 2;
    }
    return 0;
}

// ---------------------------------------------------------------- cover-sim

int run_cover_sim(const std::string& mode, uint64_t m, uint64_t replicates, uint64_t seed,
                  uint32_t V, double C, uint32_t edge_size, uint64_t x, uint64_t k, uint64_t y,
                  uint64_t z, uint64_t s_floor, uint64_t R, uint64_t r, uint64_t p_count,
                  double pj_floor, Emitter& em) {
    if (m == 0) {
        // default round count floor(log3 x / log 5), clamped to >= 1
        double l3 = std::log(std::log(std::log(std::max<double>(x, 16))));
        m = mode == "weighted" && l3 > 0
                ? std::max<uint64_t>(1, static_cast<uint64_t>(l3 / std::log(5.0)))
                : 2;
    }
    if (mode == "synthetic") {
        CoverInstance inst = make_calibrated_synthetic(V, C, m, edge_size);
        ResidualStats stats = simulate_cover(inst, m, seed, replicates);
        DegreeProfile profile = degree_profile(inst);
        double min_pj = 1.0;
        for (const auto& row : profile.P)
            for (double v : row) min_pj = std::min(min_pj, v);
        em.result["profile"] = {{"min_Pj", min_pj}, {"pj_floor", pj_floor}};
        if (min_pj < pj_floor)
            stats.warnings.push_back("P_j dropped below the configured floor");
        json rounds = json::array();
        for (size_t j = 0; j < inst.rounds.size(); ++j)
            rounds.push_back({{"round", j + 1}, {"edges", inst.rounds[j].size()}});
        json table = json::array();
        for (size_t i = 0; i < stats.fractions.size(); ++i)
            table.push_back(stats.fractions[i]);
        em.result["residuals"] = {{"per_replicate", table},
                                  {"mean", stats.mean},
                                  {"sd", stats.sd},
                                  {"target", std::pow(5.0, -static_cast<double>(m))},
                                  {"covering_sum_mean", stats.covering_sum_mean},
                                  {"covering_sum_sd", stats.covering_sum_sd}};
        em.result["rounds"] = rounds;
        em.result["warnings"] = stats.warnings;
        return 0;
    }
    if (mode != "weighted") {
        std::cerr << "--mode must be synthetic or weighted\n";
        return 2;
    }

    ContextOverrides ov;
    ov.y = y;
    ov.z = z;
    ov.s_floor = s_floor;
    SieveContext ctx = build_context(x, k, 1.0, 2.0, ov);
    if (p_count > 0 && ctx.P.size() > p_count) {
        ctx.P.erase(ctx.P.begin(), ctx.P.end() - static_cast<int64_t>(p_count));
    }
    GoodSetParams good = make_good_set_params(ctx);
    auto a_classes = sample_a(good, seed);
    std::vector<uint64_t> tuple = find_admissible_tuple(r);

    // n ranges over the whole window; shifted tuple entries that leave
    // (x, y] simply miss Q and drop out of the edge.
    int64_t lo = static_cast<int64_t>(ctx.x) + 1;
    int64_t hi = static_cast<int64_t>(ctx.y) + 1;

    std::vector<WeightTable> tables;
    tables.reserve(ctx.P.size());
    for (uint64_t p : ctx.P) {
        LinearSystem sys = LinearSystem::shifted_tuple(tuple, p);
        tables.push_back(weight_table(sys, lo, hi, R));
    }
    auto sampler = weighted_edge_sampler(ctx, tables, a_classes, tuple, seed);
    ResidualStats stats = simulate_cover(sampler.instance, 1, seed, replicates);
    CoveringReport cover = uniform_covering_report(sampler.instance, 1.0 / 16.0);

    em.result["instance"] = {{"vertices", sampler.instance.num_vertices},
                             {"edges", sampler.instance.edges.size()},
                             {"dropped_primes", sampler.dropped_primes.size()},
                             {"sparsity_cap", sampler.instance.sparsity_cap}};
    em.result["residuals"] = {{"mean", stats.mean}, {"sd", stats.sd}};
    em.result["covering"] = {{"mean", cover.mean},
                             {"sd", cover.sd},
                             {"outside_band", cover.outside_band},
                             {"band", cover.band}};
    em.result["warnings"] = stats.warnings;
    return 0;
}

// ------------------------------------------------------------ concentration

int run_concentration(uint64_t x, uint64_t k, uint64_t y, uint64_t z, uint64_t s_floor,
                      uint64_t trials, uint64_t seed, uint64_t t, double tolerance,
                      Emitter& em) {
    ContextOverrides ov;
    ov.y = y;
    ov.z = z;
    ov.s_floor = s_floor;
    SieveContext ctx = build_context(x, k, 1.0, 2.0, ov);
    GoodSetParams params = make_good_set_params(ctx, tolerance);

    std::vector<int64_t> picks;
    for (uint64_t n = ctx.x; n <= ctx.y && picks.size() < t; ++n)
        if (in_G(static_cast<int64_t>(n), params)) picks.push_back(static_cast<int64_t>(n));
    if (picks.size() < t) {
        std::cerr << "could not find " << t << " good integers in [x, y]\n";
        return 1;
    }

    McResult mc = mc_membership(picks, params, trials, seed);
    SigmaValue sig = sigma(params);
    double sigma_t = std::pow(sig.sigma, static_cast<double>(t));
    em.result["estimate"] = mc.estimate;
    em.result["stderr"] = mc.stderr_;
    em.result["sigma_t"] = sigma_t;
    em.result["sigma"] = sig.sigma;
    em.result["exact"] = exact_membership(picks, params);
    em.result["n_list"] = picks;
    em.result["trials"] = trials;
    return 0;
}

// -------------------------------------------------------------------- rho

int run_rho(double u, uint64_t smooth_y, uint64_t smooth_z, Emitter& em) {
    em.result["u"] = u;
    em.result["rho"] = dickman_rho(u);
    if (smooth_y > 0 && smooth_z > 0) {
        uint64_t exact = smooth_count_exact(smooth_y, smooth_z);
        double uu = std::log(static_cast<double>(smooth_y)) /
                    std::log(static_cast<double>(smooth_z));
        double predicted = static_cast<double>(smooth_y) * dickman_rho(uu);
        em.result["smooth_check"] = {{"y", smooth_y},
                                     {"z", smooth_z},
                                     {"exact", exact},
                                     {"predicted", predicted},
                                     {"ratio", static_cast<double>(exact) / predicted}};
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"prime-gap construction and verification toolkit"};
    app.set_config("--config", "", "flat key=value configuration file");
    app.require_subcommand(1);

    int threads = 0;
    std::string output;
    const char* cache_env = std::getenv("GAPFORGE_CACHE");
    std::string cache_dir = cache_env ? cache_env : "";
    bool verbose = false;
    app.add_option("--threads", threads, "worker thread count (0 = library default)");
    app.add_option("--output", output, "write the JSON report here instead of stdout");
    app.add_option("--cache-dir", cache_dir,
                   "prime-table cache directory (default: $GAPFORGE_CACHE)");
    app.add_flag("--verbose", verbose, "progress notes on stderr");

    // construct
    auto* c_cmd = app.add_subcommand("construct", "build a gap certificate");
    uint64_t x = 25, k = 2, rmax = 100000, seed = 1;
    double cc = 1.0, C0 = 2.0;
    std::optional<uint64_t> ov_y, ov_z, ov_sfloor;
    std::string strategy = "greedy", cert_out = "cert.json";
    c_cmd->add_option("--x", x, "window base");
    c_cmd->add_option("--k", k, "power exponent");
    c_cmd->add_option("--c", cc, "window constant c");
    c_cmd->add_option("--C0", C0, "auxiliary window constant");
    c_cmd->add_option("--y", ov_y, "override: window top");
    c_cmd->add_option("--z", ov_z, "override: smoothness bound");
    c_cmd->add_option("--s-floor", ov_sfloor, "override: smallest sieving prime bound");
    c_cmd->add_option("--strategy", strategy, "greedy | random")
        ->check(CLI::IsMember({"greedy", "random"}));
    c_cmd->add_option("--seed", seed, "rng seed");
    c_cmd->add_option("--rmax", rmax, "rows to scan");
    c_cmd->add_option("--out", cert_out, "certificate output path");

    // verify
    auto* v_cmd = app.add_subcommand("verify", "re-verify a certificate");
    std::string cert_path;
    v_cmd->add_option("cert", cert_path, "certificate JSON path")->required();

    // weights
    auto* w_cmd = app.add_subcommand("weights", "sieve-weight tables and checks");
    uint64_t wg = 1, wR = 1000, wp = 0, wk = 2, wB = 1, wx = 0, wz = 0, wsf = 0, wu = 1;
    size_t w_form = 0, w_i = 1, w_l = 0;
    std::string w_tuple = "auto", w_range = "2:1000000", w_check;
    w_cmd->add_option("--g", wg, "number of forms");
    w_cmd->add_option("--r-tuple", w_tuple, "auto or comma-separated shifts");
    w_cmd->add_option("--R", wR, "lattice radius");
    w_cmd->add_option("--range", w_range, "n range lo:hi");
    w_cmd->add_option("--p", wp, "prime p (scales the tuple; required for 711/713/moments)");
    w_cmd->add_option("--k", wk, "power exponent");
    w_cmd->add_option("--B", wB, "excluded modulus B");
    w_cmd->add_option("--check", w_check, "77 | 78 | 711 | 713 | moments");
    w_cmd->add_option("--form-index", w_form, "designated form for prime indicators");
    w_cmd->add_option("--x", wx, "scale for the moment check's prime set");
    w_cmd->add_option("--z", wz, "smoothness bound for the moment check");
    w_cmd->add_option("--s-floor", wsf, "sieving prime floor for the moment check");
    w_cmd->add_option("--u", wu, "residue class u for the moment check");
    w_cmd->add_option("--i", w_i, "tuple index i");
    w_cmd->add_option("--l", w_l, "tuple index l");
    bool wjson = false;
    w_cmd->add_flag("--json", wjson, "emit JSON (always on; accepted for compatibility)");

    // cover-sim
    auto* s_cmd = app.add_subcommand("cover-sim", "hypergraph covering simulation");
    std::string mode = "synthetic";
    uint64_t sm = 0, reps = 20, sseed = 1, sx = 1000, sk = 2, sy = 0, sz = 0, ssf = 0, sR = 50,
             sr = 3, spcount = 25;
    uint32_t sV = 10000, sedge = 25;
    double sC = 1.25 * std::log(5.0);
    s_cmd->add_option("--mode", mode, "synthetic | weighted");
    s_cmd->add_option("--m", sm, "rounds (0 = derived default)");
    s_cmd->add_option("--replicates", reps, "replicates");
    s_cmd->add_option("--seed", sseed, "rng seed");
    s_cmd->add_option("--V", sV, "vertex count (synthetic)");
    s_cmd->add_option("--C", sC, "coverage constant (synthetic)");
    s_cmd->add_option("--edge-size", sedge, "edge size (synthetic)");
    s_cmd->add_option("--x", sx, "scale (weighted)");
    s_cmd->add_option("--k", sk, "power exponent (weighted)");
    s_cmd->add_option("--y", sy, "window top (weighted)");
    s_cmd->add_option("--z", sz, "smoothness bound (weighted)");
    s_cmd->add_option("--s-floor", ssf, "sieving prime floor (weighted)");
    s_cmd->add_option("--R", sR, "lattice radius (weighted)");
    s_cmd->add_option("--r", sr, "tuple size (weighted)");
    s_cmd->add_option("--p-count", spcount, "use only the largest N primes of P (weighted)");
    double spjfloor = 0.0;
    s_cmd->add_option("--pj-floor", spjfloor, "audit floor for the P_j recursion");
    bool sjson = false;
    s_cmd->add_flag("--json", sjson, "emit JSON (always on; accepted for compatibility)");

    // concentration
    auto* n_cmd = app.add_subcommand("concentration", "Monte-Carlo membership probability");
    uint64_t nx = 1000000, nk = 2, ny = 0, nz = 0, nsf = 0, ntrials = 100000, nseed = 1, nt = 2;
    double ntol = -1.0;
    n_cmd->add_option("--x", nx, "window base");
    n_cmd->add_option("--k", nk, "power exponent");
    n_cmd->add_option("--y", ny, "override: window top");
    n_cmd->add_option("--z", nz, "override: smoothness bound");
    n_cmd->add_option("--s-floor", nsf, "override: sieving prime floor");
    n_cmd->add_option("--trials", ntrials, "Monte-Carlo trials");
    n_cmd->add_option("--seed", nseed, "rng seed");
    n_cmd->add_option("--t", nt, "tuple size");
    n_cmd->add_option("--tolerance", ntol, "absolute goodness tolerance (<0: asymptotic default)");
    bool njson = false;
    n_cmd->add_flag("--json", njson, "emit JSON (always on; accepted for compatibility)");

    // rho
    auto* r_cmd = app.add_subcommand("rho", "Dickman rho and smooth-count calibration");
    double ru = 2.0;
    uint64_t rsy = 0, rsz = 0;
    r_cmd->add_option("--u", ru, "argument");
    r_cmd->add_option("--smooth-y", rsy, "exact smooth count: y");
    r_cmd->add_option("--smooth-z", rsz, "exact smooth count: z");

    CLI11_PARSE(app, argc, argv);

    if (threads > 0) omp_set_num_threads(threads);

    Emitter em;
    em.output_path = output;
    auto t0 = std::chrono::steady_clock::now();
    int code = 2;
    try {
        if (app.got_subcommand(c_cmd)) {
            em.command = "construct";
            em.config = {{"x", x},       {"k", k},           {"c", cc},
                         {"C0", C0},     {"strategy", strategy}, {"seed", seed},
                         {"rmax", rmax}, {"threads", threads}};
            if (ov_y) em.config["y"] = *ov_y;
            if (ov_z) em.config["z"] = *ov_z;
            if (ov_sfloor) em.config["s_floor"] = *ov_sfloor;
            code = run_construct(x, k, cc, C0, ov_y, ov_z, ov_sfloor, strategy, seed, rmax,
                                 cert_out, cache_dir, verbose, em);
        } else if (app.got_subcommand(v_cmd)) {
            em.command = "verify";
            em.config = {{"cert", cert_path}};
            code = run_verify(cert_path, em);
        } else if (app.got_subcommand(w_cmd)) {
            em.command = "weights";
            em.config = {{"g", wg},         {"r_tuple", w_tuple}, {"R", wR},
                         {"range", w_range}, {"p", wp},           {"k", wk},
                         {"B", wB},          {"check", w_check},  {"threads", threads}};
            code = run_weights(wg, w_tuple, wR, w_range, wp, wk, w_check, wB, w_form, wx, wz,
                               wsf, wu, w_i, w_l, em);
        } else if (app.got_subcommand(s_cmd)) {
            em.command = "cover-sim";
            em.config = {{"mode", mode},   {"m", sm},       {"replicates", reps},
                         {"seed", sseed},  {"V", sV},       {"C", sC},
                         {"edge_size", sedge}, {"threads", threads}};
            code = run_cover_sim(mode, sm, reps, sseed, sV, sC, sedge, sx, sk, sy, sz, ssf, sR,
                                 sr, spcount, spjfloor, em);
        } else if (app.got_subcommand(n_cmd)) {
            em.command = "concentration";
            em.config = {{"x", nx},     {"k", nk},         {"trials", ntrials},
                         {"seed", nseed}, {"t", nt},       {"tolerance", ntol},
                         {"threads", threads}};
            code = run_concentration(nx, nk, ny, nz, nsf, ntrials, nseed, nt, ntol, em);
        } else if (app.got_subcommand(r_cmd)) {
            em.command = "rho";
            em.config = {{"u", ru}};
            code = run_rho(ru, rsy, rsz, em);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    em.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return em.emit(code);
}
