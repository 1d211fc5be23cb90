#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "gapforge/certificate.hpp"
#include "gapforge/context.hpp"
#include "gapforge/errors.hpp"
#include "gapforge/modular.hpp"
#include "gapforge/pipeline.hpp"
#include "gapforge/power_residues.hpp"
#include "gapforge/primality.hpp"
#include "gapforge/primes.hpp"
#include "gapforge/reference.hpp"
#include "gapforge/rows.hpp"
#include "gapforge/rng.hpp"

using namespace gapforge;

namespace {

SieveContext desk_context() {
    ContextOverrides ov;
    ov.y = 1'060'000;
    ov.z = 300;
    ov.s_floor = 7;
    return build_context(1'000'000, 2, 1.0, 2.0, ov);
}

// y stays below 5*13 = 65 so no window element can be an S-by-P product;
// that keeps the survivor dichotomy exact, as it is at real scales.
SieveContext toy_context(uint64_t k = 2) {
    ContextOverrides ov;
    ov.y = 60;
    ov.z = 10;
    ov.s_floor = 3;
    return build_context(25, k, 1.0, 2.0, ov);
}

} // namespace

TEST_CASE("build_context desk example") {
    SieveContext ctx = desk_context();
    CHECK(ctx.S == prime_range(7, 300));
    CHECK(ctx.P == prime_range(500'000, 1'000'000));
    CHECK(ctx.Q == prime_range(1'000'000, 1'060'000));
    CHECK(ctx.S.front() == 11);
    CHECK(ctx.S.back() == 293);
    for (uint64_t p : ctx.Ptilde) {
        CHECK(p > ctx.x);
        CHECK(p <= 2'000'000);
        CHECK(p % 4 == 3); // k = 2: p = 3 (mod 2k)
    }
}

TEST_CASE("build_context degenerates without overrides at desk scale") {
    CHECK_THROWS_AS(build_context(1'000'000, 2, 1.0, 2.0), ConfigError);
    try {
        build_context(1'000'000, 2, 1.0, 2.0);
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("s-floor") != std::string::npos); // names the degenerate formula
    }
    CHECK_THROWS_AS(build_context(12, 2, 1.0, 2.0), ConfigError); // log3 x <= 0 territory
}

TEST_CASE("window formula at astronomically large x") {
    // x = e^{e^{e^3}}: log x = e^{e^3}, log2 x = e^3, log3 x = 3
    double log_x = std::exp(std::exp(3.0));
    double factor = default_y_factor(log_x, 1.0);
    CHECK(factor == doctest::Approx(log_x * 3.0 / std::exp(3.0)).epsilon(1e-12));
}

TEST_CASE("context invariants on the toy instance") {
    SieveContext ctx = toy_context();
    CHECK(ctx.S == std::vector<uint64_t>{5, 7});
    CHECK(ctx.P == std::vector<uint64_t>{13, 17, 19, 23});
    CHECK(ctx.Q.front() == 29);
    CHECK(ctx.Q.back() == 59);
    CHECK(ctx.Ptilde == std::vector<uint64_t>{31, 43, 47}); // p = 3 (mod 4) in (25, 50]
}

TEST_CASE("choose_vectors greedy tie rule picks the smallest class") {
    // S = {5}, k = 2, two survivors hitting classes 0 and 2 once each.
    SieveContext ctx;
    ctx.x = 10;
    ctx.k = 2;
    ctx.y = 22;
    ctx.S = {5};
    ctx.Q = {15, 12}; // 15 = 0 (mod 5), 12 = 2 (mod 5); both admissible classes
    ResidueSystem sys = choose_vectors(ctx, Strategy::Greedy, 0);
    REQUIRE(sys.a.count(5));
    CHECK(sys.a.at(5).cls == 0);
}

TEST_CASE("choose_vectors random is deterministic per seed") {
    SieveContext ctx = toy_context();
    ResidueSystem s1 = choose_vectors(ctx, Strategy::Random, 42);
    ResidueSystem s2 = choose_vectors(ctx, Strategy::Random, 42);
    ResidueSystem s3 = choose_vectors(ctx, Strategy::Random, 43);
    CHECK(s1.a.size() == s2.a.size());
    bool all_equal = true;
    for (const auto& [s, wc] : s1.a)
        if (s2.a.at(s).cls != wc.cls) all_equal = false;
    for (const auto& [p, wc] : s1.b)
        if (s2.b.at(p).cls != wc.cls) all_equal = false;
    CHECK(all_equal);
    bool any_differ = false;
    for (const auto& [s, wc] : s1.a)
        if (s3.a.at(s).cls != wc.cls) any_differ = true;
    for (const auto& [p, wc] : s1.b)
        if (s3.b.at(p).cls != wc.cls) any_differ = true;
    CHECK(any_differ);
}

TEST_CASE("residue system witnesses satisfy their congruences") {
    SieveContext ctx = toy_context();
    for (auto strategy : {Strategy::Greedy, Strategy::Random}) {
        ResidueSystem sys = choose_vectors(ctx, strategy, 7);
        for (const auto& [s, wc] : sys.a) {
            CHECK(wc.wit != s - 1);
            CHECK((1 + s - powmod(wc.wit + 1, ctx.k, s)) % s == wc.cls);
        }
        for (const auto& [p, wc] : sys.b) {
            CHECK(wc.wit != p - 1);
            CHECK((1 + p - powmod(wc.wit + 1, ctx.k, p)) % p == wc.cls);
        }
    }
}

TEST_CASE("greedy beats or ties random on survivor counts") {
    ContextOverrides ov;
    ov.y = 120'000;
    ov.z = 200;
    ov.s_floor = 7;
    SieveContext ctx = build_context(100'000, 2, 1.0, 2.0, ov);

    auto survivors = [&](const ResidueSystem& sys) {
        uint64_t count = 0;
        for (uint64_t q : ctx.Q) {
            bool alive = true;
            for (const auto& [s, wc] : sys.a)
                if (q % s == wc.cls) { alive = false; break; }
            if (alive)
                for (const auto& [p, wc] : sys.b)
                    if (q % p == wc.cls) { alive = false; break; }
            if (alive) ++count;
        }
        return count;
    };

    uint64_t greedy = survivors(choose_vectors(ctx, Strategy::Greedy, 0));
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        uint64_t random = survivors(choose_vectors(ctx, Strategy::Random, seed));
        CHECK(greedy <= random);
    }
}

TEST_CASE("sift with empty S and P keeps exactly the primes") {
    SieveContext ctx;
    ctx.x = 10;
    ctx.y = 20;
    ctx.z = 5;
    ctx.k = 2;
    SiftedSet out = sift(ctx, ResidueSystem{});
    CHECK(out.members == std::vector<uint64_t>{11, 13, 17, 19});
    for (auto kind : out.provenance) CHECK(kind == SurvivorKind::QSurvivor);
}

TEST_CASE("sift matches the per-class oracle exhaustively on a small window") {
    ContextOverrides ov;
    ov.y = 4000;
    ov.z = 30;
    ov.s_floor = 3;
    SieveContext ctx = build_context(2000, 2, 1.0, 2.0, ov);
    ResidueSystem sys = choose_vectors(ctx, Strategy::Greedy, 0);
    SiftedSet sifted = sift(ctx, sys);
    std::set<uint64_t> members(sifted.members.begin(), sifted.members.end());
    for (uint64_t n = ctx.x + 1; n <= ctx.y; ++n) {
        bool expected = reference::sift_survives_naive(ctx, sys, n);
        CAPTURE(n);
        CHECK(members.count(n) == (expected ? 1u : 0u));
    }
}

TEST_CASE("sift survivor dichotomy and provenance") {
    SieveContext ctx = toy_context();
    ResidueSystem sys = choose_vectors(ctx, Strategy::Greedy, 0);
    SiftedSet sifted = sift(ctx, sys);
    REQUIRE(sifted.members.size() == sifted.provenance.size());
    for (size_t i = 0; i < sifted.members.size(); ++i) {
        uint64_t n = sifted.members[i];
        uint64_t m = n;
        for (uint64_t p = 2; p <= ctx.z; ++p)
            while (m % p == 0) m /= p;
        bool smooth = m == 1;
        if (sifted.provenance[i] == SurvivorKind::Smooth) {
            CHECK(smooth);
        } else {
            CHECK(is_prime_u64(n));
            CHECK(n > ctx.x);
        }
    }
}

TEST_CASE("pair_exceptions basics") {
    SieveContext ctx = toy_context();
    SiftedSet empty;
    PairingResult none = pair_exceptions(ctx, empty);
    CHECK(none.pairs.empty());
    CHECK(none.exceptional.empty());

    ResidueSystem sys = choose_vectors(ctx, Strategy::Greedy, 0);
    SiftedSet sifted = sift(ctx, sys);
    PairingResult pairing = pair_exceptions(ctx, sifted);
    std::set<uint64_t> used;
    for (const auto& [u, pe] : pairing.pairs) {
        auto [p, e] = pe;
        CHECK(std::binary_search(ctx.Ptilde.begin(), ctx.Ptilde.end(), p));
        CHECK(used.insert(p).second); // each prime at most once
        CHECK(e != p - 1);
        CHECK((powmod(e + 1, ctx.k, p) + u) % p == 1 % p); // u = 1 - (e+1)^k (mod p)
        if (ctx.k % 2 == 0) CHECK(legendre_symbol(-static_cast<int64_t>(u % p), p) == 1);
    }
    // every sifted member is either paired or exceptional
    CHECK(pairing.pairs.size() + pairing.exceptional.size() == sifted.members.size());
}

TEST_CASE("assemble_m0 reduction postconditions on the toy instance") {
    SieveContext ctx = toy_context();
    ResidueSystem sys = choose_vectors(ctx, Strategy::Greedy, 0);
    SiftedSet sifted = sift(ctx, sys);
    PairingResult pairing = pair_exceptions(ctx, sifted);
    M0Result res = assemble_m0(ctx, sys, pairing);

    CHECK(res.modulus == primorial(51)); // all primes <= 50
    CHECK(res.m0 >= 1);
    CHECK(res.m0 <= res.modulus);

    for (const auto& [s, wc] : sys.a)
        CHECK(mpz_fdiv_ui(res.m0.get_mpz_t(), s) == wc.wit % s);
    for (const auto& [p, wc] : sys.b)
        CHECK(mpz_fdiv_ui(res.m0.get_mpz_t(), p) == wc.wit % p);
    for (const auto& [u, pe] : pairing.pairs)
        CHECK(mpz_fdiv_ui(res.m0.get_mpz_t(), pe.first) == pe.second % pe.first);
    // primes <= x outside S u P carry the zero class
    for (uint64_t q : {2ull, 3ull, 11ull})
        CHECK(mpz_fdiv_ui(res.m0.get_mpz_t(), q) == 0);
}

TEST_CASE("assemble_m0 with all-zero witnesses remaps to the modulus") {
    ContextOverrides ov;
    ov.y = 22;
    ov.z = 5;
    ov.s_floor = 3;
    SieveContext ctx = build_context(10, 2, 1.0, 2.0, ov);
    REQUIRE(ctx.S == std::vector<uint64_t>{5});
    REQUIRE(ctx.P == std::vector<uint64_t>{7});
    ResidueSystem sys;
    sys.a[5] = WitnessedClass{0, 0}; // a = 1 - 1^k = 0, witness 0
    sys.b[7] = WitnessedClass{0, 0};
    M0Result res = assemble_m0(ctx, sys, PairingResult{});
    CHECK(res.m0 == res.modulus); // CRT zero remapped
    CHECK(res.modulus == primorial(21));
}

TEST_CASE("two-class CRT example via toy assembly") {
    // m0 = 2 (mod 5), 0 (mod 3): the 15-part of m0 reduces to 12.
    ContextOverrides ov;
    ov.y = 22;
    ov.z = 5;
    ov.s_floor = 3;
    SieveContext ctx = build_context(10, 2, 1.0, 2.0, ov);
    ResidueSystem sys;
    sys.a[5] = WitnessedClass{(1 + 5 - powmod(3, 2, 5)) % 5, 2}; // wit 2: 1-(2+1)^2 = 2 (mod 5)
    sys.b[7] = WitnessedClass{0, 0};
    M0Result res = assemble_m0(ctx, sys, PairingResult{});
    CHECK(mpz_fdiv_ui(res.m0.get_mpz_t(), 15) == 12);
}

TEST_CASE("scan_rows matches the naive full-row oracle at modulus 210") {
    ContextOverrides ov;
    ov.y = 14;
    ov.z = 5;
    ov.s_floor = 3;
    SieveContext ctx = build_context(10, 2, 1.05, 1.05, ov);
    // C0 = 1.05: primes <= 10 only, so the modulus is 210
    ResidueSystem sys = choose_vectors(ctx, Strategy::Greedy, 0);
    SiftedSet sifted = sift(ctx, sys);
    PairingResult pairing = pair_exceptions(ctx, sifted);
    M0Result res = assemble_m0(ctx, sys, pairing);
    REQUIRE(res.modulus == 210);

    ScanReport report = scan_rows(ctx, res.m0, res.modulus, 50);
    size_t found = 0;
    for (uint64_t r = 1; r <= 50; ++r) {
        reference::NaiveRow naive = reference::scan_row_naive(res.m0, res.modulus, ctx.k, r, ctx.y);
        const RowStatus* row = nullptr;
        for (const auto& candidate : report.rows)
            if (candidate.r == r) row = &candidate;
        if (naive.q0_prime) {
            REQUIRE(row != nullptr);
            ++found;
            CHECK(row->clean == naive.prime_positions.empty());
            CHECK(row->prime_positions == naive.prime_positions);
        } else {
            CHECK(row == nullptr);
        }
    }
    CHECK(found == report.rows.size());
}

TEST_CASE("forced positions reduce to zero for random rows") {
    SieveContext ctx = toy_context();
    ResidueSystem sys = choose_vectors(ctx, Strategy::Greedy, 0);
    SiftedSet sifted = sift(ctx, sys);
    PairingResult pairing = pair_exceptions(ctx, sifted);
    M0Result res = assemble_m0(ctx, sys, pairing);
    auto forced = forced_divisor_table(ctx, res.m0);

    SplitMix64 rng(5);
    for (int iter = 0; iter < 100; ++iter) {
        uint64_t r = 1 + rng.below(1000);
        uint64_t u = 2 + rng.below(ctx.y - 1);
        uint64_t pi = forced[u - 2];
        if (pi == 0) continue;
        mpz_class a = res.m0 + 1 + r * res.modulus;
        mpz_pow_ui(a.get_mpz_t(), a.get_mpz_t(), ctx.k);
        a += u - 1;
        CHECK(mpz_fdiv_ui(a.get_mpz_t(), pi) == 0);
    }
}

TEST_CASE("certify_gap at tiny scales") {
    GapCertificate c5 = certify_gap(5, 2, 4);
    CHECK(c5.left_prime == 23);
    CHECK(c5.right_prime == 29);
    CHECK(c5.gap_length == 6);
    CHECK(c5.window_lo == 25);

    GapCertificate c3 = certify_gap(3, 2, 2);
    CHECK(c3.left_prime == 7);
    CHECK(c3.right_prime == 11);
    CHECK(c3.gap_length == 4);

    CHECK_THROWS_AS(certify_gap(4, 2, 4), ConfigError);
}

TEST_CASE("certify_gap transcript covers the whole interior") {
    GapCertificate cert = certify_gap(101, 2, 10); // 10201 inside its gap
    mpz_class expected = cert.left_prime + 1;
    for (const auto& e : cert.transcript) {
        CHECK(e.n == expected);
        CHECK(check_compositeness_witness(e.n, e.witness));
        ++expected;
    }
    CHECK(expected == cert.right_prime);
    VerifyResult vr = verify_certificate(cert);
    CHECK(vr.ok);
}

TEST_CASE("certificate json round trip") {
    GapCertificate cert = certify_gap(5, 2, 4);
    cert.x = 25;
    cert.c = 1.0;
    cert.C0 = 2.0;
    cert.m0 = 17;
    cert.P_x = 210;
    cert.r = 3;
    std::string text = certificate_to_json(cert);
    GapCertificate back = certificate_from_json(text);
    CHECK(back.q0 == cert.q0);
    CHECK(back.left_prime == cert.left_prime);
    CHECK(back.right_prime == cert.right_prime);
    CHECK(back.transcript.size() == cert.transcript.size());
    CHECK(verify_certificate(back).ok);
}

TEST_CASE("verify_certificate catches tampering") {
    GapCertificate cert = certify_gap(5, 2, 4);

    SUBCASE("fake divisor") {
        for (auto& e : cert.transcript)
            if (e.witness.has_divisor && e.n == 25) e.witness.divisor = 2; // 2 does not divide 25
        CHECK_FALSE(verify_certificate(cert).ok);
    }
    SUBCASE("missing interior entry") {
        cert.transcript.erase(cert.transcript.begin() + 1);
        CHECK_FALSE(verify_certificate(cert).ok);
    }
    SUBCASE("wrong endpoint") {
        cert.right_prime = 31; // skips the prime 29
        CHECK_FALSE(verify_certificate(cert).ok);
    }
    SUBCASE("composite q0") {
        cert.q0 = 6;
        CHECK_FALSE(verify_certificate(cert).ok);
    }
}

TEST_CASE("growth functions") {
    // fixed point: x = e^{e^{e^e}} gives log4 x = 1, log3 x = e, log2 x = e^e
    double ln_x = std::exp(std::exp(M_E));
    double expected = ln_x * std::exp(M_E) / M_E;
    CHECK(g2_from_ln(ln_x) == doctest::Approx(expected).epsilon(1e-12));

    for (double lg : {30.0, 40.0, 55.0, 70.0, 90.0, 120.0, 200.0, 300.0, 400.0, 500.0}) {
        double x = std::exp(lg);
        double l3 = std::log(std::log(lg));
        CHECK(g1(x) / g2(x) == doctest::Approx(1.0 / l3).epsilon(1e-9));
    }

    double prev = 0;
    for (double lg = std::log(1e10); lg <= std::log(1e30); lg += 1.0) {
        double v = g2_from_ln(lg);
        CHECK(v > prev);
        prev = v;
    }

    CHECK(std::isnan(g2(100.0))); // log4 undefined this low
}

TEST_CASE("certify_gap at 200-bit scale mixes divisor and prp witnesses") {
    mpz_class base = mpz_class(1) << 100;
    mpz_class q0;
    mpz_nextprime(q0.get_mpz_t(), base.get_mpz_t());
    GapCertificate cert = certify_gap(q0, 2, 10);
    CHECK(cert.gap_length == 338); // frozen from the deterministic scan
    int prp = 0, div = 0;
    for (const auto& e : cert.transcript) (e.witness.has_divisor ? div : prp)++;
    CHECK(div == 322);
    CHECK(prp == 15); // composites with no factor below the trial bound
    CHECK(verify_certificate(cert).ok);
    GapCertificate back = certificate_from_json(certificate_to_json(cert));
    CHECK(verify_certificate(back).ok);
}

TEST_CASE("cube-power pipeline: k = 3 end to end") {
    SieveContext ctx = toy_context(3);
    CHECK(ctx.Ptilde == std::vector<uint64_t>{29, 41, 47}); // p = 2 (mod 3) in (25, 50]
    for (uint64_t p : ctx.Ptilde) CHECK(p % 3 == 2);
    ResidueSystem sys = choose_vectors(ctx, Strategy::Greedy, 1);
    SiftedSet sifted = sift(ctx, sys);
    PairingResult pairing = pair_exceptions(ctx, sifted);
    M0Result m0 = assemble_m0(ctx, sys, pairing);
    ScanReport scan = scan_rows(ctx, m0.m0, m0.modulus, 3000);
    const RowStatus* clean = nullptr;
    for (const auto& row : scan.rows)
        if (row.clean) {
            clean = &row;
            break;
        }
    REQUIRE(clean != nullptr);
    GapCertificate cert = certify_gap(clean->q0, 3, ctx.y);
    CHECK(cert.gap_length >= ctx.y);
    CHECK(verify_certificate(cert).ok);
    // the cube itself carries its root as the divisor witness
    bool cube_entry = false;
    for (const auto& e : cert.transcript)
        if (e.n == cert.window_lo) {
            cube_entry = true;
            CHECK(e.witness.has_divisor);
            CHECK(e.witness.divisor == clean->q0);
        }
    CHECK(cube_entry);
}

TEST_CASE("end-to-end toy pipeline emits a verifiable certificate") {
    SieveContext ctx = toy_context();
    ResidueSystem sys = choose_vectors(ctx, Strategy::Greedy, 1);
    SiftedSet sifted = sift(ctx, sys);
    PairingResult pairing = pair_exceptions(ctx, sifted);
    M0Result m0 = assemble_m0(ctx, sys, pairing);
    ScanReport scan = scan_rows(ctx, m0.m0, m0.modulus, 2000);
    const RowStatus* clean = nullptr;
    for (const auto& row : scan.rows)
        if (row.clean) {
            clean = &row;
            break;
        }
    REQUIRE(clean != nullptr);
    GapCertificate cert = certify_gap(clean->q0, ctx.k, ctx.y);
    cert.x = ctx.x;
    cert.c = ctx.c;
    cert.C0 = ctx.C0;
    cert.m0 = m0.m0;
    cert.P_x = m0.modulus;
    cert.r = clean->r;
    CHECK(cert.gap_length >= ctx.y);
    VerifyResult vr = verify_certificate(cert);
    for (const auto& issue : vr.issues) CAPTURE(issue);
    CHECK(vr.ok);
}
