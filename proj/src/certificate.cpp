#include "gapforge/certificate.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "gapforge/errors.hpp"

namespace gapforge {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double ln_mpz(const mpz_class& n) {
    if (n <= 0) throw ConfigError("ln_mpz: n must be positive");
    signed long exp = 0;
    double d = mpz_get_d_2exp(&exp, n.get_mpz_t());
    return std::log(d) + static_cast<double>(exp) * std::log(2.0);
}

double g2_from_ln(double ln_x) {
    if (!(ln_x > 0)) return kNaN;
    double l2 = std::log(ln_x);
    if (!(l2 > 0)) return kNaN;
    double l3 = std::log(l2);
    if (!(l3 > 0)) return kNaN;
    double l4 = std::log(l3);
    if (!(l4 > 0)) return kNaN;
    return ln_x * l2 * l4 / l3;
}

double g2(double x) { return x > 1 ? g2_from_ln(std::log(x)) : kNaN; }

double g1(double x) {
    if (!(x > 1)) return kNaN;
    double l1 = std::log(x);
    double l2 = std::log(l1);
    if (!(l2 > 0)) return kNaN;
    double l3 = std::log(l2);
    if (!(l3 > 0)) return kNaN;
    double l4 = std::log(l3);
    if (!(l4 > 0)) return kNaN;
    return l1 * l2 * l4 / (l3 * l3);
}

GapCertificate certify_gap(const mpz_class& q0, uint64_t k, uint64_t y_window) {
    if (!is_prime(q0)) throw ConfigError("certify_gap: q0 is not prime");
    if (k < 2) throw ConfigError("certify_gap: k must be >= 2 so q0^k is composite");
    GapCertificate cert;
    cert.k = k;
    cert.q0 = q0;

    mpz_class q0k;
    mpz_pow_ui(q0k.get_mpz_t(), q0.get_mpz_t(), static_cast<unsigned long>(k));
    cert.window_lo = q0k;
    cert.window_hi = q0k + (y_window > 0 ? y_window - 1 : 0);

    std::vector<TranscriptEntry> left_entries;
    mpz_class n = q0k - 1;
    while (true) {
        auto w = compositeness_witness(n);
        if (!w) break;
        left_entries.push_back(TranscriptEntry{n, *w});
        --n;
    }
    cert.left_prime = n;

    // Transcript ascending: left side reversed, then q0^k (divisor q0 for
    // k >= 2), then the right side.
    cert.transcript.assign(left_entries.rbegin(), left_entries.rend());
    if (k >= 2) {
        TranscriptEntry e;
        e.n = q0k;
        e.witness.has_divisor = true;
        e.witness.divisor = q0;
        cert.transcript.push_back(std::move(e));
    }

    n = q0k + 1;
    while (true) {
        auto w = compositeness_witness(n);
        if (!w) break;
        cert.transcript.push_back(TranscriptEntry{n, *w});
        ++n;
    }
    cert.right_prime = n;

    mpz_class gap = cert.right_prime - cert.left_prime;
    cert.gap_length = mpz_get_ui(gap.get_mpz_t());
    cert.g2_value = g2_from_ln(ln_mpz(cert.left_prime));
    cert.ratio = std::isnan(cert.g2_value)
                     ? kNaN
                     : static_cast<double>(cert.gap_length) / cert.g2_value;
    return cert;
}

namespace {

nlohmann::json witness_to_json(const CompositenessWitness& w) {
    if (w.has_divisor) return nlohmann::json{{"divisor", w.divisor.get_str()}};
    return nlohmann::json{{"prp_rounds", w.prp_rounds}};
}

CompositenessWitness witness_from_json(const nlohmann::json& j) {
    CompositenessWitness w;
    if (j.contains("divisor")) {
        w.has_divisor = true;
        w.divisor = mpz_class(j.at("divisor").get<std::string>());
    } else {
        w.has_divisor = false;
        w.prp_rounds = j.at("prp_rounds").get<int>();
    }
    return w;
}

nlohmann::json maybe_nan(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

} // namespace

std::string certificate_to_json(const GapCertificate& cert) {
    nlohmann::json j;
    j["x"] = cert.x;
    j["k"] = cert.k;
    j["c"] = cert.c;
    j["C0"] = cert.C0;
    j["m0"] = cert.m0.get_str();
    j["P_x"] = cert.P_x.get_str();
    j["r"] = cert.r;
    j["q0"] = cert.q0.get_str();
    j["window"] = {{"lo", cert.window_lo.get_str()}, {"hi", cert.window_hi.get_str()}};
    j["left_prime"] = cert.left_prime.get_str();
    j["right_prime"] = cert.right_prime.get_str();
    j["gap_length"] = cert.gap_length;
    j["g2_value"] = maybe_nan(cert.g2_value);
    j["ratio"] = maybe_nan(cert.ratio);
    nlohmann::json transcript = nlohmann::json::array();
    for (const auto& e : cert.transcript)
        transcript.push_back({{"n", e.n.get_str()}, {"witness", witness_to_json(e.witness)}});
    j["transcript"] = std::move(transcript);
    return j.dump(2);
}

GapCertificate certificate_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("certificate parse error: ") + e.what());
    }
    try {
        GapCertificate cert;
        cert.x = j.at("x").get<uint64_t>();
        cert.k = j.at("k").get<uint64_t>();
        cert.c = j.at("c").get<double>();
        cert.C0 = j.at("C0").get<double>();
        cert.m0 = mpz_class(j.at("m0").get<std::string>());
        cert.P_x = mpz_class(j.at("P_x").get<std::string>());
        cert.r = j.at("r").get<uint64_t>();
        cert.q0 = mpz_class(j.at("q0").get<std::string>());
        cert.window_lo = mpz_class(j.at("window").at("lo").get<std::string>());
        cert.window_hi = mpz_class(j.at("window").at("hi").get<std::string>());
        cert.left_prime = mpz_class(j.at("left_prime").get<std::string>());
        cert.right_prime = mpz_class(j.at("right_prime").get<std::string>());
        cert.gap_length = j.at("gap_length").get<uint64_t>();
        cert.g2_value = j.at("g2_value").is_null() ? kNaN : j.at("g2_value").get<double>();
        cert.ratio = j.at("ratio").is_null() ? kNaN : j.at("ratio").get<double>();
        for (const auto& e : j.at("transcript")) {
            TranscriptEntry t;
            t.n = mpz_class(e.at("n").get<std::string>());
            t.witness = witness_from_json(e.at("witness"));
            cert.transcript.push_back(std::move(t));
        }
        return cert;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("certificate field error: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("certificate number error: ") + e.what());
    }
}

VerifyResult verify_certificate(const GapCertificate& cert) {
    VerifyResult res;

    if (!is_prime(cert.q0)) res.fail("q0 is not prime");

    mpz_class q0k;
    mpz_pow_ui(q0k.get_mpz_t(), cert.q0.get_mpz_t(), static_cast<unsigned long>(cert.k));
    if (q0k != cert.window_lo) res.fail("window.lo != q0^k");

    if (!(cert.left_prime < q0k && q0k < cert.right_prime))
        res.fail("q0^k does not lie strictly inside (left_prime, right_prime)");
    if (!is_prime(cert.left_prime)) res.fail("left_prime is not prime");
    if (!is_prime(cert.right_prime)) res.fail("right_prime is not prime");

    // Re-derive every compositeness claim; the transcript must cover the
    // whole open interval, in order, with valid witnesses.
    mpz_class expected = cert.left_prime + 1;
    for (const auto& e : cert.transcript) {
        if (e.n != expected) {
            res.fail("transcript gap: expected n=" + expected.get_str() + ", found " +
                     e.n.get_str());
            expected = e.n; // resync to report further issues sensibly
        }
        if (!check_compositeness_witness(e.n, e.witness))
            res.fail("witness check failed at n=" + e.n.get_str());
        ++expected;
    }
    if (expected != cert.right_prime)
        res.fail("transcript ends at " + expected.get_str() + ", right_prime is " +
                 cert.right_prime.get_str());

    mpz_class gap = cert.right_prime - cert.left_prime;
    if (!mpz_fits_ulong_p(gap.get_mpz_t()) || mpz_get_ui(gap.get_mpz_t()) != cert.gap_length)
        res.fail("gap_length does not equal right_prime - left_prime");

    double g2v = g2_from_ln(ln_mpz(cert.left_prime));
    if (std::isnan(g2v) != std::isnan(cert.g2_value))
        res.fail("g2_value domain mismatch");
    else if (!std::isnan(g2v)) {
        if (std::abs(g2v - cert.g2_value) > 1e-9 * std::abs(g2v))
            res.fail("g2_value mismatch");
        double ratio = static_cast<double>(cert.gap_length) / g2v;
        if (std::abs(ratio - cert.ratio) > 1e-9 * std::abs(ratio))
            res.fail("ratio arithmetic mismatch");
    }
    return res;
}

} // namespace gapforge
