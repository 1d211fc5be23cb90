#include "gapforge/primes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <omp.h>

#include "gapforge/errors.hpp"

namespace gapforge {

namespace {

uint64_t isqrt64(uint64_t n) {
    uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

// Plain Eratosthenes for the base primes (<= sqrt(hi), small).
std::vector<uint64_t> simple_sieve(uint64_t limit) {
    std::vector<uint64_t> primes;
    if (limit < 2) return primes;
    std::vector<uint8_t> composite(limit + 1, 0);
    for (uint64_t i = 2; i * i <= limit; ++i)
        if (!composite[i])
            for (uint64_t j = i * i; j <= limit; j += i) composite[j] = 1;
    for (uint64_t i = 2; i <= limit; ++i)
        if (!composite[i]) primes.push_back(i);
    return primes;
}

// Sieves (lo, hi] into `out`, given base primes up to sqrt(hi).
void sieve_segment(uint64_t lo, uint64_t hi, const std::vector<uint64_t>& base,
                   std::vector<uint64_t>& out) {
    uint64_t len = hi - lo; // positions encode lo+1 .. hi
    std::vector<uint8_t> composite(len, 0);
    for (uint64_t p : base) {
        if (p * p > hi) break;
        uint64_t start = std::max(p * p, ((lo + p) / p) * p); // first multiple > lo
        for (uint64_t j = start; j <= hi; j += p) composite[j - lo - 1] = 1;
    }
    for (uint64_t i = 0; i < len; ++i) {
        uint64_t n = lo + 1 + i;
        if (n >= 2 && !composite[i]) out.push_back(n);
    }
}

} // namespace

namespace {
PrimeTable g_prime_cache;
}

void set_global_prime_cache(PrimeTable table) { g_prime_cache = std::move(table); }

std::vector<uint64_t> prime_range(uint64_t lo, uint64_t hi, const SieveOptions& opts) {
    if (lo > hi) throw ConfigError("prime_range: lo > hi");
    if (hi > opts.capacity_limit)
        throw CapacityError("prime_range: hi=" + std::to_string(hi) +
                            " exceeds capacity limit " + std::to_string(opts.capacity_limit));
    if (hi < 2) return {};

    if (hi <= g_prime_cache.limit()) {
        const auto& ps = g_prime_cache.primes();
        auto first = std::upper_bound(ps.begin(), ps.end(), lo);
        auto last = std::upper_bound(first, ps.end(), hi);
        return {first, last};
    }

    auto base = simple_sieve(isqrt64(hi));

    uint64_t seg = std::max<uint64_t>(opts.segment_size, 1024);
    uint64_t nseg = (hi - lo + seg - 1) / seg;
    std::vector<std::vector<uint64_t>> parts(nseg);

#pragma omp parallel for schedule(dynamic)
    for (int64_t s = 0; s < static_cast<int64_t>(nseg); ++s) {
        uint64_t a = lo + static_cast<uint64_t>(s) * seg;
        uint64_t b = std::min(hi, a + seg);
        sieve_segment(a, b, base, parts[static_cast<size_t>(s)]);
    }

    std::vector<uint64_t> primes;
    size_t total = 0;
    for (const auto& part : parts) total += part.size();
    primes.reserve(total);
    for (auto& part : parts) primes.insert(primes.end(), part.begin(), part.end());
    return primes;
}

PrimeTable PrimeTable::build(uint64_t limit, const SieveOptions& opts) {
    return PrimeTable(limit, prime_range(0, limit, opts));
}

mpz_class primorial(uint64_t x) {
    if (x < 2) throw ConfigError("primorial: x must be >= 2");
    auto primes = prime_range(0, x == 0 ? 0 : x - 1);
    // Balanced product tree; the naive left fold is quadratic in the output size.
    std::vector<mpz_class> layer;
    layer.reserve(primes.size());
    for (uint64_t p : primes) layer.emplace_back(p);
    if (layer.empty()) return 1;
    while (layer.size() > 1) {
        std::vector<mpz_class> next;
        next.reserve((layer.size() + 1) / 2);
        for (size_t i = 0; i + 1 < layer.size(); i += 2) next.push_back(layer[i] * layer[i + 1]);
        if (layer.size() % 2) next.push_back(layer.back());
        layer = std::move(next);
    }
    return layer[0];
}

namespace {

constexpr char kMagic[4] = {'G', 'F', 'P', 'T'};
constexpr uint32_t kVersion = 1;

void put_varint(std::string& buf, uint64_t v) {
    while (v >= 0x80) {
        buf.push_back(static_cast<char>((v & 0x7f) | 0x80));
        v >>= 7;
    }
    buf.push_back(static_cast<char>(v));
}

bool get_varint(const std::string& buf, size_t& pos, uint64_t& v) {
    v = 0;
    int shift = 0;
    while (pos < buf.size()) {
        uint8_t byte = static_cast<uint8_t>(buf[pos++]);
        v |= static_cast<uint64_t>(byte & 0x7f) << shift;
        if (!(byte & 0x80)) return true;
        shift += 7;
        if (shift > 63) return false;
    }
    return false;
}

template <typename T>
void put_le(std::string& buf, T v) {
    for (size_t i = 0; i < sizeof(T); ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

template <typename T>
bool get_le(const std::string& buf, size_t& pos, T& v) {
    if (pos + sizeof(T) > buf.size()) return false;
    v = 0;
    for (size_t i = 0; i < sizeof(T); ++i)
        v |= static_cast<T>(static_cast<uint8_t>(buf[pos + i])) << (8 * i);
    pos += sizeof(T);
    return true;
}

} // namespace

void save_prime_cache(const std::string& path, const PrimeTable& table) {
    std::string buf;
    buf.append(kMagic, 4);
    put_le<uint32_t>(buf, kVersion);
    put_le<uint64_t>(buf, table.limit());
    put_le<uint64_t>(buf, table.size());
    uint64_t prev = 0;
    for (uint64_t p : table.primes()) {
        put_varint(buf, p - prev);
        prev = p;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

bool load_prime_cache(const std::string& path, uint64_t want_limit, PrimeTable& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 4 + 4 + 8 + 8 || std::memcmp(buf.data(), kMagic, 4) != 0) return false;
    size_t pos = 4;
    uint32_t version = 0;
    uint64_t limit = 0, count = 0;
    if (!get_le(buf, pos, version) || version != kVersion) return false;
    if (!get_le(buf, pos, limit) || !get_le(buf, pos, count)) return false;
    if (limit < want_limit) return false; // stale: limit increased
    std::vector<uint64_t> primes;
    primes.reserve(count);
    uint64_t prev = 0;
    for (uint64_t i = 0; i < count; ++i) {
        uint64_t gap = 0;
        if (!get_varint(buf, pos, gap)) return false;
        prev += gap;
        primes.push_back(prev);
    }
    out = PrimeTable(limit, std::move(primes));
    return true;
}

PrimeTable cached_prime_table(const std::string& cache_dir, uint64_t limit,
                              const SieveOptions& opts) {
    std::string path = cache_dir.empty() ? "" : cache_dir + "/primes.gfpt";
    if (!path.empty()) {
        PrimeTable cached;
        if (load_prime_cache(path, limit, cached)) {
            if (cached.limit() == limit) return cached;
            // Cached table covers more than asked; trim the view.
            std::vector<uint64_t> primes;
            for (uint64_t p : cached.primes()) {
                if (p > limit) break;
                primes.push_back(p);
            }
            return PrimeTable(limit, std::move(primes));
        }
    }
    PrimeTable fresh = PrimeTable::build(limit, opts);
    if (!path.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(cache_dir, ec);
        if (!ec) save_prime_cache(path, fresh);
    }
    return fresh;
}

} // namespace gapforge
