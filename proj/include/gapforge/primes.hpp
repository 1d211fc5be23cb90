#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace gapforge {

struct SieveOptions {
    // Segment size in bytes of the sieve bitmap; cache behavior dominates
    // sieve throughput, so this is a knob.
    uint64_t segment_size = uint64_t(1) << 20;
    // Hard ceiling on `hi`; above this we refuse instead of swapping.
    uint64_t capacity_limit = uint64_t(2'000'000'000);
};

// Immutable ascending table of all primes <= limit.
class PrimeTable {
public:
    PrimeTable() = default;
    PrimeTable(uint64_t limit, std::vector<uint64_t> primes)
        : limit_(limit), primes_(std::move(primes)) {}

    uint64_t limit() const { return limit_; }
    const std::vector<uint64_t>& primes() const { return primes_; }
    size_t size() const { return primes_.size(); }

    static PrimeTable build(uint64_t limit, const SieveOptions& opts = {});

private:
    uint64_t limit_ = 0;
    std::vector<uint64_t> primes_;
};

// Exactly the primes p with lo < p <= hi, ascending. Segmented sieve,
// internally parallel over disjoint segments; output independent of the
// parallelism degree.
std::vector<uint64_t> prime_range(uint64_t lo, uint64_t hi, const SieveOptions& opts = {});

// Product of all primes strictly below x.
mpz_class primorial(uint64_t x);

// Binary prime-table cache: header (magic "GFPT", version u32, limit u64,
// count u64, little-endian) followed by varint-encoded prime gaps.
// Returns false when the file is absent, malformed, or its limit is below
// the requested one (stale caches are regenerated, never trusted).
bool load_prime_cache(const std::string& path, uint64_t want_limit, PrimeTable& out);
void save_prime_cache(const std::string& path, const PrimeTable& table);

// Loads from cache when possible, otherwise sieves and refreshes the cache.
PrimeTable cached_prime_table(const std::string& cache_dir, uint64_t limit,
                              const SieveOptions& opts = {});

// Installs a process-wide prime table that prime_range consults for ranges
// it covers (binary search instead of sieving). Cleared by an empty table.
void set_global_prime_cache(PrimeTable table);

} // namespace gapforge
