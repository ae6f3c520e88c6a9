#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "eklab/rat.hpp"

namespace eklab::arith {

// Distinct/total prime-divisor counts for every n in [lo, hi), one byte each.
// A byte suffices: Omega(n) <= log2(n) < 64 for any 64-bit n.
struct FactorTable {
    std::uint64_t lo = 0, hi = 0; // half-open
    std::vector<std::uint8_t> omega;     // distinct prime divisors
    std::vector<std::uint8_t> big_omega; // with multiplicity

    std::uint8_t omega_at(std::uint64_t n) const;
    std::uint8_t big_omega_at(std::uint64_t n) const;
};

// Good/bad prime split below a cutoff R.
struct PrimeSets {
    std::uint64_t R = 0;
    std::vector<std::uint64_t> good; // ascending
    std::vector<std::uint64_t> bad;  // ascending
};

struct SieveOptions {
    std::uint64_t segment = 1u << 20; // elements per segment
    int threads = 0;                  // 0 = honor EKLAB_THREADS / OpenMP default
};

// All primes <= limit, ascending.  limit < 2 is an empty domain and rejected.
std::vector<std::uint64_t> sieve_primes(std::uint64_t limit);

// floor(sqrt(n)) and the smallest r with r^e >= n, both exact.
std::uint64_t floor_sqrt(std::uint64_t n);
std::uint64_t ceil_root(std::uint64_t n, unsigned e);

// Segmented sieve over [lo, hi), OpenMP-parallel across segments.  Segments
// write disjoint ranges, so the table is identical for any thread count.
FactorTable omega_range(std::uint64_t lo, std::uint64_t hi, const SieveOptions& opts = {});

// Plain one-pass sieve kept as the serial reference for tests and the
// benchmark target.  Same contract as omega_range.
FactorTable omega_range_reference(std::uint64_t lo, std::uint64_t hi);

// Number of divisors from `primes` for every n in [lo, hi) (truncated omega).
std::vector<std::uint8_t> omega_restricted_range(std::uint64_t lo, std::uint64_t hi,
                                                 std::span<const std::uint64_t> primes);

// Compensated sum of 1/p in ascending order; rejects unsorted or duplicate input.
double prime_reciprocal_sum(std::span<const std::uint64_t> primes);

// Split primes <= R into bad (divides a numerator or denominator of some
// gamma, or p <= log N) and good (the rest).
PrimeSets build_prime_sets(std::uint64_t N, std::uint64_t R, std::span<const Rat> gammas);

// Distinct prime factors of |v|, ascending.  Trial division with a primality
// check on the cofactor; throws budget_error if a composite cofactor would
// need division beyond ~1e8.
std::vector<std::uint64_t> factor_distinct(Int v);

// Sieve cache: "EKLAB1\n", then "lo hi\n" in ASCII, then (hi-lo) byte pairs
// (omega, big_omega).  read returns nullopt on missing/foreign/mismatched files.
void write_cache(const FactorTable& t, const std::filesystem::path& file);
std::optional<FactorTable> read_cache(const std::filesystem::path& file, std::uint64_t lo,
                                      std::uint64_t hi);

// omega_range through a cache directory (file name derived from the bounds).
FactorTable omega_range_cached(std::uint64_t lo, std::uint64_t hi,
                               const std::filesystem::path& cache_dir,
                               const SieveOptions& opts = {});

} // namespace eklab::arith
