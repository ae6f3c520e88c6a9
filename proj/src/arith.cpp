#include "eklab/arith.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "eklab/errors.hpp"
#include "eklab/parallel.hpp"

namespace eklab {

int env_thread_cap() {
    static const int cap = [] {
        const char* s = std::getenv("EKLAB_THREADS");
        if (!s) return 0;
        char* end = nullptr;
        long v = std::strtol(s, &end, 10);
        if (end == s || v < 0) return 0;
        return static_cast<int>(v);
    }();
    return cap;
}

int effective_threads(int cap) {
    int t = omp_get_max_threads();
    if (cap <= 0) cap = env_thread_cap();
    if (cap > 0 && cap < t) t = cap;
    return t > 0 ? t : 1;
}

double compensated_sum(const std::vector<double>& v) {
    double s = 0.0, c = 0.0;
    for (double x : v) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    return s + c;
}

} // namespace eklab

namespace eklab::arith {

namespace {

std::uint64_t isqrt_u64(std::uint64_t n) {
    if (n == 0) return 0;
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r > n / r) --r;
    while ((r + 1) <= n / (r + 1)) ++r;
    return r;
}

// Sieve one segment [a, b) into the two byte arrays (offsets relative to lo).
void sieve_segment(std::uint64_t a, std::uint64_t b, std::uint64_t lo,
                   std::span<const std::uint64_t> base, std::uint8_t* omega,
                   std::uint8_t* big_omega) {
    const std::size_t len = static_cast<std::size_t>(b - a);
    std::vector<std::uint64_t> rem(len);
    for (std::size_t i = 0; i < len; ++i) rem[i] = a + i;

    for (std::uint64_t p : base) {
        for (std::uint64_t m = ((a + p - 1) / p) * p; m < b; m += p) {
            const std::size_t i = static_cast<std::size_t>(m - a);
            omega[(m - lo)]++;
            while (rem[i] % p == 0) {
                rem[i] /= p;
                big_omega[(m - lo)]++;
            }
        }
    }
    for (std::size_t i = 0; i < len; ++i) {
        if (rem[i] > 1) { // one prime factor above the base bound remains
            omega[(a + i) - lo]++;
            big_omega[(a + i) - lo]++;
        }
    }
}

std::filesystem::path cache_file_name(const std::filesystem::path& dir, std::uint64_t lo,
                                      std::uint64_t hi) {
    std::ostringstream name;
    name << "omega_" << lo << "_" << hi << ".ekc";
    return dir / name.str();
}

} // namespace

std::uint64_t floor_sqrt(std::uint64_t n) { return isqrt_u64(n); }

std::uint64_t ceil_root(std::uint64_t n, unsigned e) {
    if (e == 0) throw validation_error("ceil_root: exponent must be positive");
    if (n <= 1) return n;
    auto pow_ge = [&](std::uint64_t r) {
        Int v;
        mpz_ui_pow_ui(v.get_mpz_t(), static_cast<unsigned long>(r), e);
        return v >= Int(static_cast<unsigned long>(n));
    };
    auto guess = static_cast<std::uint64_t>(std::pow(static_cast<double>(n), 1.0 / e));
    std::uint64_t r = guess > 2 ? guess - 2 : 1;
    while (!pow_ge(r)) ++r;
    while (r > 1 && pow_ge(r - 1)) --r;
    return r;
}

std::uint8_t FactorTable::omega_at(std::uint64_t n) const {
    if (n < lo || n >= hi) throw validation_error("FactorTable: index out of range");
    return omega[static_cast<std::size_t>(n - lo)];
}

std::uint8_t FactorTable::big_omega_at(std::uint64_t n) const {
    if (n < lo || n >= hi) throw validation_error("FactorTable: index out of range");
    return big_omega[static_cast<std::size_t>(n - lo)];
}

std::vector<std::uint64_t> sieve_primes(std::uint64_t limit) {
    if (limit < 2) throw validation_error("sieve_primes: empty domain, limit must be >= 2");
    std::vector<std::uint8_t> composite(static_cast<std::size_t>(limit) + 1, 0);
    for (std::uint64_t p = 2; p * p <= limit; ++p)
        if (!composite[p])
            for (std::uint64_t m = p * p; m <= limit; m += p) composite[m] = 1;
    std::vector<std::uint64_t> primes;
    for (std::uint64_t p = 2; p <= limit; ++p)
        if (!composite[p]) primes.push_back(p);
    return primes;
}

FactorTable omega_range(std::uint64_t lo, std::uint64_t hi, const SieveOptions& opts) {
    if (lo < 1 || hi <= lo) throw validation_error("omega_range: need 1 <= lo < hi");
    const std::uint64_t n = hi - lo;
    FactorTable t;
    t.lo = lo;
    t.hi = hi;
    t.omega.assign(static_cast<std::size_t>(n), 0);
    t.big_omega.assign(static_cast<std::size_t>(n), 0);

    const auto base = sieve_primes(std::max<std::uint64_t>(2, isqrt_u64(hi - 1)));
    const std::uint64_t seg = std::max<std::uint64_t>(1, opts.segment);
    const std::uint64_t nseg = (n + seg - 1) / seg;

    std::exception_ptr err;
    const int threads = effective_threads(opts.threads);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::int64_t s = 0; s < static_cast<std::int64_t>(nseg); ++s) {
        try {
            const std::uint64_t a = lo + static_cast<std::uint64_t>(s) * seg;
            const std::uint64_t b = std::min(hi, a + seg);
            sieve_segment(a, b, lo, base, t.omega.data(), t.big_omega.data());
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);

    if (lo == 1) { t.omega[0] = 0; t.big_omega[0] = 0; }
    return t;
}

FactorTable omega_range_reference(std::uint64_t lo, std::uint64_t hi) {
    if (lo < 1 || hi <= lo) throw validation_error("omega_range_reference: need 1 <= lo < hi");
    FactorTable t;
    t.lo = lo;
    t.hi = hi;
    const std::size_t n = static_cast<std::size_t>(hi - lo);
    t.omega.assign(n, 0);
    t.big_omega.assign(n, 0);
    std::vector<std::uint64_t> rem(n);
    for (std::size_t i = 0; i < n; ++i) rem[i] = lo + i;
    for (std::uint64_t p = 2; p * p < hi; ++p) {
        bool prime = true;
        for (std::uint64_t d = 2; d * d <= p; ++d)
            if (p % d == 0) { prime = false; break; }
        if (!prime) continue;
        for (std::uint64_t m = ((lo + p - 1) / p) * p; m < hi; m += p) {
            const std::size_t i = static_cast<std::size_t>(m - lo);
            t.omega[i]++;
            while (rem[i] % p == 0) { rem[i] /= p; t.big_omega[i]++; }
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (rem[i] > 1) { t.omega[i]++; t.big_omega[i]++; }
    if (lo == 1) { t.omega[0] = 0; t.big_omega[0] = 0; }
    return t;
}

std::vector<std::uint8_t> omega_restricted_range(std::uint64_t lo, std::uint64_t hi,
                                                 std::span<const std::uint64_t> primes) {
    if (lo < 1 || hi <= lo) throw validation_error("omega_restricted_range: need 1 <= lo < hi");
    std::vector<std::uint8_t> counts(static_cast<std::size_t>(hi - lo), 0);
    for (std::uint64_t p : primes) {
        if (p < 2) throw validation_error("omega_restricted_range: entries must be >= 2");
        for (std::uint64_t m = ((lo + p - 1) / p) * p; m < hi; m += p)
            counts[static_cast<std::size_t>(m - lo)]++;
    }
    return counts;
}

double prime_reciprocal_sum(std::span<const std::uint64_t> primes) {
    double s = 0.0, c = 0.0;
    std::uint64_t prev = 0;
    for (std::uint64_t p : primes) {
        if (p < 2) throw validation_error("prime_reciprocal_sum: entries must be >= 2");
        if (p <= prev) throw validation_error("prime_reciprocal_sum: input must be strictly ascending");
        prev = p;
        const double x = 1.0 / static_cast<double>(p);
        const double t = s + x;
        c += (s - t) + x; // |s| >= |x| always holds here after the first term
        s = t;
    }
    return s + c;
}

std::vector<std::uint64_t> factor_distinct(Int v) {
    v = abs(v);
    std::vector<std::uint64_t> out;
    if (v <= 1) return out;
    for (std::uint64_t d = 2; d <= 100000; d = (d == 2 ? 3 : d + 2)) {
        if (Int(d) * d > v) break;
        if (mpz_divisible_ui_p(v.get_mpz_t(), d)) {
            out.push_back(d);
            do { mpz_divexact_ui(v.get_mpz_t(), v.get_mpz_t(), d); }
            while (mpz_divisible_ui_p(v.get_mpz_t(), d));
        }
    }
    if (v > 1) {
        if (mpz_probab_prime_p(v.get_mpz_t(), 40) != 0) {
            out.push_back(to_u64(v, "factor_distinct: prime cofactor"));
        } else {
            // Composite cofactor with no factor <= 1e5: grind further, bail
            // out when the budget is plainly hopeless.
            Int d = 100001;
            while (d * d <= v) {
                if (d > 100000000) throw budget_error("factor_distinct: cofactor too hard to factor");
                if (mpz_divisible_p(v.get_mpz_t(), d.get_mpz_t())) {
                    out.push_back(to_u64(d, "factor_distinct: factor"));
                    do { mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), d.get_mpz_t()); }
                    while (mpz_divisible_p(v.get_mpz_t(), d.get_mpz_t()));
                }
                d += 2;
            }
            if (v > 1) out.push_back(to_u64(v, "factor_distinct: prime cofactor"));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

PrimeSets build_prime_sets(std::uint64_t N, std::uint64_t R, std::span<const Rat> gammas) {
    if (N < 2) throw validation_error("build_prime_sets: N must be >= 2");
    if (R < 2) throw validation_error("build_prime_sets: R must be >= 2");
    std::set<std::uint64_t> bad;
    const double logN = std::log(static_cast<double>(N));
    for (std::uint64_t p : sieve_primes(std::max<std::uint64_t>(2, static_cast<std::uint64_t>(logN))))
        if (static_cast<double>(p) <= logN) bad.insert(p);
    for (const Rat& g : gammas) {
        if (g == 0) throw validation_error("build_prime_sets: gamma entries must be nonzero");
        for (std::uint64_t p : factor_distinct(g.get_num())) bad.insert(p);
        for (std::uint64_t p : factor_distinct(g.get_den())) bad.insert(p);
    }
    PrimeSets out;
    out.R = R;
    for (std::uint64_t p : sieve_primes(R)) {
        if (bad.count(p))
            out.bad.push_back(p);
        else
            out.good.push_back(p);
    }
    // Bad primes above R still belong to the bad set (they are excluded from
    // every sum anyway, but the split should carry the full information).
    for (std::uint64_t p : bad)
        if (p > R) out.bad.push_back(p);
    std::sort(out.bad.begin(), out.bad.end());
    return out;
}

void write_cache(const FactorTable& t, const std::filesystem::path& file) {
    std::ofstream f(file, std::ios::binary | std::ios::trunc);
    if (!f) throw validation_error("write_cache: cannot open " + file.string());
    f << "EKLAB1\n" << t.lo << " " << t.hi << "\n";
    const std::size_t n = static_cast<std::size_t>(t.hi - t.lo);
    std::vector<char> buf(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        buf[2 * i] = static_cast<char>(t.omega[i]);
        buf[2 * i + 1] = static_cast<char>(t.big_omega[i]);
    }
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!f) throw validation_error("write_cache: short write to " + file.string());
}

std::optional<FactorTable> read_cache(const std::filesystem::path& file, std::uint64_t lo,
                                      std::uint64_t hi) {
    std::ifstream f(file, std::ios::binary);
    if (!f) return std::nullopt;
    std::string magic;
    if (!std::getline(f, magic) || magic != "EKLAB1") return std::nullopt;
    std::string header;
    if (!std::getline(f, header)) return std::nullopt;
    std::istringstream hs(header);
    std::uint64_t flo = 0, fhi = 0;
    if (!(hs >> flo >> fhi) || flo != lo || fhi != hi) return std::nullopt;
    FactorTable t;
    t.lo = lo;
    t.hi = hi;
    const std::size_t n = static_cast<std::size_t>(hi - lo);
    t.omega.resize(n);
    t.big_omega.resize(n);
    std::vector<char> buf(2 * n);
    f.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (f.gcount() != static_cast<std::streamsize>(buf.size())) return std::nullopt;
    for (std::size_t i = 0; i < n; ++i) {
        t.omega[i] = static_cast<std::uint8_t>(buf[2 * i]);
        t.big_omega[i] = static_cast<std::uint8_t>(buf[2 * i + 1]);
    }
    return t;
}

FactorTable omega_range_cached(std::uint64_t lo, std::uint64_t hi,
                               const std::filesystem::path& cache_dir, const SieveOptions& opts) {
    const auto file = cache_file_name(cache_dir, lo, hi);
    if (auto hit = read_cache(file, lo, hi)) return std::move(*hit);
    FactorTable t = omega_range(lo, hi, opts);
    std::error_code ec;
    std::filesystem::create_directories(cache_dir, ec);
    if (!ec) write_cache(t, file);
    return t;
}

} // namespace eklab::arith
