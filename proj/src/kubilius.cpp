#include "eklab/kubilius.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "eklab/arith.hpp"
#include "eklab/errors.hpp"
#include "eklab/harmonic.hpp"
#include "eklab/parallel.hpp"
#include "eklab/stats.hpp"

namespace eklab::kubilius {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2 * kPi;

// splitmix64 finalizer; the counter chain below hashes (seed, draw, index)
// into one 64-bit word per Bernoulli decision
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::complex<double> e_of(double x) { return std::polar(1.0, kTwoPi * x); }

} // namespace

KubiliusModel KubiliusModel::make(std::vector<std::uint64_t> primes, std::uint64_t seed) {
    if (primes.empty()) throw validation_error("model needs a nonempty prime set");
    std::sort(primes.begin(), primes.end());
    for (std::size_t i = 0; i + 1 < primes.size(); ++i)
        if (primes[i] == primes[i + 1])
            throw validation_error("duplicate prime " + std::to_string(primes[i]) +
                                   " in the model");
    for (std::uint64_t p : primes) {
        Int pz(static_cast<unsigned long>(p));
        if (p < 2 || mpz_probab_prime_p(pz.get_mpz_t(), 40) == 0)
            throw validation_error("model entry " + std::to_string(p) + " is not prime");
    }
    KubiliusModel m;
    m.s = arith::prime_reciprocal_sum(primes);
    m.primes = std::move(primes);
    m.seed = seed;
    return m;
}

KubiliusModel model_for_slope(const reals::CertifiedReal& alpha, std::uint64_t N,
                              std::uint64_t seed) {
    if (N < 16) throw validation_error("slope model needs N >= 16");
    harmonic::Schedule sched = harmonic::Schedule::defaults(N);
    Int height(static_cast<unsigned long>(arith::ceil_root(N, 8)));
    Rat approx = reals::best_rational_of_height(alpha, height);
    arith::PrimeSets sets = arith::build_prime_sets(N, sched.R, std::span(&approx, 1));
    if (sets.good.empty())
        throw validation_error("no model primes survive the exclusions at N = " +
                               std::to_string(N));
    return KubiliusModel::make(sets.good, seed);
}

std::vector<std::uint64_t> sample_model(const KubiliusModel& model, std::uint64_t count) {
    if (count < 1) throw validation_error("sample count must be >= 1");
    // acceptance threshold floor(2^64 / p) makes P(h < thr) = 1/p up to 2^-64
    std::vector<std::uint64_t> thr(model.primes.size());
    for (std::size_t j = 0; j < thr.size(); ++j) {
        std::uint64_t p = model.primes[j];
        thr[j] = UINT64_MAX / p + ((UINT64_MAX % p) + 1 == p ? 1 : 0);
    }
    std::vector<std::uint64_t> out(count);
    const std::uint64_t base = mix64(model.seed);
    parallel_fill(count, [&](std::uint64_t i) {
        const std::uint64_t draw_key = mix64(base + i);
        std::uint64_t c = 0;
        for (std::size_t j = 0; j < thr.size(); ++j) {
            if (mix64(draw_key + j) < thr[j]) ++c;
        }
        out[i] = c;
    });
    return out;
}

std::complex<double> char_exact(const KubiliusModel& model, double t) {
    std::complex<double> factor_top = e_of(t) - 1.0;
    std::complex<double> prod = 1.0;
    for (std::uint64_t p : model.primes) prod *= 1.0 + factor_top / static_cast<double>(p);
    return prod;
}

std::complex<double> char_standardized(const KubiliusModel& model, double t) {
    double rs = std::sqrt(model.s);
    return e_of(-t * rs) * char_exact(model, t / rs);
}

std::vector<CharRow> char_compare(const KubiliusModel& model,
                                  std::span<const std::uint64_t> empirical,
                                  std::span<const double> t_grid) {
    if (t_grid.empty()) throw validation_error("characteristic grid is empty");
    if (empirical.empty()) throw validation_error("empirical sample is empty");

    // integer values: the empirical average collapses onto the histogram.
    // Counts stay integral until one final division, so the t = 0 row is
    // exactly zero instead of accumulating 1/n rounding.
    std::uint64_t maxv = *std::max_element(empirical.begin(), empirical.end());
    std::vector<double> weight(static_cast<std::size_t>(maxv) + 1, 0.0);
    for (std::uint64_t v : empirical) weight[static_cast<std::size_t>(v)] += 1.0;
    const double n = static_cast<double>(empirical.size());

    std::vector<CharRow> rows(t_grid.size());
    parallel_fill(t_grid.size(), [&](std::uint64_t i) {
        double t = t_grid[i];
        std::complex<double> step = e_of(t);
        std::complex<double> pw = 1.0;
        std::complex<double> emp = 0.0;
        for (std::size_t v = 0; v < weight.size(); ++v) {
            if (weight[v] != 0.0) emp += weight[v] * pw;
            pw *= step;
        }
        emp /= n;
        std::complex<double> ex = char_exact(model, t);
        rows[i] = {t, ex, emp, std::abs(ex - emp)};
    });
    return rows;
}

double esseen_bound(std::span<const std::pair<double, std::complex<double>>> char_values,
                    double A, double density_sup, const EsseenConfig& cfg) {
    if (!(A > 0)) throw validation_error("smoothing cutoff A must be positive");
    if (!(density_sup > 0)) throw validation_error("density bound must be positive");
    if (char_values.size() < 3) throw validation_error("need at least 3 characteristic values");

    std::vector<std::pair<double, std::complex<double>>> rows(char_values.begin(),
                                                              char_values.end());
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    const double slack = 1e-9 * A;
    if (rows.front().first > -A + slack || rows.back().first < A - slack)
        throw precision_error("characteristic values do not cover [-A, A]");
    const double max_gap = A / 512;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i)
        if (rows[i + 1].first - rows[i].first > max_gap + slack)
            throw precision_error("characteristic grid spacing exceeds A/512 near t = " +
                                  std::to_string(rows[i].first));

    std::vector<double> g(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double t = rows[i].first;
        if (t == 0.0) continue; // patched from the nearest neighbor below
        double num = std::abs(rows[i].second - std::exp(-2 * kPi * kPi * t * t));
        g[i] = num / std::abs(t);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].first != 0.0) continue;
        if (i + 1 < rows.size() && rows[i + 1].first != 0.0)
            g[i] = g[i + 1];
        else if (i > 0)
            g[i] = g[i - 1];
    }

    double integral = 0;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i)
        integral += 0.5 * (g[i] + g[i + 1]) * (rows[i + 1].first - rows[i].first);

    return cfg.integral_prefactor * integral + cfg.edge_coefficient * density_sup / A;
}

Rat binomial_moment_model(const KubiliusModel& model, unsigned ell) {
    // one-pass elementary symmetric function recurrence
    std::vector<Rat> e(ell + 1, Rat(0));
    e[0] = 1;
    for (std::uint64_t p : model.primes) {
        Rat x = make_rat(1, Int(static_cast<unsigned long>(p)));
        for (std::size_t j = std::min<std::size_t>(ell, model.primes.size()); j >= 1; --j)
            e[j] += x * e[j - 1];
    }
    return e[ell];
}

Rat binomial_moment_brute(const KubiliusModel& model, unsigned ell) {
    const std::size_t m = model.primes.size();
    if (m > 20)
        throw budget_error("subset enumeration over " + std::to_string(m) +
                           " primes exceeds the 20-prime cap");
    Rat sum = 0;
    for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
        if (std::popcount(mask) != static_cast<int>(ell)) continue;
        Int prod = 1;
        for (std::size_t j = 0; j < m; ++j)
            if (mask & (1ull << j)) prod *= static_cast<unsigned long>(model.primes[j]);
        sum += make_rat(1, prod);
    }
    return sum;
}

double binomial_moment_sample(std::span<const std::uint64_t> sample, unsigned ell) {
    if (sample.empty()) throw validation_error("moment of an empty sample");
    std::vector<double> terms(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double c = 1;
        for (unsigned j = 0; j < ell; ++j)
            c *= (static_cast<double>(sample[i]) - j) / (j + 1);
        if (sample[i] < ell) c = 0;
        terms[i] = c;
    }
    return compensated_sum(terms) / static_cast<double>(terms.size());
}

DivisibilityReport divisibility_density(std::uint64_t d, const reals::BeattySpec& spec,
                                        std::uint64_t N) {
    if (d < 1) throw validation_error("modulus must be >= 1");
    if (N < 1) throw validation_error("density needs N >= 1");
    std::vector<std::int64_t> floors = reals::beatty_floor_range(spec, 1, N);
    auto dd = static_cast<std::int64_t>(d);

    std::uint64_t count = chunked_reduce<std::uint64_t>(
        N, 65536, std::uint64_t(0),
        [&](std::size_t lo, std::size_t hi) {
            std::uint64_t c = 0;
            for (std::size_t j = lo; j < hi; ++j)
                if (floors[j] % dd == 0) ++c;
            return c;
        },
        [](std::uint64_t& acc, std::uint64_t&& c) { acc += c; });

    Rat frac = make_rat(Int(static_cast<unsigned long>(count)),
                        Int(static_cast<unsigned long>(N)));
    Rat dev = frac - make_rat(1, Int(static_cast<unsigned long>(d)));
    if (dev < 0) dev = -dev;
    return {frac, frac.get_d(), dev.get_d(), count};
}

namespace {

// maximize f over [a, b] by golden section; f evaluations are cheap, so the
// iteration count is chosen for ~1e-12 bracket width
template <typename F>
double golden_max(F&& f, double a, double b) {
    constexpr double inv_phi = 0.6180339887498949;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 120; ++it) {
        if (fc < fd) {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        } else {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        }
    }
    return std::max(fc, fd);
}

} // namespace

double recentring_distance(double mu, double sigma) {
    if (!(sigma > 0)) throw validation_error("scale must be positive");
    auto gap = [&](double x) {
        return std::abs(stats::gaussian_cdf(x) - stats::gaussian_cdf((x - mu) / sigma));
    };

    // critical points of Phi(x) - Phi((x-mu)/sigma):
    // (1 - sigma^2) x^2 - 2 mu x + mu^2 + 2 sigma^2 log(sigma) = 0
    std::vector<double> candidates;
    double a = 1 - sigma * sigma;
    if (std::abs(a) < 1e-14) {
        candidates.push_back(mu / 2);
    } else {
        double b = -2 * mu;
        double c = mu * mu + 2 * sigma * sigma * std::log(sigma);
        double disc = b * b - 4 * a * c;
        if (disc < 0) disc = 0; // analytically nonnegative; clamp rounding
        double root = std::sqrt(disc);
        candidates.push_back((-b + root) / (2 * a));
        candidates.push_back((-b - root) / (2 * a));
    }

    double best = 0;
    for (double x : candidates) {
        best = std::max(best, gap(x));
        best = std::max(best, golden_max(gap, x - 1, x + 1));
    }
    return best;
}

} // namespace eklab::kubilius
