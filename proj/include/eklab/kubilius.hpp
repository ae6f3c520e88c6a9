#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "eklab/rat.hpp"
#include "eklab/reals.hpp"

namespace eklab::kubilius {

// The independent model: omega''' = sum over the prime set of X_p with
// X_p ~ Ber(1/p), all independent.  s = sum 1/p is its mean and variance
// up to the second-order 1/p^2 correction.
struct KubiliusModel {
    std::vector<std::uint64_t> primes; // ascending, distinct
    double s = 0;                      // sum of 1/p
    std::uint64_t seed = 0;

    static KubiliusModel make(std::vector<std::uint64_t> primes, std::uint64_t seed);
};

// Model primes for a Beatty slope at scale N: primes up to the schedule's
// R = N^(1/log log N), minus p <= log N and the primes of the height-N^(1/8)
// rational approximation of alpha.
KubiliusModel model_for_slope(const reals::CertifiedReal& alpha, std::uint64_t N,
                              std::uint64_t seed);

// count independent draws of omega'''.  The generator is counter-based and
// keyed by (seed, draw, prime index), so output is reproducible and
// independent of thread scheduling.
std::vector<std::uint64_t> sample_model(const KubiliusModel& model, std::uint64_t count);

// E e(t omega''') = prod_p (1 + (e(t)-1)/p), exact finite product.
// e(x) = exp(2 pi i x), so the function has period 1 in t.
std::complex<double> char_exact(const KubiliusModel& model, double t);

// E e(t (omega''' - s)/sqrt(s)): the standardized form, the phase e(-t
// sqrt(s)) times char_exact(t/sqrt(s)).
std::complex<double> char_standardized(const KubiliusModel& model, double t);

struct CharRow {
    double t;
    std::complex<double> exact;
    std::complex<double> empirical;
    double diff; // |exact - empirical|
};

// Per-t exact product vs the empirical average of e(t * value) over any
// integer sample (model draws, or truncated-omega values of a Beatty
// sequence).
std::vector<CharRow> char_compare(const KubiliusModel& model,
                                  std::span<const std::uint64_t> empirical,
                                  std::span<const double> t_grid);

// Smoothing-inequality constants, exposed rather than hard-wired.  The
// defaults (1/pi on the integral, 24/pi on the edge term) keep the bound
// valid in the e(tx) convention used here: the classical edge constant
// shrinks by 2 pi under the substitution, so 24/pi is conservative.
struct EsseenConfig {
    double integral_prefactor = 0.31830988618379067; // 1/pi
    double edge_coefficient = 7.6394372684109766;    // 24/pi
};

// Upper bound on d_K(X, N(0,1)) from characteristic values of the
// standardized X sampled on [-A, A]: integral_prefactor * int |phi(t) -
// exp(-2 pi^2 t^2)| / |t| dt + edge_coefficient * density_sup / A.
// Spacing coarser than A/512 is rejected.
double esseen_bound(std::span<const std::pair<double, std::complex<double>>> char_values,
                    double A, double density_sup, const EsseenConfig& cfg = {});

// E binom(omega''', ell) = e_ell(1/p_1, ..., 1/p_m), the elementary
// symmetric function, exact.
Rat binomial_moment_model(const KubiliusModel& model, unsigned ell);
// Subset-enumeration oracle; refuses more than 20 primes.
Rat binomial_moment_brute(const KubiliusModel& model, unsigned ell);
// Average of binom(value, ell) over an integer sample.
double binomial_moment_sample(std::span<const std::uint64_t> sample, unsigned ell);

struct DivisibilityReport {
    Rat fraction;       // exact count / N
    double empirical;   // the same, as a double
    double deviation;   // |fraction - 1/d|
    std::uint64_t count;
};

// Fraction of n in [1, N] with d | floor(alpha n + beta).
DivisibilityReport divisibility_density(std::uint64_t d, const reals::BeattySpec& spec,
                                        std::uint64_t N);

// sup_x |Phi(x) - Phi((x - mu)/sigma)| = d_K(N(0,1), N(mu, sigma^2)),
// located at the analytic critical points and polished by golden section.
double recentring_distance(double mu, double sigma);

} // namespace eklab::kubilius
