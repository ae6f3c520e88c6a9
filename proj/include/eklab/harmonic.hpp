#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "eklab/qlinalg.hpp"
#include "eklab/rat.hpp"
#include "eklab/reals.hpp"

namespace eklab::harmonic {

// ---------------------------------------------------------------------------
// Windows and transforms.  Fourier convention: f^(y) = integral f(x)e(-xy)dx
// with e(x) = exp(2*pi*i*x).

enum class WindowKind { tent, plus, minus };

// tent(x) = max(0, 2-|x|); plus ramps 0->1 on [0,eps], plateau to 1, 1->0 on
// [1,1+eps]; minus is the same trapezoid shifted to ramp on [-eps,0] and
// [1-eps,1].  epsilon must lie in (0, 1/2] for plus/minus (ignored for tent).
double window_eval(WindowKind kind, double x, double epsilon = 0);

// tent^(y) = 4 sinc^2(2 pi y) (real, >= 0, value 4 at 0);
// plus^(y)  = e^(-pi i (1+eps) y) sinc(pi y) sinc(pi eps y);
// minus^(y) = e^(-pi i (1-eps) y) sinc(pi y) sinc(pi eps y).
// plus/minus vanish on the nonzero integers and equal 1 at 0.
std::complex<double> window_fourier(WindowKind kind, double y, double epsilon = 0);

// ---------------------------------------------------------------------------
// Dirichlet kernels

// N^-1 sum_{n=1..N} e(nx); exactly 1 at integer x.
std::complex<double> dirichlet_theta(double x, std::uint64_t N);

// N^-1/2 sum_{n=first..last} e(nx); (last-first+1) * N^-1/2 at integer x.
std::complex<double> dirichlet_theta_over(double x, std::uint64_t N, std::uint64_t first,
                                          std::uint64_t last);

// The sqrt-partition of [1, N]: width floor(sqrt(N)), the last interval
// absorbing the remainder.
struct IndexInterval {
    std::uint64_t first, last;
    std::uint64_t size() const { return last - first + 1; }
};
std::uint64_t subinterval_count(std::uint64_t N);
IndexInterval subinterval_bounds(std::uint64_t N, std::uint64_t u);

// theta over S_u of the sqrt-partition.
std::complex<double> dirichlet_theta_sub(double x, std::uint64_t N, std::uint64_t u);

// ---------------------------------------------------------------------------
// Periodised Gaussian, both evaluation sides certified to tail <= 1e-12

struct GaussianSides {
    double space, freq;
    double space_tail, freq_tail;
};
GaussianSides periodised_gaussian_sides(double x, double epsilon, int tail_terms);

// Space-side value sum_{|m|<=tail_terms} exp(-(x-m)^2/(2 eps^2)); throws a
// precision_error when either side's certified tail exceeds 1e-12, and checks
// the two sides agree to 1e-10.
double periodised_gaussian(double x, double epsilon, int tail_terms);

// ---------------------------------------------------------------------------
// Prime tuples

// entries[i] holds the primes p_i1..p_il_i attached to coordinate i.
struct PrimeTuple {
    std::vector<std::vector<std::uint64_t>> entries;

    std::size_t coords() const { return entries.size(); }
    std::size_t total() const;
    std::vector<std::uint64_t> flat() const;
};

void validate_tuple(const PrimeTuple& t);

// A: primes pair up exactly, each pair within one coordinate; B: pair up but
// some pair spans two coordinates; C: some prime occurs exactly once; D: rest.
enum class TupleType { A, B, C, D };
TupleType classify_tuple(const PrimeTuple& t);

// ---------------------------------------------------------------------------
// Interval goodness

enum class Goodness { plus_good, minus_good, bad };

struct GoodnessReport {
    IndexInterval interval;
    std::vector<Goodness> verdict;  // per coordinate i
    std::vector<Rat> frac_plus;     // exact fraction of {alpha n + beta} in [0, eps)
    std::vector<Rat> frac_minus;    // exact fraction in (1-eps, 1)
};

// Exact hit fractions over S_u compared against eps^(1/4) (compared as
// fraction^4 <= eps, keeping everything rational).  plus-goodness wins when
// both hold.
GoodnessReport interval_goodness(const std::vector<reals::BeattySpec>& specs, std::uint64_t u,
                                 std::uint64_t N, const Rat& epsilon);

// ---------------------------------------------------------------------------
// The E-family

// Exact average over the range of prod_ij (1_{p_ij | floor(alpha_i n + beta_i)} - 1/p_ij).
Rat E_direct(const PrimeTuple& t, const std::vector<reals::BeattySpec>& specs, std::uint64_t N);
Rat E_direct_sub(const PrimeTuple& t, const std::vector<reals::BeattySpec>& specs,
                 std::uint64_t N, std::uint64_t u);
// Same average computed from precomputed floor tables (floors[i][j] is the
// floor at the j-th point of the range for coordinate i).
Rat E_direct_from_floors(const PrimeTuple& t,
                         const std::vector<std::vector<std::int64_t>>& floors);

enum class RestrictedVariant {
    prime_bd,  // m_ij over p_ij^-1 Z, tent weights phi(m)/p
    triple_ac, // m_ij over p_ij^-1 Z \ Z, weights |phi_pm(m)|/p
};

struct RestrictedSum {
    double value;
    double tail_bound; // truncation tail from the coordinate decay estimates
};

// Truncated restricted sum over |m_ij| <= J with the integer-relation
// constraint sum_ij gamma_i m_ij in Z decided exactly.  epsilon (for the
// triple_ac weights) defaults to 1/ceil(sqrt(J)) when passed as 0.
RestrictedSum E_restricted_sum(const PrimeTuple& t, const qlinalg::GammaVector& gamma,
                               std::uint64_t J, RestrictedVariant variant,
                               const Rat& epsilon = Rat(0));

// prod over the distinct primes of a type-A tuple of (1/p - 1/p^2).
Rat type_A_prediction(const PrimeTuple& t);

// ---------------------------------------------------------------------------
// Parameter schedule

struct Schedule {
    std::uint64_t N;
    std::uint64_t L;       // ceil(log log N)
    std::uint64_t J;       // max(64, ceil(N^(1/25)))
    std::uint64_t R;       // ceil(N^(1/log log N))
    std::uint64_t T;       // ceil(J^(1/8))
    Rat epsilon;           // 1/ceil(sqrt(J)), the rational realization of J^(-1/2)
    std::uint64_t width;   // floor(sqrt(N))
    std::uint64_t intervals;

    static Schedule defaults(std::uint64_t N);
};

} // namespace eklab::harmonic
