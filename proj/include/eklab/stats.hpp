#pragma once

#include <cstdint>
#include <vector>

#include "eklab/rat.hpp"
#include "eklab/reals.hpp"

namespace eklab::stats {

// A sample of k-vectors already shifted by `center` and divided by `scale`.
struct StandardizedSample {
    std::size_t k = 0;
    std::vector<std::vector<double>> values;
    std::uint64_t N = 0;
    std::vector<double> center;  // per-coordinate affine map actually applied
    std::vector<double> scale;
};

// Standardize each coordinate by its sample mean and population standard
// deviation.  Requires N >= 16 and a nonzero spread in every coordinate.
StandardizedSample standardize(const std::vector<std::vector<double>>& raw, std::uint64_t N);

struct MomentIndex {
    std::vector<unsigned> ell;
    unsigned max_total = 12;

    unsigned total() const;
};
void validate_index(const MomentIndex& idx);

// Kolmogorov distance of a scalar sample against the standard normal:
// max over the sorted points of the two one-sided jumps.  Exact up to the
// accuracy of the Phi evaluation.
double empirical_dK(const StandardizedSample& sample);

// Sup over a grid^k lattice of corners in [-4,4]^k of
// |F_emp(x) - prod_i Phi(x_i)|, lower-left orthants.  A certified lower
// bound on the orthant sup (the true sup may exceed it between corners).
double multivariate_dK(const StandardizedSample& sample, std::uint64_t grid);

// Phi(x), absolute error well under 1e-12.
double gaussian_cdf(double x);

// prod_i ell_i! / (2^(ell_i/2) (ell_i/2)!), i.e. prod (ell_i - 1)!!;
// zero when any ell_i is odd.
Rat gaussian_mixed_moment(const MomentIndex& idx);

// Average of prod_i v_i^(ell_i) over the sample, compensated summation.
// Magnitudes above 1e3 are rejected rather than silently overflowed.
double mixed_moment_empirical(const StandardizedSample& sample, const MomentIndex& idx);

struct CoprimalityResult {
    double rate;            // coprime count / N
    std::uint64_t coprime;
    std::uint64_t excluded; // n with floor(alpha n) = 0, left out of the count
};

// Fraction of n in [1, N] with gcd(n, floor(alpha n)) = 1.
CoprimalityResult coprimality_rate(const reals::CertifiedReal& alpha, std::uint64_t N);

} // namespace eklab::stats
