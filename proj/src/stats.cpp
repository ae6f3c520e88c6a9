#include "eklab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eklab/errors.hpp"
#include "eklab/parallel.hpp"

namespace eklab::stats {

StandardizedSample standardize(const std::vector<std::vector<double>>& raw, std::uint64_t N) {
    if (raw.empty()) throw validation_error("cannot standardize an empty sample");
    if (N < 16) throw validation_error("standardization needs N >= 16");
    StandardizedSample s;
    s.k = raw[0].size();
    s.N = N;
    const double n = static_cast<double>(raw.size());
    s.center.assign(s.k, 0.0);
    s.scale.assign(s.k, 0.0);
    for (const auto& v : raw) {
        if (v.size() != s.k) throw validation_error("ragged sample rows");
        for (std::size_t i = 0; i < s.k; ++i) s.center[i] += v[i];
    }
    for (std::size_t i = 0; i < s.k; ++i) s.center[i] /= n;
    for (const auto& v : raw)
        for (std::size_t i = 0; i < s.k; ++i) {
            const double d = v[i] - s.center[i];
            s.scale[i] += d * d;
        }
    for (std::size_t i = 0; i < s.k; ++i) {
        s.scale[i] = std::sqrt(s.scale[i] / n);
        if (!(s.scale[i] > 0))
            throw validation_error("coordinate " + std::to_string(i + 1) +
                                   " of the sample is constant; cannot standardize");
    }
    s.values.reserve(raw.size());
    for (const auto& v : raw) {
        std::vector<double> row(s.k);
        for (std::size_t i = 0; i < s.k; ++i) row[i] = (v[i] - s.center[i]) / s.scale[i];
        s.values.push_back(std::move(row));
    }
    return s;
}

unsigned MomentIndex::total() const {
    unsigned t = 0;
    for (unsigned e : ell) t += e;
    return t;
}

void validate_index(const MomentIndex& idx) {
    if (idx.total() > idx.max_total)
        throw validation_error("moment order " + std::to_string(idx.total()) +
                               " exceeds the configured maximum " + std::to_string(idx.max_total));
}

double gaussian_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double empirical_dK(const StandardizedSample& sample) {
    if (sample.values.empty()) throw validation_error("Kolmogorov distance of an empty sample");
    if (sample.k != 1) throw validation_error("scalar Kolmogorov distance needs k = 1");
    std::vector<double> xs;
    xs.reserve(sample.values.size());
    for (const auto& v : sample.values) xs.push_back(v[0]);
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double phi = gaussian_cdf(xs[i]);
        double above = static_cast<double>(i + 1) / n - phi; // F_emp jumps to (i+1)/n at x_i
        double below = phi - static_cast<double>(i) / n;     // and comes from i/n
        d = std::max(d, std::max(above, below));
    }
    return d;
}

double multivariate_dK(const StandardizedSample& sample, std::uint64_t grid) {
    if (sample.values.empty()) throw validation_error("Kolmogorov distance of an empty sample");
    if (sample.k < 1) throw validation_error("sample has no coordinates");
    if (grid < 8) throw validation_error("lattice needs grid >= 8");

    const std::size_t k = sample.k;
    const std::uint64_t cells = grid + 1; // extra slot for points beyond the last corner
    double log_total = static_cast<double>(k) * std::log2(static_cast<double>(cells));
    if (log_total > 24)
        throw budget_error("orthant lattice of " + std::to_string(grid) + "^" +
                           std::to_string(k) + " corners exceeds budget");
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < k; ++i) total *= cells;

    std::vector<double> corner(grid);
    for (std::uint64_t j = 0; j < grid; ++j)
        corner[j] = -4.0 + 8.0 * static_cast<double>(j) / static_cast<double>(grid - 1);
    std::vector<double> phi(grid);
    for (std::uint64_t j = 0; j < grid; ++j) phi[j] = gaussian_cdf(corner[j]);

    // histogram over the cell index (smallest corner dominating each point)
    std::vector<std::uint64_t> hist(total, 0);
    for (const auto& v : sample.values) {
        std::uint64_t lin = 0;
        for (std::size_t i = 0; i < k; ++i) {
            auto it = std::lower_bound(corner.begin(), corner.end(), v[i]);
            lin = lin * cells + static_cast<std::uint64_t>(it - corner.begin());
        }
        ++hist[lin];
    }

    // cumulative counts along every axis; ascending scan keeps sources final
    std::uint64_t stride = 1;
    for (std::size_t axis = k; axis-- > 0;) {
        for (std::uint64_t lin = 0; lin < total; ++lin) {
            std::uint64_t digit = (lin / stride) % cells;
            if (digit > 0) hist[lin] += hist[lin - stride];
        }
        stride *= cells;
    }

    const double n = static_cast<double>(sample.values.size());
    double d = 0;
    std::vector<std::uint64_t> digits(k, 0);
    while (true) {
        std::uint64_t lin = 0;
        double prod = 1;
        for (std::size_t i = 0; i < k; ++i) {
            lin = lin * cells + digits[i];
            prod *= phi[digits[i]];
        }
        d = std::max(d, std::abs(static_cast<double>(hist[lin]) / n - prod));
        std::size_t axis = k;
        while (axis-- > 0) {
            if (++digits[axis] < grid) break;
            digits[axis] = 0;
            if (axis == 0) return d;
        }
    }
}

Rat gaussian_mixed_moment(const MomentIndex& idx) {
    validate_index(idx);
    Rat prod = 1;
    for (unsigned e : idx.ell) {
        if (e % 2 != 0) return Rat(0);
        Int num, den_fac;
        mpz_fac_ui(num.get_mpz_t(), e);
        mpz_fac_ui(den_fac.get_mpz_t(), e / 2);
        Int den;
        mpz_ui_pow_ui(den.get_mpz_t(), 2, e / 2);
        prod *= make_rat(num, den * den_fac);
    }
    return prod;
}

double mixed_moment_empirical(const StandardizedSample& sample, const MomentIndex& idx) {
    if (sample.values.empty()) throw validation_error("moment of an empty sample");
    if (idx.ell.size() != sample.k)
        throw validation_error("moment index length does not match sample coordinates");
    validate_index(idx);

    std::vector<double> terms(sample.values.size());
    for (std::size_t j = 0; j < sample.values.size(); ++j) {
        double prod = 1;
        for (std::size_t i = 0; i < sample.k; ++i) {
            double v = sample.values[j][i];
            if (std::abs(v) > 1e3)
                throw validation_error("sample magnitude exceeds 1e3, refusing the moment");
            for (unsigned e = 0; e < idx.ell[i]; ++e) prod *= v;
        }
        terms[j] = prod;
    }
    return compensated_sum(terms) / static_cast<double>(terms.size());
}

CoprimalityResult coprimality_rate(const reals::CertifiedReal& alpha, std::uint64_t N) {
    if (N < 1) throw validation_error("coprimality rate needs N >= 1");
    reals::BeattySpec spec(alpha, reals::CertifiedReal::rational(Rat(0)));
    std::vector<std::int64_t> floors = reals::beatty_floor_range(spec, 1, N);

    using Counts = std::pair<std::uint64_t, std::uint64_t>; // (coprime, excluded)
    Counts total = chunked_reduce<Counts>(
        N, 65536, Counts{0, 0},
        [&](std::size_t lo, std::size_t hi) {
            Counts c{0, 0};
            for (std::size_t j = lo; j < hi; ++j) {
                auto f = static_cast<std::uint64_t>(floors[j]);
                if (f == 0) {
                    ++c.second;
                } else if (std::gcd(j + 1, f) == 1) {
                    ++c.first;
                }
            }
            return c;
        },
        [](Counts& acc, Counts&& c) {
            acc.first += c.first;
            acc.second += c.second;
        });

    return {static_cast<double>(total.first) / static_cast<double>(N), total.first, total.second};
}

} // namespace eklab::stats
