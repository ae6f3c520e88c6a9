#pragma once

// Independent oracles for the test suite.  Everything here is deliberately
// naive: trial division, exhaustive recursion, dyadic enclosures built from
// integer square roots, and brute-force searches.  None of it shares code
// with the library paths under test beyond the Int/Rat typedefs.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "eklab/rat.hpp"

namespace oracle {

using eklab::Int;
using eklab::Rat;

// --------------------------------------------------------------------------
// Trial-division arithmetic

struct OmegaPair {
    unsigned omega = 0;
    unsigned big_omega = 0;
};

inline OmegaPair trial_omega(std::uint64_t n) {
    OmegaPair r;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        ++r.omega;
        while (n % p == 0) {
            n /= p;
            ++r.big_omega;
        }
    }
    if (n > 1) {
        ++r.omega;
        ++r.big_omega;
    }
    return r;
}

inline bool trial_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p = 2; p * p <= n; ++p)
        if (n % p == 0) return false;
    return true;
}

// Number of primes from `ps` dividing n.
inline unsigned restricted_omega(std::uint64_t n, const std::vector<std::uint64_t>& ps) {
    unsigned c = 0;
    for (std::uint64_t p : ps)
        if (p <= n && n % p == 0) ++c;
    return c;
}

// --------------------------------------------------------------------------
// Dyadic square-root enclosures: sqrt(D) lies in [t, t+1] / 2^256 with
// t = isqrt(D * 2^512).  Exact integer arithmetic throughout.

struct Enclosure {
    Rat lo, hi;
};

inline Enclosure sqrt_enclosure(const Int& d) {
    if (d < 0) throw std::invalid_argument("sqrt of a negative");
    Int scaled = d;
    mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), 512);
    Int t;
    mpz_sqrt(t.get_mpz_t(), scaled.get_mpz_t());
    Int den(1);
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), 256);
    Rat lo(t, den), hi(t + 1, den);
    lo.canonicalize();
    hi.canonicalize();
    return {lo, hi};
}

// Enclosure of r0 + r1 * sqrt(d) (r1 of either sign).
inline Enclosure quadratic_enclosure(const Rat& r0, const Rat& r1, const Int& d) {
    const Enclosure s = sqrt_enclosure(d);
    if (r1 >= 0) return {r0 + r1 * s.lo, r0 + r1 * s.hi};
    return {r0 + r1 * s.hi, r0 + r1 * s.lo};
}

struct FloorWitness {
    Int value;
    bool certain = false;
};

// floor over an enclosure: certain only when both endpoints agree.
inline FloorWitness enclosure_floor(const Enclosure& e) {
    const Int flo = eklab::rat_floor(e.lo);
    const Int fhi = eklab::rat_floor(e.hi);
    return {flo, flo == fhi};
}

// floor(r0 + r1 sqrt(d)); certain=false when the 256-bit window straddles
// an integer (callers treat that as "oracle abstains").
inline FloorWitness floor_quadratic(const Rat& r0, const Rat& r1, const Int& d) {
    return enclosure_floor(quadratic_enclosure(r0, r1, d));
}

// --------------------------------------------------------------------------
// Gaussian CDF by composite Simpson integration of the density from 0 to x.
// Good to ~1e-13 for |x| <= 8; callers stay inside that range.

inline double phi_quadrature(double x) {
    const bool neg = x < 0;
    const double b = neg ? -x : x;
    if (b > 8.5) return neg ? 0.0 : 1.0; // tail < 1e-16, outside oracle range
    const int n = 4000; // even; Simpson error ~ (b/180) h^4 max|dens''''| < 1e-12
    const double h = b / n;
    auto dens = [](double t) { return std::exp(-0.5 * t * t); };
    double acc = dens(0.0) + dens(b);
    for (int i = 1; i < n; ++i) acc += dens(h * i) * (i % 2 ? 4.0 : 2.0);
    const double integral = acc * h / 3.0 / std::sqrt(8.0 * std::atan(1.0));
    const double v = 0.5 + integral;
    return neg ? 1.0 - v : v;
}

// Inverse CDF by bisection on the quadrature oracle, |result| < 8.
inline double phi_inverse_quadrature(double p) {
    double lo = -8.0, hi = 8.0;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (phi_quadrature(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// --------------------------------------------------------------------------
// Gaussian mixed moments by exhaustive pair-matching enumeration: the moment
// E prod z_i^{ell_i} of independent standard normals counts, per coordinate,
// the perfect matchings of ell_i labeled slots.

inline Int matchings(unsigned m) {
    if (m % 2) return 0;
    if (m == 0) return 1;
    // match slot 0 with each of the other m-1 slots, recurse on the rest
    std::vector<char> used(m, 0);
    std::function<Int(unsigned)> rec = [&](unsigned done) -> Int {
        if (done == m) return 1;
        unsigned first = 0;
        while (used[first]) ++first;
        used[first] = 1;
        Int total = 0;
        for (unsigned j = first + 1; j < m; ++j) {
            if (used[j]) continue;
            used[j] = 1;
            total += rec(done + 2);
            used[j] = 0;
        }
        used[first] = 0;
        return total;
    };
    return rec(0);
}

inline Rat gaussian_moment_by_matchings(const std::vector<unsigned>& ell) {
    Rat prod(1);
    for (unsigned e : ell) prod *= Rat(matchings(e));
    return prod;
}

// --------------------------------------------------------------------------
// Brute-force best rational approximation of height <= h.
// Tie rule mirrors the contract: smaller denominator, then smaller |num|.

inline bool better_tie(const Rat& cand, const Rat& best) {
    if (cand.get_den() != best.get_den()) return cand.get_den() < best.get_den();
    Int ca = abs(cand.get_num()), ba = abs(best.get_num());
    return ca < ba;
}

// Exact x: ties decided exactly.
inline Rat best_rational_brute(const Rat& x, long h) {
    bool have = false;
    Rat best, bestd;
    for (long q = 1; q <= h; ++q) {
        const Int qn = eklab::rat_floor(x * Rat(q));
        std::vector<Int> cands = {qn - 1, qn, qn + 1, Int(-h), Int(h)};
        for (const Int& p : cands) {
            if (abs(p) > h) continue;
            Rat cand = eklab::make_rat(p, Int(q));
            if (eklab::rat_height(cand) > h) continue;
            Rat d = abs(x - cand);
            if (!have || d < bestd || (d == bestd && better_tie(cand, best))) {
                best = cand;
                bestd = d;
                have = true;
            }
        }
    }
    return best;
}

// Irrational x given by an enclosure; distance comparisons are decided by
// interval separation and ties are impossible for irrational x.  Throws when
// the enclosure is too wide to decide (test inputs keep it narrow).
inline Rat best_rational_brute_enclosed(const Enclosure& e, long h) {
    bool have = false;
    Rat best;
    Rat bestlo, besthi; // enclosure of |x - best|
    auto dist = [&](const Rat& r, Rat& lo, Rat& hi) {
        // |[a,b] - r|
        const Rat a = e.lo - r, b = e.hi - r;
        if (a >= 0) {
            lo = a;
            hi = b;
        } else if (b <= 0) {
            lo = -b;
            hi = -a;
        } else {
            lo = 0;
            hi = (b > -a ? b : -a);
        }
    };
    for (long q = 1; q <= h; ++q) {
        const Int qn = eklab::rat_floor(e.lo * Rat(q));
        std::vector<Int> cands = {qn - 1, qn, qn + 1, qn + 2, Int(-h), Int(h)};
        for (const Int& p : cands) {
            if (abs(p) > h) continue;
            Rat cand = eklab::make_rat(p, Int(q));
            if (eklab::rat_height(cand) > h) continue;
            Rat lo, hi;
            dist(cand, lo, hi);
            if (!have) {
                best = cand;
                bestlo = lo;
                besthi = hi;
                have = true;
                continue;
            }
            if (hi < bestlo) { // strictly closer
                best = cand;
                bestlo = lo;
                besthi = hi;
            } else if (!(lo > besthi)) {
                // overlapping distance intervals: either the same rational, or
                // the enclosure cannot separate the candidates
                if (cand != best) throw std::runtime_error("oracle enclosure too wide");
            }
        }
    }
    return best;
}

// --------------------------------------------------------------------------
// Naive near-relation search (k <= 3): coefficients over the height-bounded
// grid with denominators from `support` (1 always admits integers), the
// integer offset m solved from an enclosure of the linear combination.
// The alphas are given as enclosures; exact inputs use point enclosures.

struct NaiveRelation {
    std::vector<Rat> coeff;
    Int m;
};

inline std::vector<Rat> coefficient_grid(long h, const std::vector<std::uint64_t>& support) {
    std::vector<Rat> grid;
    for (long a = -h; a <= h; ++a) grid.push_back(Rat(a));
    for (std::uint64_t b : support) {
        if (b == 1) continue;
        for (long a = -h; a <= h; ++a) {
            if (a % static_cast<long>(b) == 0) continue; // reduces to an integer
            Rat r = eklab::make_rat(Int(a), Int(static_cast<unsigned long>(b)));
            if (eklab::rat_height(r) <= h) grid.push_back(r);
        }
    }
    return grid;
}

inline std::vector<NaiveRelation> naive_relations(const std::vector<Enclosure>& alphas, long h,
                                                  const Rat& tol,
                                                  const std::vector<std::uint64_t>& support) {
    const std::vector<Rat> grid = coefficient_grid(h, support);
    std::vector<NaiveRelation> out;
    std::vector<std::size_t> pick(alphas.size(), 0);
    while (true) {
        Rat lo(0), hi(0);
        std::vector<Rat> coeff(alphas.size());
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            const Rat& c = grid[pick[i]];
            coeff[i] = c;
            if (c >= 0) {
                lo += c * alphas[i].lo;
                hi += c * alphas[i].hi;
            } else {
                lo += c * alphas[i].hi;
                hi += c * alphas[i].lo;
            }
        }
        // |sum + m| <= tol for integer m: scan the window around -sum
        const Int mlo = eklab::rat_floor(-hi - tol);
        const Int mhi = eklab::rat_floor(-lo + tol) + 1;
        for (Int m = mlo; m <= mhi; ++m) {
            const Rat a = lo + Rat(m), b = hi + Rat(m); // value + m enclosure
            const Rat mag_hi = (abs(a) > abs(b)) ? abs(a) : abs(b);
            Rat mag_lo;
            if (a >= 0)
                mag_lo = a;
            else if (b <= 0)
                mag_lo = -b;
            else
                mag_lo = 0;
            if (mag_hi <= tol)
                out.push_back({coeff, m});
            else if (!(mag_lo > tol))
                throw std::runtime_error("oracle enclosure cannot decide a relation");
        }
        std::size_t i = 0;
        for (; i < pick.size(); ++i) {
            if (++pick[i] < grid.size()) break;
            pick[i] = 0;
        }
        if (i == pick.size()) break;
    }
    return out;
}

// --------------------------------------------------------------------------
// Matrix rank by fraction-free Bareiss elimination on integers (denominators
// cleared row-wise first) -- structurally unlike the library's rational RREF.

inline std::size_t rank_bareiss(std::vector<std::vector<Rat>> rows) {
    if (rows.empty()) return 0;
    const std::size_t m = rows.size(), n = rows[0].size();
    std::vector<std::vector<Int>> a(m, std::vector<Int>(n));
    for (std::size_t i = 0; i < m; ++i) {
        Int l(1);
        for (std::size_t j = 0; j < n; ++j) {
            Int g;
            mpz_lcm(g.get_mpz_t(), l.get_mpz_t(), rows[i][j].get_den_mpz_t());
            l = g;
        }
        for (std::size_t j = 0; j < n; ++j) {
            Rat v = rows[i][j] * Rat(l);
            a[i][j] = eklab::rat_num(v); // denominator is 1 by construction
        }
    }
    std::size_t rank = 0;
    Int prev(1);
    for (std::size_t col = 0; col < n && rank < m; ++col) {
        std::size_t piv = rank;
        while (piv < m && a[piv][col] == 0) ++piv;
        if (piv == m) continue;
        std::swap(a[piv], a[rank]);
        for (std::size_t i = rank + 1; i < m; ++i) {
            for (std::size_t j = col + 1; j < n; ++j) {
                Int t = a[rank][col] * a[i][j] - a[i][col] * a[rank][j];
                mpz_divexact(a[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            a[i][col] = 0;
        }
        prev = a[rank][col];
        ++rank;
    }
    return rank;
}

} // namespace oracle
