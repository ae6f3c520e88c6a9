#include "eklab/qlinalg.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "eklab/arith.hpp"
#include "eklab/errors.hpp"

namespace eklab::qlinalg {

using reals::CertifiedReal;
using reals::SurdSum;

RationalMatrix::RationalMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), a_(rows * cols, Rat(0)) {
    if (rows == 0 || cols == 0) throw validation_error("matrix dimensions must be positive");
}

RationalMatrix RationalMatrix::from_rows(const std::vector<std::vector<Rat>>& rows) {
    if (rows.empty() || rows[0].empty()) throw validation_error("matrix dimensions must be positive");
    RationalMatrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols_) throw validation_error("ragged matrix rows");
        for (std::size_t j = 0; j < m.cols_; ++j) m.at(i, j) = rows[i][j];
    }
    return m;
}

namespace {

// scale to integer entries, gcd 1, leading entry positive
void normalize_vector(std::vector<Rat>& v) {
    Int den = 1;
    for (const Rat& x : v) den = lcm(den, x.get_den());
    Int num = 0;
    for (Rat& x : v) {
        x *= Rat(den);
        num = gcd(num, x.get_num());
    }
    if (num == 0) return;
    for (Rat& x : v) x /= Rat(num);
    for (const Rat& x : v) {
        if (x == 0) continue;
        if (x < 0) {
            for (Rat& y : v) y = -y;
        }
        break;
    }
}

// Gauss-Jordan; returns pivot columns, A becomes reduced row echelon
std::vector<std::size_t> row_reduce(std::vector<std::vector<Rat>>& A) {
    if (A.empty()) return {};
    std::size_t r = A.size(), c = A[0].size();
    std::vector<std::size_t> pivots;
    std::size_t prow = 0;
    for (std::size_t col = 0; col < c && prow < r; ++col) {
        std::size_t sel = prow;
        while (sel < r && A[sel][col] == 0) ++sel;
        if (sel == r) continue;
        std::swap(A[sel], A[prow]);
        Rat inv = 1 / A[prow][col];
        for (std::size_t j = col; j < c; ++j) A[prow][j] *= inv;
        for (std::size_t i = 0; i < r; ++i) {
            if (i == prow || A[i][col] == 0) continue;
            Rat f = A[i][col];
            for (std::size_t j = col; j < c; ++j) A[i][j] -= f * A[prow][j];
        }
        pivots.push_back(col);
        ++prow;
    }
    return pivots;
}

// solve square A x = b exactly; singular -> validation_error(what)
std::vector<Rat> solve_linear(std::vector<std::vector<Rat>> A, std::vector<Rat> b,
                              const char* what) {
    std::size_t n = A.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t sel = col;
        while (sel < n && A[sel][col] == 0) ++sel;
        if (sel == n) throw validation_error(what);
        std::swap(A[sel], A[col]);
        std::swap(b[sel], b[col]);
        Rat inv = 1 / A[col][col];
        for (std::size_t j = col; j < n; ++j) A[col][j] *= inv;
        b[col] *= inv;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col || A[i][col] == 0) continue;
            Rat f = A[i][col];
            for (std::size_t j = col; j < n; ++j) A[i][j] -= f * A[col][j];
            b[i] -= f * b[col];
        }
    }
    return b;
}

} // namespace

std::vector<std::vector<Rat>> kernel_basis(const RationalMatrix& M) {
    std::size_t r = M.rows(), c = M.cols();
    std::vector<std::vector<Rat>> A(r, std::vector<Rat>(c));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) A[i][j] = M.at(i, j);
    std::vector<std::size_t> pivots = row_reduce(A);
    std::vector<bool> is_pivot(c, false);
    for (std::size_t p : pivots) is_pivot[p] = true;

    std::vector<std::vector<Rat>> basis;
    for (std::size_t f = 0; f < c; ++f) {
        if (is_pivot[f]) continue;
        std::vector<Rat> v(c, Rat(0));
        v[f] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -A[i][f];
        normalize_vector(v);
        basis.push_back(std::move(v));
    }
    return basis;
}

std::size_t matrix_rank(RationalMatrix M) {
    std::vector<std::vector<Rat>> A(M.rows(), std::vector<Rat>(M.cols()));
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t j = 0; j < M.cols(); ++j) A[i][j] = M.at(i, j);
    return row_reduce(A).size();
}

std::vector<std::vector<Rat>> dual_basis(const std::vector<std::vector<Rat>>& vectors) {
    if (vectors.empty()) throw validation_error("dual basis of empty set");
    std::size_t m = vectors.size(), n = vectors[0].size();
    for (const auto& v : vectors)
        if (v.size() != n) throw validation_error("dual basis input vectors differ in length");
    if (m > n)
        throw validation_error("dual basis requires linearly independent vectors (rank deficiency)");

    // Gram system: v'_i = sum_j (G^-1)_ij v_j reproduces delta pairings
    std::vector<std::vector<Rat>> G(m, std::vector<Rat>(m, Rat(0)));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t t = 0; t < n; ++t) G[i][j] += vectors[i][t] * vectors[j][t];

    std::vector<std::vector<Rat>> duals;
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<Rat> e(m, Rat(0));
        e[i] = 1;
        std::vector<Rat> c = solve_linear(
            G, std::move(e), "dual basis requires linearly independent vectors (rank deficiency)");
        std::vector<Rat> vi(n, Rat(0));
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t t = 0; t < n; ++t) vi[t] += c[j] * vectors[j][t];
        duals.push_back(std::move(vi));
    }
    return duals;
}

// ---------------------------------------------------------------------------
// Near relations

namespace {

struct SumParts {
    SurdSum exact;
    Rat ilo = 0, ihi = 0;

    SumParts plus(const CertifiedReal& alpha, const Rat& c) const {
        SumParts r = *this;
        if (c == 0) return r;
        if (alpha.exact()) {
            r.exact += alpha.surd() * c;
        } else {
            Rat lo = alpha.dec_lo() * c;
            Rat hi = (alpha.dec_lo() + alpha.dec_width()) * c;
            if (c < 0) std::swap(lo, hi);
            r.ilo += lo;
            r.ihi += hi;
        }
        return r;
    }
};

} // namespace

RelationSet find_near_relations(const std::vector<CertifiedReal>& alphas, const Int& height_bound,
                                const Rat& tolerance, const std::vector<std::uint64_t>& denom_support,
                                std::uint64_t candidate_budget) {
    std::size_t k = alphas.size();
    if (k == 0) throw validation_error("near-relation search needs at least one alpha");
    if (height_bound < 1) throw validation_error("height bound must be >= 1");
    if (height_bound > 10000000)
        throw budget_error("height bound " + height_bound.get_str() + " exceeds 10^7");
    if (tolerance < 0) throw validation_error("tolerance must be >= 0");
    for (std::uint64_t p : denom_support) {
        if (p == 1) continue;
        Int pz(static_cast<unsigned long>(p));
        if (p < 2 || mpz_probab_prime_p(pz.get_mpz_t(), 40) == 0)
            throw validation_error("denominator support must be 1 or prime, got " + std::to_string(p));
    }
    long J = static_cast<long>(to_i64(height_bound, "height bound"));

    // shared candidate grid: integers of height <= J plus a/p with p | support
    std::set<Rat> gridset;
    for (long t = -J; t <= J; ++t) gridset.insert(Rat(t));
    for (std::uint64_t p : denom_support) {
        if (p <= 1 || static_cast<long>(p) > J) continue;
        for (long a = -J; a <= J; ++a) {
            if (a % static_cast<long>(p) == 0) continue;
            gridset.insert(make_rat(Int(a), Int(static_cast<unsigned long>(p))));
        }
    }
    std::vector<Rat> grid(gridset.begin(), gridset.end());

    Int total = 1;
    for (std::size_t i = 0; i < k; ++i) total *= static_cast<unsigned long>(grid.size());
    if (total > Int(static_cast<unsigned long>(candidate_budget))) {
        throw budget_error("near-relation search space of " + total.get_str() +
                           " tuples exceeds budget " + std::to_string(candidate_budget));
    }

    RelationSet out;
    out.k = static_cast<int>(k);
    out.height_bound = height_bound;
    out.tolerance = tolerance;

    SurdSum tol_s{tolerance};
    std::vector<std::size_t> idx(k, 0);
    std::vector<SumParts> pref(k + 1);
    for (std::size_t i = 0; i < k; ++i) pref[i + 1] = pref[i].plus(alphas[i], grid[0]);

    for (;;) {
        // m candidates from |x + m| <= tol with x in [A, B]
        SurdSum A = pref[k].exact + SurdSum(pref[k].ilo);
        SurdSum B = pref[k].exact + SurdSum(pref[k].ihi);
        Int m_pos_lo = -((B + tol_s).floor());
        Int m_pos_hi = (tol_s - A).floor();
        Int m_cert_lo = -((A + tol_s).floor());
        Int m_cert_hi = (tol_s - B).floor();
        for (Int m = m_pos_lo; m <= m_pos_hi; ++m) {
            if (m >= m_cert_lo && m <= m_cert_hi) {
                Relation rel;
                rel.coeff.reserve(k);
                for (std::size_t i = 0; i < k; ++i) rel.coeff.push_back(grid[idx[i]]);
                rel.m = m;
                out.tuples.push_back(std::move(rel));
            } else {
                throw precision_error(
                    "decimal digits cannot certify candidate relation with integer part " +
                    m.get_str());
            }
        }
        // odometer: last coordinate fastest
        std::size_t pos = k;
        while (pos > 0 && idx[pos - 1] + 1 == grid.size()) {
            idx[pos - 1] = 0;
            --pos;
        }
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t i = pos - 1; i < k; ++i) pref[i + 1] = pref[i].plus(alphas[i], grid[idx[i]]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gamma construction

namespace {

Rat approx_mid(const CertifiedReal& x) {
    if (x.kind() == CertifiedReal::Kind::rational) return x.surd().rational_part();
    if (x.kind() == CertifiedReal::Kind::decimal) return x.dec_lo() + x.dec_width() / 2;
    reals::Interval iv = x.refine(96);
    return (iv.lo + iv.hi) / 2;
}

} // namespace

GammaVector gamma_vector(const RelationSet& relations, const std::vector<CertifiedReal>& alphas,
                         const Int& grid_height) {
    std::size_t k = alphas.size();
    if (k == 0) throw validation_error("gamma construction needs at least one alpha");
    if (grid_height < 1) throw validation_error("grid height must be >= 1");
    if (!relations.tuples.empty() && relations.k != static_cast<int>(k))
        throw validation_error("relation arity does not match alpha count");

    // greedy independent subset of relation vectors (coeff..., m), input order
    std::vector<std::vector<Rat>> rows;
    std::vector<std::vector<Rat>> echelon;
    std::vector<std::size_t> epivot;
    for (const Relation& rel : relations.tuples) {
        std::vector<Rat> v = rel.coeff;
        v.push_back(Rat(rel.m));
        std::vector<Rat> w = v;
        for (std::size_t i = 0; i < echelon.size(); ++i) {
            if (w[epivot[i]] == 0) continue;
            Rat f = w[epivot[i]];
            for (std::size_t j = 0; j < w.size(); ++j) w[j] -= f * echelon[i][j];
        }
        std::size_t piv = w.size();
        for (std::size_t j = 0; j < w.size(); ++j) {
            if (w[j] != 0) {
                piv = j;
                break;
            }
        }
        if (piv == w.size()) continue; // dependent
        Rat inv = 1 / w[piv];
        for (Rat& x : w) x *= inv;
        echelon.push_back(std::move(w));
        epivot.push_back(piv);
        rows.push_back(std::move(v));
    }

    // kernel of the pinned relations; no relations leaves all of Q^(k+1)
    std::vector<std::vector<Rat>> basis;
    if (rows.empty()) {
        for (std::size_t i = 0; i < k + 1; ++i) {
            std::vector<Rat> e(k + 1, Rat(0));
            e[i] = 1;
            basis.push_back(std::move(e));
        }
    } else {
        basis = kernel_basis(RationalMatrix::from_rows(rows));
    }

    std::size_t lead = basis.size();
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (basis[i][k] != 0) {
            lead = i;
            break;
        }
    }
    if (lead == basis.size()) {
        throw validation_error(
            "degenerate relations: every solution has last coordinate 0, gamma cannot be normalized");
    }

    std::vector<Rat> u0 = basis[lead];
    {
        Rat inv = 1 / u0[k];
        for (Rat& x : u0) x *= inv;
    }
    std::vector<std::vector<Rat>> W;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (i == lead) continue;
        std::vector<Rat> w = basis[i];
        Rat f = w[k];
        for (std::size_t j = 0; j <= k; ++j) w[j] -= f * u0[j];
        W.push_back(std::move(w));
    }

    std::vector<Rat> target(k + 1);
    for (std::size_t i = 0; i < k; ++i) target[i] = approx_mid(alphas[i]);
    target[k] = 1;

    std::vector<Rat> gamma_full = u0;
    if (!W.empty()) {
        // exact least squares for the free coefficients, then grid rounding
        std::size_t w = W.size();
        std::vector<std::vector<Rat>> G(w, std::vector<Rat>(w, Rat(0)));
        std::vector<Rat> b(w, Rat(0));
        for (std::size_t i = 0; i < w; ++i) {
            for (std::size_t j = 0; j < w; ++j)
                for (std::size_t t = 0; t <= k; ++t) G[i][j] += W[i][t] * W[j][t];
            for (std::size_t t = 0; t <= k; ++t) b[i] += (target[t] - u0[t]) * W[i][t];
        }
        std::vector<Rat> c = solve_linear(G, std::move(b), "free directions unexpectedly dependent");
        Rat g(grid_height);
        for (std::size_t i = 0; i < w; ++i) {
            // nearest grid point, half rounds up
            Rat scaled = c[i] * g + Rat(1, 2);
            Rat snapped = Rat(rat_floor(scaled)) / g;
            for (std::size_t t = 0; t <= k; ++t) gamma_full[t] += snapped * W[i][t];
        }
    }

    GammaVector out;
    out.gammas.assign(gamma_full.begin(), gamma_full.begin() + static_cast<long>(k));
    out.provenance = relations;

    // exactness is structural (free directions have last coordinate 0); verify anyway
    for (const Relation& rel : relations.tuples) {
        Rat s = Rat(rel.m);
        for (std::size_t i = 0; i < k; ++i) s += out.gammas[i] * rel.coeff[i];
        if (s != 0) throw error("gamma exactness verification failed");
    }
    return out;
}

std::vector<std::uint64_t> bad_prime_set(const GammaVector& gamma, std::uint64_t N) {
    if (gamma.gammas.empty()) throw validation_error("gamma must be nonempty");
    if (N < 2) throw validation_error("N must be >= 2");
    std::set<std::uint64_t> out;
    for (const Rat& g : gamma.gammas) {
        if (g == 0) throw validation_error("gamma entries must be nonzero");
        for (std::uint64_t p : arith::factor_distinct(abs(g.get_num()))) out.insert(p);
        for (std::uint64_t p : arith::factor_distinct(g.get_den())) out.insert(p);
    }
    auto lim = static_cast<std::uint64_t>(std::floor(std::log(static_cast<double>(N))));
    if (lim >= 2) {
        for (std::uint64_t p : arith::sieve_primes(lim)) out.insert(p);
    }
    return {out.begin(), out.end()};
}

bool denominator_coprime(const Rat& value, std::uint64_t p) {
    if (p < 2) throw validation_error("prime must be >= 2");
    Int pz(static_cast<unsigned long>(p));
    return !mpz_divisible_p(value.get_den().get_mpz_t(), pz.get_mpz_t());
}

} // namespace eklab::qlinalg
