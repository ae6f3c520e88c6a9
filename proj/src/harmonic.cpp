#include "eklab/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "eklab/arith.hpp"
#include "eklab/errors.hpp"
#include "eklab/parallel.hpp"

namespace eklab::harmonic {

using reals::BeattySpec;
using reals::EvalParts;
using reals::SurdSum;

namespace {

constexpr double kPi = 3.14159265358979323846;

double sinc(double z) {
    if (std::abs(z) < 1e-4) {
        double z2 = z * z;
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sin(z) / z;
}

void check_window_epsilon(WindowKind kind, double epsilon) {
    if (kind == WindowKind::tent) return;
    if (!(epsilon > 0) || epsilon > 0.5)
        throw validation_error("window epsilon must lie in (0, 1/2]");
}

Int int_from_i128(__int128 v) {
    bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
    Int r(static_cast<unsigned long>(u >> 64));
    r <<= 64;
    r += static_cast<unsigned long>(u);
    return neg ? Int(-r) : r;
}

} // namespace

// ---------------------------------------------------------------------------
// Windows

double window_eval(WindowKind kind, double x, double epsilon) {
    check_window_epsilon(kind, epsilon);
    switch (kind) {
    case WindowKind::tent:
        return std::max(0.0, 2.0 - std::abs(x));
    case WindowKind::plus:
        if (x < 0) return 0;
        if (x < epsilon) return x / epsilon;
        if (x <= 1) return 1;
        if (x < 1 + epsilon) return (1 + epsilon - x) / epsilon;
        return 0;
    case WindowKind::minus:
        if (x < -epsilon) return 0;
        if (x < 0) return (x + epsilon) / epsilon;
        if (x <= 1 - epsilon) return 1;
        if (x < 1) return (1 - x) / epsilon;
        return 0;
    }
    return 0;
}

std::complex<double> window_fourier(WindowKind kind, double y, double epsilon) {
    check_window_epsilon(kind, epsilon);
    if (kind == WindowKind::tent) {
        double s = sinc(2 * kPi * y);
        return {4 * s * s, 0};
    }
    // transforms of the convolution factors; the eps^-1 normalization cancels
    // the length eps of the short interval
    double mag = sinc(kPi * y) * sinc(kPi * epsilon * y);
    double shift = (kind == WindowKind::plus) ? (1 + epsilon) : (1 - epsilon);
    double phase = -kPi * shift * y;
    return std::polar(mag, phase);
}

// ---------------------------------------------------------------------------
// Dirichlet kernels

namespace {

// sum_{n=a..b} e(nx); assumes x reduced to [0,1)
std::complex<double> geometric_e_sum(double x, std::uint64_t a, std::uint64_t b) {
    auto size = static_cast<double>(b - a + 1);
    if (x == 0.0) return {size, 0};
    double s = std::sin(kPi * x);
    if (s == 0.0) return {size, 0};
    double mag = std::sin(kPi * size * x) / s;
    // e((a+b)x/2); long double keeps the large product's angle accurate
    long double m = std::fmod(static_cast<long double>(a + b) * static_cast<long double>(x), 2.0L);
    double phase = kPi * static_cast<double>(m);
    return std::polar(mag, phase);
}

double reduce_mod1(double x) {
    double r = x - std::floor(x);
    if (r >= 1.0) r = 0.0; // floor rounding guard for tiny negative x
    return r;
}

} // namespace

std::complex<double> dirichlet_theta(double x, std::uint64_t N) {
    if (N < 1) throw validation_error("theta needs N >= 1");
    return geometric_e_sum(reduce_mod1(x), 1, N) / static_cast<double>(N);
}

std::complex<double> dirichlet_theta_over(double x, std::uint64_t N, std::uint64_t first,
                                          std::uint64_t last) {
    if (N < 1 || first < 1 || first > last)
        throw validation_error("theta range must satisfy 1 <= first <= last");
    return geometric_e_sum(reduce_mod1(x), first, last) / std::sqrt(static_cast<double>(N));
}

std::uint64_t subinterval_count(std::uint64_t N) {
    if (N < 1) throw validation_error("partition needs N >= 1");
    return N / arith::floor_sqrt(N);
}

IndexInterval subinterval_bounds(std::uint64_t N, std::uint64_t u) {
    std::uint64_t w = arith::floor_sqrt(N);
    std::uint64_t count = N / w;
    if (u < 1 || u > count)
        throw validation_error("interval index " + std::to_string(u) + " outside 1.." +
                               std::to_string(count));
    IndexInterval iv{(u - 1) * w + 1, u == count ? N : u * w};
    return iv;
}

std::complex<double> dirichlet_theta_sub(double x, std::uint64_t N, std::uint64_t u) {
    IndexInterval iv = subinterval_bounds(N, u);
    return dirichlet_theta_over(x, N, iv.first, iv.last);
}

// ---------------------------------------------------------------------------
// Periodised Gaussian

GaussianSides periodised_gaussian_sides(double x, double epsilon, int tail_terms) {
    if (!(epsilon > 0)) throw validation_error("gaussian epsilon must be positive");
    if (tail_terms < 1) throw validation_error("tail_terms must be >= 1");
    double xr = reduce_mod1(x);
    double e2 = 2 * epsilon * epsilon;
    auto T = static_cast<double>(tail_terms);

    double space = 0;
    for (int m = -tail_terms; m <= tail_terms; ++m) {
        double d = xr - m;
        space += std::exp(-d * d / e2);
    }
    // omitted |m| > T terms: |xr - m| >= |m| - 1, geometric comparison
    double q_space = std::exp(-T / (epsilon * epsilon));
    double space_tail = 2 * std::exp(-T * T / e2) / (1 - q_space);

    double c = 2 * kPi * kPi * epsilon * epsilon;
    double freq = 1;
    for (int m = 1; m <= tail_terms; ++m) {
        freq += 2 * std::cos(2 * kPi * m * xr) * std::exp(-c * m * m);
    }
    double scale = std::sqrt(2 * kPi) * epsilon;
    freq *= scale;
    double q_freq = std::exp(-2 * c * (T + 1));
    double freq_tail = 2 * scale * std::exp(-c * (T + 1) * (T + 1)) / (1 - q_freq);

    return {space, freq, space_tail, freq_tail};
}

double periodised_gaussian(double x, double epsilon, int tail_terms) {
    GaussianSides s = periodised_gaussian_sides(x, epsilon, tail_terms);
    if (!(s.space_tail <= 1e-12) || !(s.freq_tail <= 1e-12)) {
        throw precision_error("gaussian truncation at " + std::to_string(tail_terms) +
                              " terms leaves tail " +
                              std::to_string(std::max(s.space_tail, s.freq_tail)) +
                              ", above 1e-12");
    }
    double slack = 1e-10 + s.space_tail + s.freq_tail;
    if (std::abs(s.space - s.freq) > slack) {
        throw error("periodised gaussian sides disagree: space " + std::to_string(s.space) +
                    " vs freq " + std::to_string(s.freq));
    }
    return s.space;
}

// ---------------------------------------------------------------------------
// Prime tuples

std::size_t PrimeTuple::total() const {
    std::size_t n = 0;
    for (const auto& row : entries) n += row.size();
    return n;
}

std::vector<std::uint64_t> PrimeTuple::flat() const {
    std::vector<std::uint64_t> out;
    out.reserve(total());
    for (const auto& row : entries)
        for (std::uint64_t p : row) out.push_back(p);
    return out;
}

void validate_tuple(const PrimeTuple& t) {
    for (const auto& row : t.entries) {
        for (std::uint64_t p : row) {
            Int pz(static_cast<unsigned long>(p));
            if (p < 2 || mpz_probab_prime_p(pz.get_mpz_t(), 40) == 0)
                throw validation_error("tuple entry " + std::to_string(p) + " is not prime");
        }
    }
}

TupleType classify_tuple(const PrimeTuple& t) {
    validate_tuple(t);
    std::map<std::uint64_t, std::vector<std::size_t>> occ; // prime -> coordinates
    for (std::size_t i = 0; i < t.entries.size(); ++i)
        for (std::uint64_t p : t.entries[i]) occ[p].push_back(i);

    bool all_paired = true;
    for (const auto& [p, where] : occ)
        if (where.size() != 2) all_paired = false;
    if (all_paired) {
        for (const auto& [p, where] : occ)
            if (where[0] != where[1]) return TupleType::B;
        return TupleType::A;
    }
    for (const auto& [p, where] : occ)
        if (where.size() == 1) return TupleType::C;
    return TupleType::D;
}

// ---------------------------------------------------------------------------
// Interval goodness

GoodnessReport interval_goodness(const std::vector<BeattySpec>& specs, std::uint64_t u,
                                 std::uint64_t N, const Rat& epsilon) {
    if (specs.empty()) throw validation_error("goodness needs at least one spec");
    if (!(epsilon > 0) || epsilon > Rat(1, 2))
        throw validation_error("goodness epsilon must lie in (0, 1/2]");
    IndexInterval iv = subinterval_bounds(N, u);
    std::uint64_t size = iv.size();

    GoodnessReport report;
    report.interval = iv;

    for (const BeattySpec& spec : specs) {
        // hit+ when {alpha n + beta} in [0, eps), hit- when in (1-eps, 1);
        // both decided by exact signs against F + eps and F + 1 - eps
        auto hits_of = [&](std::uint64_t n) -> std::pair<bool, bool> {
            EvalParts parts = reals::beatty_parts(spec, n);
            Int F = reals::floor_of_parts(parts, n);
            Rat fr(F);

            bool hp;
            SurdSum up_p = parts.exact + SurdSum(parts.ihi - fr - epsilon);
            int s_up = up_p.sign();
            if (s_up < 0) {
                hp = true;
            } else if (!parts.has_interval) {
                hp = false; // value >= F + eps, boundary excluded
            } else {
                SurdSum lo_p = parts.exact + SurdSum(parts.ilo - fr - epsilon);
                if (lo_p.sign() >= 0) {
                    hp = false;
                } else {
                    throw precision_error("decimal digits cannot place {alpha n + beta} against "
                                          "epsilon at n=" + std::to_string(n));
                }
            }

            bool hm;
            SurdSum lo_m = parts.exact + SurdSum(parts.ilo - fr - 1 + epsilon);
            int s_lo = lo_m.sign();
            if (s_lo > 0) {
                hm = true;
            } else if (!parts.has_interval) {
                hm = false; // value <= F + 1 - eps, boundary excluded
            } else {
                SurdSum hi_m = parts.exact + SurdSum(parts.ihi - fr - 1 + epsilon);
                if (hi_m.sign() <= 0) {
                    hm = false;
                } else {
                    throw precision_error("decimal digits cannot place {alpha n + beta} against "
                                          "1 - epsilon at n=" + std::to_string(n));
                }
            }
            return {hp, hm};
        };

        using Counts = std::pair<std::uint64_t, std::uint64_t>;
        Counts total = chunked_reduce<Counts>(
            size, 4096, Counts{0, 0},
            [&](std::size_t lo, std::size_t hi) {
                Counts c{0, 0};
                for (std::size_t j = lo; j < hi; ++j) {
                    auto [hp, hm] = hits_of(iv.first + j);
                    c.first += hp;
                    c.second += hm;
                }
                return c;
            },
            [](Counts& acc, Counts&& c) {
                acc.first += c.first;
                acc.second += c.second;
            });

        Rat fp = make_rat(Int(static_cast<unsigned long>(total.first)),
                          Int(static_cast<unsigned long>(size)));
        Rat fm = make_rat(Int(static_cast<unsigned long>(total.second)),
                          Int(static_cast<unsigned long>(size)));
        report.frac_plus.push_back(fp);
        report.frac_minus.push_back(fm);
        // fraction <= eps^(1/4) compared exactly as fraction^4 <= eps
        Rat fp4 = fp * fp * fp * fp;
        Rat fm4 = fm * fm * fm * fm;
        if (fp4 <= epsilon) {
            report.verdict.push_back(Goodness::plus_good);
        } else if (fm4 <= epsilon) {
            report.verdict.push_back(Goodness::minus_good);
        } else {
            report.verdict.push_back(Goodness::bad);
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// E-family

Rat E_direct_from_floors(const PrimeTuple& t,
                         const std::vector<std::vector<std::int64_t>>& floors) {
    validate_tuple(t);
    if (floors.size() != t.coords())
        throw validation_error("floor table count does not match tuple coordinates");
    if (floors.empty() || floors[0].empty()) throw validation_error("empty floor tables");
    std::size_t size = floors[0].size();
    for (const auto& f : floors)
        if (f.size() != size) throw validation_error("floor tables differ in length");

    Int prod_p = 1;
    for (std::uint64_t p : t.flat()) prod_p *= static_cast<unsigned long>(p);
    if (prod_p > Int("4611686018427387904")) // 2^62: per-point product must fit i64
        throw budget_error("tuple prime product too large for direct averaging");

    // sum over n of prod_ij (p * 1_{p | F_i(n)} - 1), an integer
    Int total = chunked_reduce<Int>(
        size, 65536, Int(0),
        [&](std::size_t lo, std::size_t hi) {
            __int128 acc = 0;
            for (std::size_t j = lo; j < hi; ++j) {
                std::int64_t prod = 1;
                for (std::size_t i = 0; i < floors.size(); ++i) {
                    std::int64_t F = floors[i][j];
                    for (std::uint64_t p : t.entries[i]) {
                        auto pi = static_cast<std::int64_t>(p);
                        prod *= (F % pi == 0) ? pi - 1 : -1;
                    }
                }
                acc += prod;
            }
            return int_from_i128(acc);
        },
        [](Int& acc, Int&& c) { acc += c; });

    return make_rat(total, Int(static_cast<unsigned long>(size)) * prod_p);
}

namespace {

Rat E_direct_over(const PrimeTuple& t, const std::vector<BeattySpec>& specs, std::uint64_t first,
                  std::uint64_t last) {
    if (specs.size() != t.coords())
        throw validation_error("spec count does not match tuple coordinates");
    std::vector<std::vector<std::int64_t>> floors;
    floors.reserve(specs.size());
    for (const BeattySpec& s : specs) floors.push_back(reals::beatty_floor_range(s, first, last));
    return E_direct_from_floors(t, floors);
}

} // namespace

Rat E_direct(const PrimeTuple& t, const std::vector<BeattySpec>& specs, std::uint64_t N) {
    if (N < 1) throw validation_error("average needs N >= 1");
    return E_direct_over(t, specs, 1, N);
}

Rat E_direct_sub(const PrimeTuple& t, const std::vector<BeattySpec>& specs, std::uint64_t N,
                 std::uint64_t u) {
    IndexInterval iv = subinterval_bounds(N, u);
    return E_direct_over(t, specs, iv.first, iv.last);
}

// ---------------------------------------------------------------------------
// Restricted sums

namespace {

struct CoordTerm {
    std::size_t i;   // coordinate of the tuple
    std::uint64_t p; // its prime
};

double restricted_weight(RestrictedVariant variant, double y, double eps) {
    if (variant == RestrictedVariant::prime_bd) {
        double s = sinc(2 * kPi * y);
        return 4 * s * s;
    }
    return std::abs(sinc(kPi * y) * sinc(kPi * eps * y));
}

// cyclic convolution step acc <- acc * g over Z_mod
void convolve_into(std::vector<double>& acc, const std::vector<double>& g) {
    std::size_t mod = acc.size();
    std::vector<double> next(mod, 0.0);
    for (std::size_t r = 0; r < mod; ++r) {
        if (acc[r] == 0.0) continue;
        for (std::size_t s = 0; s < mod; ++s) {
            if (g[s] == 0.0) continue;
            next[(r + s) % mod] += acc[r] * g[s];
        }
    }
    acc = std::move(next);
}

std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t m) {
    Int r;
    if (mpz_invert(r.get_mpz_t(), Int(static_cast<unsigned long>(a)).get_mpz_t(),
                   Int(static_cast<unsigned long>(m)).get_mpz_t()) == 0)
        throw validation_error("no modular inverse of " + std::to_string(a) + " mod " +
                               std::to_string(m));
    return static_cast<std::uint64_t>(r.get_ui());
}

} // namespace

RestrictedSum E_restricted_sum(const PrimeTuple& t, const qlinalg::GammaVector& gamma,
                               std::uint64_t J, RestrictedVariant variant, const Rat& epsilon) {
    validate_tuple(t);
    if (t.coords() != gamma.gammas.size())
        throw validation_error("gamma length does not match tuple coordinates");
    if (J < 1) throw validation_error("truncation height must be >= 1");

    std::vector<CoordTerm> coords;
    for (std::size_t i = 0; i < t.entries.size(); ++i)
        for (std::uint64_t p : t.entries[i]) coords.push_back({i, p});
    if (coords.empty()) return {1.0, 0.0}; // single empty tuple, constraint vacuous

    Rat eps = epsilon;
    if (eps == 0) {
        std::uint64_t s = arith::floor_sqrt(J);
        if (s * s < J) ++s;
        eps = make_rat(1, Int(static_cast<unsigned long>(s)));
    }
    if (variant == RestrictedVariant::triple_ac && (!(eps > 0) || eps > Rat(1, 2)))
        throw validation_error("epsilon must lie in (0, 1/2] for the pointy-window variant");
    double eps_d = eps.get_d();

    std::uint64_t enum_cost = 0;
    for (const CoordTerm& c : coords) enum_cost += 2 * J * c.p + 1;
    if (enum_cost > 200000000)
        throw budget_error("restricted-sum enumeration of " + std::to_string(enum_cost) +
                           " terms exceeds budget");

    // the integer constraint factors into one congruence per distinct prime
    // exactly when no tuple prime divides a gamma denominator; otherwise fall
    // back to the single congruence mod D = lcm(p_ij * den(gamma_i))
    bool coprime_dens = true;
    for (const CoordTerm& c : coords) {
        for (const Rat& g : gamma.gammas) {
            if (mpz_divisible_ui_p(g.get_den().get_mpz_t(), static_cast<unsigned long>(c.p)))
                coprime_dens = false;
        }
    }

    std::vector<double> coord_sums, coord_tails;
    coord_sums.reserve(coords.size());
    double value = 1.0;

    auto coord_tail = [&](void) -> double {
        // |phi(y)| <= 1/(pi y)^2, |phi_pm(y)| <= 1/(pi^2 eps y^2); summed over
        // |m| > J in p^-1 Z this is at most 2/(pi^2 J) resp. 2/(pi^2 eps J)
        double base = 2.0 / (kPi * kPi * static_cast<double>(J));
        return variant == RestrictedVariant::prime_bd ? base : base / eps_d;
    };

    auto build_g = [&](const CoordTerm& c, std::uint64_t mod, std::uint64_t coeff,
                       std::vector<double>& g) -> double {
        g.assign(mod, 0.0);
        double sum = 0;
        auto pj = static_cast<std::int64_t>(c.p);
        auto bound = static_cast<std::int64_t>(J * c.p);
        for (std::int64_t tt = -bound; tt <= bound; ++tt) {
            if (variant == RestrictedVariant::triple_ac && tt % pj == 0) continue;
            double w = restricted_weight(variant, static_cast<double>(tt) / static_cast<double>(c.p),
                                         eps_d) /
                       static_cast<double>(c.p);
            auto r = static_cast<std::int64_t>((static_cast<__int128>(coeff) * tt) %
                                               static_cast<std::int64_t>(mod));
            if (r < 0) r += static_cast<std::int64_t>(mod);
            g[static_cast<std::size_t>(r)] += w;
            sum += w;
        }
        return sum;
    };

    if (coprime_dens) {
        // per-prime blocks: residues mod p only
        std::map<std::uint64_t, std::vector<CoordTerm>> blocks;
        for (const CoordTerm& c : coords) blocks[c.p].push_back(c);
        for (const auto& [q, block] : blocks) {
            std::vector<double> acc(q, 0.0);
            acc[0] = 1.0;
            for (const CoordTerm& c : block) {
                const Rat& g_i = gamma.gammas[c.i];
                std::uint64_t a = static_cast<std::uint64_t>(
                    mpz_fdiv_ui(g_i.get_num().get_mpz_t(), static_cast<unsigned long>(q)));
                std::uint64_t b = static_cast<std::uint64_t>(
                    mpz_fdiv_ui(g_i.get_den().get_mpz_t(), static_cast<unsigned long>(q)));
                std::uint64_t coeff = (a * mod_inverse(b, q)) % q;
                std::vector<double> g;
                coord_sums.push_back(build_g(c, q, coeff, g));
                coord_tails.push_back(coord_tail());
                convolve_into(acc, g);
            }
            value *= acc[0];
        }
    } else {
        Int D = 1;
        for (const CoordTerm& c : coords) {
            for (std::size_t i = 0; i < gamma.gammas.size(); ++i) {
                D = lcm(D, Int(static_cast<unsigned long>(c.p)) * gamma.gammas[i].get_den());
            }
        }
        if (D > 4096)
            throw budget_error("relation modulus " + D.get_str() +
                               " exceeds 4096 for the general enumeration");
        auto mod = static_cast<std::uint64_t>(D.get_ui());
        std::vector<double> acc(mod, 0.0);
        acc[0] = 1.0;
        for (const CoordTerm& c : coords) {
            // coeff = gamma_i * D / p, an integer by construction of D
            Rat cf = gamma.gammas[c.i] * Rat(D) / Rat(static_cast<unsigned long>(c.p));
            Int ci = cf.get_num(); // den is 1
            std::uint64_t coeff = static_cast<std::uint64_t>(
                mpz_fdiv_ui(ci.get_mpz_t(), static_cast<unsigned long>(mod)));
            std::vector<double> g;
            coord_sums.push_back(build_g(c, mod, coeff, g));
            coord_tails.push_back(coord_tail());
            convolve_into(acc, g);
        }
        value = acc[0];
    }

    // tuples escaping the truncation box: one coordinate past J, others full
    double tail = 0;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        double others = 1;
        for (std::size_t j = 0; j < coords.size(); ++j)
            if (j != i) others *= coord_sums[j] + coord_tails[j];
        tail += coord_tails[i] * others;
    }
    return {value, tail};
}

Rat type_A_prediction(const PrimeTuple& t) {
    validate_tuple(t);
    if (classify_tuple(t) != TupleType::A)
        throw validation_error("prediction requires a type A tuple");
    std::set<std::uint64_t> distinct;
    for (std::uint64_t p : t.flat()) distinct.insert(p);
    Rat prod = 1;
    for (std::uint64_t p : distinct) {
        Int pz(static_cast<unsigned long>(p));
        prod *= make_rat(pz - 1, pz * pz); // 1/p - 1/p^2
    }
    return prod;
}

// ---------------------------------------------------------------------------
// Schedule

Schedule Schedule::defaults(std::uint64_t N) {
    if (N < 8) throw validation_error("schedule needs N >= 8");
    Schedule s;
    s.N = N;
    long double lg = std::log(static_cast<long double>(N));
    long double llg = std::log(lg);
    s.L = static_cast<std::uint64_t>(std::ceil(static_cast<double>(llg)));
    if (s.L < 1) s.L = 1;
    s.J = std::max<std::uint64_t>(64, arith::ceil_root(N, 25));
    s.R = static_cast<std::uint64_t>(
        std::ceil(std::pow(static_cast<double>(N), 1.0 / static_cast<double>(llg))));
    if (s.R < 2) s.R = 2;
    s.T = arith::ceil_root(s.J, 8);
    std::uint64_t se = arith::floor_sqrt(s.J);
    if (se * se < s.J) ++se;
    s.epsilon = make_rat(1, Int(static_cast<unsigned long>(se)));
    s.width = arith::floor_sqrt(N);
    s.intervals = N / s.width;
    return s;
}

} // namespace eklab::harmonic
