#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <vector>

#include "eklab/errors.hpp"
#include "eklab/harmonic.hpp"
#include "eklab/qlinalg.hpp"
#include "eklab/reals.hpp"
#include "oracles.hpp"

using namespace eklab;
using namespace eklab::harmonic;
using reals::BeattySpec;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

std::complex<double> e_of(double x) {
    return {std::cos(kTau * x), std::sin(kTau * x)};
}

// Simpson quadrature of window * e(-xy) over the window support
std::complex<double> quad_fourier(WindowKind kind, double y, double eps) {
    double a, b;
    if (kind == WindowKind::tent) {
        a = -2;
        b = 2;
    } else if (kind == WindowKind::plus) {
        a = 0;
        b = 1 + eps;
    } else {
        a = -eps;
        b = 1;
    }
    const int n = 40000; // even
    const double h = (b - a) / n;
    std::complex<double> acc = 0;
    for (int i = 0; i <= n; ++i) {
        const double x = a + h * i;
        const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
        acc += w * window_eval(kind, x, eps) * e_of(-x * y);
    }
    return acc * (h / 3);
}

// reference classifier straight from the definition: distinct pairs means
// every prime occurs exactly twice, so multiplicity 4 lands in D, not A
TupleType classify_reference(const PrimeTuple& t) {
    std::map<std::uint64_t, std::size_t> total;
    std::map<std::pair<std::uint64_t, std::size_t>, std::size_t> per_coord;
    for (std::size_t i = 0; i < t.entries.size(); ++i)
        for (std::uint64_t p : t.entries[i]) {
            ++total[p];
            ++per_coord[{p, i}];
        }
    bool paired = true;
    for (const auto& [p, c] : total)
        if (c != 2) paired = false;
    if (paired) {
        for (const auto& [key, c] : per_coord)
            if (c % 2) return TupleType::B;
        return TupleType::A;
    }
    for (const auto& [p, c] : total)
        if (c == 1) return TupleType::C;
    return TupleType::D;
}

PrimeTuple tuple1(std::vector<std::uint64_t> ps) {
    PrimeTuple t;
    t.entries = {std::move(ps)};
    return t;
}

} // namespace

TEST_CASE("window_eval closed forms") {
    CHECK(window_eval(WindowKind::tent, 0) == 2);
    CHECK(window_eval(WindowKind::tent, 1) == 1);
    CHECK(window_eval(WindowKind::tent, 2) == 0);
    CHECK(window_eval(WindowKind::tent, -1.5) == 0.5);
    CHECK(window_eval(WindowKind::plus, 0.5, 0.1) == 1);
    CHECK(window_eval(WindowKind::plus, 0.05, 0.1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(window_eval(WindowKind::minus, -0.05, 0.1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(window_eval(WindowKind::minus, 0.95, 0.1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(window_eval(WindowKind::plus, 0.5, 0.0), validation_error);
    CHECK_THROWS_AS(window_eval(WindowKind::plus, 0.5, 0.6), validation_error);
}

TEST_CASE("window approximants differ from the indicator only on the ramps") {
    const double eps = 0.125;
    for (int i = -4000; i <= 12000; ++i) {
        const double x = i / 8000.0;
        const double ind = (x >= 0 && x < 1) ? 1.0 : 0.0;
        const double plus = window_eval(WindowKind::plus, x, eps);
        const double minus = window_eval(WindowKind::minus, x, eps);
        const bool plus_ramp = (x >= 0 && x < eps) || (x >= 1 && x < 1 + eps);
        const bool minus_ramp = (x >= -eps && x < 0) || (x >= 1 - eps && x < 1);
        if (!plus_ramp) CHECK(plus == ind);
        if (!minus_ramp) CHECK(minus == ind);
    }
}

TEST_CASE("tent periodisation majorizes the divisibility indicator") {
    for (std::uint64_t p : {3u, 5u, 7u}) {
        for (int i = 0; i < 10000; ++i) {
            const double x = 3.0 * p * i / 10000.0;
            double maj = 0;
            const long k0 = std::lround(x / p);
            for (long k = k0 - 2; k <= k0 + 2; ++k)
                maj += window_eval(WindowKind::tent, x - static_cast<double>(k) * p);
            const double ind = (static_cast<std::uint64_t>(std::floor(x)) % p == 0) ? 1.0 : 0.0;
            REQUIRE(maj >= ind - 1e-12);
        }
    }
}

TEST_CASE("window_fourier closed forms and quadrature cross-check") {
    CHECK(window_fourier(WindowKind::tent, 0).real() == 4);
    CHECK(window_fourier(WindowKind::tent, 0).imag() == 0);
    CHECK(std::abs(window_fourier(WindowKind::tent, 0.5)) < 1e-15);
    const double q = 4 / std::acos(-1.0);
    CHECK(window_fourier(WindowKind::tent, 0.25).real() == doctest::Approx(q * q).epsilon(1e-12));

    // vanishing on the nonzero integers, unit mass at zero
    for (double eps : {0.1, 0.3, 0.5}) {
        for (int m : {1, 2, 3, -1, -5}) {
            CHECK(std::abs(window_fourier(WindowKind::plus, m, eps)) < 1e-14);
            CHECK(std::abs(window_fourier(WindowKind::minus, m, eps)) < 1e-14);
        }
        CHECK(std::abs(window_fourier(WindowKind::plus, 0, eps) - 1.0) < 1e-14);
        CHECK(std::abs(window_fourier(WindowKind::minus, 0, eps) - 1.0) < 1e-14);
    }

    // tent transform is real and nonnegative
    for (int i = -40; i <= 40; ++i) {
        const auto v = window_fourier(WindowKind::tent, i / 8.0 + 0.013);
        CHECK(v.imag() == 0);
        CHECK(v.real() >= 0);
    }

    // closed forms against direct quadrature of the space-side definition
    for (double y : {0.0, 0.125, 0.4, 1.0, 2.75, -1.3}) {
        CHECK(std::abs(window_fourier(WindowKind::tent, y) - quad_fourier(WindowKind::tent, y, 0)) <
              1e-8);
        for (double eps : {0.1, 0.5}) {
            CHECK(std::abs(window_fourier(WindowKind::plus, y, eps) -
                           quad_fourier(WindowKind::plus, y, eps)) < 1e-8);
            CHECK(std::abs(window_fourier(WindowKind::minus, y, eps) -
                           quad_fourier(WindowKind::minus, y, eps)) < 1e-8);
        }
    }
}

TEST_CASE("fourier inversion recovers the periodised tent") {
    for (std::uint64_t p : {3u, 5u, 7u}) {
        const long tmax = 1000; // |m| <= 1000/p in p^-1 Z
        // analytic tail: |tent^| <= 1/(pi y)^2 past the box
        const double pi = std::acos(-1.0);
        const double tail = 2.0 * p / (pi * pi * tmax);
        for (int i = 0; i < 200; ++i) {
            const double x = p * (i + 0.31) / 200.0;
            std::complex<double> acc = 0;
            for (long tt = -tmax; tt <= tmax; ++tt)
                acc += window_fourier(WindowKind::tent, static_cast<double>(tt) / p) *
                       e_of(static_cast<double>(tt) * x / p) / static_cast<double>(p);
            double periodised = 0;
            const long k0 = std::lround(x / p);
            for (long k = k0 - 2; k <= k0 + 2; ++k)
                periodised += window_eval(WindowKind::tent, x - static_cast<double>(k) * p);
            REQUIRE(std::abs(acc.imag()) < 1e-9);
            REQUIRE(std::abs(acc.real() - periodised) <= tail + 1e-9);
        }
    }
}

TEST_CASE("dirichlet_theta: examples, direct summation, standard bound") {
    CHECK(dirichlet_theta(0, 100) == std::complex<double>(1, 0));
    CHECK(std::abs(dirichlet_theta(0.5, 2)) < 1e-15);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> xs(0.001, 0.999);
    for (std::uint64_t N : {1ull, 7ull, 100ull, 1000ull}) {
        for (int rep = 0; rep < 8; ++rep) {
            const double x = xs(rng);
            std::complex<double> direct = 0;
            for (std::uint64_t n = 1; n <= N; ++n) direct += e_of(x * static_cast<double>(n));
            direct /= static_cast<double>(N);
            const auto fast = dirichlet_theta(x, N);
            REQUIRE(std::abs(fast - direct) < 1e-10);
            const double dist = std::min(x, 1 - x);
            REQUIRE(std::abs(fast) <= std::min(1.0, 1 / (2.0 * static_cast<double>(N) * dist)) + 1e-12);
        }
    }
    CHECK(std::abs(dirichlet_theta(0.3, 1000)) <= 1.0 / 600);
}

TEST_CASE("sqrt partition and subinterval kernels") {
    CHECK(subinterval_count(10000) == 100);
    CHECK(subinterval_bounds(10000, 1).first == 1);
    CHECK(subinterval_bounds(10000, 1).size() == 100);
    CHECK(subinterval_bounds(10000, 100).last == 10000);

    // prime N: last interval absorbs the remainder
    const std::uint64_t N = 10007;
    const auto count = subinterval_count(N);
    std::uint64_t covered = 0;
    for (std::uint64_t u = 1; u <= count; ++u) {
        const auto iv = subinterval_bounds(N, u);
        REQUIRE(iv.first == covered + 1);
        covered = iv.last;
        REQUIRE(iv.size() >= 100);
    }
    CHECK(covered == N);
    CHECK(subinterval_bounds(N, count).size() == 100 + N % 100);

    // theta over a subinterval matches direct summation and the integer value
    const auto iv = subinterval_bounds(10000, 7);
    std::complex<double> direct = 0;
    for (std::uint64_t n = iv.first; n <= iv.last; ++n) direct += e_of(0.3 * static_cast<double>(n));
    direct /= 100.0; // N^(1/2)
    CHECK(std::abs(dirichlet_theta_sub(0.3, 10000, 7) - direct) < 1e-10);
    CHECK(dirichlet_theta_sub(2.0, 10000, 7).real() == doctest::Approx(1.0)); // size/sqrt(N)
    CHECK(std::abs(dirichlet_theta_over(0.3, 10000, iv.first, iv.last) - direct) < 1e-14);
}

TEST_CASE("periodised gaussian: values, periodicity, side agreement") {
    CHECK(periodised_gaussian(0, 0.1, 40) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(periodised_gaussian(0.5, 0.1, 40) ==
          doctest::Approx(2 * std::exp(-12.5)).epsilon(1e-9));

    for (double eps : {0.05, 0.1, 0.3}) {
        for (int i = 0; i < 100; ++i) {
            const double x = i / 100.0;
            const auto sides = periodised_gaussian_sides(x, eps, 60);
            REQUIRE(sides.space_tail <= 1e-12);
            REQUIRE(sides.freq_tail <= 1e-12);
            REQUIRE(std::abs(sides.space - sides.freq) < 1e-10);
            REQUIRE(std::abs(periodised_gaussian(x, eps, 60) -
                             periodised_gaussian(x + 1, eps, 60)) <= 1e-12);
        }
    }

    // one term cannot certify the truncation for a wide gaussian
    CHECK_THROWS_AS(periodised_gaussian(0, 0.5, 1), precision_error);
}

TEST_CASE("classify_tuple examples and exhaustive partition") {
    PrimeTuple a;
    a.entries = {{5, 5}, {7, 7}};
    CHECK(classify_tuple(a) == TupleType::A);
    PrimeTuple b;
    b.entries = {{5, 7}, {5, 7}};
    CHECK(classify_tuple(b) == TupleType::B);
    PrimeTuple c;
    c.entries = {{5, 5}, {7, 11}};
    CHECK(classify_tuple(c) == TupleType::C);
    CHECK(classify_tuple(tuple1({5, 5, 5})) == TupleType::D);

    CHECK_THROWS_AS(validate_tuple(tuple1({9})), validation_error);
    CHECK_NOTHROW(validate_tuple(tuple1({5, 7})));

    // every tuple over {5,7,11} with total length <= 4, in 1 or 2 coordinates
    const std::uint64_t P[3] = {5, 7, 11};
    int seen[4] = {0, 0, 0, 0};
    for (std::size_t l1 = 0; l1 <= 4; ++l1) {
        for (std::size_t l2 = 0; l1 + l2 <= 4; ++l2) {
            const std::size_t l = l1 + l2;
            std::vector<std::size_t> digits(l, 0);
            for (;;) {
                PrimeTuple t;
                t.entries.assign(2, {});
                for (std::size_t j = 0; j < l1; ++j) t.entries[0].push_back(P[digits[j]]);
                for (std::size_t j = 0; j < l2; ++j) t.entries[1].push_back(P[digits[l1 + j]]);
                const TupleType got = classify_tuple(t);
                REQUIRE(got == classify_reference(t));
                ++seen[static_cast<int>(got)];
                std::size_t pos = 0;
                for (; pos < l; ++pos) {
                    if (++digits[pos] < 3) break;
                    digits[pos] = 0;
                }
                if (pos == l) break;
            }
        }
    }
    for (int cls = 0; cls < 4; ++cls) CHECK(seen[cls] > 0);
}

TEST_CASE("interval_goodness: worked verdicts with exact fractions") {
    const Rat eps1 = make_rat(1, 25);
    const auto half = interval_goodness({BeattySpec::parse("rational:1/2", "rational:0")}, 1, 100,
                                        eps1);
    REQUIRE(half.verdict.size() == 1);
    CHECK(half.verdict[0] == Goodness::minus_good);
    CHECK(half.frac_plus[0] == make_rat(1, 2));
    CHECK(half.frac_minus[0] == 0);

    const auto irr = interval_goodness({BeattySpec::parse("sqrt:2", "rational:0")}, 1, 10000,
                                       make_rat(1, 100));
    CHECK(irr.verdict[0] == Goodness::plus_good);

    // drift across the integer boundary loads both one-sided windows
    const auto bad = interval_goodness(
        {BeattySpec::parse("rational:1/10000", "rational:199/200")}, 1, 10000, make_rat(1, 100));
    CHECK(bad.verdict[0] == Goodness::bad);
    CHECK(bad.frac_plus[0] == make_rat(51, 100));
    CHECK(bad.frac_minus[0] == make_rat(49, 100));

    // coarse decimal slope: the mod-1 test hits an undecidable floor
    CHECK_THROWS_AS(interval_goodness({BeattySpec::parse("decimal:1.41", "rational:0")}, 1, 10000,
                                      make_rat(1, 100)),
                    precision_error);
}

TEST_CASE("E_direct: worked examples, exactness, prediction match") {
    const BeattySpec unit = BeattySpec::parse("rational:1", "rational:0");

    CHECK(E_direct(tuple1({5}), {unit}, 10) == 0);
    CHECK(E_direct(tuple1({5, 5}), {unit}, 100) == make_rat(4, 25));

    const BeattySpec s2 = BeattySpec::parse("sqrt:2", "rational:0");
    const double e33 = E_direct(tuple1({3, 3}), {s2}, 1000000).get_d();
    CHECK(std::abs(e33 - 2.0 / 9) < 0.01);

    // type A at a modulus-friendly N reproduces the product formula exactly
    const PrimeTuple a = tuple1({3, 3, 5, 5});
    CHECK(E_direct(a, {unit}, 900) == type_A_prediction(a));

    // prediction worked examples
    PrimeTuple pair57;
    pair57.entries = {{5, 5}, {7, 7}};
    CHECK(type_A_prediction(pair57) == make_rat(24, 1225));
    CHECK(type_A_prediction(tuple1({3, 3})) == make_rat(2, 9));
    CHECK(type_A_prediction(tuple1({3, 3, 5, 5, 7, 7})) == make_rat(48, 11025));
    CHECK_THROWS_AS(type_A_prediction(tuple1({5, 7})), validation_error);

    // shape must match the spec count
    PrimeTuple two;
    two.entries = {{5}, {7}};
    CHECK_THROWS_AS(E_direct(two, {unit}, 100), validation_error);
}

TEST_CASE("E_direct_sub: subinterval averages reassemble the full average") {
    const BeattySpec s2 = BeattySpec::parse("sqrt:2", "rational:1/3");
    const PrimeTuple t = tuple1({3});
    const std::uint64_t N = 441; // width 21, 21 intervals
    Rat acc = 0;
    for (std::uint64_t u = 1; u <= subinterval_count(N); ++u) {
        const auto iv = subinterval_bounds(N, u);
        acc += E_direct_sub(t, {s2}, N, u) * Rat(static_cast<unsigned long>(iv.size()));
    }
    CHECK(acc == E_direct(t, {s2}, N) * Rat(static_cast<unsigned long>(N)));

    // floor-table entry point agrees with the direct one
    const auto floors = reals::beatty_floor_range(s2, 1, N);
    CHECK(E_direct_from_floors(t, {floors}) == E_direct(t, {s2}, N));
}

TEST_CASE("E_direct decomposition reassembles restricted mixed moments") {
    // product of centered indicators, expanded over all tuple assignments:
    // E[prod_i w_i(n)^{l_i}] = sum over assignments of E_direct
    const std::vector<std::uint64_t> P = {7, 11, 13};
    const std::uint64_t N = 1000;
    const std::vector<BeattySpec> specs = {BeattySpec::parse("rational:1", "rational:0"),
                                           BeattySpec::parse("sqrt:2", "rational:0")};
    std::vector<std::vector<std::int64_t>> floors;
    floors.push_back(reals::beatty_floor_range(specs[0], 1, N));
    floors.push_back(reals::beatty_floor_range(specs[1], 1, N));

    double inv_p_sum = 0;
    for (auto p : P) inv_p_sum += 1.0 / static_cast<double>(p);

    for (std::size_t l1 = 0; l1 <= 4; ++l1) {
        for (std::size_t l2 = 0; l1 + l2 <= 4; ++l2) {
            const std::size_t l = l1 + l2;
            if (l == 0) continue;

            // left side: empirical moment of the centered restricted counts
            double lhs = 0;
            for (std::uint64_t n = 1; n <= N; ++n) {
                double w[2] = {0, 0};
                for (int i = 0; i < 2; ++i) {
                    double cnt = 0;
                    for (auto p : P)
                        if (floors[static_cast<std::size_t>(i)][n - 1] %
                                static_cast<std::int64_t>(p) ==
                            0)
                            cnt += 1;
                    w[i] = cnt - inv_p_sum;
                }
                lhs += std::pow(w[0], static_cast<double>(l1)) *
                       std::pow(w[1], static_cast<double>(l2));
            }
            lhs /= static_cast<double>(N);

            // right side: sum of E_direct over every assignment of primes
            Rat rhs = 0;
            std::vector<std::size_t> digits(l, 0);
            for (;;) {
                PrimeTuple t;
                t.entries.assign(2, {});
                for (std::size_t j = 0; j < l1; ++j) t.entries[0].push_back(P[digits[j]]);
                for (std::size_t j = 0; j < l2; ++j) t.entries[1].push_back(P[digits[l1 + j]]);
                rhs += E_direct_from_floors(t, floors);
                std::size_t pos = 0;
                for (; pos < l; ++pos) {
                    if (++digits[pos] < 3) break;
                    digits[pos] = 0;
                }
                if (pos == l) break;
            }
            REQUIRE(std::abs(lhs - rhs.get_d()) < 1e-9);
        }
    }
}

TEST_CASE("E_restricted_sum: type C vanishes, positivity, truncation growth") {
    qlinalg::GammaVector gone;
    gone.gammas = {Rat(1)};

    // singleton prime kills the constrained sum outright
    std::mt19937_64 rng(17);
    const std::uint64_t pool[4] = {5, 11, 13, 17};
    for (int trial = 0; trial < 12; ++trial) {
        // build a type C tuple: one singleton prime plus a doubled one
        const std::uint64_t lone = pool[rng() % 4];
        std::uint64_t twin = pool[rng() % 4];
        while (twin == lone) twin = pool[rng() % 4];
        PrimeTuple t;
        if (trial % 2) {
            t.entries = {{lone, twin, twin}};
            REQUIRE(classify_tuple(t) == TupleType::C);
            const auto r = E_restricted_sum(t, gone, 20, RestrictedVariant::triple_ac);
            REQUIRE(r.value == 0);
        } else {
            // numerators and denominators must avoid the tuple primes, or the
            // congruence coefficient degenerates and the sum comes back alive
            qlinalg::GammaVector gtwo;
            gtwo.gammas = {make_rat(9, 7), make_rat(3, 2)};
            PrimeTuple t2;
            t2.entries = {{lone}, {twin, twin}};
            REQUIRE(classify_tuple(t2) == TupleType::C);
            const auto r = E_restricted_sum(t2, gtwo, 20, RestrictedVariant::triple_ac);
            REQUIRE(r.value == 0);
        }
    }

    // doubled prime: positive, increasing in the truncation height
    const PrimeTuple five2 = tuple1({5, 5});
    const auto r10 = E_restricted_sum(five2, gone, 10, RestrictedVariant::triple_ac);
    const auto r100 = E_restricted_sum(five2, gone, 100, RestrictedVariant::triple_ac);
    CHECK(r10.value > 0);
    CHECK(r100.value > r10.value);
    CHECK(r100.value < 1.0);
    CHECK(r100.tail_bound < r10.tail_bound);
    CHECK(r10.tail_bound > 0);

    // two coordinates tied by gamma = (1,2): solutions exist
    PrimeTuple cross;
    cross.entries = {{5}, {5}};
    qlinalg::GammaVector g12;
    g12.gammas = {Rat(1), Rat(2)};
    const auto rc = E_restricted_sum(cross, g12, 50, RestrictedVariant::triple_ac);
    CHECK(rc.value > 0);

    // prime_bd variant on the same doubled tuple also converges to something positive
    const auto rb = E_restricted_sum(five2, gone, 100, RestrictedVariant::prime_bd);
    CHECK(rb.value > 0);

    // empty tuple: vacuous constraint
    PrimeTuple empty;
    empty.entries = {{}};
    CHECK(E_restricted_sum(empty, gone, 10, RestrictedVariant::prime_bd).value == 1.0);

    CHECK_THROWS_AS(E_restricted_sum(five2, gone, 10000001, RestrictedVariant::prime_bd),
                    budget_error);
    qlinalg::GammaVector gmis;
    gmis.gammas = {Rat(1), Rat(2)};
    CHECK_THROWS_AS(E_restricted_sum(five2, gmis, 10, RestrictedVariant::prime_bd),
                    validation_error);
}

TEST_CASE("schedule defaults") {
    const auto s = Schedule::defaults(1000000);
    CHECK(s.L == 3);
    CHECK(s.J == 64);
    CHECK(s.R == 193);
    CHECK(s.T == 2);
    CHECK(s.epsilon == make_rat(1, 8));
    CHECK(s.width == 1000);
    CHECK(s.intervals == 1000);

    // the 64 floor dominates N^(1/25) for any representable N
    const auto big = Schedule::defaults(100000000000ull); // 1e11
    CHECK(big.J == 64);
    CHECK(big.width == 316227);
}
