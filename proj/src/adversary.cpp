#include "eklab/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "eklab/arith.hpp"
#include "eklab/errors.hpp"
#include "eklab/parallel.hpp"
#include "eklab/stats.hpp"

namespace eklab::adversary {
namespace {

Int int_pow(const Int& base, unsigned e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

// floor(v^(1/e)) for v >= 0
Int root_floor(const Int& v, unsigned e) {
    Int r;
    mpz_root(r.get_mpz_t(), v.get_mpz_t(), e);
    return r;
}

Int int_gcd(const Int& a, const Int& b) {
    Int r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

Int int_of_u64(std::uint64_t v) {
    return Int(static_cast<unsigned long>(v));
}

std::uint64_t u64_of(const Int& v) { return to_u64(v, "schedule value"); }

void validate_relaxation(const AdversaryRelaxation& r) {
    if (!(r.growth_coeff > 0) || !std::isfinite(r.growth_coeff))
        throw validation_error("relaxation: growth_coeff must be positive and finite");
    if (!(r.growth_exp > 0) || !std::isfinite(r.growth_exp))
        throw validation_error("relaxation: growth_exp must be positive and finite");
    if (!(r.eta_coeff >= 0) || !std::isfinite(r.eta_coeff))
        throw validation_error("relaxation: eta_coeff must be nonnegative and finite");
    if (!(r.omega_threshold > 0) || !(r.omega_threshold <= 1))
        throw validation_error("relaxation: omega_threshold must lie in (0, 1]");
    if (!(r.omega_fail_mass > 0) || !(r.omega_fail_mass < 1))
        throw validation_error("relaxation: omega_fail_mass must lie in (0, 1)");
    if (r.a_min < 2) throw validation_error("relaxation: a_min must be at least 2");
    if (r.verify_limit < 4096)
        throw validation_error("relaxation: verify_limit below 4096 leaves no room to search");
}

// Omega table over [1, hi) grown in doubling blocks so a scan that stops at N
// only ever sieves O(N) values.
struct GrowTable {
    std::vector<std::uint8_t> om; // om[v-1] = omega(v)
    std::uint64_t hi = 1;         // exclusive

    void ensure(std::uint64_t need) {
        if (need <= hi) return;
        std::uint64_t next = std::max<std::uint64_t>(hi * 2, std::uint64_t(1) << 16);
        while (next < need) next *= 2;
        arith::FactorTable t = arith::omega_range(hi, next);
        om.insert(om.end(), t.omega.begin(), t.omega.end());
        hi = next;
    }
    std::uint8_t operator()(std::uint64_t v) const { return om[v - 1]; }
};

int quantile_cut(double theta, std::uint64_t N) {
    return static_cast<int>(std::floor(theta * std::log(std::log(static_cast<double>(N)))));
}

// Smallest admissible N_{m+1} for the transition after `prev`, by exact count
// scan; appends the new level or throws budget_error naming what failed.
void append_level(AdversarySchedule& sched) {
    const AdversaryRelaxation& rx = sched.relaxation;
    const AdversaryLevel& prev = sched.levels.back();
    const unsigned d = sched.d;
    const auto m = static_cast<unsigned long>(sched.levels.size());

    if (!fits_u64(prev.b) || u64_of(prev.b) > rx.verify_limit)
        throw budget_error("construct_sequence: b_" + std::to_string(m) +
                           " exceeds the verification budget, no admissible n remains");
    const std::uint64_t b = u64_of(prev.b);
    const double lim = static_cast<double>(rx.verify_limit);

    // conditions (1) and (2) are monotone in N, so they fix the scan's start
    const double rhs1 = rx.growth_coeff * std::pow(static_cast<double>(b), rx.growth_exp);
    if (!(rhs1 <= std::log(lim)))
        throw budget_error("construct_sequence: growth condition wants log N > log(verify_limit) at level " +
                           std::to_string(m + 1));
    const double rhs2 = rx.eta_coeff * static_cast<double>(m) * static_cast<double>(b);
    if (!(rhs2 <= std::log(std::log(lim))))
        throw budget_error("construct_sequence: eta condition wants log log N > log log(verify_limit) at level " +
                           std::to_string(m + 1));

    std::uint64_t start = 16;
    start = std::max(start, b); // M = floor(N/b) >= 1
    // both exponentials stay below verify_limit by the checks above
    start = std::max(start, static_cast<std::uint64_t>(std::ceil(std::exp(rhs1))));
    start = std::max(start, static_cast<std::uint64_t>(std::ceil(std::exp(std::exp(rhs2)))));
    while (start <= rx.verify_limit &&
           (std::log(static_cast<double>(start)) < rhs1 ||
            std::log(std::log(static_cast<double>(start))) < rhs2))
        ++start;

    // keep the sequence at least doubling: a_{m+1} = (2N)^d >= 2 a_m, which is
    // what certifies the series tail bound 2/a_{m+1}
    {
        Int two_am = prev.a * 2;
        Int rt = root_floor(two_am, d);
        if (int_pow(rt, d) < two_am) rt += 1;
        Int n_geo = (rt + 1) / 2;
        if (!fits_u64(n_geo) || u64_of(n_geo) > rx.verify_limit)
            throw budget_error("construct_sequence: doubling a_{m+1} >= 2 a_m needs N beyond verify_limit");
        start = std::max(start, u64_of(n_geo));
    }
    if (start > rx.verify_limit)
        throw budget_error("construct_sequence: admissible window is empty below verify_limit");

    GrowTable tab;
    tab.ensure(start + 1);
    std::uint64_t M = start / b;
    int cut = quantile_cut(rx.omega_threshold, start);
    std::uint64_t c3 = 0, c4 = 0;
    auto recount = [&] {
        c3 = c4 = 0;
        for (std::uint64_t n = 1; n <= M; ++n) {
            c3 += tab(n) <= cut;
            c4 += tab(b * n - 1) <= cut;
        }
    };
    recount();

    const char* last_fail = "empty admissible range";
    for (std::uint64_t N = start; N <= rx.verify_limit; ++N) {
        tab.ensure(N + 1);
        const std::uint64_t want = N / b;
        while (M < want) {
            ++M;
            c3 += tab(M) <= cut;
            c4 += tab(b * M - 1) <= cut;
        }
        const int want_cut = quantile_cut(rx.omega_threshold, N);
        if (want_cut != cut) {
            cut = want_cut;
            recount();
        }
        const double cap = rx.omega_fail_mass * static_cast<double>(M);
        if (static_cast<double>(c3) > cap) {
            last_fail = "omega(n) quantile condition";
            continue;
        }
        if (static_cast<double>(c4) > cap) {
            last_fail = "omega(b_m n - 1) quantile condition";
            continue;
        }

        AdversaryLevel lvl;
        lvl.a = int_pow(int_of_u64(2 * N), d); // smallest a with floor(a^(1/d)/2) = N
        lvl.b = prev.b * lvl.a;
        lvl.N = N;
        lvl.alpha = prev.alpha + make_rat(1, lvl.a);
        sched.levels.push_back(std::move(lvl));
        return;
    }
    throw budget_error(std::string("construct_sequence: no admissible N_{m+1} <= verify_limit; last failure: ") +
                       last_fail);
}

void validate_level_index(const AdversarySchedule& sched, unsigned m, const char* who) {
    if (sched.d < 2) throw validation_error(std::string(who) + ": schedule degree must be at least 2");
    if (m < 1 || m >= sched.levels.size())
        throw validation_error(std::string(who) + ": level m must satisfy 1 <= m < levels (the check reads level m+1)");
}

} // namespace

Rat AdversarySchedule::tail_upper() const {
    if (levels.empty()) throw validation_error("tail_upper: empty schedule");
    const AdversaryLevel& last = levels.back();
    // a_{L+1} >= 2 a_L and later terms at least double, so the tail is a
    // geometric series below 2/a_{L+1} <= 1/a_L
    Rat bound = make_rat(1, last.a);
    // the growth condition sharpens this: N_{L+1} >= e^rhs >= 2^k gives
    // a_{L+1} >= (2 * 2^k)^d; cap the exponent so the bound stays small to
    // write down (a weaker bound is still a bound)
    const double rhs = relaxation.growth_coeff *
                       std::pow(last.b.get_d(), relaxation.growth_exp);
    const double k = std::floor(std::min(rhs, 250.0) * 1.4426950408889634);
    if (k >= 1) {
        const long bits = static_cast<long>(d) * (static_cast<long>(k) + 1);
        Rat alt = pow2_rat(1 - bits);
        if (alt < bound) bound = alt;
    }
    return bound;
}

AdversarySchedule construct_sequence(unsigned d, unsigned levels,
                                     const AdversaryRelaxation& relax) {
    if (d < 2 || d > 16)
        throw validation_error("construct_sequence: degree d must lie in [2, 16]");
    if (levels < 1) throw validation_error("construct_sequence: need at least one level");
    validate_relaxation(relax);

    AdversarySchedule sched;
    sched.d = d;
    sched.relaxation = relax;

    AdversaryLevel first;
    first.a = int_of_u64(relax.a_min);
    first.b = first.a;
    first.N = u64_of(root_floor(first.a, d) / 2);
    first.alpha = make_rat(1, first.a);
    sched.levels.push_back(std::move(first));

    for (unsigned m = 1; m < levels; ++m) append_level(sched);
    return sched;
}

CollapseReport collapse_check(const AdversarySchedule& sched, unsigned m) {
    validate_level_index(sched, m, "collapse_check");
    const AdversaryLevel& cur = sched.levels[m - 1];
    const AdversaryLevel& nxt = sched.levels[m];
    const unsigned d = sched.d;

    // alpha - alpha_m lies in (gap, gap + tail]: gap exactly, tail certified
    const Rat gap = sched.levels.back().alpha - cur.alpha;
    const Rat tail = sched.tail_upper();
    const Rat hi = gap + tail;

    Int Mz = int_of_u64(nxt.N) / cur.b;
    if (sgn(Mz) <= 0)
        throw validation_error("collapse_check: N_{m+1} < b_m leaves no admissible n");
    const std::uint64_t M = u64_of(Mz);

    // g(x) = (x-1) x^(d-1) increases on x >= 1, so containment at n = M
    // certifies (alpha - alpha_m) g(b_m n) in [0, 1) for every n in [1, M]
    const Int bM = cur.b * Mz;
    const Int g_top = (bM - 1) * int_pow(bM, d - 1);
    const Rat top = hi * Rat(g_top);
    if (!(top < 1))
        throw error("collapse_check: (alpha - alpha_m) g(b_m n) reaches 1 at n = " + std::to_string(M) +
                    ", the floor collapse is not certified");

    if (!fits_u64(bM))
        throw budget_error("collapse_check: b_m * M exceeds 64 bits, omega table is out of reach");
    const std::uint64_t bMu = u64_of(bM);
    const arith::FactorTable tab = arith::omega_range(1, bMu);

    // collapsed value factors as K n^(d-1) (b_m n - 1) with K = alpha_m b_m^(d-1)
    const Rat Kr = cur.alpha * Rat(int_pow(cur.b, d - 1));
    if (rat_den(Kr) != 1)
        throw error("collapse_check: alpha_m b_m^(d-1) is not an integer");
    const Int K = rat_num(Kr);
    const std::vector<std::uint64_t> kprimes = arith::factor_distinct(K);

    struct Hit {
        std::uint64_t n = 0; // 0 = clean
        const char* what = nullptr;
    };
    const Hit hit = chunked_reduce<Hit>(
        M, 1u << 12, Hit{},
        [&](std::uint64_t lo, std::uint64_t hi_ex) {
            Hit h;
            for (std::uint64_t i = lo; i < hi_ex && h.n == 0; ++i) {
                const std::uint64_t n = i + 1;
                const Int bn = cur.b * int_of_u64(n);
                const Int bn1 = bn - 1;
                const Int g = bn1 * int_pow(bn, d - 1);
                const Rat Fr = cur.alpha * Rat(g);
                if (rat_den(Fr) != 1) {
                    h = {n, "collapsed value is not an integer"};
                    break;
                }
                const Int F = rat_num(Fr);
                if (F != K * int_pow(int_of_u64(n), d - 1) * bn1) {
                    h = {n, "collapsed value does not factor as K n^(d-1) (b_m n - 1)"};
                    break;
                }
                if (F % (int_of_u64(n) * bn1) != 0) {
                    h = {n, "n (b_m n - 1) does not divide the collapsed value"};
                    break;
                }
                if (int_gcd(int_of_u64(n), bn1) != 1) {
                    h = {n, "n and b_m n - 1 share a prime"};
                    break;
                }
                // with the two factors coprime, omega adds across
                // K n^(d-1) (b_m n - 1) up to K's primes already present
                const unsigned w_n = tab.omega_at(n);
                const unsigned w_b = tab.omega_at(u64_of(bn1));
                unsigned extra = 0;
                for (std::uint64_t p : kprimes) {
                    const auto pu = static_cast<unsigned long>(p);
                    if (n % pu != 0 && mpz_divisible_ui_p(bn1.get_mpz_t(), pu) == 0) ++extra;
                }
                if (w_n + w_b + extra < w_n + w_b) h = {n, "omega superadditivity fails"};
            }
            return h;
        },
        [](Hit& acc, Hit&& part) {
            if (part.n != 0 && (acc.n == 0 || part.n < acc.n)) acc = part;
        });
    if (hit.n != 0)
        throw error("collapse_check: " + std::string(hit.what) + " at n = " + std::to_string(hit.n));

    return CollapseReport{M, Rat(1) - top};
}

AdversaryExperiment adversary_experiment(const AdversarySchedule& sched, unsigned m) {
    validate_level_index(sched, m, "adversary_experiment");
    const AdversaryLevel& cur = sched.levels[m - 1];
    const AdversaryLevel& nxt = sched.levels[m];
    const unsigned d = sched.d;
    const std::uint64_t N = nxt.N;
    if (N < 16) throw validation_error("adversary_experiment: N_{m+1} must be at least 16");

    const Rat base = sched.levels.back().alpha; // alpha <= base + tail, certified
    const Rat tail = sched.tail_upper();

    const Int gN = int_of_u64(N - 1) * int_pow(int_of_u64(N), d - 1);
    const Int fmax = rat_floor((base + tail) * Rat(gN)) + 1;
    if (!fits_u64(fmax))
        throw budget_error("adversary_experiment: floor f(N) exceeds 64 bits, shrink the schedule");
    const std::vector<std::uint64_t> primes =
        arith::sieve_primes(arith::floor_sqrt(u64_of(fmax)) + 1);

    // omega of the certified floor of f(n) = alpha (n-1) n^(d-1)
    std::vector<std::uint8_t> om(N);
    parallel_fill(N, [&](std::uint64_t i) {
        const std::uint64_t n = i + 1;
        const Int g = int_of_u64(n - 1) * int_pow(int_of_u64(n), d - 1);
        const Rat A = base * Rat(g);
        const Int fl = rat_floor(A);
        // alpha g(n) lies in [A, A + tail g); the floor is fl iff that
        // interval stays inside [fl, fl + 1)
        if (!(A - Rat(fl) + tail * Rat(g) < 1))
            throw precision_error("adversary_experiment: cannot certify floor f(n) at n = " +
                                  std::to_string(n));
        std::uint64_t v = u64_of(fl);
        unsigned w = 0;
        for (std::uint64_t p : primes) {
            if (p * p > v) break;
            if (v % p == 0) {
                ++w;
                do v /= p;
                while (v % p == 0);
            }
        }
        if (v > 1) ++w;
        om[i] = static_cast<std::uint8_t>(w);
    });

    const double ll = std::log(std::log(static_cast<double>(N)));
    const double cutoff = 1.8 * ll; // z >= 0.8 sqrt(ll) in raw omega units

    // The mass-shift argument lives in the canonical standardization
    // (omega - log log N) / sqrt(log log N); the d_K it bounds must use
    // the same affine map, so the sample is built directly rather than
    // through stats::standardize.
    stats::StandardizedSample sample;
    sample.k = 1;
    sample.N = N;
    sample.center = {ll};
    sample.scale = {std::sqrt(ll)};
    sample.values.reserve(N);
    std::uint64_t c_full = 0;
    for (std::uint64_t i = 0; i < N; ++i) {
        sample.values.push_back({(static_cast<double>(om[i]) - ll) / sample.scale[0]});
        if (om[i] >= cutoff) ++c_full;
    }

    if (!fits_u64(cur.b) || u64_of(cur.b) > N)
        throw validation_error("adversary_experiment: N_{m+1} < b_m leaves no collapse rows");
    const std::uint64_t b = u64_of(cur.b);
    const std::uint64_t M = N / b;
    std::uint64_t c_sub = 0;
    for (std::uint64_t k = 1; k <= M; ++k)
        if (om[b * k - 1] >= cutoff) ++c_sub;

    AdversaryExperiment out;
    out.empirical_dk = stats::empirical_dK(sample);
    out.mass_shift = static_cast<double>(c_full) / static_cast<double>(N);
    out.gaussian_tail = 1.0 - stats::gaussian_cdf(0.8 * std::sqrt(ll));
    out.bound = out.mass_shift - out.gaussian_tail;
    out.subsample_mass = static_cast<double>(c_sub) / static_cast<double>(M);
    out.threshold_count = c_full;
    out.subsample_count = c_sub;
    return out;
}

} // namespace eklab::adversary
