#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eklab/rat.hpp"

namespace eklab::reals {

struct Interval {
    Rat lo, hi;
    Rat width() const { return hi - lo; }
};

// Exact element of Q adjoined with square roots: q0 + sum_i qi * sqrt(di),
// the di distinct squarefree integers >= 2 and the qi nonzero.  Linear
// independence of {1, sqrt(d1), sqrt(d2), ...} over Q makes zero-testing a
// representation check, so signs and floors are always decidable; the
// refinement ladder below is a precision policy, not a correctness hedge.
class SurdSum {
public:
    SurdSum() = default;
    explicit SurdSum(Rat q) : q0_(std::move(q)) {}

    // sqrt(d) for d >= 0 with the square part extracted exactly.
    static SurdSum sqrt_of(const Int& d);

    SurdSum& operator+=(const SurdSum& o);
    SurdSum& operator-=(const SurdSum& o);
    SurdSum& operator*=(const Rat& c);
    friend SurdSum operator+(SurdSum a, const SurdSum& b) { return a += b; }
    friend SurdSum operator-(SurdSum a, const SurdSum& b) { return a -= b; }
    friend SurdSum operator*(SurdSum a, const Rat& c) { return a *= c; }
    SurdSum operator-() const;
    SurdSum operator*(const SurdSum& o) const;

    // Exact reciprocal (repeated conjugation); throws validation_error on zero.
    SurdSum inverse() const;

    bool is_zero() const { return terms_.empty() && q0_ == 0; }
    bool is_rational() const { return terms_.empty(); }
    bool is_integer() const { return terms_.empty() && q0_.get_den() == 1; }
    const Rat& rational_part() const { return q0_; }
    std::size_t surd_count() const { return terms_.size(); }

    // When the value is q0 + q1*sqrt(d) (at most one surd), exposes the parts.
    bool single_surd(Rat& q0, Rat& q1, Int& d) const;

    int sign() const;                 // exact
    Int floor() const;                // exact; closed form for <= 1 surd
    Interval refine(unsigned k) const; // width <= 2^-k, nested across k

    std::string str() const;

private:
    Rat q0_;
    std::vector<std::pair<Int, Rat>> terms_; // (squarefree d >= 2, coeff != 0), ascending d
    void add_term(const Int& d, const Rat& c);
};

// A real number certified by kind: exact rationals, exact quadratic surds,
// or a decimal digit string denoting a truncated expansion (the represented
// real lies in [value, value + 10^-digits], mirrored for negatives).
class CertifiedReal {
public:
    enum class Kind { rational, quadratic, decimal };

    static CertifiedReal rational(Rat v);
    // (p + q*sqrt(d)) / r
    static CertifiedReal quadratic(const Rat& p, const Rat& q, const Rat& r, const Int& d);
    static CertifiedReal decimal(std::string_view digits);

    // Textual forms: rational:22/7  sqrt:2  quadratic:(1+2*sqrt:3)/5  decimal:3.14159
    static CertifiedReal parse(std::string_view text);

    Kind kind() const { return kind_; }
    bool exact() const { return kind_ != Kind::decimal; }

    // Interval of width <= 2^-k containing the value, nested across k.
    // Decimal kind throws precision_error (with a digits hint) when the
    // written digits cannot reach width 2^-k.
    Interval refine(unsigned k) const;

    const SurdSum& surd() const; // exact kinds only
    const Rat& dec_lo() const { return dec_lo_; }
    const Rat& dec_width() const { return dec_width_; }
    int dec_digits() const { return dec_digits_; }

    std::string str() const;

private:
    Kind kind_ = Kind::rational;
    SurdSum exact_;
    Rat dec_lo_, dec_width_;
    int dec_digits_ = 0;
    std::string dec_text_;

    struct Cache;
    std::shared_ptr<Cache> cache_;
};

struct BeattySpec {
    CertifiedReal alpha;
    CertifiedReal beta;

    BeattySpec(CertifiedReal a, CertifiedReal b);
    static BeattySpec parse(std::string_view alpha_text, std::string_view beta_text);
};

// Decomposition of alpha*n + beta into an exact surd part plus the interval
// contributed by decimal kinds (empty when both kinds are exact).  The true
// value lies in [exact + ilo, exact + ihi].
struct EvalParts {
    SurdSum exact;
    Rat ilo, ihi;
    bool has_interval = false;
};
EvalParts beatty_parts(const BeattySpec& spec, std::uint64_t n);

// Certified floor of the decomposed value; n only labels the error message.
Int floor_of_parts(const EvalParts& parts, std::uint64_t n);

// Exactly floor(alpha*n + beta).  Integrality is decided symbolically for
// exact kinds; a decimal part too coarse to separate the value from an
// integer raises an ambiguous-floor precision_error naming n and the integer.
Int beatty_floor(const BeattySpec& spec, std::uint64_t n);

// floor(alpha*n + beta) for n in [n_lo, n_hi], as int64 (validated to fit).
// OpenMP-parallel with disjoint writes; identical for any thread count.
std::vector<std::int64_t> beatty_floor_range(const BeattySpec& spec, std::uint64_t n_lo,
                                             std::uint64_t n_hi, int threads = 0);

// The reduced fraction a/b with max(|a|, b) <= h closest to x; ties break
// toward smaller denominator, then smaller |a|.
Rat best_rational_of_height(const CertifiedReal& x, const Int& h);

std::vector<Rat> continued_fraction_convergents(const CertifiedReal& x, int count);

struct ArcClassification {
    bool major = false;
    Int a, b; // meaningful when major; gcd(a,b)=1, 1 <= b <= T
};

// Major if some reduced a/b with b <= T has |x - a/b| <= N^(-1/3) (boundary
// inclusive, decided exactly by cubing); ambiguity_error when two centers hit.
ArcClassification classify_arc(const CertifiedReal& x, const Int& T, std::uint64_t N);

} // namespace eklab::reals
