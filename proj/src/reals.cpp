#include "eklab/reals.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <mutex>
#include <set>

#include "eklab/errors.hpp"
#include "eklab/parallel.hpp"

namespace eklab::reals {

namespace {

Int isqrt(const Int& n) { return sqrt(n); } // gmp floor sqrt

Int pow2_int(unsigned k) {
    Int r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, k);
    return r;
}

Int fdiv(const Int& a, const Int& b) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

Rat rat_of(const Int& num, const Int& den) { return make_rat(num, den); }

} // namespace

// ---------------------------------------------------------------------------
// SurdSum

void SurdSum::add_term(const Int& d, const Rat& c) {
    if (c == 0) return;
    auto it = std::lower_bound(terms_.begin(), terms_.end(), d,
                               [](const auto& t, const Int& key) { return t.first < key; });
    if (it != terms_.end() && it->first == d) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    } else {
        terms_.insert(it, {d, c});
    }
}

SurdSum SurdSum::sqrt_of(const Int& d) {
    if (d < 0) throw validation_error("negative radicand " + d.get_str());
    if (d == 0) return SurdSum{};
    // split d = outer^2 * core with core squarefree
    Int n = d, outer = 1, core = 1;
    auto strip = [&](unsigned long p) {
        unsigned e = 0;
        while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
            mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
            ++e;
        }
        for (unsigned i = 0; i + 1 < e; i += 2) outer *= static_cast<long>(p);
        if (e & 1u) core *= static_cast<long>(p);
    };
    strip(2);
    for (unsigned long p = 3; p <= 1000000 && Int(p) * p <= n; p += 2) strip(p);
    if (n > 1) {
        if (mpz_perfect_square_p(n.get_mpz_t())) {
            outer *= isqrt(n);
        } else if (n <= Int("1000000000000")) {
            core *= n; // no factor <= 1e6 and below 1e12: prime
        } else {
            throw budget_error("cannot certify squarefree part of radicand " + d.get_str());
        }
    }
    SurdSum r;
    if (core == 1) {
        r.q0_ = Rat(outer);
    } else {
        r.add_term(core, Rat(outer));
    }
    return r;
}

SurdSum& SurdSum::operator+=(const SurdSum& o) {
    q0_ += o.q0_;
    for (const auto& [d, c] : o.terms_) add_term(d, c);
    return *this;
}

SurdSum& SurdSum::operator-=(const SurdSum& o) {
    q0_ -= o.q0_;
    for (const auto& [d, c] : o.terms_) add_term(d, -c);
    return *this;
}

SurdSum& SurdSum::operator*=(const Rat& c) {
    if (c == 0) {
        q0_ = 0;
        terms_.clear();
        return *this;
    }
    q0_ *= c;
    for (auto& [d, q] : terms_) q *= c;
    return *this;
}

SurdSum SurdSum::operator-() const {
    SurdSum r = *this;
    r *= Rat(-1);
    return r;
}

SurdSum SurdSum::operator*(const SurdSum& o) const {
    SurdSum r;
    r.q0_ = q0_ * o.q0_;
    for (const auto& [d, c] : terms_) r.add_term(d, c * o.q0_);
    for (const auto& [e, f] : o.terms_) r.add_term(e, q0_ * f);
    for (const auto& [d, c] : terms_) {
        for (const auto& [e, f] : o.terms_) {
            // sqrt(d)*sqrt(e) = g*sqrt(u*v) with d=g*u, e=g*v; u*v stays
            // squarefree because a shared prime of u,v would square into d
            Int g = gcd(d, e);
            Int m = (d / g) * (e / g);
            Rat coeff = c * f * Rat(g);
            if (m == 1) {
                r.q0_ += coeff;
            } else {
                r.add_term(m, coeff);
            }
        }
    }
    return r;
}

SurdSum SurdSum::inverse() const {
    if (terms_.empty()) {
        if (q0_ == 0) throw validation_error("division by zero in surd arithmetic");
        Rat r = 1 / q0_;
        return SurdSum(r);
    }
    // split off one prime pi of a radicand: value = A + sqrt(pi)*B where the
    // radicands of A and B avoid pi, then invert by conjugation; the radicand
    // prime support shrinks each level, so the recursion grounds out
    const Int& d0 = terms_.front().first;
    Int pi = 0;
    if (mpz_divisible_ui_p(d0.get_mpz_t(), 2)) {
        pi = 2;
    } else {
        for (Int p = 3;; p += 2) {
            if (mpz_divisible_p(d0.get_mpz_t(), p.get_mpz_t())) {
                pi = p;
                break;
            }
            if (p * p > d0) {
                pi = d0;
                break;
            }
        }
    }
    SurdSum A, B;
    A.q0_ = q0_;
    for (const auto& [d, c] : terms_) {
        if (mpz_divisible_p(d.get_mpz_t(), pi.get_mpz_t())) {
            Int e = d / pi;
            if (e == 1) {
                B.q0_ += c;
            } else {
                B.add_term(e, c);
            }
        } else {
            A.add_term(d, c);
        }
    }
    SurdSum denom = A * A - (B * B) * Rat(pi);
    SurdSum dinv = denom.inverse();
    SurdSum num = A - sqrt_of(pi) * B;
    return num * dinv;
}

bool SurdSum::single_surd(Rat& q0, Rat& q1, Int& d) const {
    if (terms_.size() != 1) return false;
    q0 = q0_;
    d = terms_.front().first;
    q1 = terms_.front().second;
    return true;
}

Interval SurdSum::refine(unsigned k) const {
    if (terms_.empty()) return {q0_, q0_};
    Rat bound = 0;
    for (const auto& [d, c] : terms_) bound += abs(c);
    Int bc = rat_ceil(bound);
    unsigned margin = static_cast<unsigned>(mpz_sizeinbase(bc.get_mpz_t(), 2)) + 1;
    unsigned m = k + margin;
    Int den = pow2_int(m);
    Rat lo = q0_, hi = q0_;
    for (const auto& [d, c] : terms_) {
        Int s = isqrt(d << (2 * m)); // s/2^m <= sqrt(d) < (s+1)/2^m
        Rat slo = rat_of(s, den), shi = rat_of(s + 1, den);
        if (c > 0) {
            lo += c * slo;
            hi += c * shi;
        } else {
            lo += c * shi;
            hi += c * slo;
        }
    }
    return {lo, hi};
}

int SurdSum::sign() const {
    if (terms_.empty()) return sgn(q0_);
    if (terms_.size() == 1) {
        const Rat& q1 = terms_.front().second;
        if (q0_ == 0) return sgn(q1);
        if (sgn(q0_) == sgn(q1)) return sgn(q0_);
        // q0 and q1*sqrt(d) oppose: larger square wins (equality would make
        // sqrt(d) rational)
        int c = cmp(q0_ * q0_, q1 * q1 * Rat(terms_.front().first));
        return c >= 0 ? sgn(q0_) : sgn(q1);
    }
    for (unsigned k = 64; k <= 65536; k *= 2) {
        Interval iv = refine(k);
        if (iv.lo > 0) return 1;
        if (iv.hi < 0) return -1;
    }
    throw precision_error("sign of surd sum undecided at 65536 bits");
}

Int SurdSum::floor() const {
    if (terms_.empty()) return rat_floor(q0_);
    if (terms_.size() == 1) {
        const Int& d = terms_.front().first;
        const Rat& q1 = terms_.front().second;
        Int m = lcm(q0_.get_den(), q1.get_den());
        Int a = q0_.get_num() * (m / q0_.get_den());
        Int b = q1.get_num() * (m / q1.get_den());
        Int r = isqrt(b * b * d);
        // d squarefree >= 2 and b != 0, so b*b*d is never a square and
        // floor(b*sqrt(d)) is r for b > 0 and -r-1 for b < 0
        Int fb = (b > 0) ? r : -r - 1;
        return fdiv(a + fb, m);
    }
    for (unsigned k = 64; k <= 65536; k *= 2) {
        Interval iv = refine(k);
        Int f1 = rat_floor(iv.lo), f2 = rat_floor(iv.hi);
        if (f1 == f2) return f1;
    }
    throw precision_error("floor of surd sum undecided at 65536 bits");
}

std::string SurdSum::str() const {
    std::string s = rat_str(q0_);
    for (const auto& [d, c] : terms_) {
        s += " + (" + rat_str(c) + ")*sqrt(" + d.get_str() + ")";
    }
    return s;
}

// ---------------------------------------------------------------------------
// CertifiedReal

struct CertifiedReal::Cache {
    std::mutex mu;
    bool filled = false; // k=0 is a valid request, so emptiness needs its own flag
    unsigned k = 0;
    Interval iv;
};

CertifiedReal CertifiedReal::rational(Rat v) {
    CertifiedReal r;
    r.kind_ = Kind::rational;
    r.exact_ = SurdSum(std::move(v));
    return r;
}

CertifiedReal CertifiedReal::quadratic(const Rat& p, const Rat& q, const Rat& r, const Int& d) {
    if (r == 0) throw validation_error("zero denominator in quadratic real");
    CertifiedReal c;
    c.exact_ = (SurdSum(p) + SurdSum::sqrt_of(d) * q) * (1 / r);
    // a square radicand collapses to the rational kind
    c.kind_ = c.exact_.is_rational() ? Kind::rational : Kind::quadratic;
    if (c.kind_ == Kind::quadratic) c.cache_ = std::make_shared<Cache>();
    return c;
}

CertifiedReal CertifiedReal::decimal(std::string_view digits) {
    auto bad = [&](const char* why) {
        throw validation_error(std::string("cannot parse decimal literal '") +
                               std::string(digits) + "': " + why);
    };
    std::string_view s = digits;
    bool neg = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        neg = (s[0] == '-');
        s.remove_prefix(1);
    }
    if (s.empty()) bad("no digits");
    if (s.size() > 10000) bad("more than 10000 characters");
    std::string int_part, frac_part;
    std::size_t dot = s.find('.');
    if (dot == std::string_view::npos) {
        int_part = std::string(s);
    } else {
        int_part = std::string(s.substr(0, dot));
        frac_part = std::string(s.substr(dot + 1));
        if (frac_part.empty()) bad("trailing decimal point");
        if (frac_part.find('.') != std::string::npos) bad("repeated decimal point");
    }
    if (int_part.empty()) bad("missing integer part");
    auto all_digits = [](const std::string& t) {
        return std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); });
    };
    if (!all_digits(int_part) || !all_digits(frac_part)) bad("non-digit character");

    CertifiedReal r;
    r.kind_ = Kind::decimal;
    r.dec_digits_ = static_cast<int>(frac_part.size());
    Int scale = pow10_int(static_cast<unsigned>(frac_part.size()));
    Int mantissa(int_part + frac_part);
    Rat v = rat_of(mantissa, scale);
    if (neg) v = -v;
    Rat ulp = rat_of(1, scale);
    // value written by truncation: the real lies between v and one last-digit
    // step away from zero
    r.dec_lo_ = neg ? v - ulp : v;
    r.dec_width_ = ulp;
    r.dec_text_ = (neg ? "-" : "") + int_part + (frac_part.empty() ? "" : "." + frac_part);
    return r;
}

const SurdSum& CertifiedReal::surd() const {
    if (kind_ == Kind::decimal) throw validation_error("decimal real has no exact surd form");
    return exact_;
}

Interval CertifiedReal::refine(unsigned k) const {
    if (kind_ == Kind::rational) {
        const Rat& v = exact_.rational_part();
        return {v, v};
    }
    if (kind_ == Kind::decimal) {
        Rat target = pow2_rat(-static_cast<long>(k));
        if (dec_width_ > target) {
            unsigned long need = (static_cast<unsigned long>(k) * 30103ul + 99999ul) / 100000ul;
            throw precision_error("decimal literal " + dec_text_ + " has " +
                                  std::to_string(dec_digits_) + " fractional digits but precision " +
                                  std::to_string(k) + " needs at least " + std::to_string(need));
        }
        return {dec_lo_, dec_lo_ + dec_width_};
    }
    std::lock_guard<std::mutex> lock(cache_->mu);
    if (cache_->filled && cache_->k >= k) return cache_->iv;
    Interval iv = exact_.refine(k);
    cache_->filled = true;
    cache_->k = k;
    cache_->iv = iv;
    return iv;
}

std::string CertifiedReal::str() const {
    switch (kind_) {
    case Kind::rational: {
        const Rat& v = exact_.rational_part();
        return "rational:" + rat_str(v);
    }
    case Kind::quadratic: {
        Rat q0, q1;
        Int d;
        exact_.single_surd(q0, q1, d);
        Int r = lcm(q0.get_den(), q1.get_den());
        Int p = q0.get_num() * (r / q0.get_den());
        Int q = q1.get_num() * (r / q1.get_den());
        std::string sign = q < 0 ? "-" : "+";
        Int qa = abs(q);
        return "quadratic:(" + p.get_str() + sign + qa.get_str() + "*sqrt:" + d.get_str() +
               ")/" + r.get_str();
    }
    case Kind::decimal:
        return "decimal:" + dec_text_;
    }
    return {};
}

namespace {

struct TextCursor {
    std::string_view full;
    std::string_view rest;

    [[noreturn]] void fail(std::string_view token, const std::string& why) const {
        throw validation_error("cannot parse real literal '" + std::string(full) + "': " + why +
                               " at '" + std::string(token) + "'");
    }
    bool eat(char c) {
        if (rest.empty() || rest[0] != c) return false;
        rest.remove_prefix(1);
        return true;
    }
    bool eat(std::string_view s) {
        if (rest.substr(0, s.size()) != s) return false;
        rest.remove_prefix(s.size());
        return true;
    }
    Int integer(bool allow_sign, const char* what) {
        bool neg = false;
        std::size_t i = 0;
        if (allow_sign && i < rest.size() && (rest[i] == '-' || rest[i] == '+')) {
            neg = rest[i] == '-';
            ++i;
        }
        std::size_t start = i;
        while (i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i]))) ++i;
        if (i == start) fail(rest.empty() ? std::string_view("<end>") : rest.substr(0, 1),
                             std::string("expected ") + what);
        Int v(std::string(rest.substr(start, i - start)), 10);
        rest.remove_prefix(i);
        return neg ? Int(-v) : v;
    }
};

} // namespace

CertifiedReal CertifiedReal::parse(std::string_view text) {
    // trim outer whitespace
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);

    std::size_t colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw validation_error("cannot parse real literal '" + std::string(text) +
                               "': missing kind prefix (rational:, sqrt:, quadratic:, decimal:)");
    }
    std::string_view kind = text.substr(0, colon);
    TextCursor cur{text, text.substr(colon + 1)};

    if (kind == "rational") {
        Int num = cur.integer(true, "integer numerator");
        Int den = 1;
        if (cur.eat('/')) den = cur.integer(true, "integer denominator");
        if (!cur.rest.empty()) cur.fail(cur.rest, "trailing characters");
        if (den == 0) cur.fail(text.substr(colon + 1), "zero denominator");
        return rational(rat_of(num, den));
    }
    if (kind == "sqrt") {
        if (!cur.rest.empty() && cur.rest[0] == '-') cur.fail(cur.rest, "negative radicand");
        Int d = cur.integer(false, "nonnegative radicand");
        if (!cur.rest.empty()) cur.fail(cur.rest, "trailing characters");
        return quadratic(Rat(0), Rat(1), Rat(1), d);
    }
    if (kind == "quadratic") {
        if (!cur.eat('(')) cur.fail(cur.rest.substr(0, 1), "expected '('");
        Int p = cur.integer(true, "integer term");
        int sign = 0;
        if (cur.eat('+')) sign = 1;
        else if (cur.eat('-')) sign = -1;
        else cur.fail(cur.rest.substr(0, 1), "expected '+' or '-' before surd term");
        Int q = cur.integer(false, "surd coefficient");
        if (!cur.eat("*sqrt:")) cur.fail(cur.rest.substr(0, 6), "expected '*sqrt:'");
        if (!cur.rest.empty() && cur.rest[0] == '-') cur.fail(cur.rest, "negative radicand");
        Int d = cur.integer(false, "nonnegative radicand");
        if (!cur.eat(')')) cur.fail(cur.rest.substr(0, 1), "expected ')'");
        if (!cur.eat('/')) cur.fail(cur.rest.substr(0, 1), "expected '/'");
        Int r = cur.integer(true, "integer denominator");
        if (!cur.rest.empty()) cur.fail(cur.rest, "trailing characters");
        if (r == 0) cur.fail(text, "zero denominator");
        return quadratic(Rat(p), Rat(sign) * Rat(q), Rat(r), d);
    }
    if (kind == "decimal") {
        return decimal(cur.rest);
    }
    throw validation_error("cannot parse real literal '" + std::string(text) +
                           "': unknown kind prefix '" + std::string(kind) + "'");
}

// ---------------------------------------------------------------------------
// Beatty floors

BeattySpec::BeattySpec(CertifiedReal a, CertifiedReal b) : alpha(std::move(a)), beta(std::move(b)) {
    Interval iv = alpha.exact()
                      ? alpha.refine(10)
                      : Interval{alpha.dec_lo(), alpha.dec_lo() + alpha.dec_width()};
    if (!(iv.lo > 0)) {
        throw validation_error("alpha must be certified positive, got " + alpha.str());
    }
}

BeattySpec BeattySpec::parse(std::string_view alpha_text, std::string_view beta_text) {
    return BeattySpec(CertifiedReal::parse(alpha_text), CertifiedReal::parse(beta_text));
}

EvalParts beatty_parts(const BeattySpec& spec, std::uint64_t n) {
    EvalParts parts;
    auto acc = [&parts](const CertifiedReal& c, unsigned long mult) {
        if (mult == 0) return;
        Rat m(static_cast<unsigned long>(mult));
        if (c.exact()) {
            parts.exact += c.surd() * m;
        } else {
            parts.has_interval = true;
            parts.ilo += c.dec_lo() * m;
            parts.ihi += (c.dec_lo() + c.dec_width()) * m;
        }
    };
    acc(spec.alpha, n);
    acc(spec.beta, 1);
    return parts;
}

Int floor_of_parts(const EvalParts& parts, std::uint64_t n) {
    if (!parts.has_interval) {
        // exact value: integrality is decided symbolically (rational part, or
        // irrational and thus never integral)
        return parts.exact.floor();
    }
    Int f_lo = (parts.exact + SurdSum(parts.ilo)).floor();
    Int f_hi = (parts.exact + SurdSum(parts.ihi)).floor();
    if (f_lo == f_hi) return f_lo;
    throw precision_error("ambiguous floor at n=" + std::to_string(n) +
                          ": written decimal digits cannot separate alpha*n+beta from " +
                          f_hi.get_str());
}

Int beatty_floor(const BeattySpec& spec, std::uint64_t n) {
    return floor_of_parts(beatty_parts(spec, n), n);
}

std::vector<std::int64_t> beatty_floor_range(const BeattySpec& spec, std::uint64_t n_lo,
                                             std::uint64_t n_hi, int threads) {
    if (n_lo > n_hi) throw validation_error("empty index range");
    std::size_t count = static_cast<std::size_t>(n_hi - n_lo + 1);
    std::vector<std::int64_t> out(count);
    parallel_fill(count, [&](std::size_t i) {
        Int f = beatty_floor(spec, n_lo + i);
        out[i] = to_i64(f, "floor value");
    }, threads);
    return out;
}

// ---------------------------------------------------------------------------
// Rational approximation

namespace {

// floor(x*b) at both ends of x's certified interval (equal for exact kinds)
std::pair<Int, Int> floors_of_multiple(const CertifiedReal& x, const Int& b) {
    if (x.exact()) {
        Int f = (x.surd() * Rat(b)).floor();
        return {f, f};
    }
    Rat blo = x.dec_lo() * Rat(b);
    Rat bhi = (x.dec_lo() + x.dec_width()) * Rat(b);
    return {rat_floor(blo), rat_floor(bhi)};
}

// sign of |x-g| - |x-h|: -1 when g is strictly closer, 0 on an exact tie
int compare_distance(const CertifiedReal& x, const Rat& g, const Rat& h) {
    if (g == h) return 0;
    // |x-g|^2 - |x-h|^2 = (h-g) * (2x - g - h)
    int lead = cmp(h, g);
    Rat s = g + h;
    if (x.exact()) {
        SurdSum t = x.surd() * Rat(2) - SurdSum(s);
        return lead * t.sign();
    }
    Rat lo = x.dec_lo() * 2 - s;
    Rat hi = (x.dec_lo() + x.dec_width()) * 2 - s;
    if (lo > 0) return lead;
    if (hi < 0) return -lead;
    throw precision_error("cannot rank approximants " + rat_str(g) + " and " + rat_str(h) +
                          " against decimal literal " + x.str());
}

} // namespace

Rat best_rational_of_height(const CertifiedReal& x, const Int& h) {
    if (h < 1) throw validation_error("height bound must be >= 1");
    if (h > 10000000) throw budget_error("height bound " + h.get_str() + " exceeds 10^7");
    bool have = false;
    Rat best;
    for (Int b = 1; b <= h; ++b) {
        auto [f_lo, f_hi] = floors_of_multiple(x, b);
        Int cands[4] = {f_lo, f_lo + 1, f_hi, f_hi + 1};
        for (const Int& a0 : cands) {
            // numerators past the height cap clamp to it: distance to x is
            // monotone beyond the nearest representable fraction
            Int a = a0 > h ? h : (a0 < -h ? Int(-h) : a0);
            Rat g = rat_of(a, b);
            if (!have) {
                best = g;
                have = true;
                continue;
            }
            int c = compare_distance(x, g, best);
            if (c < 0) {
                best = g;
            } else if (c == 0) {
                // tie: smaller denominator, then smaller numerator magnitude
                if (g.get_den() < best.get_den() ||
                    (g.get_den() == best.get_den() && abs(g.get_num()) < abs(best.get_num()))) {
                    best = g;
                }
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Continued fractions

std::vector<Rat> continued_fraction_convergents(const CertifiedReal& x, int count) {
    if (count < 1) throw validation_error("convergent count must be >= 1");
    if (count > 10000) throw budget_error("convergent count exceeds 10000");
    std::vector<Rat> out;
    out.reserve(static_cast<std::size_t>(count));
    Int h1 = 1, h0 = 0, k1 = 0, k0 = 1; // h/k recurrence seeds
    auto push = [&](const Int& a) {
        Int h = a * h1 + h0, k = a * k1 + k0;
        h0 = h1;
        h1 = h;
        k0 = k1;
        k1 = k;
        out.push_back(rat_of(h, k));
    };

    if (x.exact()) {
        SurdSum y = x.surd();
        for (int i = 0; i < count; ++i) {
            Int a = y.floor();
            push(a);
            if (i + 1 == count) break;
            SurdSum rem = y - SurdSum(Rat(a));
            if (rem.is_zero()) break; // rational input: expansion ends
            y = rem.inverse();
        }
        return out;
    }

    Rat lo = x.dec_lo(), hi = x.dec_lo() + x.dec_width();
    for (int i = 0; i < count; ++i) {
        Int fl = rat_floor(lo), fh = rat_floor(hi);
        if (fl != fh) {
            throw precision_error("decimal literal " + x.str() +
                                  " has too few digits to certify continued fraction term " +
                                  std::to_string(i));
        }
        push(fl);
        if (i + 1 == count) break;
        lo -= Rat(fl);
        hi -= Rat(fl);
        if (lo == 0) {
            throw precision_error("decimal literal " + x.str() +
                                  " cannot certify whether the expansion ends at term " +
                                  std::to_string(i));
        }
        Rat nlo = 1 / hi, nhi = 1 / lo;
        lo = nlo;
        hi = nhi;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Arc classification

namespace {

// certify |x - a/b| <= eps where eps^3 = 1/N, by cubing (boundary inclusive);
// returns 0/1, throws precision_error when a decimal interval straddles
bool inside_arc(const CertifiedReal& x, const Rat& center, std::uint64_t N) {
    Rat bound = rat_of(1, Int(static_cast<unsigned long>(N)));
    if (x.exact()) {
        SurdSum s = x.surd() - SurdSum(center);
        SurdSum c = s * s * s;
        SurdSum upper = c - SurdSum(bound);
        SurdSum lower = c + SurdSum(bound);
        return upper.sign() <= 0 && lower.sign() >= 0;
    }
    Rat slo = x.dec_lo() - center;
    Rat shi = slo + x.dec_width();
    Rat clo = slo * slo * slo, chi = shi * shi * shi; // cube is monotone
    bool up_in = chi <= bound, up_out = clo > bound;
    bool low_in = clo >= -bound, low_out = chi < -bound;
    if (up_in && low_in) return true;
    if (up_out || low_out) return false;
    throw precision_error("decimal literal " + x.str() +
                          " cannot certify the arc boundary at center " + rat_str(center));
}

} // namespace

ArcClassification classify_arc(const CertifiedReal& x, const Int& T, std::uint64_t N) {
    if (T < 1) throw validation_error("denominator bound must be >= 1");
    if (N < 8) throw validation_error("sample size must be >= 8");
    if (T > 100000) throw budget_error("denominator bound " + T.get_str() + " exceeds 10^5");

    std::set<std::pair<Int, Int>> seen;
    std::vector<std::pair<Int, Int>> hits;
    Int nn(static_cast<unsigned long>(N));
    for (Int b = 1; b <= T; ++b) {
        auto [f_lo, f_hi] = floors_of_multiple(x, b);
        // |x - a/b| <= N^(-1/3) confines a to within o of x*b, where o is the
        // least integer with o^3 * N >= b^3
        Int o = 0;
        while (o * o * o * nn < b * b * b) ++o;
        for (Int a = f_lo - o; a <= f_hi + o + 1; ++a) {
            Int g = gcd(abs(a), b);
            Int ar = a / g, br = b / g;
            if (!seen.insert({ar, br}).second) continue;
            if (inside_arc(x, rat_of(ar, br), N)) hits.push_back({ar, br});
        }
    }
    if (hits.empty()) return {};
    if (hits.size() == 1) {
        ArcClassification c;
        c.major = true;
        c.a = hits[0].first;
        c.b = hits[0].second;
        return c;
    }
    throw ambiguity_error("two major arc centers contain x: " + hits[0].first.get_str() + "/" +
                          hits[0].second.get_str() + " and " + hits[1].first.get_str() + "/" +
                          hits[1].second.get_str());
}

} // namespace eklab::reals
