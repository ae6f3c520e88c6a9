#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "eklab/errors.hpp"

namespace eklab {

// Exact arithmetic backbone: GMP integers and canonical rationals.
using Int = mpz_class;
using Rat = mpq_class;

inline Rat make_rat(const Int& num, const Int& den) {
    if (den == 0) throw validation_error("rational with zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

inline Int rat_num(const Rat& q) { return q.get_num(); }
inline Int rat_den(const Rat& q) { return q.get_den(); }

// floor(q) as an integer (GMP's fdiv).
inline Int rat_floor(const Rat& q) {
    Int r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline Int rat_ceil(const Rat& q) {
    Int r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

// Height of a reduced fraction a/b: max(|a|, b).
inline Int rat_height(const Rat& q) {
    Int a = abs(q.get_num());
    const Int& b = q.get_den();
    return a > b ? a : b;
}

// 2^k as a rational, k may be negative.
inline Rat pow2_rat(long k) {
    Rat r(1);
    if (k >= 0)
        mpz_mul_2exp(r.get_num_mpz_t(), r.get_num_mpz_t(), static_cast<unsigned long>(k));
    else
        mpz_mul_2exp(r.get_den_mpz_t(), r.get_den_mpz_t(), static_cast<unsigned long>(-k));
    return r;
}

// 10^k for k >= 0.
inline Int pow10_int(unsigned k) {
    Int r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, k);
    return r;
}

inline bool fits_u64(const Int& v) {
    return v >= 0 && mpz_sizeinbase(v.get_mpz_t(), 2) <= 64 && v.fits_ulong_p();
}

inline std::uint64_t to_u64(const Int& v, const char* what) {
    if (!fits_u64(v)) throw validation_error(std::string(what) + ": value does not fit in 64 bits");
    return v.get_ui();
}

inline std::int64_t to_i64(const Int& v, const char* what) {
    if (!v.fits_slong_p()) throw validation_error(std::string(what) + ": value does not fit in a signed 64-bit word");
    return v.get_si();
}

inline std::string rat_str(const Rat& q) { return q.get_str(); }

} // namespace eklab
