#pragma once

#include <cstdint>
#include <vector>

#include "eklab/rat.hpp"
#include "eklab/reals.hpp"

namespace eklab::qlinalg {

class RationalMatrix {
public:
    RationalMatrix(std::size_t rows, std::size_t cols);
    static RationalMatrix from_rows(const std::vector<std::vector<Rat>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Rat& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Rat& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

private:
    std::size_t rows_, cols_;
    std::vector<Rat> a_;
};

// Exact nullspace basis; each vector scaled to integer entries with gcd 1 and
// positive leading entry.  A zero matrix yields the standard basis.
std::vector<std::vector<Rat>> kernel_basis(const RationalMatrix& M);

std::size_t matrix_rank(RationalMatrix M);

// Vectors v'_i in the span of the inputs with <v'_i, v_j> exactly delta_ij.
// Dependent input raises a rank-deficiency validation_error.
std::vector<std::vector<Rat>> dual_basis(const std::vector<std::vector<Rat>>& vectors);

// A near-relation: |sum_i alpha_i * coeff_i + m| <= tolerance, certified.
struct Relation {
    std::vector<Rat> coeff;
    Int m;
};

struct RelationSet {
    int k = 0;
    std::vector<Relation> tuples;
    Int height_bound = 0;
    Rat tolerance = 0;
};

// Exhaustive certified search over coefficients of height <= height_bound
// whose reduced denominators lie in denom_support (1 admits the integers;
// p^-1 Z contains Z, so integers are always candidates).  Search spaces past
// candidate_budget raise a budget_error reporting the count.
RelationSet find_near_relations(const std::vector<reals::CertifiedReal>& alphas,
                                const Int& height_bound, const Rat& tolerance,
                                const std::vector<std::uint64_t>& denom_support,
                                std::uint64_t candidate_budget = 100000000);

struct GammaVector {
    std::vector<Rat> gammas;
    RelationSet provenance;
};

// Rational surrogate for the alphas: satisfies every relation exactly (the
// relation span pins r coordinates; the free directions are least-squares
// fitted to the alphas, then rounded to the 1/grid_height grid).  Relations
// forcing the last homogeneous coordinate to zero raise a degenerate-relations
// validation_error.
GammaVector gamma_vector(const RelationSet& relations,
                         const std::vector<reals::CertifiedReal>& alphas,
                         const Int& grid_height);

// Prime factors of all gamma numerators and denominators, united with the
// primes <= log N, ascending.
std::vector<std::uint64_t> bad_prime_set(const GammaVector& gamma, std::uint64_t N);

// Membership in R_p: p does not divide the reduced denominator.
bool denominator_coprime(const Rat& value, std::uint64_t p);

} // namespace eklab::qlinalg
