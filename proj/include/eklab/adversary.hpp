#pragma once

#include <cstdint>
#include <vector>

#include "eklab/rat.hpp"

namespace eklab::adversary {

// Desk-scale stand-ins for the construction's four conditions.  The literal
// constants (a_1 >= 1e10, log N_{m+1} >= (10 b_m)^10, quantile 0.9 with mass
// 0.1) put the first verifiable level far beyond any computation, so every
// constant is a parameter here and the defaults are chosen to make a two-level
// schedule buildable and exhaustively checkable.  The target sequence eta_N is
// fixed to 1/log log N.
struct AdversaryRelaxation {
    double growth_coeff = 3.0;       // log N_{m+1} >= growth_coeff * b_m^growth_exp
    double growth_exp = 1.0;
    double eta_coeff = 1.0;          // 1/eta(N_{m+1}) = log log N_{m+1} >= eta_coeff * m * b_m
    double omega_threshold = 0.5;    // quantile multiplier on log log N_{m+1}
    double omega_fail_mass = 0.2;    // allowed fraction with omega below the threshold
    std::uint64_t a_min = 2;         // floor for a_1
    std::uint64_t verify_limit = 20000000; // largest N_{m+1} the search will sieve
};

struct AdversaryLevel {
    Int a;             // a_m
    Int b;             // b_m = a_1 ... a_m
    std::uint64_t N;   // N_m = floor(a_m^(1/d) / 2)
    Rat alpha;         // alpha_m = sum_{i <= m} 1/a_i, in b_m^-1 Z
};

struct AdversarySchedule {
    unsigned d = 2;
    AdversaryRelaxation relaxation;
    std::vector<AdversaryLevel> levels;

    // Certified bound on alpha - alpha_last over every legal continuation of
    // the schedule: the next term is at least max(2 a_last, the growth
    // condition's floor), and later terms at least double, so the series tail
    // is below min(1/a_last, 2^(1-bits)).
    Rat tail_upper() const;
};

// Build `levels` levels: a_1 = a_min, then each a_{m+1} is the smallest
// integer (equivalently the smallest admissible N_{m+1}) satisfying the
// relaxed conditions, with the quantile conditions checked by exact sieve
// counts.  Searches past verify_limit raise budget_error naming the failing
// condition.
AdversarySchedule construct_sequence(unsigned d, unsigned levels,
                                     const AdversaryRelaxation& relax = {});

struct CollapseReport {
    std::uint64_t checked; // every n in [1, floor(N_{m+1}/b_m)] verified
    Rat margin;            // 1 - (alpha_hi - alpha_m) * g(b_m n_max): interval slack
};

// The floor-collapse engine at level m (1-based, needs level m+1 to exist):
// certifies (alpha - alpha_m) g(b_m n) in [0, 1) for every admissible n,
// hence floor(f(b_m n)) = alpha_m g(b_m n) exactly; then verifies that the
// integer is divisible by n (b_m n - 1), that the two factors are coprime,
// and that omega of the collapsed value dominates omega(n) + omega(b_m n - 1).
// Any violation throws (it would be a construction bug, not bad input).
CollapseReport collapse_check(const AdversarySchedule& sched, unsigned m);

struct AdversaryExperiment {
    double empirical_dk;   // d_K of the standardized omega(floor f(n)) sample
    double mass_shift;     // P_n(omega(floor f(n)) >= 1.8 log log N_{m+1})
    double gaussian_tail;  // P(Z >= 0.8 sqrt(log log N_{m+1}))
    double bound;          // mass_shift - gaussian_tail, the d_K lower bound
    double subsample_mass; // the same event along the collapse rows n = b_m n'
    std::uint64_t threshold_count;
    std::uint64_t subsample_count;
};

// Quantifies the mass the collapse pushes into the upper tail for
// n ~ U[N_{m+1}], with certified floors of f(n) = alpha (n-1) n^(d-1)
// throughout.
AdversaryExperiment adversary_experiment(const AdversarySchedule& sched, unsigned m);

} // namespace eklab::adversary
