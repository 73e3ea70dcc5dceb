#pragma once

#include <cstdint>
#include <vector>

#include "odo/dynamics.hpp"

namespace odo {

/// Index j in {0..h_n-1} with x in S^j([0..0]_n): the positional sum
/// j = sum_{i<n} h_i x_i. The eigenfunction attached to exp(2 pi i k/h_n)
/// takes the value exp(2 pi i jk/h_n) there, so eigen-relations reduce to
/// exact modular identities on these indices.
BigInt eigenfunction_index(const BaseSequence& space, const Point& p, std::size_t n);

struct RelationReport {
    std::size_t samples = 0;
    std::size_t checked = 0;
    std::size_t undetermined = 0;
    std::size_t failures = 0;
};

/// index(S p) = index(p) + 1 mod h_n, exactly, on seeded samples.
RelationReport check_eigen_relation(const BaseSequence& space, std::size_t n,
                                    std::size_t samples, std::uint64_t seed,
                                    std::size_t prefix_len = 16);

/// index(psi(T p)) = index(psi(p)) + 1 mod h_n: the computable shadow of the
/// spectrum pullback through the factor map.
RelationReport check_pullback(const OdomutantSystem& sys, std::size_t n, std::size_t samples,
                              std::uint64_t seed, std::size_t prefix_len = 16);

struct ComplexCountResult {
    std::uint64_t count = 0;       // decided |1 - nu^j| < eps
    std::uint64_t undecided = 0;   // within the precision margin, never counted
    double bound = 0;              // 3 theta/(1-2 theta) |J| + 6 theta/|tau|
    bool ok = false;               // count + undecided <= bound, certified
    double theta = 0;
};

/// Counts j in [j_lo, j_hi] with |1 - nu^j| < eps for nu = exp(2 pi i tau),
/// tau rational, against the interval bound. Preconditions: theta(eps) < 1/4
/// and 0 < |tau| < theta.
ComplexCountResult lemma_complex_check(const BigRat& tau, const BigRat& eps, long long j_lo,
                                       long long j_hi, mpfr_prec_t prec = 128);

struct FixedPointSeries {
    std::vector<digit_t> counts;     // |F_n|
    std::vector<BigRat> densities;   // |F_n| / q_n
    std::vector<BigRat> partials;    // running sums
};

/// Exact per-level fixed-point densities of the family and their partial
/// sums (advisory divergence evidence for the isomorphism criterion).
FixedPointSeries fixed_point_series(const BaseSequence& space, const PermutationFamily& family,
                                    std::size_t n_max);

struct NonInjectivityReport {
    std::size_t samples = 0;
    std::size_t checked = 0;   // sampled points that landed in Y1
    std::size_t failures = 0;  // either psi(theta x) != psi(x) or theta x outside Y2
    BigRat y_partial_mass{0};  // prod_{n < depth} (1 - 1/q_n), exact
};

/// Non-injectivity witness for the cyclic-shift family: on
/// Y1 = {x : x_n != (q_n - 1) at even n}, the translation
/// theta(x)_n = x_n + (-1)^n mod q_n lands in the disjoint set Y2 and
/// satisfies psi(theta x) = psi(x) digit for digit. The sets have the mass
/// of the partial products prod (1 - 1/q_n).
NonInjectivityReport check_cyclic_noninjectivity(const BaseSequence& space,
                                                 std::size_t samples, std::uint64_t seed,
                                                 std::size_t depth = 16);

}  // namespace odo
