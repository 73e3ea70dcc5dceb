#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "odo/dynamics.hpp"

namespace odo {

/// c_T(x): the S-exponent with T x = S^{c_T(x)} x, from the closed-form digit
/// recursion at N1 = N+(psi(x)). |c_T| <= h(N1 + 1).
BigInt cocycle_T(const OdomutantSystem& sys, const Point& p);

/// c_S(x): the T-exponent with S x = T^{c_S(x)} x, at N2 = N+(x).
BigInt cocycle_S(const OdomutantSystem& sys, const Point& p);

struct OrbitEquivalenceReport {
    std::size_t samples = 0;
    std::size_t verified = 0;
    std::size_t undetermined = 0;
    std::size_t failures = 0;
    std::vector<std::string> failure_details;
    bool bound_violated = false;  // any |c_T| > h(N+ psi + 1)
};

/// Seeded check of both defining identities, exact, zero tolerance:
/// T p = S^{c_T(p)} p and S p = T^{c_S(p)} p.
OrbitEquivalenceReport verify_orbit_equivalence(const OdomutantSystem& sys,
                                                std::size_t samples, std::uint64_t seed,
                                                std::size_t prefix_len = 24,
                                                unsigned threads = 1);

/// Gauge maps for phi-integrability experiments.
class PhiMap {
  public:
    enum class Kind { Power, LogQuotient, Linear, Log };

    static PhiMap power(const BigRat& p) { return PhiMap(Kind::Power, p, 0); }
    static PhiMap log_quotient(unsigned m) { return PhiMap(Kind::LogQuotient, 0, m); }
    static PhiMap linear() { return PhiMap(Kind::Linear, 0, 0); }
    static PhiMap log() { return PhiMap(Kind::Log, 0, 0); }

    Kind kind() const { return kind_; }
    const BigRat& exponent() const { return p_; }
    unsigned log_depth() const { return m_; }
    std::string describe() const;

    /// phi(t) for an exact integer t >= 1, with directed rounding.
    Real eval(const BigInt& t, mpfr_prec_t prec, mpfr_rnd_t rnd) const;
    /// phi(t) where only ln t is available (factored-scale arguments).
    Real eval_from_log(const Real& log_t, mpfr_prec_t prec, mpfr_rnd_t rnd) const;

  private:
    PhiMap(Kind k, BigRat p, unsigned m) : kind_(k), p_(std::move(p)), m_(m) {}
    Kind kind_;
    BigRat p_;
    unsigned m_;
};

struct SeriesRow {
    std::size_t n = 0;
    double term = 0;
    double partial = 0;
    std::string term_str;
    std::string partial_str;
};

struct SeriesReport {
    std::vector<SeriesRow> rows;
    mpfr_prec_t precision = 0;
    bool monotone = true;
    // advisory only: finite evidence never proves convergence
    std::string note;
};

/// Partial sums of sum_n phi(h(n+1))/h(n)   (condition C1).
SeriesReport phi_series_C1(const BaseSequence& space, const PhiMap& phi, std::size_t n_max,
                           mpfr_prec_t prec = 128);

/// The two partial-sum sequences of condition C2, exact inner sums over the
/// (x_n, x_{n+1}) pairs weighted 1/h(n+2). The identity family short-circuits
/// to the closed form (all displacements are 1); other rule-backed families
/// iterate pairs under `pair_budget`.
struct SeriesPair {
    SeriesReport first;
    SeriesReport second;
};
SeriesPair phi_series_C2(const OdomutantSystem& sys, const PhiMap& phi, std::size_t n_max,
                         mpfr_prec_t prec = 128, std::uint64_t pair_budget = 1u << 24);

struct CocycleReport {
    std::size_t samples = 0;
    std::size_t undetermined = 0;
    std::map<BigInt, std::uint64_t> histogram;  // c_T value -> count
    BigInt max_abs{0};
    double empirical_phi_mean = 0;              // for the log gauge, estimate only
    double empirical_entropy = 0;               // of the value partition, estimate only
    std::map<std::size_t, std::uint64_t> level_counts;  // N+(psi(x)) -> count
    // exact law versus observation: P(N+ o psi = n) = (q_n - 1)/h(n+1)
    struct LevelBand {
        std::size_t n;
        double expected;
        double observed;
        double sigma;  // binomial
        bool within_3_sigma;
    };
    std::vector<LevelBand> bands;
};

CocycleReport cocycle_stats(const OdomutantSystem& sys, std::size_t samples,
                            std::size_t prefix_len, std::uint64_t seed);

}  // namespace odo
