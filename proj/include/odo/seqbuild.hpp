#pragma once

#include <string>
#include <vector>

#include "odo/numeric.hpp"
#include "odo/space.hpp"

namespace odo {

/// Supernatural-number data for the builders: one prime with infinite
/// exponent plus an ordered multiset of finite primes (p_star excluded).
struct SupernaturalSpec {
    BigInt p_star;
    std::vector<BigInt> finite_primes;

    void validate() const;
};

struct NamedCert {
    std::string what;
    Cert cert;
};

struct ChoiceLevel {
    FactoredInt q;
    BigInt i_n;       // q contributes K^{i_n}
    std::size_t j_n;  // finite primes consumed so far
    std::vector<NamedCert> checks;
};

struct ChoiceResult {
    BigInt K;  // smallest p_star power with (q-2)! >= K for every q >= K
    std::vector<ChoiceLevel> levels;
    mpfr_prec_t precision = 0;
    bool all_certified = true;
};

/// Builds q_0, ..., q_{depth-1} satisfying the factorial growth bound, the
/// two-sided sandwich around alpha, and monotone prime accounting. All
/// inequality verdicts carry directed-rounding certificates; an undecidable
/// comparison never passes silently.
ChoiceResult build_choiceqn(const BigRat& alpha, const SupernaturalSpec& spec,
                            std::size_t depth, mpfr_prec_t prec = 256);

struct InfEntropyLevel {
    BigInt c, qtilde, q, kappa, chi;
    std::size_t j = 0;
    BigInt h;  // h_n
};

struct InfEntropyResult {
    std::vector<InfEntropyLevel> levels;  // index = n
    bool log_kappa_bound_ok = true;       // log q_n >= log kappa_n >= h_n log p_star
};

/// The infinite-entropy recursion: c_n = p*^n, chi_{n+1} the greatest p*
/// power below the factorial ratio, kappa from the prime budget, qt = kappa
/// chi. Exact big-integer arithmetic; factorial arguments above the budget
/// raise ResourceError.
InfEntropyResult build_infinite_entropy(const BigInt& p_star,
                                        const std::vector<BigInt>& finite_primes,
                                        std::size_t depth,
                                        unsigned long factorial_budget = 200000);

struct SummableRow {
    std::size_t n = 0;
    Cert precondition;  // log q_n / h_n >= beta
    Cert inequality;    // log^{(m)}(q_{n+m}) >= exp(beta h_n)
};

struct SummableReport {
    std::vector<SummableRow> rows;
    bool any_failure = false;    // a decided violation
    bool any_undecided = false;  // precision was insufficient somewhere
    std::size_t first_bad = 0;
};

/// Per-n verification of 1/log^{(m)}(q_{n+m}) <= exp(-beta h_n), with the
/// liminf precondition checked (not assumed) on the supplied range.
SummableReport check_summable(const BaseSequence& q, unsigned m, const BigRat& beta,
                              std::size_t n_lo, std::size_t n_hi, mpfr_prec_t prec = 128);

struct PowerKResult {
    BigInt lhs;          // the greatest power of p <= (q-2)!/(c!^{qt-2}(c-1)!^2)
    BigInt lhs_exponent; // its exponent
    std::string rhs;     // upper bound of (1/p)(1/qt^2)(1/(ec))^qt qt^q
    double rhs_value = 0;
    bool ok = false;     // certified lhs >= rhs
};

PowerKResult check_powerK(const BigInt& p, digit_t qtilde, digit_t c, mpfr_prec_t prec = 128);

/// S_n = sum_{i=1..n} (i+9)(2^{i+11}+3), the exact exponent of the full-scale
/// word-system heights (h_n = 2^{S_n}).
BigInt feldman_exponent(std::size_t n);
std::vector<BigInt> feldman_exponents(std::size_t n_max);

}  // namespace odo
