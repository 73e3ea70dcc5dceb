#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "odo/dynamics.hpp"

namespace odo {

/// A finite word of partition-atom identifiers.
using Word = std::vector<digit_t>;

/// Atom index of p as a machine integer (words are desk-scale objects).
digit_t atom_index(const BaseSequence& space, const Partition& part, const Point& p);

/// P(l) for plain families, Ptilde(l) when a multiplicity structure with
/// c(l-1) > 1 is attached.
Partition default_partition(const OdomutantSystem& sys, std::size_t l);

/// Coding map word: (atom of T^j p) for 0 <= j < length.
Word code_word(const OdomutantSystem& sys, const Point& p, const Partition& part,
               std::size_t length);

/// All tower words W(part)^{(n)}_{x_n} for x_n < q_n, computed by the
/// concatenation recursion from the base level l-1. Requires the family to
/// fix 0 (otherwise the h(n)-word of a bottom point is not a function of the
/// tower index). Budgeted in total letters.
std::vector<Word> tower_words(const OdomutantSystem& sys, const Partition& part, std::size_t n,
                              std::uint64_t letter_budget = 1u << 26);

Word tower_word(const OdomutantSystem& sys, const Partition& part, std::size_t n, digit_t x_n,
                std::uint64_t letter_budget = 1u << 26);

enum class CountMethod { Brute, Recursion };

struct WordCountResult {
    std::size_t level = 0;  // l of the partition
    std::size_t n = 0;
    CountMethod method = CountMethod::Brute;
    std::uint64_t count = 0;
    bool exact = true;       // recursion counting is a lower-bound surrogate
    double log_count_over_h = 0;
    BigInt lower_bound{0};   // q_n
    BigInt upper_bound{0};   // h_{n-1} q_n q_{n-1}^2 2^{q_{n-1}}
};

/// Number of distinct h(n)-words of the coding map. Brute enumerates every
/// start offset in every tower plus the boundary concatenations; recursion
/// counts only the bottom words (flagged as a lower-bound surrogate).
WordCountResult count_words(const OdomutantSystem& sys, const Partition& part, std::size_t n,
                            CountMethod method, std::uint64_t letter_budget = 1u << 27);

/// kappa_k of a uniformly multiple family: the uniform fiber size of
/// j -> (tau_j(I_0), ..., tau_j(I_{qt-1})) at level k-1. Throws when the
/// fibers are not uniform.
digit_t kappa_of(const OdomutantSystem& sys, std::size_t k);

/// The counting bound qt(n) / prod_{k=l}^{n} kappa_k^{h(n)/h(k)}, paired with
/// the recursion count for comparison.
struct KappaBound {
    BigRat bound;
    std::uint64_t recursion_count = 0;
    std::vector<digit_t> kappas;
};
KappaBound kappa_lower_bound(const OdomutantSystem& sys, std::size_t l, std::size_t n);

struct EntropyRow {
    std::size_t n = 0;
    WordCountResult words;
    double estimate = 0;        // log count / h(n)
    double target = 0;          // log q_n / h(n)
    double upper_estimate = 0;  // log upper_bound / h(n)
};

struct EntropyTable {
    std::size_t level = 0;
    std::vector<EntropyRow> rows;
    bool target_decreasing = true;
};

EntropyTable entropy_estimate(const OdomutantSystem& sys, std::size_t l,
                              const std::vector<std::size_t>& ns,
                              CountMethod method = CountMethod::Brute,
                              std::uint64_t letter_budget = 1u << 27);

/// Longest common subsequence length (full O(n^2) dynamic program; a band
/// limit yields a lower bound on the LCS, hence an upper bound on f).
std::size_t lcs_length(const Word& a, const Word& b,
                       std::optional<std::size_t> band = std::nullopt);

/// Feldman f-metric: 1 - LCS/n, exact rational. Equal lengths required.
BigRat f_metric(const Word& a, const Word& b, std::optional<std::size_t> band = std::nullopt);

/// Hamming mismatch count and its normalized form.
std::size_t d_metric(const Word& a, const Word& b);
BigRat d_metric_normalized(const Word& a, const Word& b);

struct Lb0Cluster {
    std::size_t words = 0;
    BigRat mass{0};
    BigRat max_inside_f{0};
};

struct Lb0Report {
    std::size_t N = 0;
    BigRat epsilon{0};
    std::size_t distinct_words = 0;
    BigRat resolved_mass{0};
    BigRat unresolved_mass{0};
    BigRat global_max_f{0};      // over all pairs of realizable words
    std::vector<Lb0Cluster> clusters;
    BigRat best_coverage{0};     // mass of the heaviest pairwise-close cluster
    bool partial = false;        // budget exhausted or unresolved cells remain
    std::vector<std::pair<Word, BigRat>> word_masses;
};

/// Empirical LB0 probe: enumerate the realizable words [P]_{1,N} with exact
/// masses, report the greedy pairwise-f clusters and the global f summary.
Lb0Report lb0_report(const OdomutantSystem& sys, const Partition& part, std::size_t N,
                     const BigRat& epsilon, std::uint64_t cell_budget = 1u << 20);

}  // namespace odo
