#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "odo/space.hpp"

namespace odo {

/// Uniform multiplicity data: q(n) = c(n) * qt(n), blocks
/// I^{(n)}_j = j*c(n) + {0..c(n)-1}, and base permutations tau^{(n)}_j
/// (j < qt(n+1)) of {0..q_n-1}. The induced family is
/// sigma^{(n)}_i = tau^{(n)}_{block index of i at level n+1}.
struct MultiplicityStructure {
    std::vector<digit_t> c;                             // per level, c[0] allowed
    std::vector<digit_t> qt;                            // per level
    std::vector<std::vector<std::vector<digit_t>>> tau;  // tau[n][j][v]

    std::size_t levels() const { return tau.size(); }
    BlockStructure blocks(const BaseSequence& space, std::size_t n) const {
        return BlockStructure::uniform(space.q(n), c.at(n));
    }
};

/// Per-level indexed permutations sigma^{(n)}_i (i < q_{n+1}) of {0..q_n-1}.
/// Rule-backed families evaluate at any level; table-backed ones up to their
/// materialized depth. Inverses are stored alongside the tables so the y/z
/// recursions are O(1) per level.
class PermutationFamily {
  public:
    static PermutationFamily identity(const BaseSequence& space);
    static PermutationFamily cyclic(const BaseSequence& space);
    static PermutationFamily tables(const BaseSequence& space,
                                    std::vector<std::vector<std::vector<digit_t>>> sigma);
    static PermutationFamily multiplicity(const BaseSequence& space, MultiplicityStructure m);

    const BaseSequence& space() const { return space_; }

    digit_t sigma(std::size_t n, digit_t index, digit_t value) const;
    digit_t sigma_inv(std::size_t n, digit_t index, digit_t value) const;

    /// Materialized table depth; nullopt for rule families (any level).
    std::optional<std::size_t> levels() const;

    bool fixes_zero() const { return fixes_zero_; }
    bool fixes_max() const { return fixes_max_; }

    const MultiplicityStructure* multiplicity_structure() const;

    /// Re-derives the fixes_zero / fixes_max flags by scanning. Called by the
    /// factories; public so loaded tables can be re-checked.
    void revalidate_fixed_points(std::size_t scan_levels = 16);

  private:
    struct IdRule {};
    struct CycRule {};
    struct Tables {
        std::vector<std::vector<std::vector<digit_t>>> fwd, inv;
    };
    struct Mult {
        MultiplicityStructure m;
        std::vector<std::vector<std::vector<digit_t>>> tau_inv;
    };

    BaseSequence space_ = BaseSequence::explicit_list({2});
    std::variant<IdRule, CycRule, Tables, Mult> impl_;
    bool fixes_zero_ = false;
    bool fixes_max_ = false;
};

PermutationFamily identity_family(const BaseSequence& space);
PermutationFamily cyclic_family(const BaseSequence& space);

/// Uniformly sampled permutations fixing 0 and q_n-1 at every level, pairwise
/// distinct per level when `distinct`. Deterministic per seed.
PermutationFamily random_fixed_endpoint_family(const BaseSequence& space, std::size_t levels,
                                               std::uint64_t seed, bool distinct);

/// Pairwise-distinct permutations fixing 0 and {i_n+1,...,q_n-1}, where i_n is
/// minimal with q_{n+1} <= i_n! (and i_n >= 2). Feasible when
/// q_{n+1} <= (q_n-2)!.
PermutationFamily entropy_family(const BaseSequence& space, std::size_t levels,
                                 std::uint64_t seed);

/// Minimal factorial index for entropy_family at one level, i.e. the least
/// i in {2,...,q_n-2} with q_next <= i!. Throws on infeasibility.
digit_t entropy_interior_size(digit_t q_n, const BigInt& q_next);

/// Inductive word system: per-level words a^{(n)}_j (j < qt(n)) over the
/// alphabet {0..qt(0)-1}, each of length h(n), built by the block-repetition
/// concatenation with exponents E = qt(n)^{2(j+1)}, F = qt(n)^{2(qt(n+1)-j)}.
class FeldmanWordSystem {
  public:
    /// qt must give values >= 2 (use qt ≡ 2 for the desk-scale system; the
    /// full-scale qt(n) = 2^{n+10} only fits the exponent arithmetic path).
    FeldmanWordSystem(std::function<digit_t(std::size_t)> qt, std::size_t max_level,
                      std::uint64_t letter_budget = 1u << 26);

    digit_t qt(std::size_t n) const;
    digit_t q(std::size_t n) const;  // qt(n)^(2 qt(n+1) + 3), must fit digit_t
    digit_t c(std::size_t n) const { return q(n) / qt(n); }

    /// Words of level n; words(n)[j] has length h(n). Materialized up to the
    /// construction budget.
    const std::vector<std::vector<digit_t>>& words(std::size_t n) const;
    std::size_t materialized_levels() const { return words_.size(); }

    BaseSequence space(std::optional<std::size_t> levels = std::nullopt) const;

  private:
    std::function<digit_t(std::size_t)> qt_;
    std::vector<std::vector<std::vector<digit_t>>> words_;
};

/// The uniformly c-multiple family whose tower words reproduce the word
/// system exactly: concatenating level-n tower words along tau^{(n)}_j yields
/// a^{(n+1)}_j. tau is produced in closed form and fixes 0 and q_n-1.
PermutationFamily feldman_family(const FeldmanWordSystem& ws, std::size_t levels);

struct FamilyCheck {
    std::string what;
    std::size_t level = 0;
    digit_t index = -1;
    bool ok = true;
};

struct FamilyReport {
    std::vector<FamilyCheck> checks;
    std::vector<digit_t> fixed_point_counts;  // |F_n| per validated level
    std::vector<BigRat> fixed_point_density;  // |F_n| / q_n
    bool ok = true;
};

/// Bijectivity, endpoint fixing, per-level distinctness, block constancy,
/// and the fixed-point sets F_n with densities.
FamilyReport validate_family(const BaseSequence& space, const PermutationFamily& family,
                             std::size_t levels, bool expect_fixes_zero = false,
                             bool expect_fixes_max = false, bool expect_distinct = false);

}  // namespace odo
