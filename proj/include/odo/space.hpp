#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <variant>
#include <vector>

#include "odo/numeric.hpp"

namespace odo {

/// The defining sequence (q_n) of the product space X = prod {0..q_n-1},
/// with exact heights h_0 = 1, h_{n+1} = h_n * q_n.
///
/// Three storage forms:
///  - explicit: a finite list, accessible levels = list length;
///  - cyclic:   a finite block repeated forever;
///  - rule:     q_n computed on demand (every value must fit digit_t);
///  - factored: prime-exponent vectors; point dynamics is disabled on such
///    levels, only exact h bookkeeping and logs are available.
class BaseSequence {
  public:
    static BaseSequence explicit_list(std::vector<digit_t> qs);
    static BaseSequence cyclic(std::vector<digit_t> block);
    static BaseSequence rule(std::function<digit_t(std::size_t)> fn,
                             std::optional<std::size_t> levels = std::nullopt);
    static BaseSequence factored(std::vector<FactoredInt> qs);

    /// Number of accessible levels; nullopt means unbounded.
    std::optional<std::size_t> levels() const;

    bool is_factored() const { return std::holds_alternative<Factored>(impl_); }

    /// q(n) as a machine integer. Throws on factored levels that do not
    /// expand, or past the accessible range.
    digit_t q(std::size_t n) const;

    /// q(n) in factored form (exact for every storage kind).
    FactoredInt q_factored(std::size_t n) const;

    /// Exact h(n) = q_0 ... q_{n-1}; h(0) = 1. Cached.
    BigInt h(std::size_t n) const;

    /// h(n) in factored form, for levels where expansion is hopeless.
    FactoredInt h_factored(std::size_t n) const;

    /// ln h(n) with directed rounding.
    Real log_h(std::size_t n, mpfr_prec_t prec, mpfr_rnd_t rnd) const;

  private:
    struct Explicit { std::vector<digit_t> qs; };
    struct Cyclic { std::vector<digit_t> block; };
    struct Rule {
        std::function<digit_t(std::size_t)> fn;
        std::optional<std::size_t> levels;
    };
    struct Factored { std::vector<FactoredInt> qs; };

    void check_level(std::size_t n) const;

    std::variant<Explicit, Cyclic, Rule, Factored> impl_;
    // Lazy caches live behind a shared state with a mutex so copies of the
    // sequence share materialization and parallel sections stay safe.
    struct CacheState;
    mutable std::shared_ptr<CacheState> cache_;
};

enum class Tail { Min, Max, Unspecified };

/// A point of X: a finite digit prefix plus a tail policy. Operations that
/// would need a digit an Unspecified tail does not carry throw
/// UndeterminedError instead of fabricating one.
struct Point {
    std::vector<digit_t> digits;
    Tail tail = Tail::Unspecified;

    static Point min_point() { return {{}, Tail::Min}; }
    static Point max_point() { return {{}, Tail::Max}; }
};

/// Digit of p at level i, materialized from the tail when needed.
digit_t digit_at(const BaseSequence& space, const Point& p, std::size_t i);

/// Validates digit ranges of the prefix.
void validate_point(const BaseSequence& space, const Point& p);

bool same_point(const BaseSequence& space, const Point& a, const Point& b,
                std::size_t min_levels);

/// A cylinder of length `level`: at each coordinate below `level` either a
/// single digit, a sorted digit subset, or unconstrained (empty = bullet).
class Cylinder {
  public:
    Cylinder() = default;
    /// [x_0,...,x_{k-1}]_k
    static Cylinder of_prefix(const BaseSequence& space, const std::vector<digit_t>& prefix);
    /// General form; an empty constraint vector entry means unconstrained.
    static Cylinder of_constraints(const BaseSequence& space,
                                   std::vector<std::vector<digit_t>> constraints);

    std::size_t level() const { return constraints_.size(); }
    const std::vector<std::vector<digit_t>>& constraints() const { return constraints_; }

    bool contains(const BaseSequence& space, const Point& p) const;
    BigRat measure(const BaseSequence& space) const;

    bool operator==(const Cylinder& o) const { return constraints_ == o.constraints_; }

  private:
    std::vector<std::vector<digit_t>> constraints_;  // canonical: sorted, deduped
};

/// Uniform block decomposition of {0..q_n-1} per level: q(n) = c(n) * qt(n),
/// block j = [j*c, (j+1)*c). The general (non-uniform) case is carried as
/// explicit block boundaries.
struct BlockStructure {
    std::vector<std::pair<digit_t, digit_t>> blocks;  // (offset, size), consecutive

    static BlockStructure uniform(digit_t q, digit_t c);
    digit_t block_of(digit_t v) const;
    digit_t count() const { return static_cast<digit_t>(blocks.size()); }
};

enum class PartitionKind { Plain, BlockCollapsed };

/// P(l): all l-cylinders, h(l) atoms. Ptilde(l): l-cylinders with the last
/// coordinate collapsed along blocks of level l-1, h(l-1)*qt(l-1) atoms.
class Partition {
  public:
    static Partition plain(std::size_t level);
    static Partition block_collapsed(std::size_t level, BlockStructure last_level_blocks);

    PartitionKind kind() const { return kind_; }
    std::size_t level() const { return level_; }

    BigInt atom_count(const BaseSequence& space) const;
    std::vector<Cylinder> atoms(const BaseSequence& space) const;

    /// Index of the atom containing p, in the canonical enumeration
    /// (positional: sum_{i<l-1} h_i x_i + h_{l-1} * last), where `last` is the
    /// digit (plain) or the block index (collapsed).
    BigInt atom_of(const BaseSequence& space, const Point& p) const;

    const BlockStructure& blocks() const;

  private:
    PartitionKind kind_ = PartitionKind::Plain;
    std::size_t level_ = 0;
    std::optional<BlockStructure> blocks_;
};

}  // namespace odo
