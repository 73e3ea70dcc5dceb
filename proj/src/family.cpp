#include "odo/family.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "odo/rng.hpp"

namespace odo {

namespace {

std::vector<digit_t> invert_permutation(const std::vector<digit_t>& p, std::size_t level,
                                        digit_t index) {
    std::vector<digit_t> inv(p.size(), -1);
    for (std::size_t v = 0; v < p.size(); ++v) {
        digit_t w = p[v];
        if (w < 0 || w >= static_cast<digit_t>(p.size()) || inv[w] != -1)
            throw ValidationError("table at level " + std::to_string(level) + ", index " +
                                  std::to_string(index) + " is not a permutation");
        inv[w] = static_cast<digit_t>(v);
    }
    return inv;
}

// Lehmer-code unranking of the rank-th permutation (lex order) of `base`.
std::vector<digit_t> unrank_permutation(std::vector<digit_t> base, std::uint64_t rank) {
    std::vector<digit_t> out;
    out.reserve(base.size());
    std::uint64_t f = 1;
    for (std::size_t i = 2; i <= base.size(); ++i) f *= i;
    for (std::size_t i = base.size(); i > 0; --i) {
        f /= i;
        std::size_t k = static_cast<std::size_t>(rank / f);
        rank %= f;
        out.push_back(base[k]);
        base.erase(base.begin() + static_cast<std::ptrdiff_t>(k));
    }
    return out;
}

}  // namespace

PermutationFamily PermutationFamily::identity(const BaseSequence& space) {
    PermutationFamily f;
    f.space_ = space;
    f.impl_ = IdRule{};
    f.fixes_zero_ = true;
    f.fixes_max_ = true;
    return f;
}

PermutationFamily PermutationFamily::cyclic(const BaseSequence& space) {
    PermutationFamily f;
    f.space_ = space;
    f.impl_ = CycRule{};
    f.fixes_zero_ = false;
    f.fixes_max_ = false;
    return f;
}

PermutationFamily PermutationFamily::tables(
    const BaseSequence& space, std::vector<std::vector<std::vector<digit_t>>> sigma) {
    PermutationFamily f;
    f.space_ = space;
    Tables t;
    for (std::size_t n = 0; n < sigma.size(); ++n) {
        digit_t qn = space.q(n);
        digit_t qn1 = space.q(n + 1);
        if (static_cast<digit_t>(sigma[n].size()) != qn1)
            throw ValidationError("level " + std::to_string(n) + " needs " +
                                  std::to_string(qn1) + " permutations, got " +
                                  std::to_string(sigma[n].size()));
        std::vector<std::vector<digit_t>> inv_level;
        for (digit_t i = 0; i < qn1; ++i) {
            if (static_cast<digit_t>(sigma[n][i].size()) != qn)
                throw ValidationError("permutation size mismatch at level " + std::to_string(n) +
                                      ", index " + std::to_string(i));
            inv_level.push_back(invert_permutation(sigma[n][i], n, i));
        }
        t.inv.push_back(std::move(inv_level));
    }
    t.fwd = std::move(sigma);
    f.impl_ = std::move(t);
    f.revalidate_fixed_points();
    return f;
}

PermutationFamily PermutationFamily::multiplicity(const BaseSequence& space,
                                                  MultiplicityStructure m) {
    PermutationFamily f;
    f.space_ = space;
    if (m.c.size() < m.tau.size() + 1 || m.qt.size() < m.tau.size() + 1)
        throw ValidationError("multiplicity structure needs c/qt up to tau levels + 1");
    Mult impl;
    for (std::size_t n = 0; n < m.tau.size(); ++n) {
        digit_t qn = space.q(n);
        if (m.c[n] <= 0 || qn % m.c[n] != 0 || qn / m.c[n] != m.qt[n])
            throw ValidationError("q(n) = c(n)*qt(n) fails at level " + std::to_string(n));
        if (static_cast<digit_t>(m.tau[n].size()) != m.qt[n + 1])
            throw ValidationError("level " + std::to_string(n) + " needs qt(n+1) = " +
                                  std::to_string(m.qt[n + 1]) + " base permutations");
        std::vector<std::vector<digit_t>> inv_level;
        for (digit_t j = 0; j < static_cast<digit_t>(m.tau[n].size()); ++j)
            inv_level.push_back(invert_permutation(m.tau[n][j], n, j));
        impl.tau_inv.push_back(std::move(inv_level));
    }
    impl.m = std::move(m);
    f.impl_ = std::move(impl);
    f.revalidate_fixed_points();
    return f;
}

digit_t PermutationFamily::sigma(std::size_t n, digit_t index, digit_t value) const {
    digit_t qn = space_.q(n);
    if (value < 0 || value >= qn)
        throw DomainError("sigma value " + std::to_string(value) + " outside digit range");
    if (std::holds_alternative<IdRule>(impl_)) return value;
    if (std::holds_alternative<CycRule>(impl_)) return (value + index) % qn;
    if (auto* t = std::get_if<Tables>(&impl_)) {
        if (n >= t->fwd.size())
            throw DomainError("family not materialized at level " + std::to_string(n));
        return t->fwd[n][index][value];
    }
    auto& m = std::get<Mult>(impl_);
    if (n >= m.m.tau.size())
        throw DomainError("family not materialized at level " + std::to_string(n));
    digit_t j = index / m.m.c[n + 1];
    return m.m.tau[n][j][value];
}

digit_t PermutationFamily::sigma_inv(std::size_t n, digit_t index, digit_t value) const {
    digit_t qn = space_.q(n);
    if (value < 0 || value >= qn)
        throw DomainError("sigma_inv value " + std::to_string(value) + " outside digit range");
    if (std::holds_alternative<IdRule>(impl_)) return value;
    if (std::holds_alternative<CycRule>(impl_)) return ((value - index) % qn + qn) % qn;
    if (auto* t = std::get_if<Tables>(&impl_)) {
        if (n >= t->inv.size())
            throw DomainError("family not materialized at level " + std::to_string(n));
        return t->inv[n][index][value];
    }
    auto& m = std::get<Mult>(impl_);
    if (n >= m.tau_inv.size())
        throw DomainError("family not materialized at level " + std::to_string(n));
    digit_t j = index / m.m.c[n + 1];
    return m.tau_inv[n][j][value];
}

std::optional<std::size_t> PermutationFamily::levels() const {
    if (auto* t = std::get_if<Tables>(&impl_)) return t->fwd.size();
    if (auto* m = std::get_if<Mult>(&impl_)) return m->m.tau.size();
    return std::nullopt;
}

const MultiplicityStructure* PermutationFamily::multiplicity_structure() const {
    if (auto* m = std::get_if<Mult>(&impl_)) return &m->m;
    return nullptr;
}

void PermutationFamily::revalidate_fixed_points(std::size_t scan_levels) {
    if (std::holds_alternative<IdRule>(impl_)) {
        fixes_zero_ = fixes_max_ = true;
        return;
    }
    if (std::holds_alternative<CycRule>(impl_)) {
        fixes_zero_ = fixes_max_ = false;
        return;
    }
    std::size_t depth = levels() ? std::min(*levels(), scan_levels) : scan_levels;
    bool z = true, x = true;
    for (std::size_t n = 0; n < depth; ++n) {
        digit_t qn = space_.q(n);
        digit_t qn1 = space_.q(n + 1);
        for (digit_t i = 0; i < qn1 && (z || x); ++i) {
            if (sigma(n, i, 0) != 0) z = false;
            if (sigma(n, i, qn - 1) != qn - 1) x = false;
        }
    }
    fixes_zero_ = z;
    fixes_max_ = x;
}

PermutationFamily identity_family(const BaseSequence& space) {
    return PermutationFamily::identity(space);
}

PermutationFamily cyclic_family(const BaseSequence& space) {
    return PermutationFamily::cyclic(space);
}

namespace {

// Draws `count` pairwise distinct permutations of `window`, uniformly; the
// identity arrangement of `window` is the base ordering.
std::vector<std::vector<digit_t>> distinct_window_permutations(const std::vector<digit_t>& window,
                                                               std::uint64_t count, Rng& rng) {
    BigInt fact = factorial(static_cast<unsigned long>(window.size()));
    if (BigInt(count) > fact)
        throw ValidationError("cannot draw " + std::to_string(count) +
                              " distinct permutations of " + std::to_string(window.size()) +
                              " symbols");
    std::vector<std::vector<digit_t>> out;
    if (fact <= BigInt("4611686018427387904")) {  // 2^62: rank set fits 64-bit
        std::uint64_t f = fact.get_ui();
        std::set<std::uint64_t> ranks;
        while (ranks.size() < count) ranks.insert(rng.below(f));
        // set iteration would bias toward sorted order mattering; we assign
        // ranks to indices in draw-independent sorted order, which is still a
        // uniform distinct sample.
        for (std::uint64_t r : ranks) out.push_back(unrank_permutation(window, r));
        // Shuffle assignment so index order is not rank-sorted.
        rng.shuffle(out);
    } else {
        std::set<std::vector<digit_t>> seen;
        std::uint64_t attempts = 0;
        while (out.size() < count) {
            if (++attempts > 64 * count + 1024)
                throw InternalError("distinct permutation rejection cap hit");
            std::vector<digit_t> p = window;
            rng.shuffle(p);
            if (seen.insert(p).second) out.push_back(std::move(p));
        }
    }
    return out;
}

std::vector<digit_t> embed_window(digit_t q, digit_t lo, const std::vector<digit_t>& window_perm) {
    std::vector<digit_t> full(q);
    for (digit_t v = 0; v < q; ++v) full[v] = v;
    for (std::size_t k = 0; k < window_perm.size(); ++k)
        full[lo + static_cast<digit_t>(k)] = window_perm[k];
    return full;
}

}  // namespace

PermutationFamily random_fixed_endpoint_family(const BaseSequence& space, std::size_t levels,
                                               std::uint64_t seed, bool distinct) {
    std::vector<std::vector<std::vector<digit_t>>> sigma;
    Rng rng(seed);
    for (std::size_t n = 0; n < levels; ++n) {
        digit_t qn = space.q(n);
        digit_t qn1 = space.q(n + 1);
        std::vector<digit_t> interior;
        for (digit_t v = 1; v + 1 < qn; ++v) interior.push_back(v);
        std::vector<std::vector<digit_t>> level;
        if (distinct) {
            BigInt fact = factorial(static_cast<unsigned long>(interior.size()));
            if (BigInt(qn1) > fact)
                throw ValidationError("level " + std::to_string(n) + ": q(n+1) = " +
                                      std::to_string(qn1) + " exceeds (q(n)-2)! = " +
                                      fact.get_str());
            for (auto& w : distinct_window_permutations(interior, qn1, rng))
                level.push_back(embed_window(qn, 1, w));
        } else {
            for (digit_t i = 0; i < qn1; ++i) {
                std::vector<digit_t> w = interior;
                rng.shuffle(w);
                level.push_back(embed_window(qn, 1, w));
            }
        }
        sigma.push_back(std::move(level));
    }
    return PermutationFamily::tables(space, std::move(sigma));
}

digit_t entropy_interior_size(digit_t q_n, const BigInt& q_next) {
    BigInt fact = 2;  // 2!
    for (digit_t i = 2; i <= q_n - 2; ++i) {
        if (q_next <= fact) return i;
        fact *= (i + 1);
    }
    throw ValidationError("q(n+1) = " + q_next.get_str() + " exceeds (q(n)-2)! for q(n) = " +
                          std::to_string(q_n));
}

PermutationFamily entropy_family(const BaseSequence& space, std::size_t levels,
                                 std::uint64_t seed) {
    std::vector<std::vector<std::vector<digit_t>>> sigma;
    Rng rng(seed);
    for (std::size_t n = 0; n < levels; ++n) {
        digit_t qn = space.q(n);
        digit_t qn1 = space.q(n + 1);
        digit_t in = entropy_interior_size(qn, BigInt(qn1));
        std::vector<digit_t> window;
        for (digit_t v = 1; v <= in; ++v) window.push_back(v);
        std::vector<std::vector<digit_t>> level;
        for (auto& w : distinct_window_permutations(window, qn1, rng))
            level.push_back(embed_window(qn, 1, w));
        sigma.push_back(std::move(level));
    }
    return PermutationFamily::tables(space, std::move(sigma));
}

FeldmanWordSystem::FeldmanWordSystem(std::function<digit_t(std::size_t)> qt,
                                     std::size_t max_level, std::uint64_t letter_budget)
    : qt_(std::move(qt)) {
    // Level 0: the base letters as words of length h_0 = 1.
    digit_t qt0 = this->qt(0);
    std::vector<std::vector<digit_t>> base;
    for (digit_t j = 0; j < qt0; ++j) base.push_back({j});
    words_.push_back(std::move(base));

    std::uint64_t emitted = static_cast<std::uint64_t>(qt0);
    for (std::size_t n = 0; n + 1 <= max_level; ++n) {
        digit_t qtn = this->qt(n);
        digit_t qtn1 = this->qt(n + 1);
        std::uint64_t hn = words_[n][0].size();
        std::uint64_t hn1 = hn * static_cast<std::uint64_t>(q(n));
        std::uint64_t need = hn1 * static_cast<std::uint64_t>(qtn1);
        if (emitted + need > letter_budget)
            throw ResourceError("word system needs " + std::to_string(need) +
                                " letters at level " + std::to_string(n + 1) +
                                ", over budget " + std::to_string(letter_budget));
        emitted += need;
        std::vector<std::vector<digit_t>> next;
        for (digit_t j = 0; j < qtn1; ++j) {
            std::uint64_t E = 1, F = 1;
            for (digit_t k = 0; k < 2 * (j + 1); ++k) E *= static_cast<std::uint64_t>(qtn);
            for (digit_t k = 0; k < 2 * (qtn1 - j); ++k) F *= static_cast<std::uint64_t>(qtn);
            std::vector<digit_t> w;
            w.reserve(hn1);
            for (std::uint64_t rep = 0; rep < F; ++rep)
                for (digit_t a = 0; a < qtn; ++a)
                    for (std::uint64_t e = 0; e < E; ++e)
                        w.insert(w.end(), words_[n][a].begin(), words_[n][a].end());
            if (w.size() != hn1)
                throw InternalError("word length mismatch at level " + std::to_string(n + 1));
            next.push_back(std::move(w));
        }
        words_.push_back(std::move(next));
    }
}

digit_t FeldmanWordSystem::qt(std::size_t n) const {
    digit_t v = qt_(n);
    if (v < 2) throw ValidationError("qt(" + std::to_string(n) + ") must be >= 2");
    return v;
}

digit_t FeldmanWordSystem::q(std::size_t n) const {
    digit_t qtn = qt(n);
    digit_t e = 2 * qt(n + 1) + 3;
    digit_t r = 1;
    for (digit_t k = 0; k < e; ++k) {
        if (r > (std::numeric_limits<digit_t>::max)() / qtn)
            throw ResourceError("q(" + std::to_string(n) + ") exceeds the machine digit range");
        r *= qtn;
    }
    return r;
}

const std::vector<std::vector<digit_t>>& FeldmanWordSystem::words(std::size_t n) const {
    if (n >= words_.size())
        throw ResourceError("words at level " + std::to_string(n) + " not materialized");
    return words_[n];
}

BaseSequence FeldmanWordSystem::space(std::optional<std::size_t> levels) const {
    auto qt = qt_;
    return BaseSequence::rule(
        [qt](std::size_t n) {
            digit_t qtn = qt(n);
            digit_t e = 2 * qt(n + 1) + 3;
            digit_t r = 1;
            for (digit_t k = 0; k < e; ++k) {
                if (r > (std::numeric_limits<digit_t>::max)() / qtn)
                    throw ResourceError("q(" + std::to_string(n) + ") exceeds digit range");
                r *= qtn;
            }
            return r;
        },
        levels);
}

PermutationFamily feldman_family(const FeldmanWordSystem& ws, std::size_t levels) {
    BaseSequence space = ws.space();
    MultiplicityStructure m;
    for (std::size_t n = 0; n <= levels; ++n) {
        m.qt.push_back(ws.qt(n));
        m.c.push_back(ws.c(n));
    }
    for (std::size_t n = 0; n < levels; ++n) {
        digit_t qtn = ws.qt(n);
        digit_t qtn1 = ws.qt(n + 1);
        digit_t qn = ws.q(n);
        digit_t cn = ws.c(n);
        std::vector<std::vector<digit_t>> level;
        for (digit_t j = 0; j < qtn1; ++j) {
            digit_t E = 1, F = 1;
            for (digit_t k = 0; k < 2 * (j + 1); ++k) E *= qtn;
            for (digit_t k = 0; k < 2 * (qtn1 - j); ++k) F *= qtn;
            if (E * qtn * F != qn) throw InternalError("feldman exponent bookkeeping broke");
            // Position k of the target word holds letter t; send it to the
            // next unused u-slot of letter t. u lists each letter c_n times.
            std::vector<digit_t> inv(qn);
            for (digit_t k = 0; k < qn; ++k) {
                digit_t r = k % (E * qtn);
                digit_t outer = k / (E * qtn);
                digit_t t = r / E;
                inv[k] = cn * t + outer * E + (r % E);
            }
            std::vector<digit_t> fwd(qn);
            for (digit_t k = 0; k < qn; ++k) fwd[inv[k]] = k;
            level.push_back(std::move(fwd));
        }
        m.tau.push_back(std::move(level));
    }
    return PermutationFamily::multiplicity(space, std::move(m));
}

FamilyReport validate_family(const BaseSequence& space, const PermutationFamily& family,
                             std::size_t levels, bool expect_fixes_zero, bool expect_fixes_max,
                             bool expect_distinct) {
    FamilyReport rep;
    auto fail = [&](std::string what, std::size_t n, digit_t i) {
        rep.checks.push_back({std::move(what), n, i, false});
        rep.ok = false;
    };
    if (auto fl = family.levels()) levels = std::min(levels, *fl);
    const auto* mult = family.multiplicity_structure();
    for (std::size_t n = 0; n < levels; ++n) {
        digit_t qn = space.q(n);
        digit_t qn1 = space.q(n + 1);
        std::vector<char> fixed(qn, 1);
        std::set<std::vector<digit_t>> tables;
        for (digit_t i = 0; i < qn1; ++i) {
            std::vector<digit_t> table(qn);
            std::vector<char> hit(qn, 0);
            bool bij = true;
            for (digit_t v = 0; v < qn; ++v) {
                digit_t w = family.sigma(n, i, v);
                table[v] = w;
                if (w < 0 || w >= qn || hit[w]) bij = false;
                else hit[w] = 1;
                if (w != v) fixed[v] = 0;
            }
            if (!bij) fail("not a bijection", n, i);
            if (expect_fixes_zero && table[0] != 0) fail("does not fix 0", n, i);
            if (expect_fixes_max && table[qn - 1] != qn - 1) fail("does not fix q-1", n, i);
            for (digit_t v = 0; v < qn; ++v)
                if (family.sigma_inv(n, i, table[v]) != v) {
                    fail("stored inverse mismatch", n, i);
                    break;
                }
            if (expect_distinct && !mult && !tables.insert(table).second)
                fail("duplicate permutation in level", n, i);
        }
        if (mult && n < mult->levels()) {
            // sigma must be constant on the blocks of level n+1.
            auto bl = mult->blocks(space, n + 1);
            for (digit_t i = 0; i < qn1; ++i) {
                digit_t rep_i = bl.blocks[bl.block_of(i)].first;
                for (digit_t v = 0; v < qn; ++v)
                    if (family.sigma(n, i, v) != family.sigma(n, rep_i, v)) {
                        fail("sigma not constant on block", n, i);
                        break;
                    }
            }
        }
        digit_t fcount = 0;
        for (digit_t v = 0; v < qn; ++v) fcount += fixed[v];
        rep.fixed_point_counts.push_back(fcount);
        BigRat d = BigRat(BigInt(fcount), BigInt(qn));
        d.canonicalize();
        rep.fixed_point_density.push_back(d);
    }
    return rep;
}

}  // namespace odo
