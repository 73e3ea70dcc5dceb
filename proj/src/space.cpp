#include "odo/space.hpp"

#include <algorithm>
#include <string>

namespace odo {

struct BaseSequence::CacheState {
    std::mutex mu;
    std::vector<BigInt> h{BigInt(1)};
    std::vector<digit_t> q;
};

namespace {

void check_q_value(digit_t q, std::size_t level) {
    if (q < 2)
        throw ValidationError("q(" + std::to_string(level) + ") = " + std::to_string(q) +
                              " violates q >= 2");
}

}  // namespace

BaseSequence BaseSequence::explicit_list(std::vector<digit_t> qs) {
    BaseSequence s;
    for (std::size_t i = 0; i < qs.size(); ++i) check_q_value(qs[i], i);
    s.impl_ = Explicit{std::move(qs)};
    s.cache_ = std::make_shared<CacheState>();
    return s;
}

BaseSequence BaseSequence::cyclic(std::vector<digit_t> block) {
    if (block.empty()) throw ValidationError("cyclic sequence needs a non-empty block");
    BaseSequence s;
    for (std::size_t i = 0; i < block.size(); ++i) check_q_value(block[i], i);
    s.impl_ = Cyclic{std::move(block)};
    s.cache_ = std::make_shared<CacheState>();
    return s;
}

BaseSequence BaseSequence::rule(std::function<digit_t(std::size_t)> fn,
                                std::optional<std::size_t> levels) {
    BaseSequence s;
    s.impl_ = Rule{std::move(fn), levels};
    s.cache_ = std::make_shared<CacheState>();
    return s;
}

BaseSequence BaseSequence::factored(std::vector<FactoredInt> qs) {
    BaseSequence s;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        // q >= 2 means: not the empty product.
        if (qs[i].is_one())
            throw ValidationError("q(" + std::to_string(i) + ") = 1 violates q >= 2");
    }
    s.impl_ = Factored{std::move(qs)};
    s.cache_ = std::make_shared<CacheState>();
    return s;
}

std::optional<std::size_t> BaseSequence::levels() const {
    if (auto* e = std::get_if<Explicit>(&impl_)) return e->qs.size();
    if (auto* f = std::get_if<Factored>(&impl_)) return f->qs.size();
    if (auto* r = std::get_if<Rule>(&impl_)) return r->levels;
    return std::nullopt;
}

void BaseSequence::check_level(std::size_t n) const {
    auto lv = levels();
    if (lv && n >= *lv)
        throw DomainError("level " + std::to_string(n) + " beyond accessible range " +
                          std::to_string(*lv));
}

digit_t BaseSequence::q(std::size_t n) const {
    check_level(n);
    {
        std::lock_guard<std::mutex> lk(cache_->mu);
        if (n < cache_->q.size()) return cache_->q[n];
    }
    digit_t v;
    if (auto* e = std::get_if<Explicit>(&impl_)) {
        v = e->qs[n];
    } else if (auto* c = std::get_if<Cyclic>(&impl_)) {
        v = c->block[n % c->block.size()];
    } else if (auto* r = std::get_if<Rule>(&impl_)) {
        v = r->fn(n);
        check_q_value(v, n);
    } else {
        auto& f = std::get<Factored>(impl_);
        BigInt z = f.qs[n].value(62);
        if (!z.fits_slong_p())
            throw ResourceError("q(" + std::to_string(n) + ") accessible only in factored form");
        v = static_cast<digit_t>(z.get_si());
    }
    std::lock_guard<std::mutex> lk(cache_->mu);
    if (n == cache_->q.size()) cache_->q.push_back(v);
    return v;
}

FactoredInt BaseSequence::q_factored(std::size_t n) const {
    check_level(n);
    if (auto* f = std::get_if<Factored>(&impl_)) return f->qs[n];
    return FactoredInt(BigInt(q(n)));
}

BigInt BaseSequence::h(std::size_t n) const {
    if (n > 0) check_level(n - 1);
    std::lock_guard<std::mutex> lk(cache_->mu);
    while (cache_->h.size() <= n) {
        std::size_t k = cache_->h.size() - 1;
        if (is_factored()) {
            // h through factored levels may not expand; fall back loudly.
            BigInt qk = q_factored(k).value(1u << 20);
            cache_->h.push_back(cache_->h.back() * qk);
        } else {
            const auto* e = std::get_if<Explicit>(&impl_);
            const auto* c = std::get_if<Cyclic>(&impl_);
            digit_t qk = e ? e->qs[k]
                           : (c ? c->block[k % c->block.size()] : std::get<Rule>(impl_).fn(k));
            check_q_value(qk, k);
            cache_->h.push_back(cache_->h.back() * BigInt(qk));
        }
    }
    return cache_->h[n];
}

FactoredInt BaseSequence::h_factored(std::size_t n) const {
    FactoredInt r;
    for (std::size_t i = 0; i < n; ++i) r.mul(q_factored(i));
    return r;
}

Real BaseSequence::log_h(std::size_t n, mpfr_prec_t prec, mpfr_rnd_t rnd) const {
    if (is_factored()) return h_factored(n).log(prec, rnd);
    return log_of(h(n), prec, rnd);
}

digit_t digit_at(const BaseSequence& space, const Point& p, std::size_t i) {
    if (i < p.digits.size()) return p.digits[i];
    switch (p.tail) {
        case Tail::Min:
            return 0;
        case Tail::Max:
            return space.q(i) - 1;
        case Tail::Unspecified:
            throw UndeterminedError(
                "digit " + std::to_string(i) + " not determined (prefix has " +
                    std::to_string(p.digits.size()) + ")",
                i + 1);
    }
    throw InternalError("bad tail");
}

void validate_point(const BaseSequence& space, const Point& p) {
    for (std::size_t i = 0; i < p.digits.size(); ++i) {
        digit_t q = space.q(i);
        if (p.digits[i] < 0 || p.digits[i] >= q)
            throw ValidationError("digit " + std::to_string(p.digits[i]) + " at level " +
                                  std::to_string(i) + " outside [0," + std::to_string(q) + ")");
    }
}

bool same_point(const BaseSequence& space, const Point& a, const Point& b,
                std::size_t min_levels) {
    std::size_t n = std::max({a.digits.size(), b.digits.size(), min_levels});
    for (std::size_t i = 0; i < n; ++i)
        if (digit_at(space, a, i) != digit_at(space, b, i)) return false;
    // Beyond both prefixes only the tail policies speak.
    if (a.digits.size() >= n && b.digits.size() >= n) return true;
    return a.tail == b.tail;
}

Cylinder Cylinder::of_prefix(const BaseSequence& space, const std::vector<digit_t>& prefix) {
    std::vector<std::vector<digit_t>> cs;
    cs.reserve(prefix.size());
    for (digit_t d : prefix) cs.push_back({d});
    return of_constraints(space, std::move(cs));
}

Cylinder Cylinder::of_constraints(const BaseSequence& space,
                                  std::vector<std::vector<digit_t>> constraints) {
    Cylinder c;
    for (std::size_t i = 0; i < constraints.size(); ++i) {
        auto& set = constraints[i];
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
        digit_t q = space.q(i);
        for (digit_t d : set)
            if (d < 0 || d >= q)
                throw ValidationError("cylinder digit " + std::to_string(d) + " at level " +
                                      std::to_string(i) + " outside [0," + std::to_string(q) +
                                      ")");
    }
    c.constraints_ = std::move(constraints);
    return c;
}

bool Cylinder::contains(const BaseSequence& space, const Point& p) const {
    for (std::size_t i = 0; i < constraints_.size(); ++i) {
        const auto& set = constraints_[i];
        if (set.empty()) continue;
        digit_t d = digit_at(space, p, i);
        if (!std::binary_search(set.begin(), set.end(), d)) return false;
    }
    return true;
}

BigRat Cylinder::measure(const BaseSequence& space) const {
    BigRat m(1);
    for (std::size_t i = 0; i < constraints_.size(); ++i) {
        const auto& set = constraints_[i];
        if (set.empty()) continue;
        m *= BigRat(BigInt(set.size()), BigInt(space.q(i)));
    }
    m.canonicalize();
    return m;
}

BlockStructure BlockStructure::uniform(digit_t q, digit_t c) {
    if (c <= 0 || q % c != 0)
        throw ValidationError("uniform blocks need c | q, got q=" + std::to_string(q) +
                              ", c=" + std::to_string(c));
    BlockStructure b;
    for (digit_t off = 0; off < q; off += c) b.blocks.push_back({off, c});
    return b;
}

digit_t BlockStructure::block_of(digit_t v) const {
    for (std::size_t j = 0; j < blocks.size(); ++j)
        if (v >= blocks[j].first && v < blocks[j].first + blocks[j].second)
            return static_cast<digit_t>(j);
    throw DomainError("value " + std::to_string(v) + " outside block range");
}

Partition Partition::plain(std::size_t level) {
    Partition p;
    p.kind_ = PartitionKind::Plain;
    p.level_ = level;
    return p;
}

Partition Partition::block_collapsed(std::size_t level, BlockStructure blocks) {
    if (level == 0)
        throw ConfigError("block-collapsed partition needs level >= 1");
    Partition p;
    p.kind_ = PartitionKind::BlockCollapsed;
    p.level_ = level;
    p.blocks_ = std::move(blocks);
    return p;
}

const BlockStructure& Partition::blocks() const {
    if (!blocks_) throw ConfigError("partition carries no block structure");
    return *blocks_;
}

BigInt Partition::atom_count(const BaseSequence& space) const {
    if (level_ == 0) return 1;
    if (kind_ == PartitionKind::Plain) return space.h(level_);
    return space.h(level_ - 1) * BigInt(blocks().count());
}

std::vector<Cylinder> Partition::atoms(const BaseSequence& space) const {
    std::vector<Cylinder> out;
    if (level_ == 0) {
        out.push_back(Cylinder::of_constraints(space, {}));
        return out;
    }
    BigInt n = atom_count(space);
    if (!n.fits_ulong_p() || n.get_ui() > (1u << 22))
        throw ResourceError("partition has too many atoms to materialize: " + n.get_str());

    std::vector<digit_t> digits(level_, 0);
    std::size_t free_levels = (kind_ == PartitionKind::Plain) ? level_ : level_ - 1;
    auto bump = [&](std::size_t upto) {
        for (std::size_t i = 0; i < upto; ++i) {
            if (++digits[i] < space.q(i)) return true;
            digits[i] = 0;
        }
        return false;
    };
    if (kind_ == PartitionKind::Plain) {
        do {
            std::vector<digit_t> prefix(digits.begin(), digits.begin() + level_);
            out.push_back(Cylinder::of_prefix(space, prefix));
        } while (bump(level_));
        return out;
    }
    // Emission order matches atom_of: index = prefix + h(l-1) * block.
    const auto& bl = blocks();
    for (digit_t j = 0; j < bl.count(); ++j) {
        std::fill(digits.begin(), digits.end(), 0);
        do {
            std::vector<std::vector<digit_t>> cs(level_);
            for (std::size_t i = 0; i + 1 < level_; ++i) cs[i] = {digits[i]};
            auto [off, len] = bl.blocks[j];
            for (digit_t d = off; d < off + len; ++d) cs[level_ - 1].push_back(d);
            out.push_back(Cylinder::of_constraints(space, std::move(cs)));
        } while (bump(free_levels));
    }
    return out;
}

BigInt Partition::atom_of(const BaseSequence& space, const Point& p) const {
    if (level_ == 0) return 0;
    BigInt idx = 0;
    std::size_t low = (kind_ == PartitionKind::Plain) ? level_ : level_ - 1;
    for (std::size_t i = 0; i < low; ++i) idx += space.h(i) * BigInt(digit_at(space, p, i));
    if (kind_ == PartitionKind::BlockCollapsed)
        idx += space.h(level_ - 1) * BigInt(blocks().block_of(digit_at(space, p, level_ - 1)));
    return idx;
}

}  // namespace odo
