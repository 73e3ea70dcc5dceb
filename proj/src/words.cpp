#include "odo/words.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace odo {

digit_t atom_index(const BaseSequence& space, const Partition& part, const Point& p) {
    BigInt idx = part.atom_of(space, p);
    if (!idx.fits_slong_p()) throw ResourceError("atom index exceeds the machine range");
    return static_cast<digit_t>(idx.get_si());
}

Partition default_partition(const OdomutantSystem& sys, std::size_t l) {
    const auto* m = sys.family().multiplicity_structure();
    if (m && l >= 1 && l - 1 < m->c.size() && m->c[l - 1] > 1)
        return Partition::block_collapsed(l, m->blocks(sys.space(), l - 1));
    return Partition::plain(l);
}

Word code_word(const OdomutantSystem& sys, const Point& p, const Partition& part,
               std::size_t length) {
    Word w;
    w.reserve(length);
    Point cur = p;
    for (std::size_t j = 0; j < length; ++j) {
        if (j > 0) cur = apply_T(sys, cur);
        w.push_back(atom_index(sys.space(), part, cur));
    }
    return w;
}

namespace {

void require_fixes_zero(const OdomutantSystem& sys) {
    if (!sys.family().fixes_zero())
        throw DomainError("tower words need a family whose permutations all fix 0");
}

// Base tower words at level l-1: the h(l-1)-word of any point of
// [0,...,0,x_{l-1}]_l, one per x_{l-1}.
std::vector<Word> base_tower_words(const OdomutantSystem& sys, const Partition& part) {
    const BaseSequence& space = sys.space();
    std::size_t l = part.level();
    if (l == 0) throw ConfigError("tower words need a partition level >= 1");
    digit_t q_base = space.q(l - 1);
    std::size_t h_base = space.h(l - 1).get_ui();
    std::vector<Word> words(static_cast<std::size_t>(q_base));
    for (digit_t x = 0; x < q_base; ++x) {
        Word w;
        w.reserve(h_base);
        for (std::size_t k = 0; k < h_base; ++k) {
            // digits of k in the mixed radix (q_0, ..., q_{l-2})
            std::size_t rem = k;
            std::vector<digit_t> kd(l - 1);
            for (std::size_t i = 0; i + 1 < l; ++i) {
                kd[i] = static_cast<digit_t>(rem % space.q(i));
                rem /= space.q(i);
            }
            // y-recursion down from the tower index
            std::vector<digit_t> y(l, 0);
            y[l - 1] = x;
            for (std::size_t i = l - 1; i-- > 0;)
                y[i] = sys.family().sigma_inv(i, y[i + 1], kd[i]);
            digit_t letter = 0;
            for (std::size_t i = 0; i + 1 < l; ++i)
                letter += static_cast<digit_t>(space.h(i).get_ui()) * y[i];
            digit_t last = (part.kind() == PartitionKind::BlockCollapsed)
                               ? part.blocks().block_of(x)
                               : x;
            letter += static_cast<digit_t>(space.h(l - 1).get_ui()) * last;
            w.push_back(letter);
        }
        words[static_cast<std::size_t>(x)] = std::move(w);
    }
    return words;
}

}  // namespace

std::vector<Word> tower_words(const OdomutantSystem& sys, const Partition& part, std::size_t n,
                              std::uint64_t letter_budget) {
    require_fixes_zero(sys);
    const BaseSequence& space = sys.space();
    std::size_t l = part.level();
    if (n + 1 < l) throw ConfigError("tower words need n >= l-1");

    // Letters emitted across all levels: sum_k q_k h_k for k = l-1 .. n.
    BigInt letters = 0;
    for (std::size_t k = l - 1; k <= n; ++k) letters += BigInt(space.q(k)) * space.h(k);
    if (letters > BigInt(letter_budget))
        throw ResourceError("tower words need " + letters.get_str() + " letters, over budget " +
                            std::to_string(letter_budget));

    std::vector<Word> cur = base_tower_words(sys, part);
    for (std::size_t k = l - 1; k < n; ++k) {
        digit_t q_next = space.q(k + 1);
        std::size_t h_next = space.h(k + 1).get_ui();
        std::vector<Word> next(static_cast<std::size_t>(q_next));
        for (digit_t x = 0; x < q_next; ++x) {
            Word w;
            w.reserve(h_next);
            for (digit_t i = 0; i < space.q(k); ++i) {
                const Word& piece = cur[sys.family().sigma_inv(k, x, i)];
                w.insert(w.end(), piece.begin(), piece.end());
            }
            next[static_cast<std::size_t>(x)] = std::move(w);
        }
        cur = std::move(next);
    }
    return cur;
}

Word tower_word(const OdomutantSystem& sys, const Partition& part, std::size_t n, digit_t x_n,
                std::uint64_t letter_budget) {
    auto all = tower_words(sys, part, n, letter_budget);
    if (x_n < 0 || x_n >= static_cast<digit_t>(all.size()))
        throw DomainError("tower index outside range");
    return all[static_cast<std::size_t>(x_n)];
}

WordCountResult count_words(const OdomutantSystem& sys, const Partition& part, std::size_t n,
                            CountMethod method, std::uint64_t letter_budget) {
    const BaseSequence& space = sys.space();
    WordCountResult res;
    res.level = part.level();
    res.n = n;
    res.method = method;

    auto words = tower_words(sys, part, n, letter_budget);
    std::size_t hn = space.h(n).get_ui();

    if (method == CountMethod::Recursion) {
        std::set<Word> distinct(words.begin(), words.end());
        res.count = distinct.size();
        res.exact = false;  // bottom words only: a lower-bound surrogate
    } else {
        // Realizable successor pairs of level-(n+1) towers: inside a level-
        // (n+2) block, tower (sigma_b)^{-1}(i) is followed by
        // (sigma_b)^{-1}(i+1); across block boundaries the last tower of any
        // block is followed by tower 0 (the first tower of every block).
        digit_t qn = space.q(n);
        digit_t qn1 = space.q(n + 1);
        std::set<std::pair<digit_t, digit_t>> pairs;
        for (digit_t b = 0; b < qn1; ++b) {
            for (digit_t i = 0; i + 1 < qn; ++i)
                pairs.insert(
                    {sys.family().sigma_inv(n, b, i), sys.family().sigma_inv(n, b, i + 1)});
            pairs.insert({sys.family().sigma_inv(n, b, qn - 1), 0});
        }
        BigInt emitted = BigInt(pairs.size()) * BigInt(hn) * BigInt(hn);
        if (emitted > BigInt(letter_budget))
            throw ResourceError("brute enumeration needs " + emitted.get_str() +
                                " letters, over budget; h(n) = " + space.h(n).get_str());
        std::set<Word> distinct;
        Word w(hn);
        for (auto& [u, v] : pairs) {
            const Word& wu = words[static_cast<std::size_t>(u)];
            const Word& wv = words[static_cast<std::size_t>(v)];
            for (std::size_t o = 0; o < hn; ++o) {
                std::copy(wu.begin() + static_cast<std::ptrdiff_t>(o), wu.end(), w.begin());
                std::copy(wv.begin(), wv.begin() + static_cast<std::ptrdiff_t>(o),
                          w.begin() + static_cast<std::ptrdiff_t>(hn - o));
                distinct.insert(w);
            }
        }
        res.count = distinct.size();
        res.exact = true;
    }

    res.log_count_over_h = std::log(double(res.count)) / space.h(n).get_d();
    res.lower_bound = BigInt(space.q(n));
    if (n >= 1) {
        BigInt up = space.h(n - 1) * BigInt(space.q(n)) * BigInt(space.q(n - 1)) *
                    BigInt(space.q(n - 1));
        mpz_mul_2exp(up.get_mpz_t(), up.get_mpz_t(), static_cast<mp_bitcnt_t>(space.q(n - 1)));
        res.upper_bound = up;
    }
    return res;
}

digit_t kappa_of(const OdomutantSystem& sys, std::size_t k) {
    const auto* m = sys.family().multiplicity_structure();
    if (!m) throw DomainError("kappa needs a multiplicity structure");
    if (k == 0 || k > m->levels()) throw DomainError("kappa level out of range");
    std::size_t n = k - 1;  // tau level feeding kappa_k
    digit_t qt_n = m->qt[n];
    digit_t c_n = m->c[n];
    digit_t qt_n1 = m->qt[n + 1];
    std::map<std::vector<std::vector<digit_t>>, digit_t> fibers;
    for (digit_t j = 0; j < qt_n1; ++j) {
        std::vector<std::vector<digit_t>> image(static_cast<std::size_t>(qt_n));
        for (digit_t blk = 0; blk < qt_n; ++blk) {
            std::vector<digit_t> img;
            for (digit_t v = blk * c_n; v < (blk + 1) * c_n; ++v)
                img.push_back(
                    m->tau[n][static_cast<std::size_t>(j)][static_cast<std::size_t>(v)]);
            std::sort(img.begin(), img.end());
            image[static_cast<std::size_t>(blk)] = std::move(img);
        }
        fibers[image] += 1;
    }
    digit_t kappa = fibers.begin()->second;
    for (auto& [img, cnt] : fibers)
        if (cnt != kappa)
            throw ValidationError("block-image fibers are not uniform at level " +
                                  std::to_string(k));
    if (qt_n1 % kappa != 0) throw InternalError("kappa does not divide qt");
    return kappa;
}

KappaBound kappa_lower_bound(const OdomutantSystem& sys, std::size_t l, std::size_t n) {
    const auto* m = sys.family().multiplicity_structure();
    if (!m) throw DomainError("kappa bound needs a multiplicity structure");
    if (l < 1 || n < l) throw ConfigError("kappa bound needs n >= l >= 1");
    const BaseSequence& space = sys.space();
    KappaBound out;
    BigInt denom = 1;
    for (std::size_t k = l; k <= n; ++k) {
        digit_t kap = kappa_of(sys, k);
        out.kappas.push_back(kap);
        BigInt e = space.h(n) / space.h(k);
        if (!e.fits_ulong_p()) throw ResourceError("kappa exponent too large");
        denom *= pow_big(BigInt(kap), e.get_ui());
    }
    out.bound = BigRat(BigInt(m->qt[n]), denom);
    out.bound.canonicalize();
    auto part = Partition::block_collapsed(l, m->blocks(space, l - 1));
    auto wc = count_words(sys, part, n, CountMethod::Recursion);
    out.recursion_count = wc.count;
    return out;
}

EntropyTable entropy_estimate(const OdomutantSystem& sys, std::size_t l,
                              const std::vector<std::size_t>& ns, CountMethod method,
                              std::uint64_t letter_budget) {
    const BaseSequence& space = sys.space();
    EntropyTable t;
    t.level = l;
    Partition part = default_partition(sys, l);
    double prev_target = 0;
    bool first = true;
    for (std::size_t n : ns) {
        EntropyRow row;
        row.n = n;
        row.words = count_words(sys, part, n, method, letter_budget);
        row.estimate = row.words.log_count_over_h;
        row.target = std::log(double(space.q(n))) / space.h(n).get_d();
        if (sgn(row.words.upper_bound) > 0)
            row.upper_estimate =
                log_of(row.words.upper_bound, 64, RND_N).to_double() / space.h(n).get_d();
        if (!first && row.target > prev_target) t.target_decreasing = false;
        prev_target = row.target;
        first = false;
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::size_t lcs_length(const Word& a, const Word& b, std::optional<std::size_t> band) {
    if (a.size() != b.size()) throw DomainError("f-metric needs equal word lengths");
    std::size_t n = a.size();
    if (n == 0) return 0;
    std::vector<std::uint32_t> prev(n + 1, 0), cur(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        std::size_t jlo = 1, jhi = n;
        if (band) {
            jlo = (i > *band) ? i - *band : 1;
            jhi = std::min(n, i + *band);
            for (std::size_t j = 0; j < jlo; ++j) cur[j] = prev[j];
        }
        for (std::size_t j = jlo; j <= jhi; ++j) {
            if (a[i - 1] == b[j - 1])
                cur[j] = prev[j - 1] + 1;
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        for (std::size_t j = jhi + 1; j <= n; ++j) cur[j] = cur[jhi];
        std::swap(prev, cur);
    }
    return prev[n];
}

BigRat f_metric(const Word& a, const Word& b, std::optional<std::size_t> band) {
    std::size_t n = a.size();
    if (n == 0) throw DomainError("f-metric needs length >= 1");
    std::size_t k = lcs_length(a, b, band);
    BigRat f = BigRat(BigInt(n - k), BigInt(n));
    f.canonicalize();
    return f;
}

std::size_t d_metric(const Word& a, const Word& b) {
    if (a.size() != b.size()) throw DomainError("d-metric needs equal word lengths");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) ++d;
    return d;
}

BigRat d_metric_normalized(const Word& a, const Word& b) {
    if (a.empty()) throw DomainError("d-metric needs length >= 1");
    BigRat d = BigRat(BigInt(d_metric(a, b)), BigInt(a.size()));
    d.canonicalize();
    return d;
}

Lb0Report lb0_report(const OdomutantSystem& sys, const Partition& part, std::size_t N,
                     const BigRat& epsilon, std::uint64_t cell_budget) {
    const BaseSequence& space = sys.space();
    Lb0Report rep;
    rep.N = N;
    rep.epsilon = epsilon;

    // Depth at which the all-max sliver resolves for endpoint-fixing
    // families: all its points share the first h(depth-1) > N letters after
    // the wrap.
    std::size_t sliver_depth = 1;
    while (space.h(sliver_depth - 1) <= BigInt(N) + 1) ++sliver_depth;
    sliver_depth += 1;

    std::map<Word, BigRat> masses;
    std::uint64_t cells_used = 0;
    std::deque<std::vector<digit_t>> queue;
    queue.push_back({});
    while (!queue.empty()) {
        if (++cells_used > cell_budget) {
            rep.partial = true;
            for (auto& cell : queue) {
                BigRat m(BigInt(1), space.h(cell.size()));
                rep.unresolved_mass += m;
            }
            break;
        }
        std::vector<digit_t> cell = std::move(queue.front());
        queue.pop_front();
        BigRat mass(BigInt(1), space.h(cell.size()));
        Point p{cell, Tail::Unspecified};
        try {
            Point first = apply_T(sys, p);
            Word w = code_word(sys, first, part, N);
            masses[w] += mass;
            continue;
        } catch (const UndeterminedError&) {
        }
        if (cell.size() >= sliver_depth) {
            if (sys.extends_to_homeomorphism()) {
                Point q{cell, Tail::Max};
                Point first = apply_T(sys, q);
                Word w = code_word(sys, first, part, N);
                masses[w] += mass;
            } else {
                rep.unresolved_mass += mass;
                rep.partial = true;
            }
            continue;
        }
        digit_t qn = space.q(cell.size());
        for (digit_t v = 0; v < qn; ++v) {
            auto child = cell;
            child.push_back(v);
            queue.push_back(std::move(child));
        }
    }
    rep.unresolved_mass.canonicalize();

    std::vector<std::pair<Word, BigRat>> items(masses.begin(), masses.end());
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    rep.distinct_words = items.size();
    for (auto& [w, m] : items) rep.resolved_mass += m;
    rep.resolved_mass.canonicalize();
    rep.word_masses = items;

    for (std::size_t i = 0; i < items.size(); ++i)
        for (std::size_t j = i + 1; j < items.size(); ++j) {
            BigRat f = f_metric(items[i].first, items[j].first);
            if (f > rep.global_max_f) rep.global_max_f = f;
        }

    // greedy clusters: heaviest unused anchor, extend while pairwise close
    std::vector<bool> used(items.size(), false);
    for (std::size_t a = 0; a < items.size(); ++a) {
        if (used[a]) continue;
        Lb0Cluster cl;
        std::vector<std::size_t> members{a};
        used[a] = true;
        cl.words = 1;
        cl.mass = items[a].second;
        for (std::size_t b = a + 1; b < items.size(); ++b) {
            if (used[b]) continue;
            bool close = true;
            BigRat worst(0);
            for (std::size_t m : members) {
                BigRat f = f_metric(items[m].first, items[b].first);
                if (f > epsilon) {
                    close = false;
                    break;
                }
                if (f > worst) worst = f;
            }
            if (close) {
                members.push_back(b);
                used[b] = true;
                cl.words += 1;
                cl.mass += items[b].second;
                if (worst > cl.max_inside_f) cl.max_inside_f = worst;
            }
        }
        cl.mass.canonicalize();
        if (cl.mass > rep.best_coverage) rep.best_coverage = cl.mass;
        rep.clusters.push_back(std::move(cl));
    }
    return rep;
}

}  // namespace odo
