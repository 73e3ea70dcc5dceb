#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "odo/rng.hpp"
#include "odo/words.hpp"

using namespace odo;

namespace {

Point bottom_point(std::size_t n, digit_t x_n) {
    Point p;
    p.tail = Tail::Min;
    p.digits.assign(n, 0);
    p.digits.push_back(x_n);
    return p;
}

// exhaustive LCS by scanning all subsequences of a (oracle for tiny words)
std::size_t lcs_exhaustive(const Word& a, const Word& b) {
    std::size_t best = 0;
    std::size_t n = a.size();
    for (std::size_t mask = 0; mask < (1u << n); ++mask) {
        Word sub;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) sub.push_back(a[i]);
        std::size_t j = 0;
        for (std::size_t i = 0; i < b.size() && j < sub.size(); ++i)
            if (b[i] == sub[j]) ++j;
        if (j == sub.size()) best = std::max(best, sub.size());
    }
    return best;
}

}  // namespace

TEST_CASE("code_word of the odometer cycles the 1-cylinders") {
    auto s = BaseSequence::cyclic({3, 2, 3});
    auto sys = OdomutantSystem(identity_family(s));
    auto part = Partition::plain(1);
    Word w = code_word(sys, Point::min_point(), part, 6);
    CHECK(w == Word{0, 1, 2, 0, 1, 2});
    CHECK(code_word(sys, Point::min_point(), part, 0).empty());
}

TEST_CASE("tower words equal coded words on bottom points (oracle)") {
    std::vector<OdomutantSystem> systems;
    systems.emplace_back(identity_family(BaseSequence::cyclic({3, 2, 3})));
    systems.emplace_back(entropy_family(BaseSequence::cyclic({6}), 8, 3));
    FeldmanWordSystem ws([](std::size_t) { return digit_t(2); }, 1);
    systems.emplace_back(feldman_family(ws, 6));

    for (auto& sys : systems) {
        const auto& s = sys.space();
        for (std::size_t l = 1; l <= 2; ++l) {
            auto part = default_partition(sys, l);
            for (std::size_t n = l - 1; n <= l + 1; ++n) {
                if (s.h(n) > 600) continue;
                auto words = tower_words(sys, part, n);
                for (digit_t x = 0; x < s.q(n); ++x) {
                    Word coded = code_word(sys, bottom_point(n, x), part, s.h(n).get_ui());
                    CHECK(words[std::size_t(x)] == coded);
                }
            }
        }
    }
}

TEST_CASE("tower words demand a family fixing zero") {
    auto s = BaseSequence::cyclic({4});
    auto sys = OdomutantSystem(cyclic_family(s));
    CHECK_THROWS_AS(tower_words(sys, Partition::plain(1), 2), DomainError);
}

TEST_CASE("base map is c-to-1 for a multiplicity family") {
    FeldmanWordSystem ws([](std::size_t) { return digit_t(2); }, 1);
    auto sys = OdomutantSystem(feldman_family(ws, 4));
    std::size_t l = 1;
    auto part = default_partition(sys, l);
    auto words = tower_words(sys, part, l - 1);
    std::map<Word, int> buckets;
    for (auto& w : words) buckets[w] += 1;
    digit_t c = ws.c(l - 1);
    CHECK(buckets.size() == std::size_t(ws.qt(l - 1)));
    for (auto& [w, cnt] : buckets) CHECK(cnt == c);
}

TEST_CASE("feldman tower words over Ptilde(1) are exactly the system words") {
    FeldmanWordSystem ws([](std::size_t) { return digit_t(2); }, 2);
    auto sys = OdomutantSystem(feldman_family(ws, 4));
    auto part = default_partition(sys, 1);
    for (std::size_t n = 0; n <= 2; ++n) {
        auto words = tower_words(sys, part, n, 1u << 26);
        for (digit_t x = 0; x < sys.space().q(n); ++x) {
            digit_t block = x / ws.c(n);
            CHECK(words[std::size_t(x)] == ws.words(n)[std::size_t(block)]);
        }
    }
}

TEST_CASE("Ptilde words are the letterwise projections of P words") {
    FeldmanWordSystem ws([](std::size_t) { return digit_t(2); }, 1);
    auto sys = OdomutantSystem(feldman_family(ws, 3));
    const auto& s = sys.space();
    std::size_t l = 1, n = 1;
    auto plain_words = tower_words(sys, Partition::plain(l), n, 1u << 26);
    auto coll = default_partition(sys, l);
    auto coll_words = tower_words(sys, coll, n, 1u << 26);
    digit_t c = ws.c(l - 1);
    std::size_t hl1 = s.h(l - 1).get_ui();
    for (digit_t x = 0; x < s.q(n); ++x)
        for (std::size_t k = 0; k < plain_words[0].size(); ++k) {
            digit_t letter = plain_words[std::size_t(x)][k];
            digit_t low = letter % digit_t(hl1);
            digit_t high = letter / digit_t(hl1);
            CHECK(coll_words[std::size_t(x)][k] == low + digit_t(hl1) * (high / c));
        }
}

TEST_CASE("word counting: odometer has h(l) words") {
    auto s = BaseSequence::cyclic({3, 2, 3});
    auto sys = OdomutantSystem(identity_family(s));
    auto res = count_words(sys, Partition::plain(1), 2, CountMethod::Brute);
    CHECK(res.count == 3);  // = h(1)
    CHECK(res.exact);
    auto res2 = count_words(sys, Partition::plain(2), 3, CountMethod::Brute);
    CHECK(res2.count == 6);  // = h(2)
}

TEST_CASE("word counting: distinct-permutation families fill the A.5 sandwich") {
    auto s = BaseSequence::cyclic({6});
    auto sys = OdomutantSystem(entropy_family(s, 8, 3));
    for (std::size_t l = 1; l <= 3; ++l) {
        for (std::size_t n = l; n <= 3; ++n) {
            auto res = count_words(sys, Partition::plain(l), n, CountMethod::Brute, 1u << 27);
            CHECK(BigInt(res.count) >= res.lower_bound);
            CHECK(BigInt(res.count) <= res.upper_bound);
        }
    }
    // Remark A.4: pairwise distinct permutations give q_n distinct bottom words
    auto rec = count_words(sys, Partition::plain(1), 2, CountMethod::Recursion);
    CHECK(rec.count == 6);
    CHECK_FALSE(rec.exact);
}

TEST_CASE("kappa structure and the counting lower bound") {
    // distinct case: kappa = 1 and the bound is qt(n)
    FeldmanWordSystem ws([](std::size_t) { return digit_t(2); }, 1);
    auto sys = OdomutantSystem(feldman_family(ws, 4));
    CHECK(kappa_of(sys, 1) == 1);
    CHECK(kappa_of(sys, 2) == 1);
    auto kb = kappa_lower_bound(sys, 1, 1);
    CHECK(kb.bound == BigRat(2));
    CHECK(kb.recursion_count >= 2);

    // deliberately duplicated tau: kappa = qt and the bound collapses
    auto s4 = BaseSequence::cyclic({4});
    MultiplicityStructure m;
    m.c = {2, 2, 2, 2};
    m.qt = {2, 2, 2, 2};
    std::vector<digit_t> idp{0, 1, 2, 3};
    for (int n = 0; n < 3; ++n) m.tau.push_back({idp, idp});
    auto dup = OdomutantSystem(PermutationFamily::multiplicity(s4, m));
    CHECK(kappa_of(dup, 1) == 2);
    auto kb2 = kappa_lower_bound(dup, 1, 2);
    CHECK(kb2.bound <= 1);
    CHECK(kb2.recursion_count >= 1);
}

TEST_CASE("entropy estimate table") {
    auto s = BaseSequence::cyclic({3, 2, 3});
    auto sys = OdomutantSystem(identity_family(s));
    auto t = entropy_estimate(sys, 1, {1, 2, 3, 4});
    REQUIRE(t.rows.size() == 4);
    // odometer: count = h(l) always, so the estimate decays to 0
    for (auto& row : t.rows) CHECK(row.words.count == 3);
    CHECK(t.rows[3].estimate < t.rows[0].estimate);

    auto s6 = BaseSequence::cyclic({6});
    auto esys = OdomutantSystem(entropy_family(s6, 6, 5));
    auto et = entropy_estimate(esys, 1, {1, 2, 3});
    CHECK(et.target_decreasing);
    for (auto& row : et.rows) {
        CHECK(row.estimate >= row.target - 1e-12);
        CHECK(row.estimate <= row.upper_estimate + 1e-12);
    }

    CHECK(entropy_estimate(sys, 1, {}).rows.empty());
}

TEST_CASE("f-metric basics") {
    Word w{0, 1, 0, 1};
    CHECK(f_metric(w, w) == 0);
    Word a{0, 0, 0}, b{1, 1, 1};
    CHECK(f_metric(a, b) == 1);  // disjoint alphabets
    Word ab{0, 1, 0, 1}, ba{1, 0, 1, 0};
    CHECK(f_metric(ab, ba) == BigRat(1, 4));  // LCS = 3
    CHECK_THROWS_AS(f_metric(a, w), DomainError);
}

TEST_CASE("LCS dynamic program agrees with exhaustive search") {
    Rng rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 1 + rng.below(10);
        Word a, b;
        for (std::size_t i = 0; i < n; ++i) {
            a.push_back(digit_t(rng.below(3)));
            b.push_back(digit_t(rng.below(3)));
        }
        CHECK(lcs_length(a, b) == lcs_exhaustive(a, b));
    }
}

TEST_CASE("banded LCS lower-bounds the full LCS") {
    Rng rng(44);
    for (int trial = 0; trial < 100; ++trial) {
        Word a, b;
        for (int i = 0; i < 40; ++i) {
            a.push_back(digit_t(rng.below(4)));
            b.push_back(digit_t(rng.below(4)));
        }
        CHECK(lcs_length(a, b, 5) <= lcs_length(a, b));
    }
}

TEST_CASE("d-metric and the f <= d/n inequality") {
    Word a{0, 1, 2, 3}, b{0, 9, 2, 3};
    CHECK(d_metric(a, b) == 1);
    CHECK(d_metric_normalized(a, b) == BigRat(1, 4));
    Rng rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t n = 1 + rng.below(24);
        Word x, y;
        for (std::size_t i = 0; i < n; ++i) {
            x.push_back(digit_t(rng.below(3)));
            y.push_back(digit_t(rng.below(3)));
        }
        CHECK(f_metric(x, y) <= d_metric_normalized(x, y));
    }
}

TEST_CASE("f-metric symmetry and empirical triangle inequality") {
    Rng rng(31);
    for (int trial = 0; trial < 150; ++trial) {
        std::size_t n = 4 + rng.below(16);
        Word x, y, z;
        for (std::size_t i = 0; i < n; ++i) {
            x.push_back(digit_t(rng.below(3)));
            y.push_back(digit_t(rng.below(3)));
            z.push_back(digit_t(rng.below(3)));
        }
        CHECK(f_metric(x, y) == f_metric(y, x));
        BigRat xy = f_metric(x, y), yz = f_metric(y, z), xz = f_metric(x, z);
        BigRat sum = xy + yz;
        sum.canonicalize();
        CHECK(xz <= sum);
    }
}

TEST_CASE("LB0: odometer words are pairwise f-close within 2 h_k / N") {
    auto s = BaseSequence::cyclic({3, 2, 3});
    auto sys = OdomutantSystem(identity_family(s));
    std::size_t k = 2;
    BigInt hk = s.h(k);
    BigRat eps(1, 4);
    // N >= 2 h_k / eps
    std::size_t N = BigInt(2 * hk * 4).get_ui();
    auto rep = lb0_report(sys, Partition::plain(k), N, eps);
    CHECK_FALSE(rep.partial);
    CHECK(rep.unresolved_mass == 0);
    CHECK(rep.resolved_mass == 1);
    BigRat bound(2 * hk, BigInt(N));
    bound.canonicalize();
    CHECK(rep.global_max_f <= bound);
    CHECK(bound <= eps);
    // one cluster covers everything
    CHECK(rep.best_coverage == 1);
    REQUIRE(!rep.clusters.empty());
    CHECK(rep.clusters[0].words == rep.distinct_words);
}

TEST_CASE("LB0 with epsilon = 1 is trivially satisfied") {
    auto s = BaseSequence::cyclic({2});
    auto sys = OdomutantSystem(identity_family(s));
    auto rep = lb0_report(sys, Partition::plain(1), 16, BigRat(1));
    CHECK(rep.best_coverage == 1);
}

TEST_CASE("LB0 feldman toy level-1 words are far apart") {
    FeldmanWordSystem ws([](std::size_t) { return digit_t(2); }, 1);
    auto sys = OdomutantSystem(feldman_family(ws, 6));
    auto part = default_partition(sys, 1);
    auto words = tower_words(sys, part, 1);
    std::set<Word> distinct(words.begin(), words.end());
    CHECK(distinct.size() == 2);
    auto it = distinct.begin();
    const Word& w0 = *it++;
    const Word& w1 = *it;
    CHECK(f_metric(w0, w1) > 0);
}

TEST_CASE("budgets raise resource errors and lb0 flags partial reports") {
    CHECK_THROWS_AS(FeldmanWordSystem([](std::size_t) { return digit_t(2); }, 3, 1000),
                    ResourceError);

    auto s6 = BaseSequence::cyclic({6});
    auto sys = OdomutantSystem(entropy_family(s6, 6, 3));
    CHECK_THROWS_AS(count_words(sys, Partition::plain(1), 3, CountMethod::Brute, 100),
                    ResourceError);

    auto odo = OdomutantSystem(identity_family(BaseSequence::cyclic({3, 2, 3})));
    auto rep = lb0_report(odo, Partition::plain(1), 40, BigRat(1, 4), 8);
    CHECK(rep.partial);
    BigRat total = rep.resolved_mass + rep.unresolved_mass;
    total.canonicalize();
    CHECK(total == 1);
}
