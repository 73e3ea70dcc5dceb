#include <doctest.h>

#include "odo/space.hpp"

using namespace odo;

TEST_CASE("heights for the (3,2,3) caption example") {
    auto s = BaseSequence::explicit_list({3, 2, 3});
    CHECK(s.h(0) == 1);
    CHECK(s.h(1) == 3);
    CHECK(s.h(2) == 6);
    CHECK(s.h(3) == 18);
    CHECK_THROWS_AS(s.q(3), DomainError);
}

TEST_CASE("heights for the dyadic sequence") {
    auto s = BaseSequence::cyclic({2});
    CHECK(s.h(3) == 8);
    CHECK(s.h(20) == BigInt(1) << 20);
}

TEST_CASE("descriptor producing q < 2 is rejected with the level") {
    CHECK_THROWS_AS(BaseSequence::explicit_list({3, 1, 3}), ValidationError);
    try {
        BaseSequence::explicit_list({3, 1, 3});
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("q(1)") != std::string::npos);
    }
}

TEST_CASE("h recursion holds exactly on a mixed sequence") {
    auto s = BaseSequence::cyclic({3, 2, 3, 5, 7});
    for (std::size_t n = 0; n < 24; ++n) CHECK(s.h(n + 1) == s.h(n) * BigInt(s.q(n)));
}

TEST_CASE("full-scale word-system rule lives in factored form") {
    // qt(n) = 2^(n+10), q(n) = qt(n)^(2*qt(n+1)+3): q(0) = 2^40990.
    std::vector<FactoredInt> qs;
    auto qt_exp = [](std::size_t n) { return BigInt(n + 10); };
    for (std::size_t n = 0; n < 3; ++n) {
        BigInt e = qt_exp(n) * (2 * (BigInt(1) << (n + 11)) + 3);
        qs.push_back(FactoredInt::from_prime_power(2, e));
    }
    auto s = BaseSequence::factored(qs);
    CHECK(s.q_factored(0).factors().at(2) == 40990);
    CHECK_THROWS_AS(s.q(0), ResourceError);
    // h(2) = 2^(S_2) with S_2 = 40990 + 90145.
    CHECK(s.h_factored(2).factors().at(2) == 131135);
    // log2 h(1) computed by the accessor agrees with the exponent.
    Real l = s.h_factored(1).log2(128, RND_D);
    CHECK(l.to_double() == doctest::Approx(40990.0).epsilon(1e-9));
}

TEST_CASE("cylinder measures are exact rationals") {
    auto s = BaseSequence::explicit_list({3, 4, 5});
    CHECK(Cylinder::of_prefix(s, {0}).measure(s) == BigRat(1, 3));
    auto c = Cylinder::of_constraints(s, {{0}, {1, 2}, {4}});
    CHECK(c.measure(s) == BigRat(1, 30));
    CHECK(Cylinder::of_constraints(s, {}).measure(s) == 1);  // level-0 cylinder is X
    auto bullet = Cylinder::of_constraints(s, {{0}, {}, {4}});
    CHECK(bullet.measure(s) == BigRat(1, 15));
}

TEST_CASE("cylinder digit validation") {
    auto s = BaseSequence::explicit_list({3, 4});
    CHECK_THROWS_AS(Cylinder::of_prefix(s, {3}), ValidationError);
}

TEST_CASE("P(l) atom counts and exact total mass") {
    auto s = BaseSequence::cyclic({3, 2, 3});
    auto p2 = Partition::plain(2);
    CHECK(p2.atom_count(s) == 6);
    auto atoms = p2.atoms(s);
    CHECK(atoms.size() == 6);
    BigRat total(0);
    for (auto& a : atoms) total += a.measure(s);
    total.canonicalize();
    CHECK(total == 1);
    CHECK(Partition::plain(0).atom_count(s) == 1);
}

TEST_CASE("Ptilde(2) with c=2 on q=(3,2,...) collapses to 3 atoms") {
    auto s = BaseSequence::cyclic({3, 2});
    auto pt = Partition::block_collapsed(2, BlockStructure::uniform(s.q(1), 2));
    CHECK(pt.atom_count(s) == 3);
    auto atoms = pt.atoms(s);
    REQUIRE(atoms.size() == 3);
    BigRat total(0);
    for (auto& a : atoms) total += a.measure(s);
    total.canonicalize();
    CHECK(total == 1);
    // [i0, I_0]_2 with I_0 = {0,1}
    CHECK(atoms[0].constraints()[1] == std::vector<digit_t>{0, 1});
}

TEST_CASE("P(l+1) refines P(l): each atom splits into q(l) atoms") {
    auto s = BaseSequence::cyclic({3, 2, 3});
    auto coarse = Partition::plain(2).atoms(s);
    auto fine = Partition::plain(3).atoms(s);
    for (auto& big : coarse) {
        BigRat sum(0);
        int parts = 0;
        for (auto& small : fine) {
            bool sub = true;
            for (std::size_t i = 0; i < 2; ++i)
                if (small.constraints()[i] != big.constraints()[i]) sub = false;
            if (sub) {
                ++parts;
                sum += small.measure(s);
            }
        }
        CHECK(parts == s.q(2));
        sum.canonicalize();
        CHECK(sum == big.measure(s));
    }
}

TEST_CASE("atom_of is consistent with the atoms enumeration") {
    auto s = BaseSequence::cyclic({3, 2, 3});
    auto part = Partition::block_collapsed(2, BlockStructure::uniform(s.q(1), 2));
    auto atoms = part.atoms(s);
    Point p{{2, 1, 0}, Tail::Min};
    BigInt idx = part.atom_of(s, p);
    CHECK(atoms[idx.get_ui()].contains(s, p));
}

TEST_CASE("points fail loudly past an unspecified tail") {
    auto s = BaseSequence::cyclic({3});
    Point p{{1, 2}, Tail::Unspecified};
    CHECK(digit_at(s, p, 1) == 2);
    CHECK_THROWS_AS(digit_at(s, p, 2), UndeterminedError);
    try {
        digit_at(s, p, 5);
    } catch (const UndeterminedError& e) {
        CHECK(e.needed_prefix == 6);
    }
    Point mx{{1}, Tail::Max};
    CHECK(digit_at(s, mx, 7) == 2);
}
