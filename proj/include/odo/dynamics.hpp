#pragma once

#include <optional>

#include "odo/family.hpp"
#include "odo/space.hpp"

namespace odo {

/// The odometer S: addition of (1,0,0,...) with carry over to the right.
/// The all-max point maps to the all-min point.
Point apply_S(const BaseSequence& space, const Point& p);
Point apply_S_inv(const BaseSequence& space, const Point& p);

/// S^k for arbitrary (big, signed) k, by exact mixed-radix addition.
Point apply_S_power(const BaseSequence& space, const Point& p, const BigInt& k);

/// zeta_n: addition of h_{n-1} at coordinate n-1, defined off the cylinder
/// [*,...,*,q_{n-1}-1]_n; agrees with S^{h(n-1)} there.
Point apply_zeta(const BaseSequence& space, std::size_t n, const Point& p);

/// Odomutant system: the space together with its permutation family. The
/// system extends to a homeomorphism of the whole compact space exactly when
/// every permutation fixes 0 and q_n - 1.
class OdomutantSystem {
  public:
    explicit OdomutantSystem(PermutationFamily family) : family_(std::move(family)) {}

    const BaseSequence& space() const { return family_.space(); }
    const PermutationFamily& family() const { return family_; }
    bool extends_to_homeomorphism() const {
        return family_.fixes_zero() && family_.fixes_max();
    }

  private:
    PermutationFamily family_;
};

/// psi(x)_i = sigma^{(i)}_{x_{i+1}}(x_i) for 0 <= i < count.
std::vector<digit_t> psi_prefix(const OdomutantSystem& sys, const Point& p, std::size_t count);

/// psi as a Point map. A prefix of length m yields a psi-prefix of length
/// m-1; concrete tails extend the output to the same length.
Point apply_psi(const OdomutantSystem& sys, const Point& p);

/// psi_n distorts coordinates 0..n and requires digits through n+1.
Point apply_psi_n(const OdomutantSystem& sys, std::size_t n, const Point& p);
Point apply_psi_n_inv(const OdomutantSystem& sys, std::size_t n, const Point& p);

/// N+ / N-: least level where the prefix departs from the all-max (resp.
/// all-min) pattern; nullopt is the infinity sentinel (the point is excluded
/// from the domain of the corresponding map).
std::optional<std::size_t> n_plus(const BaseSequence& space, const Point& p);
std::optional<std::size_t> n_minus(const BaseSequence& space, const Point& p);

/// N+(psi(p)) / N-(psi(p)) without materializing psi.
std::optional<std::size_t> n_plus_psi(const OdomutantSystem& sys, const Point& p);
std::optional<std::size_t> n_minus_psi(const OdomutantSystem& sys, const Point& p);

/// The odomutant T and its inverse, by the closed-form digit recursion.
Point apply_T(const OdomutantSystem& sys, const Point& p);
Point apply_T_inv(const OdomutantSystem& sys, const Point& p);

/// T^k via the conjugation closed form at a level n whose tower contains the
/// whole orbit segment; exact for arbitrary big k.
Point apply_T_power(const OdomutantSystem& sys, const Point& p, const BigInt& k);

/// Transfer exponent: for x, y agreeing at all levels >= M and x != y,
/// K = sum_{j<M} h_j (sigma^{(j)}_{y_{j+1}}(y_j) - sigma^{(j)}_{x_{j+1}}(x_j))
/// satisfies T^K x = y.
BigInt transfer_exponent(const OdomutantSystem& sys, const Point& x, const Point& y,
                         std::size_t M);

/// Least k in [1, cap] with T^k p in c, else nullopt (exhausted).
std::optional<long long> first_return(const OdomutantSystem& sys, const Point& p,
                                      const Cylinder& c, long long cap);

/// Exact piecewise pullback of an l-cylinder through T, by classifying all
/// digit cells at `depth` levels. For families fixing 0 every cell resolves
/// and resolved_in == measure(c); otherwise the all-max sliver of mass
/// 1/h(depth-ish) stays unresolved and the caller gets the exact sandwich
/// resolved_in <= mu(T^{-1} c) <= resolved_in + unresolved.
struct PullbackMeasure {
    BigRat resolved_in{0};
    BigRat unresolved{0};
};
PullbackMeasure pullback_measure(const OdomutantSystem& sys, const Cylinder& c,
                                 std::size_t depth);

/// For families fixing 0, T induces a total map from (m+1)-digit prefixes to
/// m-digit prefixes. Returns how often each m-prefix is hit; measure
/// preservation of every l <= m cylinder is equivalent to all counts being
/// exactly q_m.
std::vector<std::uint64_t> pullback_hit_counts(const OdomutantSystem& sys, std::size_t m);

}  // namespace odo
