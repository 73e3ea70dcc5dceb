#include "odo/spectrum.hpp"

#include "odo/family.hpp"
#include "odo/rng.hpp"

namespace odo {

BigInt eigenfunction_index(const BaseSequence& space, const Point& p, std::size_t n) {
    BigInt j = 0;
    for (std::size_t i = 0; i < n; ++i) j += space.h(i) * BigInt(digit_at(space, p, i));
    return j;
}

namespace {

Point sample(const BaseSequence& space, std::size_t len, Rng& rng) {
    Point p;
    p.tail = Tail::Unspecified;
    for (std::size_t i = 0; i < len; ++i)
        p.digits.push_back(static_cast<digit_t>(rng.below(space.q(i))));
    return p;
}

}  // namespace

RelationReport check_eigen_relation(const BaseSequence& space, std::size_t n,
                                    std::size_t samples, std::uint64_t seed,
                                    std::size_t prefix_len) {
    RelationReport rep;
    rep.samples = samples;
    BigInt hn = space.h(n);
    for (std::size_t i = 0; i < samples; ++i) {
        Rng rng = Rng::substream(seed, i);
        Point p = sample(space, prefix_len, rng);
        try {
            BigInt before = eigenfunction_index(space, p, n);
            BigInt after = eigenfunction_index(space, apply_S(space, p), n);
            if ((before + 1 - after) % hn != 0)
                ++rep.failures;
            else
                ++rep.checked;
        } catch (const UndeterminedError&) {
            ++rep.undetermined;
        }
    }
    return rep;
}

RelationReport check_pullback(const OdomutantSystem& sys, std::size_t n, std::size_t samples,
                              std::uint64_t seed, std::size_t prefix_len) {
    const BaseSequence& space = sys.space();
    RelationReport rep;
    rep.samples = samples;
    BigInt hn = space.h(n);
    for (std::size_t i = 0; i < samples; ++i) {
        Rng rng = Rng::substream(seed, i);
        Point p = sample(space, prefix_len, rng);
        try {
            auto psi_before = psi_prefix(sys, p, n);
            auto psi_after = psi_prefix(sys, apply_T(sys, p), n);
            BigInt before = 0, after = 0;
            for (std::size_t k = 0; k < n; ++k) {
                before += space.h(k) * BigInt(psi_before[k]);
                after += space.h(k) * BigInt(psi_after[k]);
            }
            if ((before + 1 - after) % hn != 0)
                ++rep.failures;
            else
                ++rep.checked;
        } catch (const UndeterminedError&) {
            ++rep.undetermined;
        }
    }
    return rep;
}

ComplexCountResult lemma_complex_check(const BigRat& tau, const BigRat& eps, long long j_lo,
                                       long long j_hi, mpfr_prec_t prec) {
    if (j_hi < j_lo) throw ConfigError("empty interval");
    if (sgn(tau) == 0) throw DomainError("tau must be nonzero (nu != 1)");
    if (sgn(eps) <= 0 || eps >= 2) throw DomainError("eps must lie in (0,2)");

    // theta = arcsin(eps/2)/pi, enclosed by directed rounding
    auto theta_dir = [&](mpfr_rnd_t rnd) {
        mpfr_rnd_t opp = (rnd == RND_D) ? RND_U : RND_D;
        Real half = div(Real::from(eps, prec, rnd), Real::from_ui(2, prec), rnd);
        Real as(prec);
        mpfr_asin(as.get(), half.get(), rnd);
        Real pi(prec);
        mpfr_const_pi(pi.get(), opp);
        return div(as, pi, rnd);
    };
    Real theta_lo = theta_dir(RND_D);
    Real theta_hi = theta_dir(RND_U);
    ComplexCountResult out;
    out.theta = theta_hi.to_double();

    // preconditions: theta < 1/4 and |tau| < theta
    Real quarter = div(Real::from_ui(1, prec), Real::from_ui(4, prec), RND_D);
    if (!mpfr_less_p(theta_hi.get(), quarter.get()))
        throw DomainError("eps too large: theta(eps) must certify below 1/4");
    BigRat atau = abs(tau);
    Real atau_hi = Real::from(atau, prec, RND_U);
    if (!mpfr_less_p(atau_hi.get(), theta_lo.get()))
        throw DomainError("tau must certify inside (-theta, theta)");

    // |1 - nu^j| < eps iff dist(j tau, Z) < theta. With tau = a/b the
    // distance is min(t, b-t)/b for t = j a mod b, which updates
    // incrementally in exact integers; theta b is enclosed once.
    BigRat tq = tau;
    tq.canonicalize();
    BigInt a = tq.get_num(), b = tq.get_den();
    BigInt step = ((a % b) + b) % b;
    BigInt t = ((BigInt(long(j_lo)) * a) % b + b) % b;
    Real theta_b_lo = mul(theta_lo, Real::from(b, prec, RND_D), RND_D);
    Real theta_b_hi = mul(theta_hi, Real::from(b, prec, RND_U), RND_U);
    for (long long j = j_lo; j <= j_hi; ++j) {
        BigInt tmin = t <= b - t ? t : b - t;
        if (mpfr_cmp_z(theta_b_lo.get(), tmin.get_mpz_t()) > 0)
            ++out.count;
        else if (mpfr_cmp_z(theta_b_hi.get(), tmin.get_mpz_t()) > 0)
            ++out.undecided;  // within the margin; reported, never counted
        t += step;
        if (t >= b) t -= b;
    }

    // bound (upper-rounded would weaken the check, so round it DOWN and
    // compare the pessimistic count against it)
    Real len = Real::from_ui(static_cast<unsigned long>(j_hi - j_lo + 1), prec);
    Real one = Real::from_ui(1, prec);
    Real denom = sub(one, mul(Real::from_ui(2, prec), theta_hi, RND_U), RND_D);
    if (denom.sgn() <= 0) throw DomainError("theta too close to 1/2");
    Real term1 = div(mul(mul(Real::from_ui(3, prec), theta_lo, RND_D), len, RND_D),
                     sub(one, mul(Real::from_ui(2, prec), theta_lo, RND_D), RND_U), RND_D);
    Real term2 = div(mul(Real::from_ui(6, prec), theta_lo, RND_D),
                     Real::from(atau, prec, RND_U), RND_D);
    Real bound_lo = add(term1, term2, RND_D);
    out.bound = bound_lo.to_double();
    Real pess = Real::from_ui(static_cast<unsigned long>(out.count + out.undecided), prec);
    out.ok = mpfr_lessequal_p(pess.get(), bound_lo.get());
    return out;
}

FixedPointSeries fixed_point_series(const BaseSequence& space, const PermutationFamily& family,
                                    std::size_t n_max) {
    FixedPointSeries out;
    BigRat running(0);
    std::size_t depth = n_max;
    if (auto lv = family.levels()) depth = std::min(depth, *lv);
    for (std::size_t n = 0; n < depth; ++n) {
        digit_t qn = space.q(n);
        digit_t qn1 = space.q(n + 1);
        digit_t count = 0;
        for (digit_t v = 0; v < qn; ++v) {
            bool fixed = true;
            for (digit_t i = 0; i < qn1 && fixed; ++i)
                if (family.sigma(n, i, v) != v) fixed = false;
            if (fixed) ++count;
        }
        out.counts.push_back(count);
        BigRat d = BigRat(BigInt(count), BigInt(qn));
        d.canonicalize();
        out.densities.push_back(d);
        running += d;
        running.canonicalize();
        out.partials.push_back(running);
    }
    return out;
}


NonInjectivityReport check_cyclic_noninjectivity(const BaseSequence& space,
                                                 std::size_t samples, std::uint64_t seed,
                                                 std::size_t depth) {
    NonInjectivityReport rep;
    rep.samples = samples;
    OdomutantSystem sys(cyclic_family(space));
    BigRat mass(1);
    for (std::size_t n = 0; n < depth; ++n) {
        mass *= BigRat(BigInt(space.q(n) - 1), BigInt(space.q(n)));
    }
    mass.canonicalize();
    rep.y_partial_mass = mass;

    for (std::size_t i = 0; i < samples; ++i) {
        Rng rng = Rng::substream(seed, i);
        Point p = sample(space, depth + 1, rng);
        // membership in Y1: the forbidden value is (q_n - 1) at even n and 0
        // at odd n, so the +1/-1 translation never wraps
        bool in_y1 = true;
        for (std::size_t n = 0; n <= depth; ++n) {
            digit_t forbidden = (n % 2 == 0) ? space.q(n) - 1 : 0;
            if (p.digits[n] == forbidden) in_y1 = false;
        }
        if (!in_y1) continue;
        ++rep.checked;
        Point th = p;
        for (std::size_t n = 0; n <= depth; ++n) {
            digit_t shift = (n % 2 == 0) ? 1 : -1;
            th.digits[n] = ((th.digits[n] + shift) % space.q(n) + space.q(n)) % space.q(n);
        }
        bool in_y2 = true;
        for (std::size_t n = 0; n <= depth; ++n) {
            digit_t forbidden = (n % 2 == 1) ? space.q(n) - 1 : 0;
            if (th.digits[n] == forbidden) in_y2 = false;
        }
        auto a = psi_prefix(sys, p, depth);
        auto b = psi_prefix(sys, th, depth);
        if (!in_y2 || a != b) ++rep.failures;
    }
    return rep;
}

}  // namespace odo
