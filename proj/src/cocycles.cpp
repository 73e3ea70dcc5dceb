#include "odo/cocycles.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "odo/rng.hpp"

namespace odo {

BigInt cocycle_T(const OdomutantSystem& sys, const Point& p) {
    const BaseSequence& space = sys.space();
    auto N_opt = n_plus_psi(sys, p);
    if (!N_opt) {
        if (sys.extends_to_homeomorphism()) return 1;  // c_T(x+) := 1
        throw DomainError("c_T undefined where psi(x) is the maximal point");
    }
    std::size_t N = *N_opt;
    digit_t idx = digit_at(space, p, N + 1);
    std::vector<digit_t> y(N + 1);
    y[N] = sys.family().sigma_inv(N, idx, sys.family().sigma(N, idx, digit_at(space, p, N)) + 1);
    for (std::size_t i = N; i-- > 0;) y[i] = sys.family().sigma_inv(i, y[i + 1], 0);
    BigInt c = 0;
    for (std::size_t i = 0; i <= N; ++i)
        c += space.h(i) * BigInt(y[i] - digit_at(space, p, i));
    return c;
}

BigInt cocycle_S(const OdomutantSystem& sys, const Point& p) {
    const BaseSequence& space = sys.space();
    auto N_opt = n_plus(space, p);
    if (!N_opt) {
        if (sys.extends_to_homeomorphism()) return 1;  // c_S(x+) := 1
        throw DomainError("c_S undefined at the maximal point");
    }
    std::size_t N = *N_opt;
    digit_t xN = digit_at(space, p, N);
    digit_t xN1 = digit_at(space, p, N + 1);
    BigInt c = space.h(N) * BigInt(sys.family().sigma(N, xN1, 1 + xN) -
                                   sys.family().sigma(N, xN1, xN));
    if (N >= 1) {
        digit_t xNm1 = digit_at(space, p, N - 1);
        c += space.h(N - 1) *
             BigInt(sys.family().sigma(N - 1, 1 + xN, 0) - sys.family().sigma(N - 1, xN, xNm1));
    }
    for (std::size_t i = 0; i + 2 <= N; ++i) {
        digit_t xi = digit_at(space, p, i);
        digit_t xi1 = digit_at(space, p, i + 1);
        c += space.h(i) * BigInt(sys.family().sigma(i, 0, 0) - sys.family().sigma(i, xi1, xi));
    }
    return c;
}

namespace {

Point sampled_point(const BaseSequence& space, std::size_t len, Rng& rng) {
    Point p;
    p.tail = Tail::Unspecified;
    p.digits.reserve(len);
    for (std::size_t i = 0; i < len; ++i)
        p.digits.push_back(static_cast<digit_t>(rng.below(space.q(i))));
    return p;
}

}  // namespace

OrbitEquivalenceReport verify_orbit_equivalence(const OdomutantSystem& sys, std::size_t samples,
                                                std::uint64_t seed, std::size_t prefix_len,
                                                unsigned threads) {
    const BaseSequence& space = sys.space();
    // pre-materialize before the parallel section
    for (std::size_t i = 0; i <= prefix_len; ++i) space.q(i);

    OrbitEquivalenceReport rep;
    rep.samples = samples;
    std::mutex mu;

    auto work = [&](std::size_t lo, std::size_t hi) {
        std::size_t verified = 0, undetermined = 0, failures = 0;
        bool bound_violated = false;
        std::vector<std::string> details;
        for (std::size_t i = lo; i < hi; ++i) {
            Rng rng = Rng::substream(seed, i);
            Point p = sampled_point(space, prefix_len, rng);
            try {
                BigInt cT = cocycle_T(sys, p);
                BigInt cS = cocycle_S(sys, p);
                Point via_T = apply_T(sys, p);
                Point via_S_power = apply_S_power(space, p, cT);
                bool ok1 = same_point(space, via_T, via_S_power, prefix_len);
                Point via_S = apply_S(space, p);
                Point via_T_power = apply_T_power(sys, p, cS);
                bool ok2 = same_point(space, via_S, via_T_power, prefix_len);
                auto Np = n_plus_psi(sys, p);
                if (Np && abs(cT) > space.h(*Np + 1)) bound_violated = true;
                if (ok1 && ok2) {
                    ++verified;
                } else {
                    ++failures;
                    if (details.size() < 8) {
                        std::string d = "sample " + std::to_string(i) + ": digits";
                        for (auto v : p.digits) d += " " + std::to_string(v);
                        d += ok1 ? " (S p = T^cS p failed)" : " (T p = S^cT p failed)";
                        details.push_back(d);
                    }
                }
            } catch (const UndeterminedError&) {
                ++undetermined;
            }
        }
        std::lock_guard<std::mutex> lk(mu);
        rep.verified += verified;
        rep.undetermined += undetermined;
        rep.failures += failures;
        rep.bound_violated = rep.bound_violated || bound_violated;
        for (auto& d : details) rep.failure_details.push_back(std::move(d));
    };

    if (threads <= 1) {
        work(0, samples);
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (samples + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            std::size_t lo = t * chunk, hi = std::min(samples, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(work, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    return rep;
}

std::string PhiMap::describe() const {
    switch (kind_) {
        case Kind::Power: {
            BigRat p = p_;
            p.canonicalize();
            return "power(" + p.get_str() + ")";
        }
        case Kind::LogQuotient:
            return "log_quotient(" + std::to_string(m_) + ")";
        case Kind::Linear:
            return "linear";
        case Kind::Log:
            return "log";
    }
    return "?";
}

Real PhiMap::eval(const BigInt& t, mpfr_prec_t prec, mpfr_rnd_t rnd) const {
    if (sgn(t) <= 0) throw DomainError("phi evaluated at a non-positive integer");
    switch (kind_) {
        case Kind::Linear:
            return Real::from(t, prec, rnd);
        case Kind::Log:
            return log_of(t, prec, rnd);
        case Kind::Power:
        case Kind::LogQuotient:
            return eval_from_log(log_of(t, prec, rnd), prec, rnd);
    }
    throw InternalError("bad phi kind");
}

Real PhiMap::eval_from_log(const Real& log_t, mpfr_prec_t prec, mpfr_rnd_t rnd) const {
    mpfr_rnd_t opp = (rnd == RND_D) ? RND_U : (rnd == RND_U ? RND_D : RND_N);
    switch (kind_) {
        case Kind::Linear: {
            Real r(prec);
            mpfr_exp(r.get(), log_t.get(), rnd);
            return r;
        }
        case Kind::Log:
            return log_t;
        case Kind::Power: {
            // t^p = exp(p log t); p > 0 keeps the direction of log t.
            if (sgn(p_) <= 0) throw DomainError("power gauge needs a positive exponent");
            Real pr = Real::from(p_, prec, rnd);
            Real prod = mul(log_t, pr, rnd);
            Real r(prec);
            mpfr_exp(r.get(), prod.get(), rnd);
            return r;
        }
        case Kind::LogQuotient: {
            // log t / log^{(m)} t, with log_quotient(0) = log t by convention.
            if (m_ == 0) return log_t;
            Real denom = log_t;
            for (unsigned k = 1; k < m_; ++k) {
                if (denom.sgn() <= 0)
                    throw DomainError("log_quotient: iterated log left the domain");
                Real next(prec);
                mpfr_log(next.get(), denom.get(), opp);
                denom = next;
            }
            if (denom.sgn() <= 0) throw DomainError("log_quotient: iterated log left the domain");
            return div(log_t, denom, rnd);
        }
    }
    throw InternalError("bad phi kind");
}

namespace {

void push_row(SeriesReport& rep, std::size_t n, const Real& term, Real& acc) {
    acc = add(acc, term, RND_N);
    SeriesRow row;
    row.n = n;
    row.term = term.to_double();
    row.partial = acc.to_double();
    row.term_str = term.str();
    row.partial_str = acc.str();
    if (term.sgn() < 0) rep.monotone = false;
    rep.rows.push_back(std::move(row));
}

}  // namespace

SeriesReport phi_series_C1(const BaseSequence& space, const PhiMap& phi, std::size_t n_max,
                           mpfr_prec_t prec) {
    SeriesReport rep;
    rep.precision = prec;
    Real acc(prec);
    for (std::size_t n = 0; n <= n_max; ++n) {
        Real term(prec);
        if (space.is_factored()) {
            // phi(h_{n+1})/h_n in log space
            Real num = phi.eval_from_log(space.log_h(n + 1, prec, RND_N), prec, RND_N);
            Real log_num(prec);
            mpfr_log(log_num.get(), num.get(), RND_N);
            Real log_term = sub(log_num, space.log_h(n, prec, RND_N), RND_N);
            mpfr_exp(term.get(), log_term.get(), RND_N);
        } else {
            Real num = phi.eval(space.h(n + 1), prec, RND_N);
            Real den = Real::from(space.h(n), prec, RND_N);
            term = div(num, den, RND_N);
        }
        push_row(rep, n, term, acc);
    }
    rep.note = "partial sums only; convergence is never asserted from finite evidence";
    return rep;
}

SeriesPair phi_series_C2(const OdomutantSystem& sys, const PhiMap& phi, std::size_t n_max,
                         mpfr_prec_t prec, std::uint64_t pair_budget) {
    const BaseSequence& space = sys.space();
    SeriesPair out;
    out.first.precision = out.second.precision = prec;
    Real acc1(prec), acc2(prec);
    // fast path for the identity family: all displacements are 1
    bool is_identity = sys.family().fixes_zero() && sys.family().fixes_max();
    for (std::size_t n = 0; n < 3 && is_identity; ++n) {
        digit_t qn = space.q(n);
        digit_t probe = std::min<digit_t>(space.q(n + 1), 8);
        for (digit_t i = 0; i < probe && is_identity; ++i)
            for (digit_t v = 0; v < qn; ++v)
                if (sys.family().sigma(n, i, v) != v) {
                    is_identity = false;
                    break;
                }
    }
    if (is_identity && sys.family().levels()) is_identity = false;  // tables: iterate honestly

    for (std::size_t n = 0; n <= n_max; ++n) {
        digit_t qn = space.q(n);
        digit_t qn1 = space.q(n + 1);
        Real inner1(prec), inner2(prec);
        if (is_identity) {
            // (q_n - 1) q_{n+1} pairs contribute phi(2 h_n) to each sum
            Real val = phi.eval(2 * space.h(n), prec, RND_N);
            Real count = Real::from(BigInt(BigInt(qn - 1) * BigInt(qn1)), prec, RND_N);
            inner1 = mul(val, count, RND_N);
            inner2 = inner1;
        } else {
            if (static_cast<std::uint64_t>(qn) * static_cast<std::uint64_t>(qn1) > pair_budget)
                throw ResourceError("C2 inner sum over " + std::to_string(qn) + "x" +
                                    std::to_string(qn1) + " pairs exceeds the budget");
            BigInt hn = space.h(n);
            for (digit_t xn1 = 0; xn1 < qn1; ++xn1) {
                for (digit_t xn = 0; xn < qn; ++xn) {
                    digit_t s = sys.family().sigma(n, xn1, xn);
                    if (s != qn - 1) {
                        digit_t d = sys.family().sigma_inv(n, xn1, s + 1) - xn;
                        BigInt arg = hn * BigInt(1 + (d < 0 ? -d : d));
                        inner1 = add(inner1, phi.eval(arg, prec, RND_N), RND_N);
                    }
                    if (xn <= qn - 2) {
                        digit_t d = sys.family().sigma(n, xn1, 1 + xn) - s;
                        BigInt arg = hn * BigInt(1 + (d < 0 ? -d : d));
                        inner2 = add(inner2, phi.eval(arg, prec, RND_N), RND_N);
                    }
                }
            }
        }
        Real weight = Real::from(BigRat(BigInt(1), space.h(n + 2)), prec, RND_N);
        push_row(out.first, n, mul(inner1, weight, RND_N), acc1);
        push_row(out.second, n, mul(inner2, weight, RND_N), acc2);
    }
    out.first.note = out.second.note =
        "partial sums only; convergence is never asserted from finite evidence";
    return out;
}

CocycleReport cocycle_stats(const OdomutantSystem& sys, std::size_t samples,
                            std::size_t prefix_len, std::uint64_t seed) {
    const BaseSequence& space = sys.space();
    CocycleReport rep;
    rep.samples = samples;
    for (std::size_t i = 0; i < samples; ++i) {
        Rng rng = Rng::substream(seed, i);
        Point p = sampled_point(space, prefix_len, rng);
        try {
            BigInt c = cocycle_T(sys, p);
            auto N = n_plus_psi(sys, p);
            rep.histogram[c] += 1;
            if (abs(c) > rep.max_abs) rep.max_abs = abs(c);
            if (N) rep.level_counts[*N] += 1;
        } catch (const UndeterminedError&) {
            ++rep.undetermined;
        }
    }
    std::size_t determined = samples - rep.undetermined;
    // empirical phi-mean for the log gauge, plus the value-partition entropy;
    // both clearly estimates, never asserted against theory
    double mean = 0, ent = 0;
    for (auto& [value, count] : rep.histogram) {
        double pr = double(count) / double(determined ? determined : 1);
        BigInt a = abs(value);
        double lv = std::log(std::max(1.0, a.get_d()));
        mean += pr * lv;
        if (pr > 0) ent -= pr * std::log(pr);
    }
    rep.empirical_phi_mean = mean;
    rep.empirical_entropy = ent;
    // exact law per level: P(N+ o psi = n) = (q_n - 1)/h(n+1)
    for (auto& [n, count] : rep.level_counts) {
        CocycleReport::LevelBand band;
        band.n = n;
        BigRat exact(BigInt(space.q(n) - 1), space.h(n + 1));
        exact.canonicalize();
        band.expected = exact.get_d();
        band.observed = determined ? double(count) / double(determined) : 0.0;
        band.sigma = std::sqrt(band.expected * (1 - band.expected) /
                               double(determined ? determined : 1));
        band.within_3_sigma = std::abs(band.observed - band.expected) <= 3 * band.sigma + 1e-12;
        rep.bands.push_back(band);
    }
    return rep;
}

}  // namespace odo
