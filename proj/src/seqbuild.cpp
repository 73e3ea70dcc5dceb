#include "odo/seqbuild.hpp"

#include <algorithm>

namespace odo {

void SupernaturalSpec::validate() const {
    if (p_star < 2 || mpz_probab_prime_p(p_star.get_mpz_t(), 32) == 0)
        throw ValidationError("p_star must be prime");
    for (const auto& p : finite_primes) {
        if (p == p_star)
            throw ValidationError("the finite prime multiset must exclude p_star");
        if (p < 2 || mpz_probab_prime_p(p.get_mpz_t(), 32) == 0)
            throw ValidationError("finite prime list contains a non-prime");
    }
}

namespace {

// ln((m)!) enclosure. Exact via mpz when m is small, Stirling-type integral
// bounds otherwise:  m ln m - m + 1 <= ln m! <= (m+1) ln(m+1) - m.
struct LogFactBounds {
    Real lower, upper;
};

LogFactBounds log_factorial_bounds(const Real& m_lower, const Real& m_upper, mpfr_prec_t prec) {
    LogFactBounds out{Real(prec), Real(prec)};
    // lower: m(ln m - 1) + 1 evaluated with RND_D on the lower enclosure
    {
        Real lm(prec);
        mpfr_log(lm.get(), m_lower.get(), RND_D);
        Real lm1 = sub(lm, Real::from_ui(1, prec), RND_D);
        Real t = mul(m_lower, lm1, RND_D);
        out.lower = add(t, Real::from_ui(1, prec), RND_D);
    }
    {
        Real m1 = add(m_upper, Real::from_ui(1, prec), RND_U);
        Real lm(prec);
        mpfr_log(lm.get(), m1.get(), RND_U);
        Real t = mul(m1, lm, RND_U);
        out.upper = sub(t, m_lower, RND_U);
    }
    return out;
}

LogFactBounds log_factorial_of_q_minus_2(const FactoredInt& q, mpfr_prec_t prec) {
    // try the exact route first
    try {
        BigInt qv = q.value(24);  // up to ~16M
        if (qv.fits_ulong_p() && qv.get_ui() <= 2'000'000) {
            BigInt f = factorial(qv.get_ui() - 2);
            return {log_of(f, prec, RND_D), log_of(f, prec, RND_U)};
        }
    } catch (const ResourceError&) {
    }
    // m = q - 2 via the enclosure ln(q-2) in [ln q - 1, ln q] (q >= 4)
    Real lq_lo = q.log(prec, RND_D);
    Real lq_hi = q.log(prec, RND_U);
    Real m_lo(prec), m_hi(prec);
    {
        Real e = sub(lq_lo, Real::from_ui(1, prec), RND_D);
        mpfr_exp(m_lo.get(), e.get(), RND_D);
        mpfr_exp(m_hi.get(), lq_hi.get(), RND_U);
    }
    if (!mpfr_number_p(m_lo.get()) || !mpfr_number_p(m_hi.get()))
        throw ResourceError("factorial argument exceeds the representable range");
    return log_factorial_bounds(m_lo, m_hi, prec);
}

Cert cert_ge(const Real& a_lower, const Real& b_upper) {
    Cert c;
    if (mpfr_greaterequal_p(a_lower.get(), b_upper.get())) {
        c.decided = true;
        c.holds = true;
    }
    return c;
}

}  // namespace

ChoiceResult build_choiceqn(const BigRat& alpha, const SupernaturalSpec& spec,
                            std::size_t depth, mpfr_prec_t prec) {
    spec.validate();
    if (sgn(alpha) <= 0) throw ConfigError("alpha must be positive");
    ChoiceResult out;
    out.precision = prec;

    // K: smallest power of p_star with (q-2)! >= K for all q >= K, i.e.
    // (K-2)! >= K since the factorial side is monotone.
    BigInt K = spec.p_star;
    while (true) {
        if (K >= 2 && K - 2 <= 20) {
            if (K >= 2 && factorial(BigInt(K - 2).get_ui()) >= K) break;
        } else if (K > 20) {
            break;  // (K-2)! >= K holds for every K > 20
        }
        K *= spec.p_star;
        if (mpz_sizeinbase(K.get_mpz_t(), 2) > 64)
            throw InternalError("runaway search for the power floor K");
    }
    out.K = K;

    Real alpha_lo = Real::from(alpha, prec, RND_D);
    Real alpha_hi = Real::from(alpha, prec, RND_U);
    Real lnK_lo = log_of(K, prec, RND_D);
    Real lnK_hi = log_of(K, prec, RND_U);

    // level 0: q_0 = K^{i_0}, minimal i_0 with q_0 > (2/alpha) ln p_star and
    // ln q_0 >= alpha + 5
    std::size_t j_cur = 0;
    std::vector<FactoredInt> qs;
    for (std::size_t n = 0; n < depth; ++n) {
        ChoiceLevel lvl;
        if (n == 0) {
            Real rhs_hi(prec);
            {
                Real two_over_alpha = div(Real::from_ui(2, prec), alpha_lo, RND_U);
                Real lnp = log_of(spec.p_star, prec, RND_U);
                rhs_hi = mul(two_over_alpha, lnp, RND_U);
            }
            Real target_hi = add(alpha_hi, Real::from_ui(5, prec), RND_U);
            BigInt e_of_K = 0;
            {
                BigInt tmp = K;
                while (tmp > 1) {
                    tmp /= spec.p_star;
                    ++e_of_K;
                }
            }
            BigInt i0 = 1;
            FactoredInt q0;
            for (;; ++i0) {
                if (i0 > 100000) throw ResourceError("i_0 search exhausted");
                q0 = FactoredInt::from_prime_power(spec.p_star, BigInt(i0 * e_of_K));
                // condition A: q_0 > (2/alpha) ln p_star
                Real q0_lo(prec);
                mpfr_exp(q0_lo.get(), q0.log(prec, RND_D).get(), RND_D);
                Cert a;
                if (mpfr_greater_p(q0_lo.get(), rhs_hi.get())) a = {true, true};
                // condition B: ln q_0 >= alpha + 5
                Cert b = cert_ge(q0.log(prec, RND_D), target_hi);
                if (a.decided && a.holds && b.decided && b.holds) {
                    lvl.checks.push_back({"q0 > (2/alpha) log p_star", a});
                    lvl.checks.push_back({"log q0 >= alpha + 5", b});
                    break;
                }
            }
            lvl.q = q0;
            lvl.i_n = i0;
            lvl.j_n = 0;
            qs.push_back(q0);
        } else {
            // P_n = q_0 ... q_{n-1} (that is h_n), P_{n-1} = h_{n-1}
            FactoredInt Pn, Pn1;
            for (std::size_t i = 0; i < n; ++i) Pn.mul(qs[i]);
            for (std::size_t i = 0; i + 1 < n; ++i) Pn1.mul(qs[i]);
            Real Pn_lo(prec), Pn_hi(prec), Pn1_hi(prec), Pn1_lo(prec);
            mpfr_exp(Pn_lo.get(), Pn.log(prec, RND_D).get(), RND_D);
            mpfr_exp(Pn_hi.get(), Pn.log(prec, RND_U).get(), RND_U);
            mpfr_exp(Pn1_lo.get(), Pn1.log(prec, RND_D).get(), RND_D);
            mpfr_exp(Pn1_hi.get(), Pn1.log(prec, RND_U).get(), RND_U);
            if (!mpfr_number_p(Pn_hi.get()))
                throw ResourceError("height product exceeds the representable range at level " +
                                    std::to_string(n));

            auto lf = log_factorial_of_q_minus_2(qs[n - 1], prec);

            // j_{n}: greatest k with K prod p <= (q_{n-1}-2)! and
            // log(prod)/P_n <= alpha/2
            std::size_t k = j_cur;
            FactoredInt prod;  // primes j_cur+1 .. k
            while (k < spec.finite_primes.size()) {
                FactoredInt cand = prod;
                cand.mul_prime(spec.finite_primes[k]);
                // (a) ln K + ln prod <= ln((q-2)!)
                Real lhs_hi = add(lnK_hi, cand.log(prec, RND_U), RND_U);
                Cert a = cert_le(lhs_hi, lf.lower);
                // (b) ln(prod) <= (alpha/2) P_n
                Real rhs_lo = mul(div(alpha_lo, Real::from_ui(2, prec), RND_D), Pn_lo, RND_D);
                Cert b = cert_le(cand.log(prec, RND_U), rhs_lo);
                if (a.decided && a.holds && b.decided && b.holds) {
                    prod = cand;
                    ++k;
                } else {
                    break;
                }
            }
            lvl.j_n = k;

            // i': minimal certified i in the window
            // alpha + 2/P_{n-1} - lnK/P_n <= (i lnK + ln prod)/P_n <= alpha + 2/P_{n-1}
            // the window top alpha + 2/h(n-1), rounded DOWN so that a
            // <= certificate against it is sound
            Real win_top_lo = add(alpha_lo, div(Real::from_ui(2, prec), Pn1_hi, RND_D), RND_D);
            Real lnprod_hi = prod.log(prec, RND_U);
            // candidate around ((alpha + 2/P_{n-1}) P_n - ln prod)/ln K
            Real cand_r = div(sub(mul(win_top_lo, Pn_lo, RND_D), lnprod_hi, RND_D), lnK_hi, RND_D);
            BigInt cand;
            mpfr_get_z(cand.get_mpz_t(), cand_r.get(), MPFR_RNDD);
            if (cand < 1) cand = 1;
            BigInt e_of_K = 0;
            {
                BigInt tmp = K;
                while (tmp > 1) {
                    tmp /= spec.p_star;
                    ++e_of_K;
                }
            }
            bool found = false;
            BigInt iP = cand > 4 ? cand - 4 : BigInt(1);
            for (; iP <= cand + 4; ++iP) {
                FactoredInt qn = FactoredInt::from_prime_power(spec.p_star, BigInt(iP * e_of_K));
                qn.mul(prod);
                // sandwich: alpha + 5/P_n <= ln q_n / P_n <= alpha + 2/P_{n-1}
                Real lo_target = add(alpha_hi, div(Real::from_ui(5, prec), Pn_lo, RND_U), RND_U);
                Real quot_lo = div(qn.log(prec, RND_D), Pn_hi, RND_D);
                Real quot_hi = div(qn.log(prec, RND_U), Pn_lo, RND_U);
                Cert low = cert_ge(quot_lo, lo_target);
                Cert high = cert_le(quot_hi, win_top_lo);
                // factorial growth: ln q_n <= ln((q_{n-1}-2)!), and K <= q_n
                Cert fact = cert_le(qn.log(prec, RND_U), lf.lower);
                if (low.decided && low.holds && high.decided && high.holds && fact.decided &&
                    fact.holds) {
                    lvl.q = qn;
                    lvl.i_n = iP;
                    lvl.checks.push_back({"alpha + 5/h(n) <= log q_n / h(n)", low});
                    lvl.checks.push_back({"log q_n / h(n) <= alpha + 2/h(n-1)", high});
                    lvl.checks.push_back({"q_n <= (q_{n-1} - 2)!", fact});
                    found = true;
                    break;
                }
            }
            if (!found)
                throw ResourceError("no certified i' near the window at level " +
                                    std::to_string(n) + "; raise the precision");
            qs.push_back(lvl.q);
            j_cur = k;
        }
        for (auto& c : lvl.checks)
            if (!(c.cert.decided && c.cert.holds)) out.all_certified = false;
        out.levels.push_back(std::move(lvl));
    }
    return out;
}

InfEntropyResult build_infinite_entropy(const BigInt& p_star,
                                        const std::vector<BigInt>& finite_primes,
                                        std::size_t depth, unsigned long factorial_budget) {
    SupernaturalSpec spec{p_star, finite_primes};
    spec.validate();
    InfEntropyResult out;

    InfEntropyLevel l0;
    l0.c = 1;
    l0.qtilde = p_star;
    l0.q = p_star;
    l0.kappa = 1;
    l0.chi = p_star;
    l0.j = 0;
    l0.h = 1;
    out.levels.push_back(l0);

    for (std::size_t n = 0; n < depth; ++n) {
        const auto& prev = out.levels.back();
        InfEntropyLevel nxt;
        nxt.h = prev.h * prev.q;  // h_{n+1}
        nxt.c = prev.c * p_star;  // c_{n+1} = p_star^{n+1}

        // chi_{n+1}: greatest power of p_star <= (q_n-2)!/(c_n!^{qt_n-2}(c_n-1)!^2)
        if (!prev.q.fits_ulong_p() || prev.q.get_ui() > factorial_budget)
            throw ResourceError("factorial argument q_n = " + prev.q.get_str() +
                                " exceeds the budget " + std::to_string(factorial_budget));
        BigInt qn_fact = factorial(prev.q.get_ui() - 2);
        if (!prev.c.fits_ulong_p()) throw ResourceError("c_n exceeds the machine range");
        BigInt c_fact = factorial(prev.c.get_ui());
        BigInt c1_fact = factorial(prev.c.get_ui() - 1);
        BigRat denom;
        BigInt e = prev.qtilde - 2;
        if (sgn(e) >= 0) {
            if (!e.fits_ulong_p()) throw ResourceError("qt_n exponent exceeds the range");
            denom = BigRat(pow_big(c_fact, e.get_ui()) * c1_fact * c1_fact);
        } else {
            denom = BigRat(c1_fact * c1_fact, pow_big(c_fact, BigInt(-e).get_ui()));
        }
        BigRat ratio = BigRat(qn_fact) / denom;
        ratio.canonicalize();
        if (ratio < 1) throw ValidationError("factorial ratio below 1; no chi exists");
        BigInt chi_exp = greatest_power_exponent(p_star, ratio);
        if (!chi_exp.fits_ulong_p()) throw ResourceError("chi exponent exceeds the range");
        nxt.chi = pow_big(p_star, chi_exp.get_ui());

        // kappa_{n+1} = p_star^{h_{n+1}} * prod of the next primes while the
        // product stays below p_star^{h_{n+1}}
        if (!nxt.h.fits_ulong_p() || nxt.h.get_ui() > 8 * factorial_budget)
            throw ResourceError("h_{n+1} exponent exceeds the budget");
        BigInt ph = pow_big(p_star, nxt.h.get_ui());
        std::size_t k = prev.j;
        BigInt prod = 1;
        while (k < finite_primes.size() && prod * finite_primes[k] <= ph) {
            prod *= finite_primes[k];
            ++k;
        }
        nxt.j = k;
        nxt.kappa = ph * prod;
        nxt.qtilde = nxt.kappa * nxt.chi;
        nxt.q = nxt.c * nxt.qtilde;
        // log q >= log kappa >= h log p_star holds since q = c kappa chi and
        // kappa >= p_star^h by construction; record any violation anyway
        if (nxt.kappa < ph || nxt.q < nxt.kappa) out.log_kappa_bound_ok = false;
        out.levels.push_back(std::move(nxt));
    }
    return out;
}

namespace {

// decided true when lhs_lo >= rhs_hi, decided false when lhs_hi < rhs_lo
Cert enclosure_ge(const Real& lhs_lo, const Real& lhs_hi, const Real& rhs_lo,
                  const Real& rhs_hi) {
    Cert c;
    if (mpfr_greaterequal_p(lhs_lo.get(), rhs_hi.get())) {
        c.decided = true;
        c.holds = true;
    } else if (mpfr_less_p(lhs_hi.get(), rhs_lo.get())) {
        c.decided = true;
        c.holds = false;
    }
    return c;
}

}  // namespace

SummableReport check_summable(const BaseSequence& q, unsigned m, const BigRat& beta,
                              std::size_t n_lo, std::size_t n_hi, mpfr_prec_t prec) {
    if (sgn(beta) <= 0) throw ConfigError("beta must be positive");
    SummableReport rep;
    Real beta_lo = Real::from(beta, prec, RND_D);
    Real beta_hi = Real::from(beta, prec, RND_U);
    bool seen_bad = false;
    for (std::size_t n = n_lo; n <= n_hi; ++n) {
        SummableRow row;
        row.n = n;
        // precondition: ln q_n / h_n >= beta
        Real lq_lo = q.q_factored(n).log(prec, RND_D);
        Real lq_hi = q.q_factored(n).log(prec, RND_U);
        Real h_lo(prec), h_hi(prec);
        mpfr_exp(h_lo.get(), q.log_h(n, prec, RND_D).get(), RND_D);
        mpfr_exp(h_hi.get(), q.log_h(n, prec, RND_U).get(), RND_U);
        row.precondition = enclosure_ge(div(lq_lo, h_hi, RND_D), div(lq_hi, h_lo, RND_U),
                                        beta_lo, beta_hi);
        // inequality, compared in log form to stay inside the exponent
        // range: log^{(m)}(q_{n+m}) >= exp(beta h_n) is equivalent to
        // log^{(m+1)}(q_{n+m}) >= beta h_n (both sides positive)
        Real it_lo = q.q_factored(n + m).log(prec, RND_D);
        Real it_hi = q.q_factored(n + m).log(prec, RND_U);
        bool domain_ok = true;
        for (unsigned i = 0; i < m; ++i) {
            if (it_lo.sgn() <= 0) {
                domain_ok = false;
                break;
            }
            Real lo(prec), hi(prec);
            mpfr_log(lo.get(), it_lo.get(), RND_D);
            mpfr_log(hi.get(), it_hi.get(), RND_U);
            it_lo = lo;
            it_hi = hi;
        }
        Real rhs_lo = mul(beta_lo, h_lo, RND_D);
        Real rhs_hi = mul(beta_hi, h_hi, RND_U);
        if (domain_ok) row.inequality = enclosure_ge(it_lo, it_hi, rhs_lo, rhs_hi);
        bool decided_fail =
            (row.precondition.decided && !row.precondition.holds) ||
            (row.inequality.decided && !row.inequality.holds);
        bool undecided = !row.precondition.decided || !row.inequality.decided;
        if ((decided_fail || undecided) && !seen_bad) {
            rep.first_bad = n;
            seen_bad = true;
        }
        rep.any_failure = rep.any_failure || decided_fail;
        rep.any_undecided = rep.any_undecided || undecided;
        rep.rows.push_back(row);
    }
    return rep;
}

PowerKResult check_powerK(const BigInt& p, digit_t qtilde, digit_t c, mpfr_prec_t prec) {
    if (p < 2 || qtilde < 1 || c < 1) throw ConfigError("check_powerK: bad parameters");
    digit_t qv = qtilde * c;
    if (qv < 3) throw ConfigError("check_powerK needs q = qt * c >= 3");
    PowerKResult out;
    BigInt qfact = factorial(static_cast<unsigned long>(qv - 2));
    BigInt cfact = factorial(static_cast<unsigned long>(c));
    BigInt c1fact = factorial(static_cast<unsigned long>(c - 1));
    BigRat denom;
    digit_t e = qtilde - 2;
    if (e >= 0)
        denom = BigRat(pow_big(cfact, static_cast<unsigned long>(e)) * c1fact * c1fact);
    else
        denom = BigRat(c1fact * c1fact, pow_big(cfact, static_cast<unsigned long>(-e)));
    BigRat ratio = BigRat(qfact) / denom;
    ratio.canonicalize();
    out.lhs_exponent = greatest_power_exponent(p, ratio);
    out.lhs = pow_big(p, out.lhs_exponent.get_ui());

    // rhs upper bound: (1/p)(1/qt^2)(1/(ec))^qt qt^q
    Real rhs(prec);
    {
        Real lq = log_of(BigInt(qtilde), prec, RND_U);
        Real term1 = mul(Real::from(BigInt(qv), prec, RND_U), lq, RND_U);  // q ln qt
        // ln(ec) = 1 + ln c, rounded down because it is subtracted
        Real lnc = log_of(BigInt(c), prec, RND_D);
        Real ln_ec = add(lnc, Real::from_ui(1, prec), RND_D);
        Real term2 = mul(Real::from(BigInt(qtilde), prec, RND_D), ln_ec, RND_D);
        Real lp = log_of(p, prec, RND_D);
        Real lq2 = mul(Real::from_ui(2, prec), log_of(BigInt(qtilde), prec, RND_D), RND_D);
        Real log_rhs = sub(sub(sub(term1, term2, RND_U), lp, RND_U), lq2, RND_U);
        mpfr_exp(rhs.get(), log_rhs.get(), RND_U);
    }
    out.rhs = rhs.str();
    out.rhs_value = rhs.to_double();
    Real lhs_lo = Real::from(out.lhs, prec, RND_D);
    out.ok = mpfr_greaterequal_p(lhs_lo.get(), rhs.get());
    return out;
}

BigInt feldman_exponent(std::size_t n) {
    BigInt s = 0;
    for (std::size_t i = 1; i <= n; ++i)
        s += BigInt(i + 9) * ((BigInt(1) << (i + 11)) + 3);
    return s;
}

std::vector<BigInt> feldman_exponents(std::size_t n_max) {
    std::vector<BigInt> out;
    BigInt s = 0;
    out.push_back(s);
    for (std::size_t i = 1; i <= n_max; ++i) {
        s += BigInt(i + 9) * ((BigInt(1) << (i + 11)) + 3);
        out.push_back(s);
    }
    return out;
}

}  // namespace odo
