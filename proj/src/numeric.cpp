#include "odo/numeric.hpp"

#include <cstdio>
#include <memory>

namespace odo {

std::string Real::str(std::size_t digits) const {
    char* s = nullptr;
    // %.*Rg keeps the output compact and round-trippable enough for reports.
    if (mpfr_asprintf(&s, "%.*Rg", static_cast<int>(digits), v_) < 0)
        throw InternalError("mpfr_asprintf failed");
    std::string out(s);
    mpfr_free_str(s);
    return out;
}

Real log_of(const BigInt& z, mpfr_prec_t prec, mpfr_rnd_t rnd) {
    if (sgn(z) <= 0) throw DomainError("log of non-positive integer");
    Real x = Real::from(z, prec, rnd);
    Real r(prec);
    mpfr_log(r.get(), x.get(), rnd);
    return r;
}

Real add(const Real& a, const Real& b, mpfr_rnd_t rnd) {
    Real r(std::max(a.prec(), b.prec()));
    mpfr_add(r.get(), a.get(), b.get(), rnd);
    return r;
}

Real sub(const Real& a, const Real& b, mpfr_rnd_t rnd) {
    Real r(std::max(a.prec(), b.prec()));
    mpfr_sub(r.get(), a.get(), b.get(), rnd);
    return r;
}

Real mul(const Real& a, const Real& b, mpfr_rnd_t rnd) {
    Real r(std::max(a.prec(), b.prec()));
    mpfr_mul(r.get(), a.get(), b.get(), rnd);
    return r;
}

Real div(const Real& a, const Real& b, mpfr_rnd_t rnd) {
    Real r(std::max(a.prec(), b.prec()));
    mpfr_div(r.get(), a.get(), b.get(), rnd);
    return r;
}

Cert cert_le(const Real& a_upper, const Real& b_lower) {
    Cert c;
    if (mpfr_lessequal_p(a_upper.get(), b_lower.get())) {
        c.decided = true;
        c.holds = true;
    }
    // a_upper > b_lower proves nothing by itself: the true values could still
    // satisfy a <= b. Callers wanting a refutation certify the reverse.
    return c;
}

FactoredInt::FactoredInt(const BigInt& n) {
    if (sgn(n) <= 0) throw DomainError("FactoredInt requires a positive integer");
    BigInt m = n;
    BigInt p = 2;
    while (m > 1) {
        if (mpz_sizeinbase(p.get_mpz_t(), 2) > 34)
            throw ResourceError("FactoredInt: trial division beyond budget");
        if (m % p == 0) {
            BigInt e = 0;
            while (m % p == 0) {
                m /= p;
                ++e;
            }
            f_[p] = e;
        }
        mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
        if (p * p > m && m > 1) {
            f_[m] += 1;
            break;
        }
    }
}

FactoredInt FactoredInt::from_prime_power(const BigInt& p, const BigInt& e) {
    FactoredInt r;
    if (sgn(e) < 0) throw DomainError("negative exponent");
    if (sgn(e) > 0) r.f_[p] = e;
    return r;
}

FactoredInt& FactoredInt::mul(const FactoredInt& o) {
    for (const auto& [p, e] : o.f_) f_[p] += e;
    return *this;
}

FactoredInt& FactoredInt::mul_prime(const BigInt& p, const BigInt& e) {
    if (sgn(e) < 0) throw DomainError("negative exponent");
    if (sgn(e) > 0) f_[p] += e;
    return *this;
}

BigInt FactoredInt::value(unsigned long max_bits) const {
    // Cheap size bound first: sum e_p * ceil(log2 p).
    BigInt bits = 0;
    for (const auto& [p, e] : f_) bits += e * BigInt(mpz_sizeinbase(p.get_mpz_t(), 2));
    if (bits > BigInt(max_bits))
        throw ResourceError("FactoredInt expansion exceeds bit budget (" + bits.get_str() +
                            " bits)");
    BigInt r = 1;
    for (const auto& [p, e] : f_) {
        if (!e.fits_ulong_p()) throw ResourceError("FactoredInt exponent exceeds ulong");
        BigInt pe;
        mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e.get_ui());
        r *= pe;
    }
    return r;
}

Real FactoredInt::log(mpfr_prec_t prec, mpfr_rnd_t rnd) const {
    Real acc(prec);
    for (const auto& [p, e] : f_) {
        Real lp = log_of(p, prec, rnd);
        Real ef = Real::from(e, prec, rnd);
        acc = odo::add(acc, odo::mul(lp, ef, rnd), rnd);
    }
    return acc;
}

Real FactoredInt::log2(mpfr_prec_t prec, mpfr_rnd_t rnd) const {
    Real ln = log(prec, rnd);
    Real l2(prec);
    // To keep the direction of a quotient with positive numerator, the
    // denominator must be rounded the opposite way.
    mpfr_rnd_t opp = (rnd == RND_D) ? RND_U : (rnd == RND_U ? RND_D : RND_N);
    mpfr_const_log2(l2.get(), opp);
    return div(ln, l2, rnd);
}

std::string FactoredInt::str() const {
    if (f_.empty()) return "1";
    std::string s;
    for (const auto& [p, e] : f_) {
        if (!s.empty()) s += " * ";
        s += p.get_str() + "^" + e.get_str();
    }
    return s;
}

BigInt factorial(unsigned long n) {
    BigInt r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
}

BigInt pow_big(const BigInt& base, unsigned long e) {
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

BigInt greatest_power_exponent(const BigInt& p, const BigRat& value) {
    if (p < 2) throw DomainError("greatest_power_exponent: p must be >= 2");
    if (sgn(value) <= 0 || value < 1)
        throw DomainError("greatest_power_exponent: value must be >= 1");
    // Galloping upper bound, then binary search on e with p^e <= value.
    auto le = [&](const BigInt& e) {
        if (!e.fits_ulong_p()) throw ResourceError("exponent search out of range");
        BigInt pe = pow_big(p, e.get_ui());
        return BigRat(pe) <= value;
    };
    BigInt lo = 0, hi = 1;
    while (le(hi)) {
        lo = hi;
        hi *= 2;
    }
    while (hi - lo > 1) {
        BigInt mid = (lo + hi) / 2;
        if (le(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

}  // namespace odo
