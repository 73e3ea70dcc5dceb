#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <map>
#include <string>
#include <vector>

#include "odo/errors.hpp"

namespace odo {

using BigInt = mpz_class;
using BigRat = mpq_class;

using digit_t = long;

// Round-down / round-up aliases used for one-sided certificates.
inline constexpr mpfr_rnd_t RND_D = MPFR_RNDD;
inline constexpr mpfr_rnd_t RND_U = MPFR_RNDU;
inline constexpr mpfr_rnd_t RND_N = MPFR_RNDN;

/// Thin RAII wrapper over mpfr_t. Every operation takes an explicit rounding
/// direction so inequality certificates stay honest.
class Real {
  public:
    explicit Real(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
    Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, RND_N); }
    Real(Real&& o) noexcept { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_swap(v_, o.v_); }
    Real& operator=(const Real& o) {
        if (this != &o) { mpfr_set_prec(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, RND_N); }
        return *this;
    }
    Real& operator=(Real&& o) noexcept { mpfr_swap(v_, o.v_); return *this; }
    ~Real() { mpfr_clear(v_); }

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }
    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

    static Real from(const BigInt& z, mpfr_prec_t prec, mpfr_rnd_t rnd) {
        Real r(prec);
        mpfr_set_z(r.v_, z.get_mpz_t(), rnd);
        return r;
    }
    static Real from(const BigRat& q, mpfr_prec_t prec, mpfr_rnd_t rnd) {
        Real r(prec);
        mpfr_set_q(r.v_, q.get_mpq_t(), rnd);
        return r;
    }
    static Real from_ui(unsigned long u, mpfr_prec_t prec) {
        Real r(prec);
        mpfr_set_ui(r.v_, u, RND_N);
        return r;
    }

    double to_double() const { return mpfr_get_d(v_, RND_N); }
    std::string str(std::size_t digits = 30) const;

    int cmp(const Real& o) const { return mpfr_cmp(v_, o.v_); }
    int sgn() const { return mpfr_sgn(v_); }

  private:
    mpfr_t v_;
};

Real log_of(const BigInt& z, mpfr_prec_t prec, mpfr_rnd_t rnd);
Real add(const Real& a, const Real& b, mpfr_rnd_t rnd);
Real sub(const Real& a, const Real& b, mpfr_rnd_t rnd);
Real mul(const Real& a, const Real& b, mpfr_rnd_t rnd);
Real div(const Real& a, const Real& b, mpfr_rnd_t rnd);

/// Outcome of a one-sided comparison performed with directed rounding:
/// `holds` is meaningful only when `decided`.
struct Cert {
    bool decided = false;
    bool holds = false;
};

/// Certifies a <= b. Decided when the directed-rounding enclosures of both
/// sides do not overlap the wrong way.
Cert cert_le(const Real& a_upper, const Real& b_lower);

/// Nonnegative integer in factored form: a prime -> exponent map with big
/// exponents. Used wherever the inductive constructions outgrow any explicit
/// integer type.
class FactoredInt {
  public:
    FactoredInt() = default;                       // represents 1
    explicit FactoredInt(const BigInt& n);         // factors small n by trial division
    static FactoredInt from_prime_power(const BigInt& p, const BigInt& e);

    const std::map<BigInt, BigInt>& factors() const { return f_; }
    bool is_one() const { return f_.empty(); }

    FactoredInt& mul(const FactoredInt& o);
    FactoredInt& mul_prime(const BigInt& p, const BigInt& e = 1);

    /// Exact expansion; throws ResourceError when the result would exceed
    /// `max_bits` bits.
    BigInt value(unsigned long max_bits = 1u << 20) const;

    /// Natural log with directed rounding (all terms positive, so the
    /// direction is preserved through the sum).
    Real log(mpfr_prec_t prec, mpfr_rnd_t rnd) const;

    /// log2 via log; convenience for exponent bookkeeping.
    Real log2(mpfr_prec_t prec, mpfr_rnd_t rnd) const;

    std::string str() const;

  private:
    std::map<BigInt, BigInt> f_;
};

BigInt factorial(unsigned long n);
BigInt pow_big(const BigInt& base, unsigned long e);

/// Exact p-adic style floor: the greatest e with p^e <= value (value >= 1).
BigInt greatest_power_exponent(const BigInt& p, const BigRat& value);

}  // namespace odo
