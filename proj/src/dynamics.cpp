#include "odo/dynamics.hpp"

#include <algorithm>
#include <string>

namespace odo {

namespace {

// Scan horizon past the prefix when concrete tails let us keep evaluating
// psi digits level by level.
constexpr std::size_t kTailScanSlack = 256;

Point with_digits(std::vector<digit_t> digits, Tail tail) {
    Point r;
    r.digits = std::move(digits);
    r.tail = tail;
    return r;
}

}  // namespace

Point apply_S(const BaseSequence& space, const Point& p) {
    std::size_t len = p.digits.size();
    std::size_t i = 0;
    for (; i < len; ++i)
        if (p.digits[i] != space.q(i) - 1) break;
    if (i == len) {
        switch (p.tail) {
            case Tail::Max:
                return Point::min_point();  // S(x+) = x-
            case Tail::Min:
                break;  // first tail digit is 0, carry lands there
            case Tail::Unspecified:
                throw UndeterminedError("apply_S: all determined digits maximal", len + 1);
        }
    }
    std::vector<digit_t> d(p.digits);
    if (i >= d.size()) d.resize(i + 1, 0);
    for (std::size_t j = 0; j < i; ++j) d[j] = 0;
    d[i] += 1;
    return with_digits(std::move(d), p.tail);
}

Point apply_S_inv(const BaseSequence& space, const Point& p) {
    std::size_t len = p.digits.size();
    std::size_t i = 0;
    for (; i < len; ++i)
        if (p.digits[i] != 0) break;
    if (i == len) {
        switch (p.tail) {
            case Tail::Min:
                return Point::max_point();  // S^{-1}(x-) = x+
            case Tail::Max:
                break;
            case Tail::Unspecified:
                throw UndeterminedError("apply_S_inv: all determined digits minimal", len + 1);
        }
    }
    std::vector<digit_t> d(p.digits);
    if (i >= d.size()) {
        d.resize(i + 1, 0);
        d[i] = space.q(i) - 1;  // tail was Max
    }
    for (std::size_t j = 0; j < i; ++j) d[j] = space.q(j) - 1;
    d[i] -= 1;
    return with_digits(std::move(d), p.tail);
}

Point apply_S_power(const BaseSequence& space, const Point& p, const BigInt& k) {
    if (sgn(k) == 0) return p;
    std::vector<digit_t> d(p.digits);
    Tail tail = p.tail;
    auto digit = [&](std::size_t i) -> digit_t {
        if (i < d.size()) return d[i];
        switch (tail) {
            case Tail::Min:
                return 0;
            case Tail::Max:
                return space.q(i) - 1;
            case Tail::Unspecified:
                throw UndeterminedError("apply_S_power: carry past the prefix", i + 1);
        }
        throw InternalError("bad tail");
    };
    auto set_digit = [&](std::size_t i, digit_t v) {
        if (i >= d.size()) {
            for (std::size_t j = d.size(); j <= i; ++j) d.push_back(digit(j));
        }
        d[i] = v;
    };

    if (sgn(k) > 0) {
        BigInt rem = k;
        int carry = 0;
        std::size_t i = 0;
        while (sgn(rem) != 0 || carry != 0) {
            digit_t qi = space.q(i);
            BigInt q(qi);
            digit_t addend = static_cast<digit_t>(BigInt(rem % q).get_si());
            rem /= q;
            // The all-max tail absorbs a trailing carry: every further digit
            // wraps to 0, which is exactly the Min tail.
            if (i >= d.size() && tail == Tail::Max && sgn(rem) == 0 && addend == 0 &&
                carry == 1) {
                tail = Tail::Min;
                break;
            }
            digit_t t = digit(i) + addend + carry;
            carry = (t >= qi) ? 1 : 0;
            if (carry) t -= qi;
            set_digit(i, t);
            ++i;
        }
        return with_digits(std::move(d), tail);
    }

    BigInt rem = -k;
    int borrow = 0;
    std::size_t i = 0;
    while (sgn(rem) != 0 || borrow != 0) {
        digit_t qi = space.q(i);
        BigInt q(qi);
        digit_t sub = static_cast<digit_t>(BigInt(rem % q).get_si());
        rem /= q;
        if (i >= d.size() && tail == Tail::Min && sgn(rem) == 0 && sub == 0 && borrow == 1) {
            tail = Tail::Max;  // x- minus one rolls down to x+
            break;
        }
        digit_t t = digit(i) - sub - borrow;
        borrow = (t < 0) ? 1 : 0;
        if (borrow) t += qi;
        set_digit(i, t);
        ++i;
    }
    return with_digits(std::move(d), tail);
}

Point apply_zeta(const BaseSequence& space, std::size_t n, const Point& p) {
    if (n == 0) throw ConfigError("zeta_n needs n >= 1");
    digit_t v = digit_at(space, p, n - 1);
    if (v == space.q(n - 1) - 1)
        throw DomainError("zeta_" + std::to_string(n) + " undefined on [*,...,*,q-1]_" +
                          std::to_string(n));
    std::vector<digit_t> d(p.digits);
    if (d.size() < n) {
        d.reserve(n);
        for (std::size_t j = d.size(); j < n; ++j) d.push_back(digit_at(space, p, j));
    }
    d[n - 1] += 1;
    return with_digits(std::move(d), p.tail);
}

std::vector<digit_t> psi_prefix(const OdomutantSystem& sys, const Point& p, std::size_t count) {
    const BaseSequence& space = sys.space();
    std::vector<digit_t> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(
            sys.family().sigma(i, digit_at(space, p, i + 1), digit_at(space, p, i)));
    return out;
}

Point apply_psi(const OdomutantSystem& sys, const Point& p) {
    std::size_t len = p.digits.size();
    std::size_t out_len = (p.tail == Tail::Unspecified) ? (len == 0 ? 0 : len - 1) : len;
    Point r;
    r.digits = psi_prefix(sys, p, out_len);
    r.tail = Tail::Unspecified;
    if (p.tail == Tail::Min && sys.family().fixes_zero()) r.tail = Tail::Min;
    if (p.tail == Tail::Max && sys.family().fixes_max()) r.tail = Tail::Max;
    return r;
}

Point apply_psi_n(const OdomutantSystem& sys, std::size_t n, const Point& p) {
    const BaseSequence& space = sys.space();
    std::vector<digit_t> d;
    for (std::size_t i = 0; i <= n + 1 || i < p.digits.size(); ++i)
        d.push_back(digit_at(space, p, i));
    auto psi = psi_prefix(sys, p, n + 1);
    for (std::size_t i = 0; i <= n; ++i) d[i] = psi[i];
    return with_digits(std::move(d), p.tail);
}

Point apply_psi_n_inv(const OdomutantSystem& sys, std::size_t n, const Point& p) {
    const BaseSequence& space = sys.space();
    std::vector<digit_t> d;
    for (std::size_t i = 0; i <= n + 1 || i < p.digits.size(); ++i)
        d.push_back(digit_at(space, p, i));
    // Backwards z-recursion: the seed index is the untouched digit n+1.
    digit_t z = sys.family().sigma_inv(n, d[n + 1], d[n]);
    std::vector<digit_t> zs(n + 1);
    zs[n] = z;
    for (std::size_t i = n; i-- > 0;) zs[i] = sys.family().sigma_inv(i, zs[i + 1], d[i]);
    for (std::size_t i = 0; i <= n; ++i) d[i] = zs[i];
    return with_digits(std::move(d), p.tail);
}

namespace {

std::optional<std::size_t> scan_extremal(const BaseSequence& space, const Point& p, bool max) {
    std::size_t len = p.digits.size();
    for (std::size_t i = 0; i < len; ++i) {
        digit_t ref = max ? space.q(i) - 1 : 0;
        if (p.digits[i] != ref) return i;
    }
    Tail blocking = max ? Tail::Max : Tail::Min;
    if (p.tail == blocking) return std::nullopt;  // infinity sentinel
    if (p.tail == Tail::Unspecified)
        throw UndeterminedError("N+/N-: all determined digits extremal", len + 1);
    return len;  // opposite concrete tail departs immediately (q >= 2)
}

std::optional<std::size_t> scan_extremal_psi(const OdomutantSystem& sys, const Point& p,
                                             bool max) {
    const BaseSequence& space = sys.space();
    std::size_t len = p.digits.size();
    std::size_t cap = len + kTailScanSlack;
    for (std::size_t i = 0; i < cap; ++i) {
        if (i >= len) {
            // Past the prefix an endpoint-fixing family keeps psi extremal on
            // the matching tail forever: the point is excluded from the domain.
            if (max && p.tail == Tail::Max && sys.family().fixes_max()) return std::nullopt;
            if (!max && p.tail == Tail::Min && sys.family().fixes_zero()) return std::nullopt;
        }
        digit_t xi = digit_at(space, p, i);
        digit_t xi1 = digit_at(space, p, i + 1);
        digit_t v = sys.family().sigma(i, xi1, xi);
        digit_t ref = max ? space.q(i) - 1 : 0;
        if (v != ref) return i;
    }
    throw UndeterminedError("psi stays extremal beyond the scan horizon", cap + 2);
}

}  // namespace

std::optional<std::size_t> n_plus(const BaseSequence& space, const Point& p) {
    return scan_extremal(space, p, true);
}

std::optional<std::size_t> n_minus(const BaseSequence& space, const Point& p) {
    return scan_extremal(space, p, false);
}

std::optional<std::size_t> n_plus_psi(const OdomutantSystem& sys, const Point& p) {
    return scan_extremal_psi(sys, p, true);
}

std::optional<std::size_t> n_minus_psi(const OdomutantSystem& sys, const Point& p) {
    return scan_extremal_psi(sys, p, false);
}

Point apply_T(const OdomutantSystem& sys, const Point& p) {
    const BaseSequence& space = sys.space();
    auto N_opt = n_plus_psi(sys, p);
    if (!N_opt) {
        if (sys.extends_to_homeomorphism()) return Point::min_point();  // T(x+) := x-
        throw DomainError("T undefined where psi(x) is the maximal point");
    }
    std::size_t N = *N_opt;
    digit_t idx = digit_at(space, p, N + 1);
    digit_t topped = sys.family().sigma(N, idx, digit_at(space, p, N));
    std::vector<digit_t> y(N + 1);
    y[N] = sys.family().sigma_inv(N, idx, topped + 1);
    for (std::size_t i = N; i-- > 0;) y[i] = sys.family().sigma_inv(i, y[i + 1], 0);

    std::vector<digit_t> d;
    std::size_t out_len = std::max(p.digits.size(), N + 2);
    d.reserve(out_len);
    for (std::size_t i = 0; i < out_len; ++i)
        d.push_back(i <= N ? y[i] : digit_at(space, p, i));
    return with_digits(std::move(d), p.tail);
}

Point apply_T_inv(const OdomutantSystem& sys, const Point& p) {
    const BaseSequence& space = sys.space();
    auto N_opt = n_minus_psi(sys, p);
    if (!N_opt) {
        if (sys.extends_to_homeomorphism()) return Point::max_point();  // T^{-1}(x-) = x+
        throw DomainError("T^{-1} undefined where psi(x) is the minimal point");
    }
    std::size_t N = *N_opt;
    digit_t idx = digit_at(space, p, N + 1);
    digit_t bottomed = sys.family().sigma(N, idx, digit_at(space, p, N));
    std::vector<digit_t> w(N + 1);
    w[N] = sys.family().sigma_inv(N, idx, bottomed - 1);
    for (std::size_t i = N; i-- > 0;)
        w[i] = sys.family().sigma_inv(i, w[i + 1], space.q(i) - 1);

    std::vector<digit_t> d;
    std::size_t out_len = std::max(p.digits.size(), N + 2);
    d.reserve(out_len);
    for (std::size_t i = 0; i < out_len; ++i)
        d.push_back(i <= N ? w[i] : digit_at(space, p, i));
    return with_digits(std::move(d), p.tail);
}

Point apply_T_power(const OdomutantSystem& sys, const Point& p, const BigInt& k) {
    if (sgn(k) == 0) return p;
    const BaseSequence& space = sys.space();
    // Find a level n whose tower contains the whole orbit segment: with
    // pos = sum_{i<=n} h_i psi(p)_i, we need 0 <= pos + k < h(n+1); then
    // T^k p = psi_n^{-1} S^k psi_n p.
    BigInt pos = 0;
    std::size_t n = 0;
    std::size_t cap = p.digits.size() + kTailScanSlack;
    for (std::size_t i = 0;; ++i) {
        if (i >= cap) throw UndeterminedError("T^k: no containing tower within horizon", cap);
        digit_t xi = digit_at(space, p, i);
        digit_t xi1 = digit_at(space, p, i + 1);
        pos += space.h(i) * BigInt(sys.family().sigma(i, xi1, xi));
        BigInt target = pos + k;
        if (sgn(target) >= 0 && target < space.h(i + 1)) {
            n = i;
            break;
        }
    }
    BigInt target = pos + k;
    // Mixed-radix digits of the target position are the new psi digits.
    std::vector<digit_t> psi_new(n + 1);
    BigInt rem = target;
    for (std::size_t i = 0; i <= n; ++i) {
        BigInt q(space.q(i));
        psi_new[i] = static_cast<digit_t>(BigInt(rem % q).get_si());
        rem /= q;
    }
    // z-recursion back through psi_n^{-1}, seeded by the untouched digit n+1.
    std::vector<digit_t> z(n + 1);
    z[n] = sys.family().sigma_inv(n, digit_at(space, p, n + 1), psi_new[n]);
    for (std::size_t i = n; i-- > 0;) z[i] = sys.family().sigma_inv(i, z[i + 1], psi_new[i]);

    std::vector<digit_t> d;
    std::size_t out_len = std::max(p.digits.size(), n + 2);
    d.reserve(out_len);
    for (std::size_t i = 0; i < out_len; ++i)
        d.push_back(i <= n ? z[i] : digit_at(space, p, i));
    return with_digits(std::move(d), p.tail);
}

BigInt transfer_exponent(const OdomutantSystem& sys, const Point& x, const Point& y,
                         std::size_t M) {
    const BaseSequence& space = sys.space();
    if (M == 0) throw ConfigError("transfer exponent needs M >= 1");
    // The sum reads digits through level M (sigma at level M-1 is indexed by
    // the digit at level M).
    if (x.tail == Tail::Unspecified && M + 1 > x.digits.size())
        throw DomainError("transfer exponent: M needs digits of x through level M");
    if (y.tail == Tail::Unspecified && M + 1 > y.digits.size())
        throw DomainError("transfer exponent: M needs digits of y through level M");

    // Agreement beyond M, on determined digits and tail policies.
    std::size_t upper = std::max(x.digits.size(), y.digits.size());
    for (std::size_t j = M; j < upper; ++j) {
        bool xd = j < x.digits.size() || x.tail != Tail::Unspecified;
        bool yd = j < y.digits.size() || y.tail != Tail::Unspecified;
        if (xd && yd && digit_at(space, x, j) != digit_at(space, y, j))
            throw DomainError("transfer exponent: digits differ at level " + std::to_string(j) +
                              " >= M");
    }
    // Two concrete but different tails disagree at every level beyond both
    // prefixes; an Unspecified side is accepted on its determined digits only.
    if (x.tail != Tail::Unspecified && y.tail != Tail::Unspecified && x.tail != y.tail)
        throw DomainError("transfer exponent: tail policies disagree beyond M");

    bool differ = false;
    BigInt K = 0;
    for (std::size_t j = 0; j < M; ++j) {
        digit_t xj = digit_at(space, x, j), yj = digit_at(space, y, j);
        if (xj != yj) differ = true;
        digit_t sx = sys.family().sigma(j, digit_at(space, x, j + 1), xj);
        digit_t sy = sys.family().sigma(j, digit_at(space, y, j + 1), yj);
        K += space.h(j) * BigInt(sy - sx);
    }
    if (!differ) throw DomainError("transfer exponent needs x != y");
    if (sgn(K) == 0) throw InternalError("transfer exponent K = 0 for distinct points");
    return K;
}

std::optional<long long> first_return(const OdomutantSystem& sys, const Point& p,
                                      const Cylinder& c, long long cap) {
    if (!c.contains(sys.space(), p)) throw DomainError("first_return: point not in the set");
    Point cur = p;
    for (long long k = 1; k <= cap; ++k) {
        cur = apply_T(sys, cur);
        if (c.contains(sys.space(), cur)) return k;
    }
    return std::nullopt;
}

std::vector<std::uint64_t> pullback_hit_counts(const OdomutantSystem& sys, std::size_t m) {
    const BaseSequence& space = sys.space();
    if (!sys.family().fixes_zero())
        throw DomainError("the finite-level pullback map needs a family fixing 0");
    BigInt hm1 = space.h(m + 1);
    if (!hm1.fits_ulong_p() || hm1.get_ui() > (1u << 26))
        throw ResourceError("h(m+1) = " + hm1.get_str() + " prefixes exceed the budget");
    std::size_t cells = hm1.get_ui();
    std::size_t hm = space.h(m).get_ui();
    std::vector<std::uint64_t> counts(hm, 0);

    std::vector<digit_t> x(m + 1, 0);
    std::vector<digit_t> psi(m), img(m);
    std::vector<digit_t> y(m + 1);
    for (std::size_t cell = 0; cell < cells; ++cell) {
        for (std::size_t i = 0; i < m; ++i) psi[i] = sys.family().sigma(i, x[i + 1], x[i]);
        std::size_t N = m;
        for (std::size_t i = 0; i < m; ++i)
            if (psi[i] != space.q(i) - 1) {
                N = i;
                break;
            }
        if (N == m) {
            // the whole psi-max run maps to zeros under a fix-0 family,
            // whatever the unseen digits do
            std::fill(img.begin(), img.end(), 0);
        } else {
            digit_t idx = x[N + 1];
            y[N] = sys.family().sigma_inv(N, idx, psi[N] + 1);
            for (std::size_t i = N; i-- > 0;) y[i] = sys.family().sigma_inv(i, y[i + 1], 0);
            for (std::size_t i = 0; i < m; ++i) img[i] = (i <= N) ? y[i] : x[i];
        }
        std::size_t pos = 0, weight = 1;
        for (std::size_t i = 0; i < m; ++i) {
            pos += static_cast<std::size_t>(img[i]) * weight;
            weight *= static_cast<std::size_t>(space.q(i));
        }
        counts[pos] += 1;
        for (std::size_t i = 0; i <= m; ++i) {
            if (++x[i] < space.q(i)) break;
            x[i] = 0;
        }
    }
    return counts;
}

PullbackMeasure pullback_measure(const OdomutantSystem& sys, const Cylinder& c,
                                 std::size_t depth) {
    const BaseSequence& space = sys.space();
    if (depth < c.level() + 2) depth = c.level() + 2;
    PullbackMeasure out;

    // Depth-first refinement of digit cells; a cell either decides the first
    // level(c) digits of its T-image or splits.
    struct Cell {
        std::vector<digit_t> digits;
    };
    std::vector<Cell> stack;
    stack.push_back({{}});
    while (!stack.empty()) {
        Cell cell = std::move(stack.back());
        stack.pop_back();
        Point p = with_digits(cell.digits, Tail::Unspecified);
        bool decided = false;
        bool inside = false;
        try {
            Point img = apply_T(sys, p);
            // containment needs only determined digits of img at levels < level(c)
            inside = c.contains(space, img);
            decided = true;
        } catch (const UndeterminedError&) {
            decided = false;
        }
        if (decided) {
            BigRat mass(BigInt(1), space.h(cell.digits.size()));
            mass.canonicalize();
            if (inside) out.resolved_in += mass;
            continue;
        }
        if (cell.digits.size() >= depth) {
            BigRat mass(BigInt(1), space.h(cell.digits.size()));
            mass.canonicalize();
            // One shot with the Max tail: for endpoint-fixing families the
            // whole sliver shares its T-image prefix.
            if (sys.extends_to_homeomorphism()) {
                Point q = with_digits(cell.digits, Tail::Max);
                try {
                    Point img = apply_T(sys, q);
                    if (c.contains(space, img)) out.resolved_in += mass;
                    continue;
                } catch (const Error&) {
                }
            }
            out.unresolved += mass;
            continue;
        }
        digit_t qn = space.q(cell.digits.size());
        for (digit_t v = qn; v-- > 0;) {
            Cell child = cell;
            child.digits.push_back(v);
            stack.push_back(std::move(child));
        }
    }
    out.resolved_in.canonicalize();
    out.unresolved.canonicalize();
    return out;
}

}  // namespace odo
