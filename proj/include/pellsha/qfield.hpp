#pragma once

/**
 * @file qfield.hpp
 * @brief Arithmetic in K = Q(sqrt D) and its maximal order Z[delta].
 *
 * delta = (D + sqrt D)/2. Fractional ideals are kept in the normal form
 * q * (a Z + ((b + sqrt D)/2) Z) with q > 0 rational, a > 0 and
 * -a < b <= a, so two ideals are equal iff their normal forms are.
 * The basis (q a, q (b + sqrt D)/2) is always positively oriented.
 */

#include <optional>
#include <string>
#include <vector>

#include "pellsha/arith.hpp"
#include "pellsha/form.hpp"

namespace pellsha {

/// Names the first fundamental-discriminant condition D violates, if any.
inline std::optional<std::string> fundamental_failure(Int D) {
    if (D >= 0 && is_square(D)) return std::to_string(D) + " is a perfect square";
    Int r = mod(D, 4);
    if (r == 2 || r == 3) return std::to_string(D) + " is not congruent to 0 or 1 mod 4";
    if (r == 1) {
        if (!is_squarefree(D)) return std::to_string(D) + " = 1 mod 4 is not squarefree";
        return std::nullopt;
    }
    Int m = D / 4;
    Int rm = mod(m, 4);
    if (rm != 2 && rm != 3) return std::to_string(D) + "/4 = " + std::to_string(m) + " is not 2 or 3 mod 4";
    if (!is_squarefree(m)) return std::to_string(D) + "/4 = " + std::to_string(m) + " is not squarefree";
    return std::nullopt;
}

inline bool is_fundamental(Int D) { return !fundamental_failure(D).has_value(); }

/// A validated fundamental discriminant.
class Discriminant {
public:
    static Discriminant make(Int D) {
        if (D >= 0 && is_square(D)) throw PerfectSquare(std::to_string(D) + " is a perfect square");
        if (auto why = fundamental_failure(D)) throw NotFundamental(*why);
        return Discriminant(D, static_cast<int>(factorize(D).size()));
    }

    Int value() const { return d_; }
    /// Number of prime discriminants in the factorization of D (= number of primes dividing D).
    int t() const { return t_; }
    bool is_real() const { return d_ > 0; }
    /// 2^(t-1), the number of genera.
    Int genus_count() const { return Int{1} << (t_ - 1); }

    friend bool operator==(const Discriminant&, const Discriminant&) = default;

private:
    Discriminant(Int d, int t) : d_(d), t_(t) {}
    Int d_;
    int t_;
};

// ---------------------------------------------------------------------------
// Elements a + b*delta

struct QuadElement {
    BigRational a;
    BigRational b;

    bool is_integral() const {
        return boost::multiprecision::denominator(a) == 1 && boost::multiprecision::denominator(b) == 1;
    }
    friend bool operator==(const QuadElement&, const QuadElement&) = default;
};

inline BigRational norm(const Discriminant& D, const QuadElement& x) {
    BigInt d = D.value();
    return x.a * x.a + BigRational(d) * x.a * x.b + BigRational((d * d - d) / 4) * x.b * x.b;
}

inline BigRational trace(const Discriminant& D, const QuadElement& x) {
    return 2 * x.a + BigRational(BigInt(D.value())) * x.b;
}

/// delta^2 = D delta - (D^2 - D)/4.
inline QuadElement multiply(const Discriminant& D, const QuadElement& x, const QuadElement& y) {
    BigInt d = D.value();
    BigRational bb = x.b * y.b;
    return {x.a * y.a - BigRational((d * d - d) / 4) * bb, x.a * y.b + x.b * y.a + BigRational(d) * bb};
}

// ---------------------------------------------------------------------------
// Fractional ideals

struct FractionalIdeal {
    Rational q;
    Int a = 1;
    Int b = 0;
    Int disc = 0;

    std::string to_string() const {
        return "(" + q.to_string() + ", " + std::to_string(a) + ", " + std::to_string(b) + ")";
    }
    friend bool operator==(const FractionalIdeal&, const FractionalIdeal&) = default;
};

/// Validates and normalizes q (a Z + ((b + sqrt D)/2) Z).
inline FractionalIdeal make_ideal(const Discriminant& D, const Rational& q, Int a, Int b) {
    if (q.sign() <= 0) throw DomainError("ideal scalar must be positive");
    if (a <= 0) throw DomainError("ideal parameter a must be positive");
    Int four_a = checked::mul(4, a);
    if (mod(static_cast<__int128>(b) * b - D.value(), four_a) != 0) {
        throw DomainError("b^2 != D mod 4a for ideal (" + std::to_string(a) + ", " + std::to_string(b) + ")");
    }
    Int two_a = 2 * a;
    Int nb = checked::sub(a, mod(checked::sub(a, b), two_a));
    return {q, a, nb, D.value()};
}

inline FractionalIdeal unit_ideal(const Discriminant& D) { return make_ideal(D, 1, 1, mod(D.value(), 4) == 0 ? 0 : 1); }

inline Rational ideal_norm(const FractionalIdeal& x) { return x.q * x.q * Rational(x.a); }

inline FractionalIdeal scale(const Discriminant& D, const FractionalIdeal& x, const Rational& r) {
    if (r.sign() == 0) throw DomainError("cannot scale an ideal by zero");
    Rational s = r.sign() < 0 ? -r : r;
    return make_ideal(D, x.q * s, x.a, x.b);
}

inline FractionalIdeal ideal_conjugate(const Discriminant& D, const FractionalIdeal& x) {
    return make_ideal(D, x.q, x.a, checked::neg(x.b));
}

namespace detail {

inline void require_same_field(const Discriminant& D, const FractionalIdeal& x) {
    if (x.disc != D.value()) {
        throw DiscriminantMismatch("ideal " + x.to_string() + " belongs to discriminant " + std::to_string(x.disc));
    }
}

// (u + v sqrt D)/2 products, in those half-integral coordinates.
struct Half {
    Int u, v;
};

inline Half half_mul(Int D, Half x, Half y) {
    __int128 u = static_cast<__int128>(x.u) * y.u + static_cast<__int128>(D) * x.v * y.v;
    __int128 v = static_cast<__int128>(x.u) * y.v + static_cast<__int128>(x.v) * y.u;
    return {checked::narrow(u / 2), checked::narrow(v / 2)};
}

// Extended gcd: returns g = s x + t y, g >= 0.
inline Int ext_gcd(Int x, Int y, Int& s, Int& t) {
    Int s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (y != 0) {
        Int q = floor_div(x, y);
        Int r = checked::sub(x, checked::mul(q, y));
        x = y;
        y = r;
        Int ns = checked::sub(s0, checked::mul(q, s1));
        s0 = s1;
        s1 = ns;
        Int nt = checked::sub(t0, checked::mul(q, t1));
        t0 = t1;
        t1 = nt;
    }
    if (x < 0) {
        x = -x;
        s0 = -s0;
        t0 = -t0;
    }
    s = s0;
    t = t0;
    return x;
}

}  // namespace detail

/// Product of two fractional ideals via row reduction of the four generator products.
inline FractionalIdeal ideal_mul(const Discriminant& D, const FractionalIdeal& x, const FractionalIdeal& y) {
    detail::require_same_field(D, x);
    detail::require_same_field(D, y);
    using detail::Half;
    const Int d = D.value();
    Half gx[2] = {{checked::mul(2, x.a), 0}, {x.b, 1}};
    Half gy[2] = {{checked::mul(2, y.a), 0}, {y.b, 1}};

    // Lattice basis (A, 0), (B, C) in half coordinates.
    Int A = 0, B = 0, C = 0;
    for (const auto& p : gx) {
        for (const auto& r : gy) {
            Half h = detail::half_mul(d, p, r);
            if (h.v == 0 && C == 0) {
                A = gcd(A, h.u);
                continue;
            }
            Int s, t;
            Int g = detail::ext_gcd(C, h.v, s, t);
            // leftover combination with zero second coordinate
            Int left = checked::sub(checked::mul(h.v / g, B), checked::mul(C / g, h.u));
            Int nb = checked::add(checked::mul(s, B), checked::mul(t, h.u));
            A = gcd(A, left);
            B = nb;
            C = g;
            if (A != 0) B = mod(B, A);
        }
    }
    if (C == 0 || A == 0 || A % (2 * C) != 0 || B % C != 0) {
        throw Error("ideal_mul: product module is not an ideal in normal form");
    }
    return make_ideal(D, x.q * y.q * Rational(C), A / (2 * C), B / C);
}

inline FractionalIdeal ideal_inverse(const Discriminant& D, const FractionalIdeal& x) {
    detail::require_same_field(D, x);
    // conjugate / norm = (1/(q a)) (a Z + ((-b + sqrt D)/2) Z)
    return make_ideal(D, Rational(1) / (x.q * Rational(x.a)), x.a, checked::neg(x.b));
}

inline FractionalIdeal ideal_pow(const Discriminant& D, const FractionalIdeal& x, Int n) {
    FractionalIdeal base = n < 0 ? ideal_inverse(D, x) : x;
    Int e = n < 0 ? checked::neg(n) : n;
    FractionalIdeal r = unit_ideal(D);
    while (e > 0) {
        if (e & 1) r = ideal_mul(D, r, base);
        e >>= 1;
        if (e > 0) base = ideal_mul(D, base, base);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Prime splitting

struct SplittingType {
    enum class Kind { Split, Inert, Ramified };
    Kind kind;
    /// Split: the two primes above p (b > 0 first); Ramified: the single prime; Inert: empty.
    std::vector<FractionalIdeal> primes;
};

inline const char* to_string(SplittingType::Kind k) {
    switch (k) {
        case SplittingType::Kind::Split: return "split";
        case SplittingType::Kind::Inert: return "inert";
        case SplittingType::Kind::Ramified: return "ramified";
    }
    return "?";
}

inline SplittingType splitting_type(const Discriminant& D, Int p) {
    if (!is_prime(p)) throw DomainError("splitting_type: " + std::to_string(p) + " is not prime");
    const Int d = D.value();
    int k = kronecker(d, p);
    if (k == -1) return {SplittingType::Kind::Inert, {}};

    // b with b^2 = D (mod 4p), 0 <= b <= p
    Int b = -1;
    if (p == 2) {
        for (Int cand = 0; cand <= 2; ++cand) {
            if (mod(cand * cand - d, 8) == 0) {
                b = cand;
                break;
            }
        }
    } else {
        Int r = *sqrt_mod(d, p);
        b = (mod(r - d, 2) == 0) ? r : p - r;
    }
    if (k == 0) return {SplittingType::Kind::Ramified, {make_ideal(D, 1, p, b)}};
    FractionalIdeal p1 = make_ideal(D, 1, p, b);
    if (p1.b < 0) p1 = ideal_conjugate(D, p1);
    return {SplittingType::Kind::Split, {p1, ideal_conjugate(D, p1)}};
}

// ---------------------------------------------------------------------------
// Fundamental unit

struct FundamentalUnit {
    QuadElement unit;  ///< as a + b delta
    int norm_sign;
    BigInt x;  ///< unit = (x + y sqrt D)/2
    BigInt y;
};

/// Smallest unit > 1 of O_K, read off the purely periodic continued fraction
/// of the reduced number (b0 + sqrt D)/2 with b0 the largest integer < sqrt D, b0 = D mod 2.
inline FundamentalUnit fundamental_unit(const Discriminant& D) {
    if (!D.is_real()) throw DomainError("fundamental_unit requires D > 0");
    const Int d = D.value();
    const Int s = isqrt(d);
    const Int b0 = (mod(s - d, 2) == 0) ? s : s - 1;

    Int P = b0, Q = 2;
    BigInt q_prev2 = 1, q_prev1 = 0;  // q_{-2}, q_{-1}
    std::size_t length = 0;
    do {
        Int a = (P + s) / Q;
        BigInt q = a * q_prev1 + q_prev2;
        q_prev2 = q_prev1;
        q_prev1 = q;
        P = checked::sub(checked::mul(a, Q), P);
        Q = checked::sub(d, checked::mul(P, P)) / Q;
        ++length;
    } while (P != b0 || Q != 2);

    // unit = q_{l-1} w + q_{l-2}, w = (b0 + sqrt D)/2
    BigInt x = q_prev1 * b0 + 2 * q_prev2;
    BigInt y = q_prev1;
    int sign = (length % 2 == 0) ? 1 : -1;
    QuadElement u{BigRational((x - BigInt(d) * y) / 2), BigRational(y)};
    return {u, sign, x, y};
}

// ---------------------------------------------------------------------------
// Ideals and forms

/// q_a(x, y) = N(q a x + q (b + sqrt D)/2 y) / N(a) = a x^2 + b x y + (b^2 - D)/(4a) y^2.
inline Form ideal_to_form(const FractionalIdeal& x) {
    __int128 c = (static_cast<__int128>(x.b) * x.b - x.disc) / (4 * static_cast<__int128>(x.a));
    Form f{x.a, x.b, checked::narrow(c)};
    if (!is_primitive(f)) throw ImprimitiveForm("ideal " + x.to_string() + " produced an imprimitive form");
    return f;
}

/// A fractional ideal with an orientation sign s = +-1.
struct OrientedIdeal {
    FractionalIdeal ideal;
    int sign = 1;

    friend bool operator==(const OrientedIdeal&, const OrientedIdeal&) = default;
};

/// (I, -1) stands for the narrow class of sqrt(D) I, whose form is -q_I(x, -y).
inline OrientedIdeal form_to_ideal(const Discriminant& D, const Form& f) {
    if (f.discriminant() != D.value()) {
        throw DiscriminantMismatch("form " + f.to_string() + " does not have discriminant " + std::to_string(D.value()));
    }
    if (!is_primitive(f)) throw ImprimitiveForm("form " + f.to_string() + " is not primitive");
    if (f.a > 0) return {make_ideal(D, 1, f.a, f.b), 1};
    if (f.a < 0) return {make_ideal(D, 1, checked::neg(f.a), f.b), -1};
    // a == 0 forces D to be a square
    throw DomainError("form " + f.to_string() + " has zero leading coefficient");
}

inline Form oriented_form(const OrientedIdeal& x) {
    Form f = ideal_to_form(x.ideal);
    return x.sign > 0 ? f : Form{checked::neg(f.a), f.b, checked::neg(f.c)};
}

inline bool is_narrowly_principal(const FractionalIdeal& x) {
    return is_equivalent(ideal_to_form(x), principal_form(x.disc));
}

}  // namespace pellsha
