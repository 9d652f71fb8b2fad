#pragma once

/**
 * @file form.hpp
 * @brief Binary quadratic forms: the SL2(Z) action, reduction and cycles.
 *
 * A form (a, b, c) stands for a x^2 + b x y + c y^2. Definite forms reduce
 * to the unique representative |b| <= a <= c (b >= 0 on the boundary);
 * indefinite forms reduce into a finite cycle of reduced forms, and two
 * forms are properly equivalent iff their cycles coincide.
 */

#include <compare>
#include <string>
#include <tuple>
#include <vector>

#include "pellsha/arith.hpp"

namespace pellsha {

struct Form {
    Int a = 0;
    Int b = 0;
    Int c = 0;

    Int discriminant() const {
        return checked::sub(checked::mul(b, b), checked::mul(4, checked::mul(a, c)));
    }

    Int operator()(Int x, Int y) const {
        return checked::add(checked::add(checked::mul(a, checked::mul(x, x)), checked::mul(b, checked::mul(x, y))),
                            checked::mul(c, checked::mul(y, y)));
    }

    Form negated() const { return {checked::neg(a), checked::neg(b), checked::neg(c)}; }

    /// (a, -b, c): the inverse class under composition.
    Form opposite() const { return {a, checked::neg(b), c}; }

    std::string to_string() const {
        return std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c);
    }

    friend bool operator==(const Form&, const Form&) = default;
    friend auto operator<=>(const Form&, const Form&) = default;
};

/// Integer 2x2 matrix [[p, q], [r, s]].
struct Matrix2 {
    Int p = 1, q = 0, r = 0, s = 1;

    static Matrix2 identity() { return {}; }
    Int det() const { return checked::sub(checked::mul(p, s), checked::mul(q, r)); }

    friend Matrix2 operator*(const Matrix2& x, const Matrix2& y) {
        using checked::add, checked::mul;
        return {add(mul(x.p, y.p), mul(x.q, y.r)), add(mul(x.p, y.q), mul(x.q, y.s)),
                add(mul(x.r, y.p), mul(x.s, y.r)), add(mul(x.r, y.q), mul(x.s, y.s))};
    }
    friend bool operator==(const Matrix2&, const Matrix2&) = default;
};

/// The form (x, y) -> f(p x + q y, r x + s y).
inline Form act(const Form& f, const Matrix2& m) {
    using checked::add, checked::mul;
    Int a = f(m.p, m.r);
    Int c = f(m.q, m.s);
    Int b = add(add(mul(mul(2, f.a), mul(m.p, m.q)), mul(f.b, add(mul(m.p, m.s), mul(m.q, m.r)))),
                mul(mul(2, f.c), mul(m.r, m.s)));
    return {a, b, c};
}

inline bool is_primitive(const Form& f) { return gcd(gcd(f.a, f.b), f.c) == 1; }

/// The reduced form of discriminant D representing 1 at (1, 0).
inline Form principal_form(Int D) {
    if (mod(D, 4) == 0) return {1, 0, checked::neg(D / 4)};
    return {1, 1, (1 - D) / 4};
}

namespace detail {

inline void require_nonsquare(Int D) {
    if (D == 0 || is_square(D)) {
        throw DomainError("form discriminant " + std::to_string(D) + " is a perfect square");
    }
}

// Reduction of a positive definite form.
inline std::pair<Form, Matrix2> reduce_definite(Form f) {
    Matrix2 m;
    while (true) {
        Int k = floor_div(checked::sub(f.a, f.b), checked::mul(2, f.a));
        if (k != 0) {
            Matrix2 t{1, k, 0, 1};
            f = act(f, t);
            m = m * t;
        }
        if (f.a > f.c || (f.a == f.c && f.b < 0)) {
            Matrix2 s{0, -1, 1, 0};
            f = act(f, s);
            m = m * s;
            continue;
        }
        return {f, m};
    }
}

// The r = b' solving b' = -b (mod 2|c|) used by the indefinite step.
inline Int rho_normalize(Int minus_b, Int c, Int sqrt_floor) {
    Int two_c = checked::mul(2, checked::abs(c));
    if (checked::abs(c) <= sqrt_floor) {
        // largest r <= floor(sqrt D) in the residue class; then sqrt D - 2|c| < r < sqrt D
        return checked::sub(sqrt_floor, mod(checked::sub(sqrt_floor, minus_b), two_c));
    }
    // -|c| < r <= |c|
    Int half = checked::abs(c);
    return checked::sub(half, mod(checked::sub(half, minus_b), two_c));
}

}  // namespace detail

/// Whether an indefinite form is reduced: |sqrt D - 2|a|| < b < sqrt D.
inline bool is_reduced_indefinite(const Form& f, Int sqrt_floor) {
    if (f.b <= 0 || f.b > sqrt_floor) return false;
    Int two_a = checked::mul(2, checked::abs(f.a));
    return checked::add(two_a, f.b) > sqrt_floor && checked::sub(two_a, f.b) <= sqrt_floor;
}

inline bool is_reduced(const Form& f) {
    Int D = f.discriminant();
    if (D < 0) {
        Int a = f.a < 0 ? -f.a : f.a, b = f.a < 0 ? -f.b : f.b, c = f.a < 0 ? -f.c : f.c;
        return std::abs(b) <= a && a <= c && !((std::abs(b) == a || a == c) && b < 0);
    }
    return is_reduced_indefinite(f, isqrt(D));
}

/// One step of the indefinite reduction operator: (a,b,c) -> (c, b', (b'^2 - D)/4c).
/// Returns the new form together with the SL2(Z) matrix [[0,-1],[1,t]] realizing it.
inline std::pair<Form, Matrix2> rho(const Form& f, Int D, Int sqrt_floor) {
    Int nb = detail::rho_normalize(checked::neg(f.b), f.c, sqrt_floor);
    Int t = checked::add(nb, f.b) / checked::mul(2, f.c);
    Form g{f.c, nb, checked::sub(checked::mul(nb, nb), D) / checked::mul(4, f.c)};
    return {g, Matrix2{0, -1, 1, t}};
}

struct Reduction {
    Form form;
    Matrix2 transform;  ///< form == act(input, transform), det = +1
};

inline Reduction reduce(const Form& f) {
    Int D = f.discriminant();
    detail::require_nonsquare(D);
    if (D < 0) {
        if (f.a > 0) {
            auto [g, m] = detail::reduce_definite(f);
            return {g, m};
        }
        auto [g, m] = detail::reduce_definite(f.negated());
        return {g.negated(), m};
    }
    Int s = isqrt(D);
    Form g = f;
    Matrix2 m;
    while (!is_reduced_indefinite(g, s)) {
        auto [h, step] = rho(g, D, s);
        g = h;
        m = m * step;
    }
    return {g, m};
}

/// The full cycle of reduced forms equivalent to f (D > 0), starting at reduce(f).
inline std::vector<Form> reduction_cycle(const Form& f) {
    Int D = f.discriminant();
    if (D <= 0) throw DomainError("reduction_cycle requires a positive discriminant");
    Int s = isqrt(D);
    Form start = reduce(f).form;
    std::vector<Form> cycle{start};
    Form g = rho(start, D, s).first;
    while (g != start) {
        cycle.push_back(g);
        g = rho(g, D, s).first;
    }
    return cycle;
}

/// Canonical member of the proper-equivalence class: the reduced form for D < 0,
/// the lexicographically least member of the reduction cycle for D > 0.
inline Form canonical_form(const Form& f) {
    if (f.discriminant() < 0) return reduce(f).form;
    auto cycle = reduction_cycle(f);
    return *std::min_element(cycle.begin(), cycle.end());
}

/// Proper (SL2(Z)) equivalence.
inline bool is_equivalent(const Form& f, const Form& g) {
    Int D = f.discriminant();
    if (D != g.discriminant()) {
        throw DiscriminantMismatch("forms " + f.to_string() + " and " + g.to_string() +
                                   " have different discriminants");
    }
    if (D < 0) return reduce(f).form == reduce(g).form;
    auto cycle = reduction_cycle(f);
    Form rg = reduce(g).form;
    return std::find(cycle.begin(), cycle.end(), rg) != cycle.end();
}

}  // namespace pellsha
