#pragma once

/**
 * @file conic.hpp
 * @brief The Pell conic x^2 - D y^2 = 4 as a group over a commutative ring.
 *
 *   (a, b) + (c, d) = ((a c + D b d)/2, (a d + b c)/2),   identity (2, 0).
 *
 * Halving is exact division in the ambient ring and raises HalvingFailure
 * when it is not possible (e.g. Z/n with n even). The norm-one group
 * N1 : u^2 + D u v + (D^2 - D)/4 v^2 = 1 carries the same group with a
 * polynomial law, and (x, y) -> ((x - D y)/2, y) identifies the two.
 */

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "pellsha/arith.hpp"
#include "pellsha/qfield.hpp"

namespace pellsha {

/// Residue class modulo a runtime modulus n >= 1.
class ZMod {
public:
    ZMod(Int value, Int modulus) : modulus_(modulus) {
        if (modulus < 1) throw DomainError("ZMod modulus must be positive");
        value_ = mod(value, modulus);
    }

    Int value() const { return value_; }
    Int modulus() const { return modulus_; }

    friend ZMod operator+(const ZMod& x, const ZMod& y) {
        check(x, y);
        return {mod(static_cast<__int128>(x.value_) + y.value_, x.modulus_), x.modulus_};
    }
    friend ZMod operator-(const ZMod& x, const ZMod& y) {
        check(x, y);
        return {mod(static_cast<__int128>(x.value_) - y.value_, x.modulus_), x.modulus_};
    }
    friend ZMod operator-(const ZMod& x) { return {checked::neg(x.value_), x.modulus_}; }
    friend ZMod operator*(const ZMod& x, const ZMod& y) {
        check(x, y);
        return {mulmod(x.value_, y.value_, x.modulus_), x.modulus_};
    }
    friend bool operator==(const ZMod&, const ZMod&) = default;

    std::string to_string() const { return std::to_string(value_); }

private:
    static void check(const ZMod& x, const ZMod& y) {
        if (x.modulus_ != y.modulus_) throw DomainError("ZMod operands have different moduli");
    }

    Int value_;
    Int modulus_;
};

/// Ring glue: embedding of Z and exact halving.
template <class R>
struct RingTraits;

template <>
struct RingTraits<BigInt> {
    static BigInt from_int(Int v, const BigInt&) { return BigInt(v); }
    static std::optional<BigInt> half(const BigInt& x) {
        if (boost::multiprecision::bit_test(x, 0)) return std::nullopt;
        return x / 2;
    }
};

template <>
struct RingTraits<BigRational> {
    static BigRational from_int(Int v, const BigRational&) { return BigRational(v); }
    static std::optional<BigRational> half(const BigRational& x) { return x / 2; }
};

template <>
struct RingTraits<ZMod> {
    static ZMod from_int(Int v, const ZMod& ctx) { return {v, ctx.modulus()}; }
    static std::optional<ZMod> half(const ZMod& x) {
        // Halving needs 2 to be a unit; otherwise the quotient is not unique.
        if (x.modulus() % 2 == 0) return std::nullopt;
        return x * ZMod((x.modulus() + 1) / 2, x.modulus());
    }
};

template <class R>
struct ConicPoint {
    R x;
    R y;
    friend bool operator==(const ConicPoint&, const ConicPoint&) = default;
};

/// u + v delta with norm one.
template <class R>
struct NormOneElement {
    R u;
    R v;
    friend bool operator==(const NormOneElement&, const NormOneElement&) = default;
};

template <class R>
class PellConic {
public:
    using Traits = RingTraits<R>;

    /// `one` fixes the ambient ring (e.g. the modulus of ZMod).
    explicit PellConic(Int D, const R& one = R(1))
        : D_(D),
          d_(Traits::from_int(D, one)),
          norm_const_(Traits::from_int(checked::sub(checked::mul(D, D), D) / 4, one)),
          zero_(Traits::from_int(0, one)),
          one_(Traits::from_int(1, one)),
          two_(Traits::from_int(2, one)),
          four_(Traits::from_int(4, one)) {}

    Int discriminant() const { return D_; }

    bool contains(const ConicPoint<R>& P) const { return P.x * P.x - d_ * P.y * P.y == four_; }

    ConicPoint<R> identity() const { return {two_, zero_}; }

    ConicPoint<R> add(const ConicPoint<R>& P, const ConicPoint<R>& Q) const {
        require_on_curve(P);
        require_on_curve(Q);
        ConicPoint<R> S{half(P.x * Q.x + d_ * P.y * Q.y), half(P.x * Q.y + P.y * Q.x)};
        if (!contains(S)) throw Error("conic addition left the curve");
        return S;
    }

    ConicPoint<R> neg(const ConicPoint<R>& P) const {
        require_on_curve(P);
        return {P.x, zero_ - P.y};
    }

    /// k P by double-and-add; 0 P = (2, 0).
    ConicPoint<R> scalar_mul(Int k, const ConicPoint<R>& P) const {
        require_on_curve(P);
        ConicPoint<R> base = k < 0 ? neg(P) : P;
        auto e = static_cast<std::uint64_t>(k < 0 ? -(k + 1) : k) + (k < 0 ? 1u : 0u);
        ConicPoint<R> acc = identity();
        while (e > 0) {
            if (e & 1u) acc = add(acc, base);
            e >>= 1u;
            if (e > 0) base = add(base, base);
        }
        return acc;
    }

    bool norm_one_contains(const NormOneElement<R>& N) const {
        return N.u * N.u + d_ * N.u * N.v + norm_const_ * N.v * N.v == one_;
    }

    /// (x, y) -> ((x - D y)/2, y).
    NormOneElement<R> to_norm_one(const ConicPoint<R>& P) const {
        require_on_curve(P);
        NormOneElement<R> N{half(P.x - d_ * P.y), P.y};
        if (!norm_one_contains(N)) throw Error("to_norm_one produced a non-norm-one element");
        return N;
    }

    /// (u, v) -> (2 u + D v, v).
    ConicPoint<R> from_norm_one(const NormOneElement<R>& N) const {
        if (!norm_one_contains(N)) throw DomainError("element does not have norm one");
        return {two_ * N.u + d_ * N.v, N.v};
    }

    /// Product in (O_K (x) R)^x, using delta^2 = D delta - (D^2 - D)/4.
    NormOneElement<R> norm_one_mul(const NormOneElement<R>& M, const NormOneElement<R>& N) const {
        R vv = M.v * N.v;
        return {M.u * N.u - norm_const_ * vv, M.u * N.v + M.v * N.u + d_ * vv};
    }

    NormOneElement<R> norm_one_identity() const { return {one_, zero_}; }

    /// Inverse in N1 is the conjugate: u + v delta-bar = (u + D v) - v delta.
    NormOneElement<R> norm_one_inverse(const NormOneElement<R>& N) const {
        return {N.u + d_ * N.v, zero_ - N.v};
    }

private:
    R half(const R& x) const {
        auto h = Traits::half(x);
        if (!h) throw HalvingFailure("division by 2 is not exact in this ring");
        return *h;
    }

    void require_on_curve(const ConicPoint<R>& P) const {
        if (!contains(P)) throw DomainError("point is not on x^2 - D y^2 = 4");
    }

    Int D_;
    R d_;
    R norm_const_;
    R zero_, one_, two_, four_;
};

using IntegralPoint = ConicPoint<BigInt>;

/// Every integral point for D < 0, sorted.
inline std::vector<IntegralPoint> torsion_points(const Discriminant& D) {
    if (D.is_real()) throw DomainError("torsion_points requires D < 0");
    const Int d = D.value();
    std::vector<IntegralPoint> out;
    for (Int y = -2; y <= 2; ++y) {
        Int rhs = 4 + d * y * y;
        if (rhs < 0 || !is_square(rhs)) continue;
        Int x = isqrt(rhs);
        out.push_back({BigInt(x), BigInt(y)});
        if (x != 0) out.push_back({BigInt(-x), BigInt(y)});
    }
    std::sort(out.begin(), out.end(), [](const IntegralPoint& p, const IntegralPoint& q) {
        return p.x != q.x ? p.x < q.x : p.y < q.y;
    });
    return out;
}

/// The integral point with least x > 2, y > 0: the fundamental unit, or its square
/// when that unit has norm -1, written as (x + y sqrt D)/2.
inline IntegralPoint fundamental_point(const Discriminant& D) {
    if (!D.is_real()) throw DomainError("fundamental_point requires D > 0");
    FundamentalUnit fu = fundamental_unit(D);
    IntegralPoint P{fu.x, fu.y};
    if (fu.norm_sign < 0) {
        // ((x^2 + D y^2)/2 + x y sqrt D)/2
        P = {(fu.x * fu.x + BigInt(D.value()) * fu.y * fu.y) / 2, fu.x * fu.y};
    }
    return P;
}

/// A generator of the integral point group: the fundamental point for D > 0,
/// a point of maximal order among the torsion for D < 0.
inline IntegralPoint generator_point(const Discriminant& D) {
    if (D.is_real()) return fundamental_point(D);
    if (D.value() == -3) return {BigInt(1), BigInt(1)};
    if (D.value() == -4) return {BigInt(0), BigInt(1)};
    return {BigInt(-2), BigInt(0)};
}

}  // namespace pellsha
