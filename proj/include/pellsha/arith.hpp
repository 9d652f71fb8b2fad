#pragma once

/**
 * @file arith.hpp
 * @brief Exact integer and p-adic primitives.
 *
 * Everything here is exact. Small quantities (form coefficients, ideal
 * bases, moduli) live in 64-bit integers whose arithmetic is checked and
 * raises OverflowError instead of wrapping. Quantities that grow with the
 * regulator (convergents, units, conic points) use BigInt.
 */

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pellsha/error.hpp"

namespace pellsha {

using Int = std::int64_t;
using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

namespace checked {

inline Int add(Int a, Int b) {
    Int r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("64-bit overflow in addition");
    return r;
}

inline Int sub(Int a, Int b) {
    Int r;
    if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("64-bit overflow in subtraction");
    return r;
}

inline Int mul(Int a, Int b) {
    Int r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("64-bit overflow in multiplication");
    return r;
}

inline Int neg(Int a) { return sub(0, a); }

inline Int abs(Int a) { return a < 0 ? neg(a) : a; }

inline Int narrow(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw OverflowError("value does not fit in 64 bits");
    return static_cast<Int>(v);
}

}  // namespace checked

/// Floor division; b must be nonzero.
inline Int floor_div(Int a, Int b) {
    Int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

/// Least nonnegative residue of a modulo m > 0.
inline Int mod(Int a, Int m) {
    Int r = a % m;
    return r < 0 ? r + m : r;
}

inline Int mod(__int128 a, Int m) {
    __int128 r = a % m;
    return static_cast<Int>(r < 0 ? r + m : r);
}

inline Int gcd(Int a, Int b) { return std::gcd(checked::abs(a), checked::abs(b)); }

inline Int mulmod(Int a, Int b, Int m) {
    return mod(static_cast<__int128>(a) * b, m);
}

inline Int powmod(Int base, std::uint64_t e, Int m) {
    Int result = 1 % m;
    base = mod(base, m);
    while (e > 0) {
        if (e & 1u) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        e >>= 1u;
    }
    return result;
}

/// Checked integer power.
inline Int ipow(Int base, unsigned e) {
    Int r = 1;
    for (unsigned i = 0; i < e; ++i) r = checked::mul(r, base);
    return r;
}

/// floor(sqrt(n)) for n >= 0, by integer Newton iteration.
inline Int isqrt(Int n) {
    if (n < 0) throw DomainError("isqrt of a negative number");
    if (n < 2) return n;
    auto un = static_cast<std::uint64_t>(n);
    int bits = 64 - __builtin_clzll(un);
    std::uint64_t x = std::uint64_t{1} << ((bits + 1) / 2);
    while (true) {
        std::uint64_t y = (x + un / x) / 2;
        if (y >= x) break;
        x = y;
    }
    return static_cast<Int>(x);
}

inline bool is_square(Int n) {
    if (n < 0) return false;
    Int r = isqrt(n);
    return r * r == n;
}

inline bool is_squarefree(Int n);

// ---------------------------------------------------------------------------
// Primality and factorization

/// Deterministic Miller-Rabin for all 64-bit inputs.
inline bool is_prime(Int n) {
    if (n < 2) return false;
    static constexpr Int small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (Int p : small) {
        if (n % p == 0) return n == p;
    }
    Int d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (Int a : small) {
        Int x = powmod(a, static_cast<std::uint64_t>(d), n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (unsigned r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

struct PrimePower {
    Int p;
    int e;

    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

namespace detail {

// Brent's variant of Pollard rho; n is an odd composite.
inline Int pollard_brent(Int n, std::mt19937_64& rng) {
    std::uniform_int_distribution<Int> dist(1, n - 1);
    while (true) {
        Int y = dist(rng), c = dist(rng), m = 128;
        Int g = 1, r = 1, q = 1, x = 0, ys = 0;
        auto f = [&](Int v) { return mod(static_cast<__int128>(v) * v + c, n); };
        while (g == 1) {
            x = y;
            for (Int i = 0; i < r; ++i) y = f(y);
            Int k = 0;
            while (k < r && g == 1) {
                ys = y;
                for (Int i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += m;
            }
            r *= 2;
        }
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

inline void factor_into(Int n, std::map<Int, int>& out, std::mt19937_64& rng) {
    if (n == 1) return;
    if (is_prime(n)) {
        ++out[n];
        return;
    }
    Int d = pollard_brent(n, rng);
    factor_into(d, out, rng);
    factor_into(n / d, out, rng);
}

}  // namespace detail

/// Prime factorization of |n| with strictly increasing primes.
inline std::vector<PrimePower> factorize(Int n) {
    if (n == 0) throw DomainError("factorize: zero has no factorization");
    Int m = checked::abs(n);
    std::map<Int, int> found;
    for (Int p = 2; p <= 10000 && p * p <= m; p += (p == 2 ? 1 : 2)) {
        while (m % p == 0) {
            ++found[p];
            m /= p;
        }
    }
    if (m > 1) {
        std::mt19937_64 rng(0x5eed);
        detail::factor_into(m, found, rng);
    }
    std::vector<PrimePower> out;
    out.reserve(found.size());
    for (auto [p, e] : found) out.push_back({p, e});
    return out;
}

inline std::vector<Int> prime_divisors(Int n) {
    std::vector<Int> out;
    for (const auto& pp : factorize(n)) out.push_back(pp.p);
    return out;
}

inline bool is_squarefree(Int n) {
    for (const auto& pp : factorize(n)) {
        if (pp.e > 1) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Quadratic symbols and square roots

/// Kronecker symbol (a|n), extending the Jacobi symbol to all n.
inline int kronecker(Int a, Int n) {
    static constexpr int tab2[8] = {0, 1, 0, -1, 0, -1, 0, 1};
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    if ((a & 1) == 0 && (n & 1) == 0) return 0;
    int v = 0;
    while ((n & 1) == 0) {
        n /= 2;
        ++v;
    }
    int k = (v % 2 == 0) ? 1 : tab2[a & 7];
    if (n < 0) {
        n = -n;
        if (a < 0) k = -k;
    }
    // n is odd and positive from here on
    a = mod(a, n);
    while (a != 0) {
        v = 0;
        while ((a & 1) == 0) {
            a /= 2;
            ++v;
        }
        if (v % 2 == 1) k *= tab2[n & 7];
        if (a & n & 2) k = -k;
        Int r = a;
        a = n % r;
        n = r;
    }
    return n == 1 ? k : 0;
}

/// Square root of a modulo an odd prime p, normalized to 0 <= r <= (p-1)/2.
inline std::optional<Int> sqrt_mod(Int a, Int p) {
    if (p <= 2 || !is_prime(p)) throw DomainError("sqrt_mod: modulus must be an odd prime");
    a = mod(a, p);
    if (a == 0) return Int{0};
    if (kronecker(a, p) != 1) return std::nullopt;
    Int r;
    if (p % 4 == 3) {
        r = powmod(a, static_cast<std::uint64_t>((p + 1) / 4), p);
    } else {
        // Tonelli-Shanks
        Int q = p - 1;
        int s = 0;
        while ((q & 1) == 0) {
            q >>= 1;
            ++s;
        }
        Int z = 2;
        while (kronecker(z, p) != -1) ++z;
        Int c = powmod(z, static_cast<std::uint64_t>(q), p);
        r = powmod(a, static_cast<std::uint64_t>((q + 1) / 2), p);
        Int t = powmod(a, static_cast<std::uint64_t>(q), p);
        int m = s;
        while (t != 1) {
            int i = 0;
            Int tt = t;
            while (tt != 1) {
                tt = mulmod(tt, tt, p);
                ++i;
            }
            Int b = c;
            for (int j = 0; j < m - i - 1; ++j) b = mulmod(b, b, p);
            r = mulmod(r, b, p);
            c = mulmod(b, b, p);
            t = mulmod(t, c, p);
            m = i;
        }
    }
    return std::min(r, p - r);
}

// ---------------------------------------------------------------------------
// Rationals with checked 64-bit parts

class Rational {
public:
    Rational() = default;
    Rational(Int n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)
    Rational(Int n, Int d) : num_(n), den_(d) {
        if (d == 0) throw DomainError("rational with zero denominator");
        normalize();
    }

    Int num() const { return num_; }
    Int den() const { return den_; }
    bool is_integer() const { return den_ == 1; }
    int sign() const { return (num_ > 0) - (num_ < 0); }

    friend Rational operator+(const Rational& x, const Rational& y) {
        Int g = gcd(x.den_, y.den_);
        Int n = checked::add(checked::mul(x.num_, y.den_ / g), checked::mul(y.num_, x.den_ / g));
        return {n, checked::mul(x.den_, y.den_ / g)};
    }
    friend Rational operator-(const Rational& x) { return {checked::neg(x.num_), x.den_}; }
    friend Rational operator-(const Rational& x, const Rational& y) { return x + (-y); }
    friend Rational operator*(const Rational& x, const Rational& y) {
        Int g1 = gcd(x.num_, y.den_), g2 = gcd(y.num_, x.den_);
        if (g1 == 0) g1 = 1;
        if (g2 == 0) g2 = 1;
        return {checked::mul(x.num_ / g1, y.num_ / g2), checked::mul(x.den_ / g2, y.den_ / g1)};
    }
    friend Rational operator/(const Rational& x, const Rational& y) {
        if (y.num_ == 0) throw DomainError("rational division by zero");
        return x * Rational(y.den_, y.num_);
    }
    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& x, const Rational& y) {
        __int128 l = static_cast<__int128>(x.num_) * y.den_;
        __int128 r = static_cast<__int128>(y.num_) * x.den_;
        return l <=> r;
    }

    std::string to_string() const {
        return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
    }

private:
    void normalize() {
        if (den_ < 0) {
            num_ = checked::neg(num_);
            den_ = checked::neg(den_);
        }
        Int g = gcd(num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    Int num_ = 0;
    Int den_ = 1;
};

/// p-adic valuation of a nonzero integer.
inline int valuation(Int n, Int p) {
    if (n == 0) throw DomainError("valuation of zero");
    if (p < 2) throw DomainError("valuation: p must be prime");
    int v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

/// p-adic valuation of a nonzero rational.
inline int valuation(const Rational& x, Int p) {
    if (x.num() == 0) throw DomainError("valuation of zero");
    if (!is_prime(p)) throw DomainError("valuation: p must be prime");
    return valuation(x.num(), p) - valuation(x.den(), p);
}

// ---------------------------------------------------------------------------
// Places and Hilbert symbols

/// A place of Q: a finite prime or the real place.
class LocalPlace {
public:
    static LocalPlace real() { return LocalPlace(0); }
    static LocalPlace finite(Int p) {
        if (!is_prime(p)) throw DomainError("LocalPlace: " + std::to_string(p) + " is not prime");
        return LocalPlace(p);
    }

    bool is_real() const { return p_ == 0; }
    Int prime() const { return p_; }
    std::string to_string() const { return is_real() ? "inf" : std::to_string(p_); }

    friend bool operator==(const LocalPlace&, const LocalPlace&) = default;

private:
    explicit LocalPlace(Int p) : p_(p) {}
    Int p_;
};

/// Hilbert symbol (a,b)_v: +1 iff z^2 = a x^2 + b y^2 has a nontrivial solution in Q_v.
inline int hilbert_symbol(const Rational& a, const Rational& b, const LocalPlace& v) {
    if (a.num() == 0 || b.num() == 0) throw DomainError("hilbert_symbol: arguments must be nonzero");
    if (v.is_real()) return (a.sign() < 0 && b.sign() < 0) ? -1 : 1;

    // n/d and n*d share a square class
    const Int p = v.prime();
    Int x = checked::mul(a.num(), a.den());
    Int y = checked::mul(b.num(), b.den());
    int alpha = 0, beta = 0;
    while (x % p == 0) {
        x /= p;
        ++alpha;
    }
    while (y % p == 0) {
        y /= p;
        ++beta;
    }
    if (p == 2) {
        auto eps = [](Int u) { return mod(u, 4) == 3 ? 1 : 0; };
        auto omega = [](Int u) {
            Int r = mod(u, 8);
            return (r == 3 || r == 5) ? 1 : 0;
        };
        int e = eps(x) * eps(y) + alpha * omega(y) + beta * omega(x);
        return e % 2 == 0 ? 1 : -1;
    }
    int s = ((alpha % 2 == 1) && (beta % 2 == 1) && (p % 4 == 3)) ? -1 : 1;
    if (beta % 2 == 1) s *= kronecker(x, p);
    if (alpha % 2 == 1) s *= kronecker(y, p);
    return s;
}

// ---------------------------------------------------------------------------
// Continued fractions

/// Continued fraction of sqrt(d): [a0; period...] with the period minimal.
struct CFExpansion {
    Int d = 0;
    Int a0 = 0;
    std::vector<Int> period;
};

inline CFExpansion cf_sqrt(Int d) {
    if (d <= 1) throw DomainError("cf_sqrt: argument must exceed 1");
    if (is_square(d)) throw PerfectSquare("cf_sqrt: " + std::to_string(d) + " is a perfect square");
    CFExpansion cf{d, isqrt(d), {}};
    Int m = 0, q = 1, a = cf.a0;
    do {
        m = checked::sub(checked::mul(a, q), m);
        q = checked::sub(d, checked::mul(m, m)) / q;
        a = (cf.a0 + m) / q;
        cf.period.push_back(a);
    } while (a != 2 * cf.a0);
    return cf;
}

/// Convergents p_k/q_k of [a0; period, period, ...] for k = 0 .. count-1.
inline std::vector<std::pair<BigInt, BigInt>> convergents(const CFExpansion& cf, std::size_t count) {
    std::vector<std::pair<BigInt, BigInt>> out;
    BigInt p_prev = 1, p = cf.a0, q_prev = 0, q = 1;
    for (std::size_t k = 0; k < count; ++k) {
        out.emplace_back(p, q);
        Int a = cf.period[k % cf.period.size()];
        BigInt p_next = a * p + p_prev, q_next = a * q + q_prev;
        p_prev = p;
        p = p_next;
        q_prev = q;
        q = q_next;
    }
    return out;
}

/// Convergent at the end of the first period; solves u^2 - d w^2 = (-1)^period.
inline std::pair<BigInt, BigInt> pell_convergent(const CFExpansion& cf) {
    return convergents(cf, cf.period.size()).back();
}

}  // namespace pellsha
