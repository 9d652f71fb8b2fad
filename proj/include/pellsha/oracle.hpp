#pragma once

/**
 * @file oracle.hpp
 * @brief Brute-force verifiers, independent of the reduction, composition and
 * Hensel machinery they are used to check. Exponential cost; desk scale only.
 */

#include <set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pellsha/arith.hpp"
#include "pellsha/form.hpp"
#include "pellsha/qfield.hpp"

namespace pellsha::oracle {

/// Whether some [[p, q], [r, s]] with ps - qr = 1 and entries in [-height, height] carries f to g.
inline bool brute_equivalent(const Form& f, const Form& g, Int height) {
    if (f.discriminant() != g.discriminant()) throw DiscriminantMismatch("brute_equivalent: discriminants differ");
    for (Int p = -height; p <= height; ++p) {
        for (Int r = -height; r <= height; ++r) {
            if (f(p, r) != g.a) continue;
            for (Int q = -height; q <= height; ++q) {
                for (Int s = -height; s <= height; ++s) {
                    if (p * s - q * r != 1) continue;
                    if (f(q, s) != g.c) continue;
                    Int b = 2 * f.a * p * q + f.b * (p * s + q * r) + 2 * f.c * r * s;
                    if (b == g.b) return true;
                }
            }
        }
    }
    return false;
}

namespace detail {

using Wide = boost::multiprecision::int256_t;

inline Wide eval_mod(const Form& f, const Wide& x, const Wide& y, const Wide& m) {
    Wide v = (Wide(f.a) * x * x + Wide(f.b) * x * y + Wide(f.c) * y * y) % m;
    return v < 0 ? v + m : v;
}

// Depth-first search through solutions modulo p, p^2, ..., p^k.
inline bool dfs_local(const Form& f, const Wide& target_n, Int p, int level, int k, const Wide& x, const Wide& y,
                      const Wide& pj) {
    if (level == k) return true;
    Wide next = pj * p;
    Wide n = target_n % next;
    if (n < 0) n += next;
    for (Int s = 0; s < p; ++s) {
        for (Int t = 0; t < p; ++t) {
            Wide X = x + pj * s, Y = y + pj * t;
            if (eval_mod(f, X, Y, next) != n) continue;
            if (dfs_local(f, target_n, p, level + 1, k, X, Y, next)) return true;
        }
    }
    return false;
}

}  // namespace detail

/// Whether f(x, y) = n (mod p^k) has any solution: raw congruence search, no Hensel filter.
inline bool brute_local(const Form& f, Int n, Int p, int k) {
    if (k < 1) throw DomainError("brute_local: k must be positive");
    if (!is_prime(p)) throw DomainError("brute_local: p must be prime");
    using detail::Wide;
    Wide pk = 1;
    for (int i = 0; i < k; ++i) pk *= p;
    if (pk * pk <= 1 << 20) {
        // small modulus: enumerate every pair outright
        Int m = static_cast<Int>(pk);
        Int target = mod(n, m);
        for (Int x = 0; x < m; ++x) {
            for (Int y = 0; y < m; ++y) {
                if (static_cast<Int>(detail::eval_mod(f, x, y, m)) == target) return true;
            }
        }
        return false;
    }
    // every solution mod p^k reduces to one mod p^j, so walking the tree of lifts is exhaustive
    for (Int x = 0; x < p; ++x) {
        for (Int y = 0; y < p; ++y) {
            if (detail::eval_mod(f, x, y, p) != Wide(mod(n, p))) continue;
            if (detail::dfs_local(f, Wide(n), p, 1, k, x, y, Wide(p))) return true;
        }
    }
    return false;
}

/// Counts form classes from the reduced-form windows, without composition.
/// D < 0: positive definite reduced forms. D > 0: cycles of reduced forms under
/// the neighbour map (a, b, c) -> (c, b', a') with b + b' = 0 mod 2c and
/// sqrt D - 2|c| < b' < sqrt D.
inline Int naive_class_count(Int D) {
    if (D < 0) {
        Int count = 0;
        for (Int a = 1; 3 * a * a <= -D; ++a) {
            for (Int b = -a; b <= a; ++b) {
                if ((b * b - D) % (4 * a) != 0) continue;
                Int c = (b * b - D) / (4 * a);
                if (c < a) continue;
                if (b < 0 && (b == -a || c == a)) continue;
                if (std::gcd(std::gcd(a, std::abs(b)), c) != 1) continue;
                ++count;
            }
        }
        return count;
    }
    // sqrt D lies strictly between r and r + 1
    Int r = 0;
    while ((r + 1) * (r + 1) <= D) ++r;
    auto reduced = [&](Int a, Int b) {
        Int aa = std::abs(a);
        return b > 0 && b <= r && 2 * aa + b > r && 2 * aa - b <= r;
    };
    std::set<std::tuple<Int, Int, Int>> forms;
    for (Int a = -D; a <= D; ++a) {
        if (a == 0) continue;
        for (Int b = 1; b <= r; ++b) {
            if ((b * b - D) % (4 * a) != 0) continue;
            Int c = (b * b - D) / (4 * a);
            if (!reduced(a, b)) continue;
            if (std::gcd(std::gcd(std::abs(a), b), std::abs(c)) != 1) continue;
            forms.insert({a, b, c});
        }
    }
    std::set<std::tuple<Int, Int, Int>> seen;
    Int cycles = 0;
    for (const auto& start : forms) {
        if (seen.count(start)) continue;
        ++cycles;
        auto cur = start;
        do {
            seen.insert(cur);
            auto [a, b, c] = cur;
            Int two_c = 2 * std::abs(c);
            // largest b' <= r with b' = -b (mod 2|c|)
            Int nb = r - (((r + b) % two_c) + two_c) % two_c;
            cur = {c, nb, (nb * nb - D) / (4 * c)};
        } while (cur != start);
    }
    return cycles;
}

/// The module a (x) Z/n over O_K (x) Z/n, in coordinates of the basis (alpha, beta).
struct FiniteRingModule {
    Int n;
    /// delta acting on the basis: delta alpha = d00 alpha + d10 beta, delta beta = d01 alpha + d11 beta.
    Int d00, d01, d10, d11;
};

inline FiniteRingModule finite_ring_module(const FractionalIdeal& x, Int n) {
    const Int D = x.disc;
    Int d00 = mod((D - x.b) / 2, n);
    Int d10 = mod(x.a, n);
    Int d01 = mod(static_cast<Int>((static_cast<__int128>(D) - static_cast<__int128>(x.b) * x.b) / (4 * x.a)), n);
    Int d11 = mod((D + x.b) / 2, n);
    return {n, d00, d01, d10, d11};
}

/// Whether a single element generates a (x) Z/n over O_K (x) Z/n, by enumerating each
/// candidate generator's full orbit {m (x' + y' delta)}.
inline bool cyclic_module_test(const FractionalIdeal& x, Int n) {
    if (n < 2) throw DomainError("cyclic_module_test: modulus must be at least 2");
    if (n > 60) throw ModulusTooLarge("cyclic_module_test: modulus " + std::to_string(n) + " exceeds 60");
    FiniteRingModule M = finite_ring_module(x, n);
    std::vector<char> hit(static_cast<std::size_t>(n * n));
    for (Int mx = 0; mx < n; ++mx) {
        for (Int my = 0; my < n; ++my) {
            // delta * m
            Int dx = (M.d00 * mx + M.d01 * my) % n;
            Int dy = (M.d10 * mx + M.d11 * my) % n;
            std::fill(hit.begin(), hit.end(), 0);
            Int count = 0;
            for (Int s = 0; s < n && count < n * n; ++s) {
                for (Int t = 0; t < n; ++t) {
                    Int ox = (s * mx + t * dx) % n;
                    Int oy = (s * my + t * dy) % n;
                    char& h = hit[static_cast<std::size_t>(ox * n + oy)];
                    if (!h) {
                        h = 1;
                        ++count;
                    }
                }
            }
            if (count == n * n) return true;
        }
    }
    return false;
}

/// Whether f takes some unit value on (Z/n)^2.
inline bool unit_representable(const Form& f, Int n) {
    for (Int x = 0; x < n; ++x) {
        for (Int y = 0; y < n; ++y) {
            if (std::gcd(mod(f(x, y), n), n) == 1) return true;
        }
    }
    return false;
}

}  // namespace pellsha::oracle
