#pragma once

/**
 * @file bqf.hpp
 * @brief Form classes, the narrow class group and representation problems.
 *
 * Composition goes through the ideal correspondence: a form f corresponds to
 * an oriented ideal (a, s) with f = s * q_a, and the product class is the
 * class of s s' q_{a a'}. For D < 0 only positive definite classes populate
 * the class group.
 */

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "pellsha/arith.hpp"
#include "pellsha/form.hpp"
#include "pellsha/qfield.hpp"

namespace pellsha {

inline Form principal_form(const Discriminant& D) { return principal_form(D.value()); }

struct FormClass {
    Form rep;  ///< canonical representative
    Discriminant disc;

    friend bool operator==(const FormClass& x, const FormClass& y) { return x.rep == y.rep && x.disc == y.disc; }
};

inline FormClass make_class(const Discriminant& D, const Form& f) {
    if (f.discriminant() != D.value()) {
        throw DiscriminantMismatch("form " + f.to_string() + " does not have discriminant " + std::to_string(D.value()));
    }
    return {canonical_form(f), D};
}

/// The (unreduced) composite form s s' q_{a a'}.
inline Form compose_forms(const Discriminant& D, const Form& f, const Form& g) {
    OrientedIdeal x = form_to_ideal(D, f);
    OrientedIdeal y = form_to_ideal(D, g);
    return oriented_form({ideal_mul(D, x.ideal, y.ideal), x.sign * y.sign});
}

inline FormClass compose(const FormClass& f, const FormClass& g) {
    if (!(f.disc == g.disc)) throw DiscriminantMismatch("compose: classes of different discriminants");
    return make_class(f.disc, compose_forms(f.disc, f.rep, g.rep));
}

/// Every reduced form of discriminant D (positive definite only when D < 0).
inline std::vector<Form> reduced_forms(const Discriminant& D) {
    const Int d = D.value();
    std::vector<Form> out;
    if (d < 0) {
        Int amax = isqrt(-d / 3);
        for (Int a = 1; a <= amax; ++a) {
            for (Int b = -a + 1; b <= a; ++b) {
                if (mod(b - d, 2) != 0) continue;
                Int num = b * b - d;
                if (num % (4 * a) != 0) continue;
                Int c = num / (4 * a);
                if (c < a || (c == a && b < 0)) continue;
                Form f{a, b, c};
                if (is_primitive(f)) out.push_back(f);
            }
        }
        return out;
    }
    Int s = isqrt(d);
    for (Int b = 1; b <= s; ++b) {
        if (mod(b - d, 2) != 0) continue;
        Int n = (d - b * b) / 4;  // a c = -n
        for (Int a = 1; a * a <= n; ++a) {
            if (n % a != 0) continue;
            for (Int absa : {a, n / a}) {
                for (Int sign : {1, -1}) {
                    Form f{sign * absa, b, -sign * (n / absa)};
                    if (is_reduced_indefinite(f, s) && is_primitive(f)) out.push_back(f);
                }
                if (a * a == n) break;
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// The narrow class group Cl+(K) realized on form classes, with its full Cayley table.
class ClassGroup {
public:
    const Discriminant& disc() const { return disc_; }
    const std::vector<FormClass>& elements() const& { return elements_; }
    std::vector<FormClass> elements() && { return std::move(elements_); }
    const FormClass& identity() const { return elements_.front(); }
    /// Invariant factors d1 | d2 | ... ; empty for the trivial group.
    const std::vector<Int>& structure() const& { return structure_; }
    std::vector<Int> structure() && { return std::move(structure_); }
    std::size_t size() const { return elements_.size(); }

    std::size_t mul(std::size_t i, std::size_t j) const { return table_[i * size() + j]; }
    std::size_t inverse(std::size_t i) const { return index_of(elements_[i].rep.opposite()); }
    std::size_t order(std::size_t i) const { return orders_[i]; }

    /// Index of the class containing f.
    std::size_t index_of(const Form& f) const {
        auto it = lookup_.find(reduce(f).form);
        if (it == lookup_.end()) throw Error("form " + f.to_string() + " is not in the class group");
        return it->second;
    }

    friend ClassGroup class_group(const Discriminant& D);

private:
    explicit ClassGroup(Discriminant D) : disc_(D) {}

    Discriminant disc_;
    std::vector<FormClass> elements_;
    std::vector<Int> structure_;
    std::vector<std::size_t> table_;
    std::vector<std::size_t> orders_;
    std::map<Form, std::size_t> lookup_;  // every reduced form -> class index
};

namespace detail {

// Invariant factors of a finite abelian group from its element orders.
inline std::vector<Int> invariant_factors(const std::vector<std::size_t>& orders) {
    const Int h = static_cast<Int>(orders.size());
    std::vector<Int> factors;  // built largest first
    for (const auto& [p, e] : factorize(h)) {
        // r_k = #{cyclic p-parts with exponent >= k} from |G[p^k]| = p^(sum min(k, e_i))
        int prev_log = 0;
        std::vector<int> r;
        for (int k = 1; k <= e; ++k) {
            Int pk = ipow(p, static_cast<unsigned>(k));
            Int count = 0;
            for (auto o : orders) {
                if (pk % static_cast<Int>(o) == 0) ++count;
            }
            int lg = 0;
            while (count > 1) {
                count /= p;
                ++lg;
            }
            r.push_back(lg - prev_log);
            prev_log = lg;
        }
        // exponents, largest first: the i-th largest is #{k : r_k > i}
        int rank = r.empty() ? 0 : r.front();
        for (int i = 0; i < rank; ++i) {
            int ex = 0;
            for (int rk : r) {
                if (rk > i) ++ex;
            }
            if (static_cast<std::size_t>(i) >= factors.size()) factors.push_back(1);
            factors[static_cast<std::size_t>(i)] = checked::mul(factors[static_cast<std::size_t>(i)],
                                                                ipow(p, static_cast<unsigned>(ex)));
        }
    }
    std::reverse(factors.begin(), factors.end());
    return factors;
}

}  // namespace detail

inline ClassGroup class_group(const Discriminant& D) {
    ClassGroup G(D);
    std::vector<Form> reduced = reduced_forms(D);
    std::vector<std::vector<Form>> cycles;
    if (D.is_real()) {
        std::set<Form> seen;
        for (const Form& f : reduced) {
            if (seen.count(f)) continue;
            auto cyc = reduction_cycle(f);
            for (const Form& g : cyc) seen.insert(g);
            cycles.push_back(std::move(cyc));
        }
    } else {
        for (const Form& f : reduced) cycles.push_back({f});
    }

    std::vector<Form> reps;
    for (const auto& cyc : cycles) reps.push_back(*std::min_element(cyc.begin(), cyc.end()));
    Form principal = canonical_form(principal_form(D));
    std::vector<std::size_t> order_idx(cycles.size());
    std::iota(order_idx.begin(), order_idx.end(), 0);
    std::sort(order_idx.begin(), order_idx.end(), [&](std::size_t i, std::size_t j) {
        bool pi = reps[i] == principal, pj = reps[j] == principal;
        if (pi != pj) return pi;
        return reps[i] < reps[j];
    });
    for (std::size_t k = 0; k < order_idx.size(); ++k) {
        std::size_t i = order_idx[k];
        G.elements_.push_back({reps[i], D});
        for (const Form& g : cycles[i]) G.lookup_[g] = k;
    }
    if (G.elements_.empty() || !(G.elements_.front().rep == principal)) {
        throw Error("class group enumeration missed the principal class");
    }

    const std::size_t h = G.elements_.size();
    G.table_.resize(h * h);
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = i; j < h; ++j) {
            Form prod = compose_forms(D, G.elements_[i].rep, G.elements_[j].rep);
            auto it = G.lookup_.find(reduce(prod).form);
            if (it == G.lookup_.end()) throw Error("class group is not closed under composition");
            G.table_[i * h + j] = G.table_[j * h + i] = it->second;
        }
    }
    G.orders_.resize(h);
    for (std::size_t i = 0; i < h; ++i) {
        std::size_t o = 1, x = i;
        while (x != 0) {
            x = G.mul(x, i);
            ++o;
            if (o > h) throw Error("element order exceeds the group order");
        }
        G.orders_[i] = o;
    }
    G.structure_ = detail::invariant_factors(G.orders_);
    return G;
}

/// {x^2 : x in G}, in the group's element order.
inline std::vector<FormClass> squared_subgroup(const ClassGroup& G) {
    std::vector<bool> hit(G.size(), false);
    for (std::size_t i = 0; i < G.size(); ++i) hit[G.mul(i, i)] = true;
    std::vector<FormClass> out;
    for (std::size_t i = 0; i < G.size(); ++i) {
        if (hit[i]) out.push_back(G.elements()[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Representations

/// Some (x, y) with |x|, |y| <= bound and f(x, y) = n; the search is complete within the box.
inline std::optional<std::pair<Int, Int>> represents_globally(const Form& f, Int n, Int bound) {
    if (bound < 1) throw DomainError("represents_globally: bound must be positive");
    const Int D = f.discriminant();
    // For fixed y, a x^2 + (b y) x + (c y^2 - n) = 0 has discriminant D y^2 + 4 a n.
    for (Int step = 0; step <= 2 * bound; ++step) {
        Int y = (step % 2 == 1) ? (step + 1) / 2 : -(step / 2);
        __int128 disc = static_cast<__int128>(D) * y * y + static_cast<__int128>(4) * f.a * n;
        if (disc < 0) {
            if (D < 0 && step > 0) break;  // only gets more negative
            continue;
        }
        Int root = isqrt(checked::narrow(disc));
        if (static_cast<__int128>(root) * root != disc) continue;
        for (Int sgn : {1, -1}) {
            __int128 num = -static_cast<__int128>(f.b) * y + sgn * root;
            __int128 den = 2 * static_cast<__int128>(f.a);
            if (num % den != 0) continue;
            __int128 x = num / den;
            if (x < -bound || x > bound) continue;
            return std::make_pair(static_cast<Int>(x), y);
        }
    }
    return std::nullopt;
}

namespace detail {

// Valuation of v capped at cap (v == 0 counts as cap).
inline int capped_valuation(__int128 v, Int p, int cap) {
    if (v == 0) return cap;
    int e = 0;
    while (e < cap && v % p == 0) {
        v /= p;
        ++e;
    }
    return e;
}

// f(x, y) mod m.
inline Int eval_mod(const Form& f, Int x, Int y, Int m) {
    Int ax = mulmod(mod(f.a, m), mulmod(x, x, m), m);
    Int bx = mulmod(mod(f.b, m), mulmod(x, y, m), m);
    Int cx = mulmod(mod(f.c, m), mulmod(y, y, m), m);
    return mod(static_cast<__int128>(ax) + bx + cx, m);
}

// Hensel certificate at level j: some partial derivative has valuation e with j > 2e.
inline bool hensel_certified(const Form& f, Int x, Int y, Int p, int j) {
    __int128 fx = 2 * static_cast<__int128>(f.a) * x + static_cast<__int128>(f.b) * y;
    __int128 fy = static_cast<__int128>(f.b) * x + 2 * static_cast<__int128>(f.c) * y;
    int e = std::min(capped_valuation(fx, p, j), capped_valuation(fy, p, j));
    return j > 2 * e;
}

// All (x, y) mod p with f(x, y) = n mod p, streamed to visit; stops when visit returns true.
template <class Visit>
bool solutions_mod_p(const Form& f, Int n, Int p, Visit&& visit) {
    if (p == 2) {
        for (Int x = 0; x < 2; ++x) {
            for (Int y = 0; y < 2; ++y) {
                if (eval_mod(f, x, y, 2) == mod(n, 2) && visit(x, y)) return true;
            }
        }
        return false;
    }
    // a x^2 + (b y) x + (c y^2 - n) = 0 over F_p, or the same in y when p | a
    const bool swap = mod(f.a, p) == 0;
    const Form g = swap ? Form{f.c, f.b, f.a} : f;
    const Int a = mod(g.a, p), nn = mod(n, p);
    const Int inv2a = powmod(mulmod(2, a, p), static_cast<std::uint64_t>(p - 2), p);
    auto emit = [&](Int u, Int w) { return swap ? visit(w, u) : visit(u, w); };
    if (a == 0) {
        // p divides both a and c: f = b x y (mod p)
        for (Int x = 0; x < p; ++x) {
            for (Int y = 0; y < p; ++y) {
                if (eval_mod(f, x, y, p) == nn && visit(x, y)) return true;
            }
        }
        return false;
    }
    for (Int w = 0; w < p; ++w) {
        Int by = mulmod(mod(g.b, p), w, p);
        Int konst = mod(static_cast<__int128>(mulmod(mod(g.c, p), mulmod(w, w, p), p)) - nn, p);
        Int delta = mod(static_cast<__int128>(mulmod(by, by, p)) - 4 * static_cast<__int128>(mulmod(a, konst, p)), p);
        auto root = sqrt_mod(delta, p);
        if (!root) continue;
        Int u1 = mulmod(mod(static_cast<__int128>(*root) - by, p), inv2a, p);
        if (emit(u1, w)) return true;
        if (*root != 0) {
            Int u2 = mulmod(mod(-static_cast<__int128>(*root) - by, p), inv2a, p);
            if (emit(u2, w)) return true;
        }
    }
    return false;
}

}  // namespace detail

/// Whether f(x, y) = n has a Hensel-certified solution modulo p^k, i.e. a p-adic
/// integral solution. Solutions are lifted level by level; any certified
/// solution at a lower level reduces to a certified one at level k.
inline bool represents_over_zp_at(const Form& f, Int n, Int p, int k) {
    if (n == 0) throw DomainError("represents_over_zp: n must be nonzero");
    if (!is_prime(p)) throw DomainError("represents_over_zp: " + std::to_string(p) + " is not prime");
    if (k < 1) throw DomainError("represents_over_zp: level must be positive");
    (void)ipow(p, static_cast<unsigned>(k));  // modulus must fit

    std::vector<std::pair<Int, Int>> level;
    bool found = detail::solutions_mod_p(f, n, p, [&](Int x, Int y) {
        if (detail::hensel_certified(f, x, y, p, 1)) return true;
        level.emplace_back(x, y);
        return false;
    });
    if (found) return true;

    Int pj = p;
    for (int j = 1; j < k && !level.empty(); ++j) {
        Int next_mod = checked::mul(pj, p);
        std::vector<std::pair<Int, Int>> next;
        for (auto [x, y] : level) {
            for (Int s = 0; s < p; ++s) {
                for (Int t = 0; t < p; ++t) {
                    Int X = x + s * pj, Y = y + t * pj;
                    if (detail::eval_mod(f, X, Y, next_mod) != mod(n, next_mod)) continue;
                    if (detail::hensel_certified(f, X, Y, p, j + 1)) return true;
                    next.emplace_back(X, Y);
                }
            }
        }
        level = std::move(next);
        pj = next_mod;
    }
    return false;
}

/// The decision threshold k = v_p(4D) + 3.
inline int zp_threshold(Int D, Int p) { return valuation(checked::mul(4, D), p) + 3; }

/// Decided at level zp_threshold + v_p(n): a solution divisible by p^j has 2j <= v_p(n),
/// and its gradient valuation is at most j + v_p(D).
inline bool represents_over_zp(const Form& f, Int n, Int p) {
    if (n == 0) throw DomainError("represents_over_zp: n must be nonzero");
    return represents_over_zp_at(f, n, p, zp_threshold(f.discriminant(), p) + valuation(n, p));
}

/// Representability of n over Q_v: at a finite prime iff (n a, D)_p = 1, since
/// 4 a f = (2 a x + b y)^2 - D y^2.
inline bool represents_over_qp(const Form& f, const Rational& n, const LocalPlace& v) {
    if (n.sign() == 0) throw DomainError("represents_over_qp: n must be nonzero");
    const Int D = f.discriminant();
    if (v.is_real()) {
        if (D > 0) return true;
        return (n.sign() > 0) == (f.a > 0);
    }
    return hilbert_symbol(n * Rational(f.a), Rational(D), v) == 1;
}

}  // namespace pellsha
