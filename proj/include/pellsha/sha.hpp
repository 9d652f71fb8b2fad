#pragma once

/**
 * @file sha.hpp
 * @brief Tate-Shafarevich group of the Pell conic, computed three ways.
 *
 * Local route: form classes representing 1 over Z_p for every p and over R.
 * Algebraic route: the squared subgroup of Cl+(K).
 * Counting route: h+ / 2^(t-1).
 */

#include <map>
#include <optional>
#include <vector>

#include "pellsha/arith.hpp"
#include "pellsha/bqf.hpp"
#include "pellsha/qfield.hpp"

namespace pellsha {

/// Bound used to certify that a Hasse failure does not represent 1 over Z.
inline constexpr Int kGlobalSearchBound = 1000;

/// Distinct primes dividing 2D: the only places where a class can fail to represent 1.
inline std::vector<Int> local_primes(const Discriminant& D) { return prime_divisors(checked::mul(2, D.value())); }

/// f represents 1 over Z_p for every p | 2D and over R.
inline bool locally_represents_one(const Discriminant& D, const Form& f) {
    if (!represents_over_qp(f, 1, LocalPlace::real())) return false;
    for (Int p : local_primes(D)) {
        if (!represents_over_zp(f, 1, p)) return false;
    }
    return true;
}

inline std::vector<FormClass> sha_classes(const ClassGroup& G) {
    std::vector<FormClass> out;
    for (const FormClass& c : G.elements()) {
        if (locally_represents_one(G.disc(), c.rep)) out.push_back(c);
    }
    return out;
}

inline std::vector<FormClass> sha_classes(const Discriminant& D) { return sha_classes(class_group(D)); }

inline Int sha_order(const Discriminant& D) { return static_cast<Int>(sha_classes(D).size()); }

/// Classes in Sha other than the principal one, each certified to have no
/// representation of 1 within the search box.
inline std::vector<FormClass> hasse_failures(const ClassGroup& G, const std::vector<FormClass>& sha) {
    std::vector<FormClass> out;
    for (const FormClass& c : sha) {
        if (c == G.identity()) continue;
        if (auto hit = represents_globally(c.rep, 1, kGlobalSearchBound)) {
            throw Error("non-principal class " + c.rep.to_string() + " represents 1 at (" +
                        std::to_string(hit->first) + "," + std::to_string(hit->second) + ")");
        }
        out.push_back(c);
    }
    return out;
}

inline std::vector<FormClass> hasse_failures(const Discriminant& D) {
    ClassGroup G = class_group(D);
    return hasse_failures(G, sha_classes(G));
}

struct ShaReport {
    Discriminant D;
    Int h_plus = 0;
    int t = 0;
    Int sha_order = 0;      ///< local route
    Int squared_order = 0;  ///< algebraic route
    Int genus_index = 0;    ///< 2^(t-1)
    Int counting_order = 0; ///< h_plus / genus_index (0 if not divisible)
    bool sets_agree = false;
    std::vector<Int> structure = {};
    std::vector<FormClass> sha_classes = {};
    std::vector<FormClass> hasse_failures = {};
    bool ok = false;
};

inline ShaReport verify_main_theorem(const Discriminant& D) {
    ClassGroup G = class_group(D);
    ShaReport r{D};
    r.h_plus = static_cast<Int>(G.size());
    r.t = D.t();
    r.genus_index = D.genus_count();
    r.structure = G.structure();
    r.sha_classes = sha_classes(G);
    auto squares = squared_subgroup(G);
    r.sha_order = static_cast<Int>(r.sha_classes.size());
    r.squared_order = static_cast<Int>(squares.size());
    r.counting_order = (r.h_plus % r.genus_index == 0) ? r.h_plus / r.genus_index : 0;
    // both lists follow the group's element order
    r.sets_agree = r.sha_classes == squares;
    r.hasse_failures = hasse_failures(G, r.sha_classes);
    r.ok = r.sets_agree && r.sha_order == r.squared_order && r.sha_order == r.counting_order;
    return r;
}

/// A rational point of f(x, y) = 1 with common denominator at most max_den:
/// a u^2 + b u v + c v^2 = w^2, searched over w and |v| <= max_den * w.
inline std::optional<std::pair<Rational, Rational>> rational_representation(const Form& f, Int max_den) {
    const Int D = f.discriminant();
    for (Int w = 1; w <= max_den; ++w) {
        Int vmax = checked::mul(max_den, w);
        for (Int step = 0; step <= 2 * vmax; ++step) {
            Int v = (step % 2 == 1) ? (step + 1) / 2 : -(step / 2);
            __int128 disc = static_cast<__int128>(D) * v * v + static_cast<__int128>(4) * f.a * w * w;
            if (disc < 0) {
                if (D < 0 && step > 0) break;
                continue;
            }
            Int root = isqrt(checked::narrow(disc));
            if (static_cast<__int128>(root) * root != disc) continue;
            for (Int sgn : {1, -1}) {
                __int128 num = -static_cast<__int128>(f.b) * v + sgn * root;
                __int128 den = 2 * static_cast<__int128>(f.a);
                if (num % den != 0) continue;
                Int u = checked::narrow(num / den);
                return std::make_pair(Rational(u, w), Rational(v, w));
            }
        }
    }
    return std::nullopt;
}

/// An ideal of norm exactly 1 in the narrow class `target` (which must be a square):
/// with target = d^2 and d the class of prod p_i^{n_i} over split primes, the ideal is
/// prod p_i^{n_i} pbar_i^{-n_i}.
inline FractionalIdeal norm_one_representative(const ClassGroup& G, const FormClass& target,
                                               Int prime_bound = 100000) {
    const Discriminant& D = G.disc();
    const std::size_t goal = G.index_of(target.rep);
    bool is_square = false;
    for (std::size_t i = 0; i < G.size(); ++i) is_square = is_square || G.mul(i, i) == goal;
    if (!is_square) throw DomainError("class " + target.rep.to_string() + " is not a square");

    if (goal == 0) return unit_ideal(D);

    // reachable class -> exponent vector over the split primes used so far
    using Word = std::vector<std::pair<std::size_t, Int>>;
    std::map<std::size_t, Word> reached{{0, {}}};
    std::vector<FractionalIdeal> gens;

    auto build = [&](const Word& word) {
        FractionalIdeal I = unit_ideal(D);
        for (auto [gi, n] : word) {
            FractionalIdeal p1 = gens[gi];
            FractionalIdeal p2 = ideal_conjugate(D, p1);
            I = ideal_mul(D, I, ideal_pow(D, p1, n));
            I = ideal_mul(D, I, ideal_pow(D, p2, -n));
        }
        return I;
    };

    for (Int p = 2; p < prime_bound; ++p) {
        if (!is_prime(p) || kronecker(D.value(), p) != 1) continue;
        FractionalIdeal P = splitting_type(D, p).primes.front();
        std::size_t g = G.index_of(ideal_to_form(P));
        if (g == 0) continue;
        std::size_t ord = G.order(g);
        if (reached.size() == G.size()) break;
        std::size_t gi = gens.size();
        gens.push_back(P);
        auto snapshot = reached;
        for (const auto& [cls, word] : snapshot) {
            std::size_t x = cls;
            for (std::size_t k = 1; k < ord; ++k) {
                x = G.mul(x, g);
                if (reached.count(x)) continue;
                // use the exponent of least absolute value
                Int e = (2 * k <= ord) ? static_cast<Int>(k) : static_cast<Int>(k) - static_cast<Int>(ord);
                Word w = word;
                w.emplace_back(gi, e);
                reached.emplace(x, std::move(w));
            }
        }
        for (const auto& [cls, word] : reached) {
            if (G.mul(cls, cls) != goal) continue;
            FractionalIdeal I = build(word);
            if (!(ideal_norm(I) == Rational(1)) || G.index_of(ideal_to_form(I)) != goal) {
                throw Error("norm-one representative failed verification");
            }
            return I;
        }
    }
    throw NoSplitGenerators("no split-prime word reaches a square root of " + target.rep.to_string() +
                            " below " + std::to_string(prime_bound));
}

}  // namespace pellsha
