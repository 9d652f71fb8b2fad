// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <set>
#include <thread>

#include "support.hpp"

using namespace pellsha;
using pellsha::testing::fundamentals;
using pellsha::testing::fundamentals_abs;
using pellsha::testing::run_binary;
using pellsha::testing::uniform;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::set<Form> reps(const std::vector<FormClass>& cs) {
    std::set<Form> out;
    for (const auto& c : cs) out.insert(c.rep);
    return out;
}

template <class T>
const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<Int>(v.size()) - 1))];
}

// 1. three routes over the full range, 4 workers
Outcome main_theorem_scan() {
    auto ds = fundamentals_abs(10000);
    std::vector<char> good(ds.size(), 0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < ds.size();) {
            auto D = Discriminant::make(ds[i]);
            ClassGroup G = class_group(D);
            auto sha = sha_classes(G);
            auto sq = squared_subgroup(G);
            const Int h = static_cast<Int>(G.size());
            const Int g = D.genus_count();
            good[i] = reps(sha) == reps(sq) && h % g == 0 && static_cast<Int>(sha.size()) == h / g &&
                      sq.size() == sha.size();
        }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < 4; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    std::size_t bad = static_cast<std::size_t>(std::count(good.begin(), good.end(), 0));
    std::string first;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (!good[i]) {
            first = " first D=" + std::to_string(ds[i]);
            break;
        }
    }
    return {bad == 0, std::to_string(ds.size()) + " discriminants, " + std::to_string(bad) + " mismatches" + first};
}

// 2. spot values, with the naive count as an independent check
Outcome spot_values() {
    const std::vector<std::pair<Int, Int>> expected{{-15, 1}, {-23, 3}, {-47, 5}, {-84, 1}, {40, 1}, {60, 1}, {316, 3}};
    std::string detail;
    bool pass = true;
    for (auto [d, want] : expected) {
        auto D = Discriminant::make(d);
        Int got = sha_order(D);
        Int naive = oracle::naive_class_count(d) / D.genus_count();
        pass = pass && got == want && naive == want;
        detail += std::to_string(d) + "->" + std::to_string(got) + " ";
    }
    return {pass, detail};
}

// 3. cyclic module test against exhaustive unit representability
Outcome finite_ring_equivalence() {
    auto ds = fundamentals_abs(300);
    int agree = 0;
    for (int i = 0; i < 200; ++i) {
        auto D = Discriminant::make(pick(ds));
        Form f = pick(reduced_forms(D));
        if (f.a < 0) f = Form{-f.a, f.b, -f.c};
        FractionalIdeal x = make_ideal(D, 1, f.a, f.b);
        Int n = uniform(2, 60);
        agree += oracle::cyclic_module_test(x, n) == oracle::unit_representable(ideal_to_form(x), n);
    }
    return {agree == 200, std::to_string(agree) + "/200 agree"};
}

const std::vector<Int> kConicDiscriminants{-23, -4, -3, -15, 5, 8, 12, 13, 40, 316};

template <class R>
std::vector<ConicPoint<R>> all_points(const PellConic<R>& C, Int n) {
    std::vector<ConicPoint<R>> out;
    for (Int x = 0; x < n; ++x) {
        for (Int y = 0; y < n; ++y) {
            ConicPoint<R> P{ZMod(x, n), ZMod(y, n)};
            if (C.contains(P)) out.push_back(P);
        }
    }
    return out;
}

std::vector<NormOneElement<ZMod>> all_norm_one(const PellConic<ZMod>& C, Int n) {
    std::vector<NormOneElement<ZMod>> out;
    for (Int u = 0; u < n; ++u) {
        for (Int v = 0; v < n; ++v) {
            NormOneElement<ZMod> N{ZMod(u, n), ZMod(v, n)};
            if (C.norm_one_contains(N)) out.push_back(N);
        }
    }
    return out;
}

// 4. group axioms over Z (sampled) and Z/n (exhaustive), and the norm-one isomorphism
Outcome conic_axioms() {
    long failures = 0, integer_triples = 0, residue_triples = 0;
    for (Int d : kConicDiscriminants) {
        PellConic<BigInt> C(d);
        IntegralPoint g = generator_point(Discriminant::make(d));
        auto sample = [&] {
            auto P = C.scalar_mul(uniform(-6, 6), g);
            return uniform(0, 1) ? P : IntegralPoint{-P.x, -P.y};
        };
        for (int i = 0; i < 100; ++i, ++integer_triples) {
            IntegralPoint P = sample(), Q = sample(), R = sample();
            failures += C.add(C.add(P, Q), R) != C.add(P, C.add(Q, R));
            failures += C.add(P, C.identity()) != P;
            failures += C.add(P, C.neg(P)) != C.identity();
            failures += C.to_norm_one(C.add(P, Q)) != C.norm_one_mul(C.to_norm_one(P), C.to_norm_one(Q));
            failures += C.from_norm_one(C.to_norm_one(P)) != P;
        }
        for (Int n = 2; n <= 30; ++n) {
            PellConic<ZMod> M(d, ZMod(1, n));
            if (n % 2 == 1) {
                auto pts = all_points(M, n);
                failures += pts.size() != all_norm_one(M, n).size();
                for (const auto& P : pts) {
                    failures += M.add(P, M.identity()) != P;
                    failures += M.add(P, M.neg(P)) != M.identity();
                    failures += M.from_norm_one(M.to_norm_one(P)) != P;
                    for (const auto& Q : pts) {
                        auto PQ = M.add(P, Q);
                        failures += M.to_norm_one(PQ) != M.norm_one_mul(M.to_norm_one(P), M.to_norm_one(Q));
                        for (const auto& R : pts) {
                            failures += M.add(PQ, R) != M.add(P, M.add(Q, R));
                            ++residue_triples;
                        }
                    }
                }
            } else {
                // 2 is a zero divisor: the conic law cannot halve, the norm-one law carries the group
                auto N1 = all_norm_one(M, n);
                auto e = M.norm_one_identity();
                for (const auto& A : N1) {
                    failures += M.norm_one_mul(A, e) != A;
                    failures += M.norm_one_mul(A, M.norm_one_inverse(A)) != e;
                    for (const auto& B : N1) {
                        auto AB = M.norm_one_mul(A, B);
                        for (const auto& Cc : N1) {
                            failures += M.norm_one_mul(AB, Cc) != M.norm_one_mul(A, M.norm_one_mul(B, Cc));
                            ++residue_triples;
                        }
                    }
                }
                auto pts = all_points(M, n);
                try {
                    M.add(pts.front(), pts.front());
                    ++failures;
                } catch (const HalvingFailure&) {
                }
            }
        }
    }
    return {failures == 0, std::to_string(integer_triples) + " integer triples, " + std::to_string(residue_triples) +
                               " residue triples, " + std::to_string(failures) + " failures"};
}

using U128 = unsigned __int128;

U128 isqrt128(U128 v) {
    U128 s = static_cast<U128>(std::sqrt(static_cast<long double>(v)));
    while (s * s > v) --s;
    while ((s + 1) * (s + 1) <= v) ++s;
    return s;
}

std::string to_string128(U128 v) {
    std::string s;
    do {
        s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    } while (v != 0);
    return s;
}

// Smallest y > 0 with D y^2 + 4 a square. y runs upward through residues mod a wheel of
// small prime powers where D y^2 + 4 is a square, then through further filter primes,
// and every survivor gets an exact square root test.
std::optional<std::pair<U128, U128>> box_minimum(Int D, U128 ycap) {
    auto square_mod = [](Int m) {
        std::vector<char> sq(static_cast<std::size_t>(m), 0);
        for (Int x = 0; x < m; ++x) sq[static_cast<std::size_t>(x * x % m)] = 1;
        return sq;
    };
    auto allowed = [&](Int m) {
        auto sq = square_mod(m);
        std::vector<char> ok(static_cast<std::size_t>(m), 0);
        for (Int y = 0; y < m; ++y) ok[static_cast<std::size_t>(y)] = sq[static_cast<std::size_t>(mod(D * y * y + 4, m))];
        return ok;
    };

    std::vector<Int> wheel{0};
    Int M = 1;
    for (Int m : {16, 9, 5, 7, 11, 13, 17, 19}) {
        auto ok = allowed(m);
        Int inv = 1;
        while ((M % m) * inv % m != 1) ++inv;
        std::vector<Int> next;
        for (Int a : wheel) {
            for (Int b = 0; b < m; ++b) {
                if (ok[static_cast<std::size_t>(b)]) next.push_back(a + M * mod((b - a) * inv, m));
            }
        }
        wheel = std::move(next);
        M *= m;
    }
    std::sort(wheel.begin(), wheel.end());

    const std::vector<Int> filters{23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};
    std::vector<std::vector<char>> ok2;  // doubled so the index needs no reduction
    std::vector<std::vector<std::uint8_t>> rmod;
    for (Int q : filters) {
        auto ok = allowed(q);
        std::vector<char> twice(ok);
        twice.insert(twice.end(), ok.begin(), ok.end());
        ok2.push_back(std::move(twice));
        std::vector<std::uint8_t> r(wheel.size());
        for (std::size_t i = 0; i < wheel.size(); ++i) r[i] = static_cast<std::uint8_t>(wheel[i] % q);
        rmod.push_back(std::move(r));
    }

    std::vector<std::size_t> bmod(filters.size());
    for (U128 base = 0; base <= ycap; base += static_cast<U128>(M)) {
        for (std::size_t k = 0; k < filters.size(); ++k) bmod[k] = static_cast<std::size_t>(base % static_cast<U128>(filters[k]));
        for (std::size_t i = 0; i < wheel.size(); ++i) {
            bool pass = true;
            for (std::size_t k = 0; k < filters.size() && pass; ++k) pass = ok2[k][bmod[k] + rmod[k][i]];
            if (!pass) continue;
            U128 y = base + static_cast<U128>(wheel[i]);
            if (y == 0 || y > ycap) continue;
            U128 v = static_cast<U128>(D) * y * y + 4;
            U128 x = isqrt128(v);
            if (x * x == v) return std::make_pair(x, y);
        }
    }
    return std::nullopt;
}

// 5. fundamental points against the box search
Outcome fundamental_points() {
    auto ds = fundamentals(1, 200);
    int matched = 0;
    std::string bad;
    for (Int d : ds) {
        IntegralPoint P = fundamental_point(Discriminant::make(d));
        auto box = box_minimum(d, static_cast<U128>(10'000'000'000'000));
        bool same = box && P.x.str() == to_string128(box->first) && P.y.str() == to_string128(box->second);
        matched += same;
        if (!same && bad.empty()) bad = " first mismatch D=" + std::to_string(d);
    }
    return {matched == static_cast<int>(ds.size()),
            std::to_string(matched) + "/" + std::to_string(ds.size()) + " match" + bad};
}

// 6. Z_p decision against raw search at k..k+4
Outcome local_soundness() {
    long cases = 0, mismatches = 0;
    for (Int d : fundamentals_abs(300)) {
        for (const Form& f : reduced_forms(Discriminant::make(d))) {
            for (Int p : prime_divisors(2 * d)) {
                const bool decided = represents_over_zp(f, 1, p);
                const int k = valuation(4 * d, p) + 3;
                for (int j = k; j <= k + 4; ++j) {
                    mismatches += oracle::brute_local(f, 1, p, j) != decided;
                    ++cases;
                }
            }
        }
    }
    return {mismatches == 0, std::to_string(cases) + " (form, p, k) cases, " + std::to_string(mismatches) + " mismatches"};
}

bool passes_local_tests(const Discriminant& D, const Form& f, int random_primes) {
    for (Int p : local_primes(D)) {
        if (!represents_over_zp(f, 1, p)) return false;
    }
    for (int sampled = 0; sampled < random_primes;) {
        Int p = uniform(3, 5000);
        if (!is_prime(p) || D.value() % p == 0) continue;
        if (!represents_over_zp(f, 1, p)) return false;
        ++sampled;
    }
    return represents_over_qp(f, 1, LocalPlace::real());
}

Rational eval(const Form& f, const Rational& x, const Rational& y) {
    return Rational(f.a) * x * x + Rational(f.b) * x * y + Rational(f.c) * y * y;
}

// 7. Hasse failures: locally everywhere, not globally, rationally yes
Outcome hasse_witnesses() {
    auto D23 = Discriminant::make(-23);
    Form f{2, 1, 3};
    bool pass = passes_local_tests(D23, f, 20) && !represents_globally(f, 1, 1000).has_value() &&
                eval(f, Rational(1, 2), Rational(1, 3)) == Rational(1);
    int failures = 0, checked = 0;
    for (Int d : fundamentals_abs(500)) {
        auto D = Discriminant::make(d);
        for (const FormClass& c : hasse_failures(D)) {
            ++checked;
            bool ok = passes_local_tests(D, c.rep, 20) && !represents_globally(c.rep, 1, 1000).has_value();
            auto w = rational_representation(c.rep, 200);
            ok = ok && w && eval(c.rep, w->first, w->second) == Rational(1);
            failures += !ok;
        }
    }
    return {pass && failures == 0, "(2,1,3) " + std::string(pass ? "ok" : "failed") + ", " + std::to_string(checked) +
                                       " failure classes with |D| <= 500, " + std::to_string(failures) + " bad"};
}

// 8. equivalence decision against matrix search
Outcome equivalence_oracle() {
    auto ds = fundamentals_abs(300);
    int agree = 0;
    for (int i = 0; i < 500; ++i) {
        ClassGroup G = class_group(Discriminant::make(pick(ds)));
        auto small = [] {
            for (;;) {
                Matrix2 m{uniform(-2, 2), uniform(-2, 2), uniform(-2, 2), uniform(-2, 2)};
                if (m.det() == 1) return m;
            }
        };
        Form f = act(pick(G.elements()).rep, small());
        Form g = act(pick(G.elements()).rep, small());
        agree += is_equivalent(f, g) == oracle::brute_equivalent(f, g, 12);
    }
    return {agree == 500, std::to_string(agree) + "/500 agree"};
}

// 9. exit codes and --jobs invariance through the installed binary
Outcome cli_contract() {
    std::string bad;
    auto expect_code = [&](const std::string& args, int code, const std::string& env = "") {
        int got = run_binary(args, env).code;
        if (got != code) bad += " [" + args + "]=" + std::to_string(got);
    };
    expect_code("sha -23", 0);
    expect_code("verify --min -100 --max 100", 0);
    expect_code("classgroup 316 --format json", 0);
    expect_code("sha 7", 2);
    expect_code("sha -12", 2);
    expect_code("verify --min 10 --max 5", 2);
    expect_code("--format xml sha -23", 2);
    expect_code("--jobs 0 verify --min -10 --max 10", 2);
    expect_code("verify --min -10 --max 10", 2, "PELLSHA_JOBS=0");
    expect_code("bogus", 2);

    // the only route to exit 1 is a failed row
    std::vector<Int> ds{-23};
    std::vector<cli::ScanRow> rows(1);
    rows[0].report = verify_main_theorem(Discriminant::make(-23));
    rows[0].report->ok = false;
    std::ostringstream sink;
    if (cli::emit_verify(ds, rows, 0, {}, sink, sink) != 1) bad += " [failed row]!=1";

    const std::string scan = "--format json verify --min -3000 --max 3000";
    std::string reference = run_binary("--jobs 1 " + scan).out;
    for (const char* jobs : {"2", "4", "8"}) {
        if (run_binary(std::string("--jobs ") + jobs + " " + scan).out != reference) bad += " [jobs " + std::string(jobs) + "]";
    }
    if (run_binary(scan, "PELLSHA_JOBS=3").out != reference) bad += " [PELLSHA_JOBS=3]";
    return {bad.empty() && !reference.empty(), bad.empty() ? "exit codes and JSON output stable" : "mismatch:" + bad};
}

}  // namespace

int main() {
    const std::vector<std::function<Outcome()>> criteria{main_theorem_scan, spot_values,      finite_ring_equivalence,
                                                         conic_axioms,      fundamental_points, local_soundness,
                                                         hasse_witnesses,   equivalence_oracle, cli_contract};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += !o.pass;
        std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << "  ("
                  << std::fixed << std::setprecision(1) << secs << "s)" << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
