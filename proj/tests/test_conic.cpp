#include <gtest/gtest.h>

#include "support.hpp"

using namespace pellsha;
using pellsha::testing::uniform;

namespace {

IntegralPoint pt(Int x, Int y) { return {BigInt(x), BigInt(y)}; }

std::vector<ConicPoint<ZMod>> points_mod(Int D, Int n) {
    PellConic<ZMod> C(D, ZMod(1, n));
    std::vector<ConicPoint<ZMod>> out;
    for (Int x = 0; x < n; ++x) {
        for (Int y = 0; y < n; ++y) {
            ConicPoint<ZMod> P{ZMod(x, n), ZMod(y, n)};
            if (C.contains(P)) out.push_back(P);
        }
    }
    return out;
}

std::vector<NormOneElement<ZMod>> norm_one_mod(Int D, Int n) {
    PellConic<ZMod> C(D, ZMod(1, n));
    std::vector<NormOneElement<ZMod>> out;
    for (Int u = 0; u < n; ++u) {
        for (Int v = 0; v < n; ++v) {
            NormOneElement<ZMod> N{ZMod(u, n), ZMod(v, n)};
            if (C.norm_one_contains(N)) out.push_back(N);
        }
    }
    return out;
}

const std::vector<Int> kSampleDiscriminants{-23, -4, -3, -15, 5, 8, 12, 13, 40, 316};

}  // namespace

TEST(Conic, AdditionExamples) {
    PellConic<BigInt> C5(5);
    EXPECT_EQ(C5.add(C5.identity(), pt(3, 1)), pt(3, 1));
    EXPECT_EQ(C5.add(pt(3, 1), pt(3, 1)), pt(7, 3));
    PellConic<BigInt> C4(-4);
    EXPECT_EQ(C4.add(pt(0, 1), pt(0, 1)), pt(-2, 0));
    EXPECT_THROW(C5.add(pt(1, 1), pt(3, 1)), DomainError);
}

TEST(Conic, NegationAndScalarExamples) {
    PellConic<BigInt> C5(5);
    EXPECT_EQ(C5.neg(pt(2, 0)), pt(2, 0));
    EXPECT_EQ(C5.scalar_mul(3, pt(3, 1)), pt(18, 8));
    EXPECT_EQ(C5.scalar_mul(0, pt(3, 1)), pt(2, 0));
    EXPECT_EQ(C5.scalar_mul(-2, pt(3, 1)), pt(7, -3));
    PellConic<BigInt> C4(-4);
    EXPECT_EQ(C4.scalar_mul(4, pt(0, 1)), pt(2, 0));
}

TEST(Conic, NormOneExamples) {
    PellConic<BigInt> C5(5);
    EXPECT_EQ(C5.to_norm_one(pt(2, 0)), (NormOneElement<BigInt>{1, 0}));
    EXPECT_EQ(C5.to_norm_one(pt(7, 3)), (NormOneElement<BigInt>{-4, 3}));
    PellConic<BigInt> C4(-4);
    EXPECT_EQ(C4.to_norm_one(pt(0, 1)), (NormOneElement<BigInt>{2, 1}));
    EXPECT_EQ(C4.from_norm_one({2, 1}), pt(0, 1));
    EXPECT_THROW(C4.from_norm_one({1, 1}), DomainError);
}

TEST(Conic, TorsionExamples) {
    auto four = torsion_points(Discriminant::make(-4));
    EXPECT_EQ(four, (std::vector<IntegralPoint>{pt(-2, 0), pt(0, -1), pt(0, 1), pt(2, 0)}));
    auto three = torsion_points(Discriminant::make(-3));
    EXPECT_EQ(three.size(), 6u);
    EXPECT_EQ(torsion_points(Discriminant::make(-23)), (std::vector<IntegralPoint>{pt(-2, 0), pt(2, 0)}));
    EXPECT_THROW(torsion_points(Discriminant::make(5)), DomainError);
}

TEST(Conic, TorsionIsAClosedCyclicGroup) {
    for (Int d : pellsha::testing::fundamentals(-300, -3)) {
        auto D = Discriminant::make(d);
        auto T = torsion_points(D);
        PellConic<BigInt> C(d);
        IntegralPoint g = generator_point(D);
        std::set<std::pair<BigInt, BigInt>> seen;
        for (Int k = 0; k < static_cast<Int>(T.size()); ++k) {
            auto P = C.scalar_mul(k, g);
            seen.insert({P.x, P.y});
        }
        EXPECT_EQ(seen.size(), T.size()) << d;
        for (const auto& P : T) {
            for (const auto& Q : T) {
                auto S = C.add(P, Q);
                EXPECT_TRUE(std::find(T.begin(), T.end(), S) != T.end());
            }
        }
    }
}

TEST(Conic, FundamentalPointExamples) {
    EXPECT_EQ(fundamental_point(Discriminant::make(5)), pt(3, 1));
    EXPECT_EQ(fundamental_point(Discriminant::make(28)), pt(16, 3));
    EXPECT_EQ(fundamental_point(Discriminant::make(316)), pt(160, 9));
    EXPECT_THROW(fundamental_point(Discriminant::make(-7)), DomainError);
}

TEST(Conic, FundamentalPointMatchesUnit) {
    for (Int d : pellsha::testing::fundamentals(5, 2000)) {
        auto D = Discriminant::make(d);
        auto u = fundamental_unit(D);
        PellConic<BigInt> C(d);
        IntegralPoint P = fundamental_point(D);
        ASSERT_TRUE(C.contains(P));
        IntegralPoint E{u.x, u.y};
        // with a norm -1 unit, (x, y) lies on x^2 - D y^2 = -4 and its double is the point
        if (u.norm_sign > 0) {
            EXPECT_EQ(P, E);
        } else {
            BigInt x2 = (E.x * E.x + BigInt(d) * E.y * E.y) / 2, y2 = E.x * E.y;
            EXPECT_EQ(P, (IntegralPoint{x2, y2}));
        }
        // from_norm_one agrees with the unit's coordinates in 1, delta
        if (u.norm_sign > 0) {
            NormOneElement<BigInt> N{numerator(u.unit.a), numerator(u.unit.b)};
            EXPECT_EQ(C.from_norm_one(N), P);
        }
    }
}

TEST(Conic, SmallMultiplesExhaustBox) {
    for (Int d : {5, 8, 12, 13, 21, 40, 60, 77}) {
        auto D = Discriminant::make(d);
        PellConic<BigInt> C(d);
        IntegralPoint g = fundamental_point(D);
        std::set<std::pair<BigInt, BigInt>> generated;
        for (Int k = -5; k <= 5; ++k) {
            for (int sign : {1, -1}) {
                auto P = C.scalar_mul(k, g);
                generated.insert({sign * P.x, sign * P.y});
            }
        }
        EXPECT_EQ(generated.size(), 22u) << d;
        BigInt bound = C.scalar_mul(5, g).x;
        ASSERT_LT(bound, BigInt(1) << 60);
        // every solution with |x| <= bound
        Int xb = static_cast<Int>(bound);
        Int ymax = xb / isqrt(d) + 2;
        ASSERT_LE(ymax, 100'000'000) << d;
        std::set<std::pair<BigInt, BigInt>> box;
        for (Int y = -ymax; y <= ymax; ++y) {
            __int128 rhs = static_cast<__int128>(d) * y * y + 4;
            if (rhs > static_cast<__int128>(xb) * xb) continue;
            Int x = isqrt(static_cast<Int>(rhs));
            if (static_cast<__int128>(x) * x != rhs) continue;
            box.insert({BigInt(x), BigInt(y)});
            box.insert({BigInt(-x), BigInt(y)});
        }
        for (const auto& p : box) EXPECT_TRUE(generated.count(p)) << d << ": " << p.first << "," << p.second;
    }
}

TEST(Conic, AxiomsOverIntegers) {
    int checked = 0;
    for (Int d : kSampleDiscriminants) {
        auto D = Discriminant::make(d);
        PellConic<BigInt> C(d);
        IntegralPoint g = generator_point(D);
        auto sample = [&] {
            auto P = C.scalar_mul(uniform(-6, 6), g);
            return uniform(0, 1) ? P : IntegralPoint{-P.x, -P.y};
        };
        for (int i = 0; i < 100; ++i) {
            IntegralPoint P = sample(), Q = sample(), R = sample();
            EXPECT_EQ(C.add(C.add(P, Q), R), C.add(P, C.add(Q, R)));
            EXPECT_EQ(C.add(P, Q), C.add(Q, P));
            EXPECT_EQ(C.add(P, C.identity()), P);
            EXPECT_EQ(C.add(P, C.neg(P)), C.identity());
            auto N = C.norm_one_mul(C.to_norm_one(P), C.to_norm_one(Q));
            EXPECT_EQ(C.to_norm_one(C.add(P, Q)), N);
            EXPECT_EQ(C.from_norm_one(C.to_norm_one(P)), P);
            ++checked;
        }
    }
    EXPECT_EQ(checked, 1000);
}

TEST(Conic, AxiomsOverRationals) {
    // (x, y) = (2 (1 + D t^2)/(1 - D t^2), 4 t/(1 - D t^2)) parametrizes the rational points
    for (Int d : {5, -23, 316}) {
        PellConic<BigRational> C(d);
        auto param = [&](Int num, Int den) {
            BigRational t(num, den);
            BigRational q = 1 - BigRational(d) * t * t;
            return ConicPoint<BigRational>{2 * (1 + BigRational(d) * t * t) / q, 4 * t / q};
        };
        for (Int a = -4; a <= 4; ++a) {
            for (Int b = 1; b <= 3; ++b) {
                auto P = param(a, b), Q = param(b, 5), R = param(-b, 7);
                ASSERT_TRUE(C.contains(P));
                EXPECT_EQ(C.add(C.add(P, Q), R), C.add(P, C.add(Q, R)));
                EXPECT_EQ(C.to_norm_one(C.add(P, Q)), C.norm_one_mul(C.to_norm_one(P), C.to_norm_one(Q)));
            }
        }
    }
}

TEST(Conic, AxiomsOverOddResidueRings) {
    for (Int d : kSampleDiscriminants) {
        for (Int n = 3; n <= 29; n += 2) {
            PellConic<ZMod> C(d, ZMod(1, n));
            auto pts = points_mod(d, n);
            ASSERT_FALSE(pts.empty());
            auto N1 = norm_one_mod(d, n);
            EXPECT_EQ(pts.size(), N1.size()) << d << " mod " << n;
            for (const auto& P : pts) {
                EXPECT_EQ(C.add(P, C.identity()), P);
                EXPECT_EQ(C.add(P, C.neg(P)), C.identity());
                EXPECT_EQ(C.from_norm_one(C.to_norm_one(P)), P);
                for (const auto& Q : pts) {
                    auto PQ = C.add(P, Q);
                    EXPECT_EQ(PQ, C.add(Q, P));
                    EXPECT_EQ(C.to_norm_one(PQ), C.norm_one_mul(C.to_norm_one(P), C.to_norm_one(Q)));
                    for (const auto& R : pts) ASSERT_EQ(C.add(PQ, R), C.add(P, C.add(Q, R)));
                }
            }
        }
    }
}

TEST(Conic, EvenModuliUseTheNormOneLaw) {
    for (Int d : kSampleDiscriminants) {
        for (Int n = 2; n <= 30; n += 2) {
            PellConic<ZMod> C(d, ZMod(1, n));
            auto N1 = norm_one_mod(d, n);
            auto e = C.norm_one_identity();
            for (const auto& M : N1) {
                EXPECT_EQ(C.norm_one_mul(M, e), M);
                EXPECT_EQ(C.norm_one_mul(M, C.norm_one_inverse(M)), e);
                for (const auto& N : N1) {
                    auto MN = C.norm_one_mul(M, N);
                    ASSERT_TRUE(C.norm_one_contains(MN));
                    EXPECT_EQ(MN, C.norm_one_mul(N, M));
                    for (const auto& L : N1) ASSERT_EQ(C.norm_one_mul(MN, L), C.norm_one_mul(M, C.norm_one_mul(N, L)));
                }
            }
            // halving is not defined once 2 is a zero divisor
            auto pts = points_mod(d, n);
            ASSERT_FALSE(pts.empty());
            EXPECT_THROW(C.add(pts.front(), pts.front()), HalvingFailure);
        }
    }
}
