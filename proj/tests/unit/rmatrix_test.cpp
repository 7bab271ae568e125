#include <gtest/gtest.h>

#include "hqva/rmatrix/rmatrix.hpp"

namespace hqva {
namespace {

const Mono Z = Mono::var(kZ);

Rational q(int a, int b = 1) {
    Rational r(a, b);
    r.canonicalize();
    return r;
}

TEST(LieType, ReferenceCases) {
    const auto b1 = lie_type_data(Family::B, 1);
    EXPECT_EQ(b1.N, 3);
    EXPECT_EQ(b1.bar, (std::vector<Rational>{q(1, 2), 0, q(-1, 2)}));
    EXPECT_EQ(b1.eps, (std::vector<int>{1, 1, 1}));
    EXPECT_EQ(b1.kappa, q(1, 2));
    EXPECT_EQ(b1.xi_exponent, -1);
    const auto c1 = lie_type_data(Family::C, 1);
    EXPECT_EQ(c1.N, 2);
    EXPECT_EQ(c1.bar, (std::vector<Rational>{1, -1}));
    EXPECT_EQ(c1.eps, (std::vector<int>{1, -1}));
    EXPECT_EQ(c1.kappa, 2);
    EXPECT_EQ(c1.xi_exponent, -4);
    const auto d2 = lie_type_data(Family::D, 2);
    EXPECT_EQ(d2.N, 4);
    EXPECT_EQ(d2.bar, (std::vector<Rational>{1, 0, 0, -1}));
    EXPECT_EQ(d2.kappa, 1);
    EXPECT_EQ(d2.xi_exponent, -2);
    EXPECT_THROW(lie_type_data(Family::D, 1), std::invalid_argument);
    EXPECT_THROW(lie_type_data(Family::C, 0), std::invalid_argument);
}

TEST(LieType, InvariantsForAllSmallRanks) {
    for (Family f : {Family::B, Family::C, Family::D}) {
        for (int n = (f == Family::D ? 2 : 1); n <= 5; ++n) {
            const auto t = lie_type_data(f, n);
            for (int i = 0; i < t.N; ++i) {
                EXPECT_EQ(t.bar[t.prime(i)], -t.bar[i]);
                EXPECT_EQ(t.eps[i] * t.eps[t.prime(i)], f == Family::C ? -1 : 1);
            }
            EXPECT_EQ(t.kappa, q(-t.xi_exponent, 2));
        }
    }
}

class ConstantOpsTest : public ::testing::TestWithParam<std::pair<Family, int>> {};

TEST_P(ConstantOpsTest, ClassicalLimitsAndFlip) {
    const auto t = lie_type_data(GetParam().first, GetParam().second);
    const auto ops = build_constant_ops(t, 3);
    EXPECT_EQ(ops.P * ops.P, TensorOp::identity(t.N, 2));
    EXPECT_EQ(ops.R.map([](const Series& s) { return s.h_coeff(0); }), TensorOp::identity(t.N, 2));
    EXPECT_EQ(ops.M * ops.Minv, TensorOp::identity(t.N, 1));
    // R^+ at h^0 is (x-1)^2 times the identity.
    const Series x(RatFunc::monomial(Z));
    const TensorOp rp = rplus(t, ops, x, 3).map([](const Series& s) { return s.h_coeff(0); });
    const RatFunc sq(Poly::binomial_power(Z, 2));
    EXPECT_EQ(rp, TensorOp::identity(t.N, 2).scaled(Series(sq)));
}

TEST_P(ConstantOpsTest, FlipTimesQIsScalarTimesQOnlyClassically) {
    // Brute force: P Q and Q P are +-Q at h^0, but the q-powers in Q are not
    // symmetric under the flip, so no scalar tau works beyond h^0.
    const auto t = lie_type_data(GetParam().first, GetParam().second);
    const auto ops = build_constant_ops(t, 3);
    const int sign = GetParam().first == Family::C ? -1 : 1;
    const auto h0 = [](const Series& s) { return s.h_coeff(0); };
    for (const TensorOp& prod : {ops.P * ops.Q, ops.Q * ops.P}) {
        EXPECT_EQ(prod.map(h0), ops.Q.map(h0).scaled(Series(sign)));
        const auto w = ops.Q.first_nonzero();
        ASSERT_TRUE(w.has_value());
        const Series tau = prod.at(w->first, w->second) * ops.Q.at(w->first, w->second).inverse();
        EXPECT_NE(prod, ops.Q.scaled(tau));
    }
    // Q is rank one with Q^2 = N Q exactly.
    EXPECT_EQ(ops.Q * ops.Q, ops.Q.scaled(Series(t.N)));
}

INSTANTIATE_TEST_SUITE_P(Types, ConstantOpsTest,
                         ::testing::Values(std::make_pair(Family::B, 1), std::make_pair(Family::C, 1),
                                           std::make_pair(Family::D, 2), std::make_pair(Family::B, 2),
                                           std::make_pair(Family::C, 2)));

TEST(ConstantOps, QPQAgainstDenseProduct) {
    // Independent dense evaluation of Q P Q for C1 from the entry formulas.
    const auto t = lie_type_data(Family::C, 1);
    const int L = 2;
    const int N = t.N;
    const auto ops = build_constant_ops(t, L);
    const int D = N * N;
    std::vector<std::vector<Series>> Qd(D, std::vector<Series>(D)), Pd = Qd;
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            Pd[i * N + j][j * N + i] = 1;
            Qd[(N - 1 - i) * N + i][(N - 1 - j) * N + j] =
                q_power(t.bar[i] - t.bar[j], L).scaled(Rational(t.eps[i] * t.eps[j]));
        }
    }
    auto mul = [&](const auto& a, const auto& b) {
        std::vector<std::vector<Series>> c(D, std::vector<Series>(D));
        for (int i = 0; i < D; ++i)
            for (int k = 0; k < D; ++k)
                for (int j = 0; j < D; ++j) c[i][j] += a[i][k] * b[k][j];
        return c;
    };
    const auto dense = mul(mul(Qd, Pd), Qd);
    const TensorOp sparse = ops.Q * ops.P * ops.Q;
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) EXPECT_EQ(sparse.at(i, j), dense[i][j]) << i << "," << j;
}

class NormalizerTest : public ::testing::TestWithParam<std::pair<Family, int>> {};

TEST_P(NormalizerTest, SolvesAndMatchesOracle) {
    const auto t = lie_type_data(GetParam().first, GetParam().second);
    const Normalizer nz = solve_normalizer(t, 4, 10);
    EXPECT_EQ(nz.g1[0], RatFunc::inv_binomial(Z, 2));
    // h^1 by hand: 2 g0 g1 - kappa g0 theta(g0) = 0, so g1 = kappa z/(1-z)^3.
    EXPECT_EQ(nz.g1[1], RatFunc::monomial(Z, t.kappa) * RatFunc::inv_binomial(Z, 3));
    for (int l = 0; l < 4; ++l) {
        EXPECT_EQ(expand_at_zero(nz.g1[l], kZ, 10), nz.g1_series[l]);
        // g1(0, h) = 1
        EXPECT_EQ(nz.g1_series[l][0], l == 0 ? 1 : 0);
    }
    const Series g = nz.as_series();
    const Series shifted = g.subst_mult(kZ, Series(RatFunc::monomial(Z)) *
                                                Series::exp_linear({{kH, -t.kappa}}, {{kH, 4}}));
    EXPECT_EQ(g * shifted, normalizer_rhs(t, 4));
    EXPECT_EQ(g.inverse().h_coeff(0), Series(RatFunc(Poly::binomial_power(Z, 2))));
}

INSTANTIATE_TEST_SUITE_P(Types, NormalizerTest,
                         ::testing::Values(std::make_pair(Family::B, 1), std::make_pair(Family::C, 1),
                                           std::make_pair(Family::D, 2)));

TEST(RMatrix, FirstOrderCoefficientMatchesHandExpansion) {
    // At h^1: Rhat_1 = R_1 + (Q_0 - P)/(1 - z), where R_1 is the h^1 part of
    // the constant R and Q_0 = sum eps_i eps_j e_{i'j'} ⊗ e_ij.
    for (auto [f, n] : {std::make_pair(Family::C, 1), std::make_pair(Family::B, 1), std::make_pair(Family::D, 2)}) {
        const auto t = lie_type_data(f, n);
        const int N = t.N;
        const RMatrix rm(solve_normalizer(t, 3, 6));
        TensorOp expected(N, 2);
        auto idx = [N](int a, int b) { return static_cast<std::size_t>(a * N + b); };
        const RatFunc pole = RatFunc::inv_binomial(Z);
        for (int i = 0; i < N; ++i) {
            const int ip = N - 1 - i;
            if (i != ip) {
                expected.add_to(idx(i, i), idx(i, i), Rational(1, 2));
                expected.add_to(idx(i, ip), idx(i, ip), Rational(-1, 2));
            }
            for (int j = 0; j < N; ++j) {
                const int jp = N - 1 - j;
                if (i < j) expected.add_to(idx(i, j), idx(j, i), 1);
                if (i > j) expected.add_to(idx(ip, i), idx(jp, j), -t.eps[i] * t.eps[j]);
                expected.add_to(idx(ip, i), idx(jp, j), Series(pole.scaled(t.eps[i] * t.eps[j])));
                expected.add_to(idx(i, j), idx(j, i), Series(-pole));
            }
        }
        const TensorOp h1 = rm.base().map([](const Series& s) { return s.h_coeff(1); });
        EXPECT_EQ(h1, expected) << t.label();
        const TensorOp h0 = rm.base().map([](const Series& s) { return s.h_coeff(0); });
        EXPECT_EQ(h0, TensorOp::identity(N, 2)) << t.label();
    }
}

TEST(RMatrix, UnitarityCrossingAndPole) {
    const auto t = lie_type_data(Family::C, 1);
    const RMatrix rm(solve_normalizer(t, 3));
    const MultArg x{Z, {}};
    const TensorOp r = rm.at(x);
    EXPECT_EQ(r * rm.inverse_at(x), TensorOp::identity(2, 2));
    // crossing: R(x) M1 R(x e^{-kappa h})^{t1} M1^{-1} = 1
    const MultArg xs{Z, {{kH, -t.kappa}}};
    const TensorOp crossed = conj_M(t, rm.at(xs).partial_transpose(1, t.eps), 1, 1, 3);
    EXPECT_EQ(r * crossed, TensorOp::identity(2, 2));
    EXPECT_THROW(rm.at(MultArg{Mono{}, {}}), std::domain_error);
}

TEST(TensorOp, TransposeIsInvolutionAndEmbeddingCommutes) {
    const auto t = lie_type_data(Family::D, 2);
    const RMatrix rm(solve_normalizer(t, 2, 4));
    const TensorOp& r = rm.base();
    EXPECT_EQ(r.partial_transpose(1, t.eps).partial_transpose(1, t.eps), r);
    EXPECT_EQ(r.partial_transpose(2, t.eps).partial_transpose(2, t.eps), r);
    const auto ops = rm.constants();
    const TensorOp p12 = ops.P.embed({1, 2}, 3);
    const TensorOp m3 = ops.M.embed({3}, 3);
    EXPECT_EQ(p12 * m3, m3 * p12);
    EXPECT_EQ(ops.P.embed({2, 1}, 2), ops.P);
    EXPECT_EQ(r.embed({2, 1}, 2), ops.P * r * ops.P);
}

TEST(TensorOp, OdotMatchesSumDefinition) {
    // A = e_12 ⊗ e_21 (slots 1 | 2); A odot_LR B = (e_12 ⊗ 1) B (1 ⊗ e_21).
    TensorOp a(2, 2);
    a.set(0 * 2 + 1, 1 * 2 + 0, 1);
    TensorOp b(2, 2);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) b.set(i, j, static_cast<int>(1 + i * 4 + j));
    TensorOp e12(2, 1), e21(2, 1);
    e12.set(0, 1, 1);
    e21.set(1, 0, 1);
    const TensorOp left = e12.embed({1}, 2);
    const TensorOp right = e21.embed({2}, 2);
    EXPECT_EQ(odot(a, b, {1}, {2}, OdotMode::LR), left * b * right);
    EXPECT_EQ(odot(a, b, {1}, {2}, OdotMode::RL), right * b * left);
    EXPECT_THROW(odot(a, b, {1}, {}, OdotMode::LR), std::invalid_argument);
}

}  // namespace
}  // namespace hqva
