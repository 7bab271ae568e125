#include <gtest/gtest.h>

#include "hqva/qva/operators.hpp"
#include "unit/generators.hpp"

using namespace hqva;
using namespace hqva::qva;

namespace {

std::shared_ptr<const RMatrix> rmatrix_c1(int L) {
    static std::map<int, std::shared_ptr<const RMatrix>> cache;
    auto& r = cache[L];
    if (!r) r = std::make_shared<RMatrix>(solve_normalizer(lie_type_data(Family::C, 1), L, 6));
    return r;
}

ArgForm v(const std::string& n) { return ArgForm::var(n); }
Symbol sym(const ArgForm& a) { return Symbol{a, 0}; }

void expect_equal(const FreeState& a, const FreeState& b, const QvaContext& ctx) {
    const Residual r = state_residual(a, b, ctx.names());
    EXPECT_EQ(r.count, 0u) << r.witness;
}

// Monomials of a few symbols over the spectral variables.
Monomial mono_of(std::initializer_list<const char*> names) {
    Monomial m;
    for (const char* n : names) m.push_back(sym(v(n)));
    return m;
}

}  // namespace

TEST(TensorContract, MergeIsMatrixProduct) {
    // e_01 ⊗ e_11 merged -> e_01
    TensorOp units(2, 2);
    units.set(0 * 2 + 1, 1 * 2 + 1, 1);
    TensorOp expect(2, 1);
    expect.set(0, 1, 1);
    EXPECT_EQ(merge_slots(units, 1, 2), expect);
    // e_11 ⊗ e_01: the product e_11 e_01 vanishes
    TensorOp other(2, 2);
    other.set(1 * 2 + 0, 1 * 2 + 1, 1);
    EXPECT_TRUE(merge_slots(other, 1, 2).is_zero());
    EXPECT_EQ(merge_slots(other, 2, 1), expect);
}

TEST(TensorContract, BasisStateActsAsSubstitution) {
    // contract(P_{1,2}, Y, 1) = Y with the generator slot renamed.
    const auto rm = rmatrix_c1(2);
    const TensorOp p = rm->constants().P;
    const TensorOp y = rm->base().embed({1, 2}, 3) * p.embed({2, 3}, 3);
    EXPECT_EQ(contract(p, y, 1), y);
}

class QvaFixture : public ::testing::Test {
protected:
    QvaContext ctx{rmatrix_c1(3), Rational(1, 2), {"u", "v", "w", "z", "y"}};
};

TEST_F(QvaFixture, TMinusFixesVacuum) {
    const FreeState vac = FreeState::vacuum(2);
    expect_equal(apply_tminus(ctx, vac, v("u"), 1), insert_aux(vac, 1), ctx);
    expect_equal(apply_tminus_inv(ctx, vac, v("u"), 1), insert_aux(vac, 1), ctx);
}

TEST_F(QvaFixture, CrossingDisplayInvertsTMinus) {
    for (const auto& m : {mono_of({"v"}), mono_of({"v", "w"})}) {
        const BasisImage img = tminus_image(ctx, m, v("u"));
        const BasisImage inv = tminus_inv_image(ctx, m, v("u"));
        EXPECT_EQ(inv.coeff, invert_fresh_action(img.coeff, static_cast<int>(m.size())));
    }
}

TEST_F(QvaFixture, TMinusRoundTrip) {
    const FreeState w = basis_state(2, mono_of({"v", "w"}));
    const FreeState a = apply_tminus(ctx, apply_tminus_inv(ctx, w, v("u"), 1), v("u"), 1);
    expect_equal(merge_aux(a, 1, 2), insert_aux(w, 1), ctx);
}

TEST_F(QvaFixture, TMinusRTT) {
    const FreeState w = basis_state(2, mono_of({"w"}));
    // Rhat_12(u - v) T-_1(u) T-_2(v) = T-_2(v) T-_1(u) Rhat_12(u - v)
    const FreeState lhs = left_multiply(ctx.rhat(v("u") - v("v")), {1, 2},
                                        apply_tminus(ctx, apply_tminus(ctx, w, v("v"), 1), v("u"), 1));
    const FreeState rhs = right_multiply(apply_tminus(ctx, apply_tminus(ctx, w, v("u"), 1), v("v"), 2),
                                         ctx.rhat(v("u") - v("v")), {1, 2});
    expect_equal(lhs, rhs, ctx);
}

TEST_F(QvaFixture, TMinusCrossing) {
    const FreeState w = basis_state(2, mono_of({"w"}));
    FreeState s = apply_tminus(ctx, w, v("u") + ArgForm::h_times(ctx.kappa()), 1);
    s = transpose_aux(s, 1, ctx.ltd().eps);
    s = right_multiply(left_multiply(ctx.M(), {1}, s), ctx.Minv(), {1});
    s = apply_tminus(ctx, s, v("u"), 1);
    expect_equal(merge_aux(s, 1, 2), insert_aux(w, 1), ctx);
}

TEST_F(QvaFixture, MixedRelation) {
    const FreeState w = basis_state(2, mono_of({"w"}));
    const ArgForm half = ArgForm::h_times(ctx.level() / 2);
    // Rhat_12(u - v - hc/2) T+_1(u) T-_2(v) = T-_2(v) T+_1(u) Rhat_12(u - v + hc/2)
    const FreeState lhs = left_multiply(ctx.rhat(v("u") - v("v") - half), {1, 2},
                                        apply_tplus(insert_aux(apply_tminus(ctx, w, v("v"), 1), 1), v("u"), 1));
    const FreeState rhs = right_multiply(apply_tminus(ctx, apply_tplus(insert_aux(w, 1), v("u"), 1), v("v"), 2),
                                         ctx.rhat(v("u") - v("v") + half), {1, 2});
    expect_equal(lhs, rhs, ctx);
}

TEST_F(QvaFixture, MixedRelationFailsWithoutLevelShift) {
    const FreeState w = basis_state(2, mono_of({"w"}));
    const FreeState lhs = left_multiply(ctx.rhat(v("u") - v("v")), {1, 2},
                                        apply_tplus(insert_aux(apply_tminus(ctx, w, v("v"), 1), 1), v("u"), 1));
    const FreeState rhs = right_multiply(apply_tminus(ctx, apply_tplus(insert_aux(w, 1), v("u"), 1), v("v"), 2),
                                         ctx.rhat(v("u") - v("v")), {1, 2});
    EXPECT_GT(state_residual(lhs, rhs).count, 0u);
}

namespace {

FreeState two_factors(int N, const Monomial& a, const Monomial& b) {
    return tensor(basis_state(N, a), basis_state(N, b));
}

}  // namespace

TEST_F(QvaFixture, BraidingShift) {
    const FreeState s = braiding_s(ctx, two_factors(2, mono_of({"u"}), mono_of({"v"})), v("z"));
    const FreeState r = translate_d(s, 0) - differentiate(ctx, s, "u") + differentiate(ctx, s, "z");
    EXPECT_TRUE(r.is_zero()) << r.to_string(ctx.names());
}

TEST_F(QvaFixture, BraidingUnitarity) {
    const FreeState s0 = two_factors(2, mono_of({"u"}), mono_of({"v"}));
    const FreeState back =
        braiding_s(ctx, swap_factors(braiding_s(ctx, swap_factors(s0, 0, 1), -v("z")), 0, 1), v("z"));
    expect_equal(back, s0, ctx);
}

TEST_F(QvaFixture, BraidingYangBaxter) {
    const FreeState s0 = tensor(two_factors(2, mono_of({"u"}), mono_of({"v"})), basis_state(2, mono_of({"w"})));
    const ArgForm z1 = v("z");
    const ArgForm z2 = v("y");
    const FreeState lhs = braiding_s(ctx, braiding_s(ctx, braiding_s(ctx, s0, z2, 1, 2), z1 + z2, 0, 2), z1, 0, 1);
    const FreeState rhs = braiding_s(ctx, braiding_s(ctx, braiding_s(ctx, s0, z1, 0, 1), z1 + z2, 0, 2), z2, 1, 2);
    expect_equal(lhs, rhs, ctx);
}

TEST_F(QvaFixture, Hexagon) {
    const FreeState s0 = tensor(two_factors(2, mono_of({"u"}), mono_of({"v"})), basis_state(2, mono_of({"w"})));
    const ArgForm z1 = v("z");
    const ArgForm z2 = v("y");
    const FreeState lhs = braiding_s(ctx, vertex_y(ctx, s0, z2, 0), z1, 0, 1);
    const FreeState rhs = vertex_y(ctx, braiding_s(ctx, braiding_s(ctx, s0, z1 + z2, 0, 2), z1, 1, 2), z2, 0);
    expect_equal(lhs, rhs, ctx);
}

#include "hqva/qva/module_checks.hpp"

namespace {

MemoryRMatrixSource& shared_source() {
    static MemoryRMatrixSource s;
    return s;
}

}  // namespace

TEST(ModuleChecks, WeakAssociativityDirectMatchesReordered) {
    QvaContext ctx(rmatrix_c1(2), 0, {"z1", "z2", "z0"}, {{"u1", 2}, {"v1", 2}});
    const auto sides = weak_assoc_sides(ctx, 1, 1);
    EXPECT_EQ(state_residual(sides.direct, sides.reordered).count, 0u);
}

TEST(ModuleChecks, CatalogPassesAndPerturbedFails) {
    for (const auto& e : module_checks()) {
        CheckParams p;
        p.order = e.name == "weak_assoc_chain" ? 2 : 3;
        p.level = e.name == "weak_assoc_chain" ? Rational(0) : Rational(1);
        const CheckReport ok = e.run(p, shared_source());
        EXPECT_EQ(ok.verdict, Verdict::Pass) << e.name << ": " << ok.witness;
        p.perturb = true;
        const CheckReport bad = e.run(p, shared_source());
        EXPECT_EQ(bad.verdict, Verdict::Fail) << e.name;
    }
}

TEST_F(QvaFixture, VertexOperatorOnVacuumAndUnit) {
    const FreeState w = basis_state(2, mono_of({"v", "w"}));
    // Y(1, z) w = w
    expect_equal(vertex_y(ctx, Monomial{}, v("z"), w), w, ctx);
    // Y(T+(u) 1, z) 1 = T+(z + u) 1
    expect_equal(vertex_y(ctx, mono_of({"u"}), v("z"), FreeState::vacuum(2)),
                 basis_state(2, Monomial{sym(v("z") + v("u"))}), ctx);
}

TEST_F(QvaFixture, VertexOperatorOnOneSymbolMatchesInverseChain) {
    // Y(T+(u) 1, z) T+(w) 1 = T+_1(z + u) T-_1(z + u + hc/2)^{-1} T+_2(w) 1, the
    // inverse taken by inverting the T- action directly.
    const ArgForm a = v("z") + v("u");
    const FreeState w = basis_state(2, mono_of({"w"}));
    const FreeState inv = act(w, {0}, {1}, [&](const std::vector<Monomial>& in) {
        BasisImage img = tminus_image(ctx, in[0], a + ArgForm::h_times(ctx.level() / 2));
        img.coeff = invert_fresh_action(img.coeff, 1);
        return img;
    });
    expect_equal(vertex_y(ctx, mono_of({"u"}), v("z"), w), apply_tplus(inv, a, 1), ctx);
}

TEST_F(QvaFixture, TranslationKillsVacuumAndDifferentiatesSymbols) {
    EXPECT_TRUE(translate_d(FreeState::vacuum(2)).is_zero());
    const FreeState s = basis_state(2, mono_of({"u", "v"}));
    const FreeState d = translate_d(s);
    EXPECT_EQ(d.terms().size(), 2u);
    // total derivative of a state built from symbols only: d/du + d/dv = D
    expect_equal(differentiate(ctx, s, "u") + differentiate(ctx, s, "v"), d, ctx);
}

TEST_F(QvaFixture, BraidingOnVacuaIsIdentity) {
    const FreeState s0 = tensor(FreeState::vacuum(2), FreeState::vacuum(2));
    expect_equal(braiding_s(ctx, s0, v("z")), s0, ctx);
}

TEST_F(QvaFixture, BraidingRejectsDerivativeSymbols) {
    const FreeState s0 = tensor(translate_d(basis_state(2, mono_of({"u"}))), basis_state(2, mono_of({"v"})));
    EXPECT_THROW(braiding_s(ctx, s0, v("z")), UnsupportedAction);
}

TEST_F(QvaFixture, RttSwapTwiceIsIdentity) {
    const FreeState s = basis_state(2, mono_of({"u", "v", "w"}));
    for (int i = 0; i < 2; ++i) expect_equal(rtt_swap(ctx, rtt_swap(ctx, s, i), i), s, ctx);
    EXPECT_THROW(rtt_swap(ctx, s, 2), std::invalid_argument);
    const FreeState clash = basis_state(2, mono_of({"u", "u"}));
    EXPECT_THROW(rtt_swap(ctx, clash, 0), std::domain_error);
}

TEST_F(QvaFixture, CanonicalizeIsIdempotent) {
    const FreeState s = basis_state(2, mono_of({"w", "u", "v"}));
    const FreeState c = canonicalize(ctx, s);
    ASSERT_EQ(c.terms().size(), 1u);
    EXPECT_EQ(c.terms().begin()->first, "[(u) (v) (w)]");
    expect_equal(canonicalize(ctx, c), c, ctx);
}

TEST(QvaConsistency, SwappedStatesAgreeUnderTMinus) {
    // T+(u)T+(v) 1 and its swapped form are one module element, so the T-
    // action computed from either representative agrees after sorting.
    QvaContext ctx(rmatrix_c1(2), Rational(1), {"u", "v", "y"});
    const FreeState s = basis_state(2, mono_of({"v", "u"}));
    const FreeState swapped = rtt_swap(ctx, s, 0);
    const FreeState a = canonicalize(ctx, apply_tminus(ctx, s, v("y"), 1));
    const FreeState b = canonicalize(ctx, apply_tminus(ctx, swapped, v("y"), 1));
    expect_equal(a, b, ctx);
    expect_equal(canonicalize(ctx, s), swapped, ctx);
}

class QvaAffineFixture : public QvaFixture {};

TEST_F(QvaAffineFixture, LMinusFixesVacuumAndInverts) {
    const FreeState vac = FreeState::vacuum(2);
    expect_equal(apply_lminus(ctx, vac, v("y"), 1), insert_aux(vac, 1), ctx);
    const FreeState w = basis_state(2, mono_of({"v", "w"}));
    const FreeState a = apply_lminus(ctx, apply_lminus_inv(ctx, w, v("y"), 1), v("y"), 1);
    expect_equal(merge_aux(a, 1, 2), insert_aux(w, 1), ctx);
}

TEST_F(QvaAffineFixture, PhiOnUnitAndVacuum) {
    const FreeState w = apply_lplus(FreeState::vacuum(2), v("w"), 1);
    expect_equal(phi_yw(ctx, Monomial{}, v("z"), w), w, ctx);
    expect_equal(phi_yw(ctx, mono_of({"u"}), v("z"), FreeState::vacuum(2)),
                 basis_state(2, Monomial{sym(v("z") - v("u"))}), ctx);
}

TEST_F(QvaAffineFixture, LMinusRLL) {
    // Rtilde_12(x/y) L-_1(x) L-_2(y) = L-_2(y) L-_1(x) Rtilde_12(x/y), x = e^{u}, y = e^{v}
    const FreeState w = basis_state(2, mono_of({"w"}));
    const FreeState lhs = left_multiply(ctx.rtilde(v("u") - v("v")), {1, 2},
                                        apply_lminus(ctx, apply_lminus(ctx, w, v("v"), 1), v("u"), 1));
    const FreeState rhs = right_multiply(apply_lminus(ctx, apply_lminus(ctx, w, v("u"), 1), v("v"), 2),
                                         ctx.rtilde(v("u") - v("v")), {1, 2});
    expect_equal(lhs, rhs, ctx);
}

TEST(QvaProperties, RandomSwapsPreserveTheElement) {
    // Seeded: sorting after random adjacent swaps returns the sorted form.
    QvaContext ctx(rmatrix_c1(2), Rational(0), {"a", "b", "c"});
    const FreeState start = basis_state(2, mono_of({"a", "b", "c"}));
    hqva::testing::Gen gen(7);
    for (int trial = 0; trial < 6; ++trial) {
        FreeState s = start;
        const int steps = gen.integer(1, 4);
        for (int i = 0; i < steps; ++i) s = rtt_swap(ctx, s, gen.integer(0, 1));
        expect_equal(canonicalize(ctx, s), start, ctx);
    }
}

TEST(QvaFrozen, TMinusOnOneSymbolAtLevelZero) {
    // Oracle: slots (n, aux, generator); Rhat_{aux,n}(v - u) P_{aux,gen} Rhat_{aux,n}(v - u)^{-1}
    QvaContext ctx(rmatrix_c1(2), Rational(0), {"u", "v"});
    const FreeState s = apply_tminus(ctx, basis_state(2, mono_of({"v"})), v("u"), 1);
    ASSERT_EQ(s.terms().size(), 1u);
    const TensorOp& c = s.terms().begin()->second.coeff;
    const ArgForm a = v("v") - v("u");
    const TensorOp oracle = ctx.rhat(a).embed({2, 1}, 3) * TensorOp::flip(2).embed({2, 3}, 3) *
                            ctx.rhat_inverse(a).embed({2, 1}, 3);
    EXPECT_EQ(c, oracle);
    // frozen entries; flat indices over (n, aux, gen)
    EXPECT_EQ(c.at(1, 2).to_string(ctx.names()), "{h<2| [0] 1; [1] (-1 - u*v^-1)/((1 - u*v^-1)) }");
    EXPECT_EQ(c.at(1, 4).to_string(ctx.names()), "{h<2| [1] (2)/((1 - u*v^-1)) }");
    EXPECT_EQ(c.at(4, 1).to_string(ctx.names()), "{h<2| [1] (-2*u*v^-1)/((1 - u*v^-1)) }");
}
