#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "hqva/qva/state.hpp"

namespace hqva::qva {

// Raised for actions outside the supported symbol calculus, such as the
// braiding or T- on derivative symbols.
struct UnsupportedAction : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Image of an action on the symbols of some factors: coefficient on
// (input generator slots, new auxiliary slots, output generator slots) and the
// output monomials.
struct BasisImage {
    TensorOp coeff;
    std::vector<Monomial> outputs;
};

using BasisFn = std::function<BasisImage(const std::vector<Monomial>&)>;

// Applies a symbol action to the listed factors of every term. New auxiliary
// slots land at the given 1-based positions of the result. Outputs replace
// the listed factors in order; surplus listed factors are dropped.
FreeState act(const FreeState& s, const std::vector<int>& factors, const std::vector<int>& new_aux_positions,
              const BasisFn& basis);

// Basis state of one monomial with its generator slots used as auxiliary
// slots: coefficient prod_i P_{i, k+i}.
FreeState basis_state(int N, const Monomial& m);

FreeState tensor(const FreeState& a, const FreeState& b);
// Identity on a fresh auxiliary slot at `position`.
FreeState insert_aux(const FreeState& s, int position);
// op (given on op.slots() auxiliary slots, placed at `slots`) times s, or s
// times op.
FreeState left_multiply(const TensorOp& op, const std::vector<int>& slots, const FreeState& s);
FreeState right_multiply(const FreeState& s, const TensorOp& op, const std::vector<int>& slots);
FreeState transpose_aux(const FreeState& s, int slot, const std::vector<int>& eps);
// Matrix product of two auxiliary slots, `into` on the left.
FreeState merge_aux(const FreeState& s, int into, int from);
FreeState swap_factors(const FreeState& s, int i, int j);

// T+(arg) on auxiliary slot `slot` of factor `factor`; slot = aux + 1 opens
// a fresh slot. The symbol goes to the front of the monomial.
FreeState apply_tplus(const FreeState& s, const ArgForm& arg, int slot, int factor = 0);

// T-_{n}(arg) with n a fresh auxiliary slot at `position`:
// Rhat_{1n}(-u+v_1-hc/2)...Rhat_{kn}(-u+v_k-hc/2) T+(v) Rhat_{kn}(-u+v_k+hc/2)^{-1}...Rhat_{1n}(-u+v_1+hc/2)^{-1}.
FreeState apply_tminus(const QvaContext& ctx, const FreeState& s, const ArgForm& arg, int position,
                       int factor = 0);
// The inverse through the crossing-form display:
// M_1^{-1}..M_k^{-1} (Rhat_{kn}(-u+v_k-hc/2-kappa h)^{t_k}...Rhat_{1n}(..)^{t_1}) odot_LR
// (M_1..M_k T+(v) Rhat_{1n}(-u+v_1+hc/2)...Rhat_{kn}(-u+v_k+hc/2)).
FreeState apply_tminus_inv(const QvaContext& ctx, const FreeState& s, const ArgForm& arg, int position,
                           int factor = 0);

BasisImage tminus_image(const QvaContext& ctx, const Monomial& m, const ArgForm& arg);
BasisImage tminus_inv_image(const QvaContext& ctx, const Monomial& m, const ArgForm& arg);

// Inverts an action that adds one auxiliary slot and keeps the monomial, as
// a matrix over End C^N whose entries act on the k-symbol span. The image
// coefficient has slots (G, n, G'). Neumann series; the h^0 part must be the
// identity.
TensorOp invert_fresh_action(const TensorOp& image, int k);

// Y(a, z) b for the states in factors f and f + 1, which merge into one:
// Y(T+_[k](u) 1, z) = T+_[k](z + u) T-_[k](z + u + hc/2)^{-1}.
FreeState vertex_y(const QvaContext& ctx, const FreeState& s, const ArgForm& z, int factor = 0);
// Y(T+_[k](u) 1, z) w with the k new auxiliary slots in front.
FreeState vertex_y(const QvaContext& ctx, const Monomial& u, const ArgForm& z, const FreeState& w);

// S_{ij}(z) on factors i, j (0-based).
FreeState braiding_s(const QvaContext& ctx, const FreeState& s, const ArgForm& z, int i = 0, int j = 1);
BasisImage braiding_image(const QvaContext& ctx, const Monomial& u, const Monomial& v, const ArgForm& z);

// D on one factor: the sum of first derivatives of its symbols.
FreeState translate_d(const FreeState& s, int factor = 0);
// Total derivative in a variable: coefficients (Z d/dZ for spectral, d/dt for
// capped, recording the lost cap) plus symbol derivatives by the chain rule.
FreeState differentiate(const QvaContext& ctx, const FreeState& s, const std::string& var);
// Coefficient part only.
FreeState differentiate_coefficients(const QvaContext& ctx, const FreeState& s, const std::string& var);

// T+(a_i) T+(a_{i+1}) -> Rhat(a_i - a_{i+1})^{-1} T+(a_{i+1}) T+(a_i) Rhat(a_i - a_{i+1})
// at 0-based position i of a factor.
FreeState rtt_swap(const QvaContext& ctx, const FreeState& s, int i, int factor = 0);
// Sorts every monomial by adjacent swaps into ascending ArgForm order.
FreeState canonicalize(const QvaContext& ctx, const FreeState& s);

// Renames a variable in symbol arguments and substitutes in coefficients;
// used for z1 = z2 e^{-z0}. `by` must be a spectral form with integer
// coefficients.
FreeState substitute_spectral(const QvaContext& ctx, const FreeState& s, const std::string& var, const ArgForm& by);

// Module of the quantum affine algebra generated by L+ from a vacuum with
// L- 1 = 1. Symbol arguments are logarithms: the symbol with arg a is
// L+(e^{a}).
FreeState apply_lplus(const FreeState& s, const ArgForm& log_x, int slot, int factor = 0);
// L-_{n}(y) L+_[k](x) 1 = Rtilde_{1n}(x_1 e^{hc/2}/y)...Rtilde_{kn}(x_k e^{hc/2}/y) L+(x)
// Rtilde_{kn}(x_k e^{-hc/2}/y)^{-1}...Rtilde_{1n}(x_1 e^{-hc/2}/y)^{-1}.
FreeState apply_lminus(const QvaContext& ctx, const FreeState& s, const ArgForm& log_y, int position,
                       int factor = 0);
// Inverse by inverting the L- action on the symbol span.
FreeState apply_lminus_inv(const QvaContext& ctx, const FreeState& s, const ArgForm& log_y, int position,
                           int factor = 0);
BasisImage lminus_image(const QvaContext& ctx, const Monomial& m, const ArgForm& log_y);

// Y_W(a, z) w for a in factor f (vacuum module) and w in factor f + 1:
// Y_W(T+_[k](u), z) = L+_[k](x)|_{x_i = z e^{-u_i}} L-_[k](x e^{-hc/2})^{-1}|_{x_i = z e^{-u_i}},
// with z given by its logarithm.
FreeState phi_yw(const QvaContext& ctx, const FreeState& s, const ArgForm& log_z, int factor = 0);
FreeState phi_yw(const QvaContext& ctx, const Monomial& u, const ArgForm& log_z, const FreeState& w);

}  // namespace hqva::qva
