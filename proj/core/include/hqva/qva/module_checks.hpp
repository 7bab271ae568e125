#pragma once

#include <vector>

#include "hqva/identity/checks.hpp"
#include "hqva/qva/operators.hpp"

namespace hqva::qva {

// tminus_vacuum, tminus_roundtrip, rtt_minus, rel_minus, mixed, s_shift,
// s_unitarity, s_ybe, hexagon, weak_assoc_chain. Sizes come from
// CheckParams::k and ::m (1 or 2); weak_assoc_chain reads caps "u" and "v".
const std::vector<CheckEntry>& module_checks();

// Throws std::invalid_argument for an unknown name.
CheckReport module_check(const std::string& name, const CheckParams& params, RMatrixSource& source);

// Multiplies every coefficient of a state by a scalar.
FreeState scale_state(const FreeState& s, const Series& factor);

// The two sides of the weak associativity chain for T+_[k](u) 1 and
// T+_[m](v) 1 on the vacuum module of the quantum affine algebra:
// Y_W(a, z1) Y_W(b, z2) 1 directly, and after moving the L- inverses to the
// right with the A-matrix and the RLL relation. Spectral variables z1, z2,
// z0; capped u1.., v1...
struct WeakAssocSides {
    FreeState direct;
    FreeState reordered;
};
WeakAssocSides weak_assoc_sides(const QvaContext& ctx, int k, int m);

}  // namespace hqva::qva
