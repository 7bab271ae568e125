#pragma once

#include <memory>
#include <mutex>
#include <vector>

#include "hqva/rmatrix/lie_type.hpp"
#include "hqva/rmatrix/tensor_op.hpp"

namespace hqva {

// Exponential variable used by single-argument base objects (g1, the base
// R-matrix): z.
constexpr int kZ = 0;

// q^a = e^{a h/2} truncated at h^L.
Series q_power(const Rational& a, int L);

struct ConstantOps {
    TensorOp P;
    TensorOp Q;
    TensorOp R;
    TensorOp M;     // diag(q^{bar_i}) on one slot
    TensorOp Minv;  // its inverse
};

ConstantOps build_constant_ops(const LieTypeData& ltd, int L);

// q^{-1}(x-1)(x-xi)R - (q^{-2}-1)(x-xi)P + xi(q^{-2}-1)(x-1)Q with q = e^{h/2},
// xi = e^{-kappa h}.
TensorOp rplus(const LieTypeData& ltd, const ConstantOps& ops, const Series& x, int L);

// Per-h-order rational form of the normalizing series g1(z, h) together with
// an independently computed plain power series in z.
struct Normalizer {
    LieTypeData ltd;
    int order = 0;
    std::vector<RatFunc> g1;             // coefficient of h^l, rational in z
    std::vector<int> denominator_power;  // r_l: power of (1 - z) after reduction
    int z_degree = 0;
    std::vector<std::vector<Rational>> g1_series;  // [l][d]: coefficient of h^l z^d

    Series as_series() const;
};

// Solves g1(z)g1(z e^{-kappa h}) = 1/((1-ze^{-h})(1-ze^{h})(1-ze^{-kappa h})(1-ze^{kappa h}))
// order by order in h, and cross-checks against the coefficient recursion up
// to z^{z_degree}. Throws std::logic_error if the two disagree.
Normalizer solve_normalizer(const LieTypeData& ltd, int L, int z_degree = 10);

// Coefficient recursion for g1 as a double series: result[l][d] is the
// coefficient of h^l z^d.
std::vector<std::vector<Rational>> normalizer_series_oracle(const LieTypeData& ltd, int L, int z_degree);

// Right-hand side of the normalizer equation as a Series in h (rational in z).
Series normalizer_rhs(const LieTypeData& ltd, int L);

// Taylor coefficients at var = 0 of a rational function whose numerator has
// no negative powers of var, up to the given degree. Other variables must be
// absent.
std::vector<Rational> expand_at_zero(const RatFunc& f, int var, int degree);

// Multiplicative argument mono * exp(sum c_v t_v) with t_v capped variables
// (including h).
struct MultArg {
    Mono mono;
    std::vector<std::pair<int, Rational>> shift;

    // exp(-a) for a = sum c_i u_i + sum d_v t_v where Z_i = e^{u_i}.
    static MultArg from_additive(const std::vector<std::pair<int, int>>& spectral,
                                 const std::vector<std::pair<int, Rational>>& capped);
    MultArg inverse() const;
    MultArg operator*(const MultArg& o) const;
    Series as_series(const CapList& caps) const;
};

// e^{(1+2 kappa)h/2} g1(x, h) R^+(x, e^{h/2}): the base object behind both the
// additive R-matrix (x = e^{-u}) and the multiplicative one.
class RMatrix {
public:
    RMatrix(const Normalizer& normalizer);  // NOLINT(google-explicit-constructor)

    const LieTypeData& ltd() const { return ltd_; }
    int order() const { return order_; }
    const ConstantOps& constants() const { return ops_; }
    const Normalizer& normalizer() const { return normalizer_; }
    // Value at x = z.
    const TensorOp& base() const { return base_; }

    // Value at a multiplicative argument. `formal` caps every capped
    // variable other than h appearing in the shift. Throws std::domain_error
    // when the argument makes a denominator vanish (coinciding points).
    TensorOp at(const MultArg& x, const CapList& formal = {}) const;
    // Inverse via unitarity: R(x)^{-1} = P R(x^{-1}) P.
    TensorOp inverse_at(const MultArg& x, const CapList& formal = {}) const;

private:
    const TensorOp& theta_power(int j) const;

    LieTypeData ltd_;
    int order_;
    Normalizer normalizer_;
    ConstantOps ops_;
    TensorOp base_;
    mutable std::mutex mutex_;
    mutable std::vector<std::unique_ptr<TensorOp>> theta_cache_;
};

// M_s X M_s^{-1} (sign = +1) or M_s^{-1} X M_s (sign = -1) on one slot.
TensorOp conj_M(const LieTypeData& ltd, const TensorOp& x, int slot, int sign, int L);

}  // namespace hqva
