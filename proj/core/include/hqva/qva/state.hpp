#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "hqva/rmatrix/rmatrix.hpp"

namespace hqva::qva {

// Linear form sum c_v v + d h over named variables. Spectral variables enter
// R-matrices through Z_v = e^{v} and need integer coefficients; capped
// variables are expanded as truncated series.
struct ArgForm {
    std::map<std::string, Rational> terms;
    Rational h = 0;

    static ArgForm var(const std::string& name, const Rational& coeff = 1);
    static ArgForm h_times(const Rational& d);

    Rational coeff(const std::string& name) const;
    bool depends_on(const std::string& name) const { return coeff(name) != 0; }
    // Replaces a variable by a form.
    ArgForm substitute(const std::string& name, const ArgForm& by) const;

    ArgForm operator+(const ArgForm& o) const;
    ArgForm operator-(const ArgForm& o) const;
    ArgForm operator-() const;
    ArgForm scaled(const Rational& c) const;

    std::string to_string() const;

    friend bool operator==(const ArgForm& a, const ArgForm& b) { return a.terms == b.terms && a.h == b.h; }
    friend bool operator!=(const ArgForm& a, const ArgForm& b) { return !(a == b); }
    // Total order used for canonical slot order: terms first, then h.
    friend bool operator<(const ArgForm& a, const ArgForm& b);
};

// d-th derivative in its argument of a generator series, T+(arg) for the
// vacuum module or L+(e^{arg}) for the module of the quantum affine algebra.
struct Symbol {
    ArgForm arg;
    int derivative = 0;

    std::string to_string() const;
    friend bool operator==(const Symbol& a, const Symbol& b) {
        return a.arg == b.arg && a.derivative == b.derivative;
    }
};

using Monomial = std::vector<Symbol>;

std::string monomial_to_string(const Monomial& m);

// Coefficient slots: the auxiliary slots first, then one generator slot per
// symbol, factor by factor. A generator slot carrying e_ji stands for the
// matrix entry t_ij of its symbol, so the state T+_s(a) 1 has coefficient
// P_{s,g}, and left or right multiplication by a matrix on auxiliary slots is
// the operator product.
struct StateTerm {
    std::vector<Monomial> factors;
    TensorOp coeff;
};

// Element of (End C^N)^{⊗aux} ⊗ V^{⊗factors} in the span of free symbol
// monomials. Terms are kept merged by monomials, in key order.
class FreeState {
public:
    FreeState() = default;
    FreeState(int N, int aux, int factors);
    // One term per factor list: identity coefficient, empty monomials.
    static FreeState vacuum(int N, int factors = 1);

    int dim_site() const { return N_; }
    int aux_slots() const { return aux_; }
    int factor_count() const { return factors_; }
    const std::map<std::string, StateTerm>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    // Adds a term, merging with an existing one on the same monomials.
    void add(StateTerm term);

    // Effective caps after derivatives in capped variables.
    const std::vector<std::pair<std::string, int>>& cap_record() const { return caps_; }
    void set_cap_record(std::vector<std::pair<std::string, int>> caps) { caps_ = std::move(caps); }
    void reduce_cap(const std::string& name);

    FreeState operator+(const FreeState& o) const;
    FreeState operator-(const FreeState& o) const;
    FreeState scaled(const Series& s) const;

    std::string to_string(const VarNames& names = VarNames::defaults()) const;

    static std::string key(const std::vector<Monomial>& factors);

private:
    int N_ = 0;
    int aux_ = 0;
    int factors_ = 0;
    std::map<std::string, StateTerm> terms_;
    std::vector<std::pair<std::string, int>> caps_;
};

int generator_slots(const std::vector<Monomial>& factors);

// Nonzero coefficient entries of a - b over all monomials, plus a witness.
Residual state_residual(const FreeState& a, const FreeState& b, const VarNames& names = VarNames::defaults());

// R-matrix evaluation for states: the solved R-matrix, the level c and the
// variable declarations. Spectral variables are exact in Z = e^{v}; capped
// variables carry their caps.
class QvaContext {
public:
    QvaContext(std::shared_ptr<const RMatrix> rmatrix, Rational level, std::vector<std::string> spectral,
               std::vector<std::pair<std::string, int>> capped = {});

    const RMatrix& rmatrix() const { return *rm_; }
    const LieTypeData& ltd() const { return rm_->ltd(); }
    int N() const { return rm_->ltd().N; }
    int order() const { return rm_->order(); }
    const Rational& level() const { return level_; }
    const Rational& kappa() const { return rm_->ltd().kappa; }
    const VarNames& names() const { return names_; }
    const CapList& formal() const { return formal_; }
    bool is_spectral(const std::string& name) const;
    bool is_capped(const std::string& name) const;
    int spectral_index(const std::string& name) const;
    int capped_index(const std::string& name) const;

    // Rhat(a), and its inverse via unitarity.
    TensorOp rhat(const ArgForm& a) const;
    TensorOp rhat_inverse(const ArgForm& a) const;
    // Rtilde(e^{a}) = Rhat(-a).
    TensorOp rtilde(const ArgForm& log_x) const { return rhat(-log_x); }
    TensorOp rtilde_inverse(const ArgForm& log_x) const { return rhat_inverse(-log_x); }

    const TensorOp& M() const { return rm_->constants().M; }
    const TensorOp& Minv() const { return rm_->constants().Minv; }
    const TensorOp& P() const { return rm_->constants().P; }

private:
    MultArg mult_arg(const ArgForm& a) const;
    TensorOp cached(const ArgForm& a, bool inverted) const;

    std::shared_ptr<const RMatrix> rm_;
    Rational level_;
    std::vector<std::string> spectral_;
    std::vector<std::pair<std::string, int>> capped_;
    VarNames names_;
    CapList formal_;
    mutable std::mutex mutex_;
    mutable std::map<std::string, TensorOp> memo_;
};

}  // namespace hqva::qva
