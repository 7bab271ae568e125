#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hqva/exact/poly.hpp"
#include "hqva/rmatrix/lie_type.hpp"
#include "hqva/rmatrix/tensor_op.hpp"

namespace hqva::dsl {

// One term of a linear form: coeff * [kappa | c] * var.
struct LinearTerm {
    enum class Symbol { None, Kappa, Level };
    std::string var;
    Rational coeff = 1;
    Symbol symbol = Symbol::None;

    friend bool operator==(const LinearTerm&, const LinearTerm&) = default;
};

// Additive spectral argument such as "-u + v + 1/2*c*h". Terms are kept in
// source order; like terms are combined only at evaluation.
struct LinearForm {
    std::vector<LinearTerm> terms;

    friend bool operator==(const LinearForm&, const LinearForm&) = default;
};

// Multiplicative argument such as "x*exp(u - v)/y": a product of declared
// multiplicative names raised to integer powers and exponentials of linear
// forms.
struct MultFactor {
    std::string name;  // empty for an exp(...) factor
    int power = 1;
    LinearForm exponent;

    friend bool operator==(const MultFactor&, const MultFactor&) = default;
};

struct MultForm {
    std::vector<MultFactor> factors;

    friend bool operator==(const MultForm&, const MultForm&) = default;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind {
        One,
        RHat,       // slots, additive
        RTilde,     // slots, multiplicative
        M,          // slots[0]
        MInv,       // slots[0]
        P,          // slots[0], slots[1]
        ConjM,      // slots[0], kids[0]
        ConjMInv,   // slots[0], kids[0]
        Inverse,    // kids[0]
        Transpose,  // slots[0], kids[0]
        Product,    // kids
        Odot,       // kids[0], kids[1], left, right, mode
        Prefactor,  // prefactor_left - prefactor_right, power
    };

    Kind kind = Kind::One;
    std::vector<int> slots;
    LinearForm additive;
    MultForm multiplicative;
    MultForm prefactor_left;
    MultForm prefactor_right;
    int power = 1;
    std::vector<ExprPtr> kids;
    std::vector<int> left;
    std::vector<int> right;
    OdotMode mode = OdotMode::LR;
    int line = 0;
    int column = 0;
};

bool same_expr(const Expr& a, const Expr& b);

struct Declarations {
    std::optional<Family> family;
    std::optional<int> rank;
    std::optional<int> order;
    std::optional<Rational> level;
    std::optional<int> slots;
    std::vector<std::string> spectral;
    std::vector<std::string> multiplicative;
    std::vector<std::pair<std::string, int>> capped;

    friend bool operator==(const Declarations&, const Declarations&) = default;
};

struct IdentityScript {
    Declarations decls;
    ExprPtr lhs;
    ExprPtr rhs;
    // Common slot count of both sides.
    int slot_count = 2;
};

bool same_script(const IdentityScript& a, const IdentityScript& b);

struct ParseError : std::runtime_error {
    ParseError(int line, int column, const std::string& what);
    int line;
    int column;
};

// Throws ParseError with the 1-based line and column of the offending token.
// Spectral names default to u, v, w and multiplicative names to x, y when
// the script declares none.
IdentityScript parse_script(const std::string& text);

// Canonical text; parse_script(print_script(s)) reproduces s.
std::string print_script(const IdentityScript& script);
std::string print_expr(const Expr& e);
std::string print_linear(const LinearForm& f);
std::string print_mult(const MultForm& f);

}  // namespace hqva::dsl
