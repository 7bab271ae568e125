#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hqva/identity/evaluator.hpp"

namespace hqva {

struct CheckParams {
    Family family = Family::C;
    int n = 1;
    int order = 3;
    Rational level = 0;
    // Formal variable caps; checks read the entries they need by name.
    std::vector<std::pair<std::string, int>> caps;
    int k = 1;
    int m = 1;
    Rational alpha = 0;
    int r_start = 0;
    int r_bound = 16;
    // Negative control: evaluate a deliberately broken variant.
    bool perturb = false;

    int cap(const std::string& name, int fallback) const;
};

using CheckFn = std::function<CheckReport(const CheckParams&, RMatrixSource&)>;

struct CheckEntry {
    std::string name;
    std::string summary;
    CheckFn run;
};

// ybe_hat, crossing_hat, unitarity_hat, ybe_tilde, crossing_tilde, gfunc,
// g_one, csuni, correspondence.
const std::vector<CheckEntry>& identity_checks();

// Script text behind a script-based check, or empty for checks computed
// directly (gfunc, g_one, correspondence).
std::vector<std::string> builtin_scripts(const std::string& name, const CheckParams& params);

// Runs a named identity check; throws std::invalid_argument for an unknown
// name.
CheckReport builtin_check(const std::string& name, const CheckParams& params, RMatrixSource& source);

// Least r >= r_start for which (x - y)^r Rtilde(x e^{u - v + alpha h}/y) has
// coefficients polynomial in x and Laurent in y mod u^a, v^b, h^l; then
// compares the substitution y = x e^{-z0} with x^r (1 - e^{-z0})^r
// Rhat(-z0 - u + v - alpha h). Caps a, b are read from caps "u" and "v";
// l is the order. Exceeding r_bound gives an Inconclusive report.
CheckReport correspondence_check(const CheckParams& params, RMatrixSource& source);

// Multiplies the operators by `factor` r times, r from `start` up, until
// every coefficient passes `acceptable`. Returns r, or nullopt once r would
// exceed `bound`; the operators are scaled in place.
std::optional<int> clear_denominators(const std::vector<TensorOp*>& ops, const RatFunc& factor, int start, int bound,
                                      const std::function<bool(const RatFunc&)>& acceptable);

// Shortens long witness text for reports.
std::string clip_witness(const std::string& s, std::size_t limit = 240);

}  // namespace hqva
