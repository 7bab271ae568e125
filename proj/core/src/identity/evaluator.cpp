#include "hqva/identity/evaluator.hpp"

#include <algorithm>
#include <chrono>
#include <map>

namespace hqva {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
        case Verdict::Error: return "error";
    }
    return "error";
}

void CheckReport::set_param(const std::string& key, const std::string& value) {
    for (auto& [k, v] : params) {
        if (k == key) {
            v = value;
            return;
        }
    }
    params.emplace_back(key, value);
}

const std::string* CheckReport::param(const std::string& key) const {
    for (const auto& [k, v] : params) {
        if (k == key) return &v;
    }
    return nullptr;
}

std::shared_ptr<const RMatrix> MemoryRMatrixSource::get(Family family, int n, int order) {
    const auto key = std::make_tuple(family, n, order);
    std::promise<std::shared_ptr<const RMatrix>> promise;
    std::shared_future<std::shared_ptr<const RMatrix>> pending;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            pending = it->second;
        } else {
            cache_.emplace(key, promise.get_future().share());
        }
    }
    if (pending.valid()) return pending.get();
    try {
        auto r = std::make_shared<const RMatrix>(solve_normalizer(lie_type_data(family, n), order));
        promise.set_value(r);
        return r;
    } catch (...) {
        promise.set_exception(std::current_exception());
        std::lock_guard<std::mutex> lock(mutex_);
        cache_.erase(key);
        throw;
    }
}

ResolvedSettings resolve_settings(const dsl::IdentityScript& script, const EvalSettings& settings) {
    const dsl::Declarations& d = script.decls;
    ResolvedSettings r{settings.family.value_or(d.family.value_or(Family::C)), settings.n.value_or(d.rank.value_or(1)),
                       settings.order.value_or(d.order.value_or(3)), settings.level.value_or(d.level.value_or(0)),
                       d.capped};
    for (const auto& [name, cap] : settings.caps) {
        auto it = std::find_if(r.caps.begin(), r.caps.end(), [&](const auto& c) { return c.first == name; });
        if (it != r.caps.end()) it->second = cap;
    }
    if (r.order < 1) throw std::invalid_argument("order must be at least 1");
    return r;
}

namespace {

using dsl::Expr;
using dsl::LinearForm;
using dsl::LinearTerm;
using dsl::MultForm;

class Evaluator {
public:
    Evaluator(const dsl::IdentityScript& script, const RMatrix& rm, const ResolvedSettings& settings)
        : rm_(rm), ltd_(rm.ltd()), L_(rm.order()), m_(script.slot_count), level_(settings.level) {
        const auto& d = script.decls;
        if (d.spectral.size() + d.multiplicative.size() > static_cast<std::size_t>(Mono::kMaxVars)) {
            throw EvaluationError("at most " + std::to_string(Mono::kMaxVars) + " spectral and multiplicative names");
        }
        names_.capped = {"h"};
        for (const auto& n : d.spectral) {
            exp_var_[n] = static_cast<int>(names_.exp.size());
            names_.exp.push_back(n);
        }
        for (const auto& n : d.multiplicative) {
            exp_var_[n] = static_cast<int>(names_.exp.size());
            names_.exp.push_back(n);
        }
        for (const auto& [n, cap] : settings.caps) {
            const int var = static_cast<int>(names_.capped.size());
            capped_var_[n] = var;
            names_.capped.push_back(n);
            formal_.push_back({var, cap});
        }
        capped_var_["h"] = kH;
    }

    const VarNames& names() const { return names_; }

    TensorOp eval(const Expr& e) {
        const std::string key = dsl::print_expr(e);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        TensorOp r = compute(e);
        memo_.emplace(key, r);
        return r;
    }

private:
    TensorOp compute(const Expr& e) {
        using K = Expr::Kind;
        switch (e.kind) {
            case K::One: return TensorOp::identity(ltd_.N, m_);
            case K::RHat:
            case K::RTilde: return rmatrix_atom(e, false);
            case K::M: return rm_.constants().M.embed(e.slots, m_);
            case K::MInv: return rm_.constants().Minv.embed(e.slots, m_);
            case K::P: return rm_.constants().P.embed(e.slots, m_);
            case K::ConjM: return conj_M(ltd_, eval(*e.kids[0]), e.slots[0], 1, L_);
            case K::ConjMInv: return conj_M(ltd_, eval(*e.kids[0]), e.slots[0], -1, L_);
            case K::Inverse: return inverse(*e.kids[0]);
            case K::Transpose: return eval(*e.kids[0]).partial_transpose(e.slots[0], ltd_.eps);
            case K::Product: {
                TensorOp r = eval(*e.kids[0]);
                for (std::size_t i = 1; i < e.kids.size(); ++i) r = r * eval(*e.kids[i]);
                return r;
            }
            case K::Odot:
                return odot(eval(*e.kids[0]), eval(*e.kids[1]), e.left, e.right, e.mode);
            case K::Prefactor: return TensorOp::identity(ltd_.N, m_).scaled(Series(prefactor(e, e.power)));
        }
        throw EvaluationError("unknown expression kind");
    }

    TensorOp inverse(const Expr& e) {
        using K = Expr::Kind;
        switch (e.kind) {
            case K::One: return TensorOp::identity(ltd_.N, m_);
            case K::RHat:
            case K::RTilde: return rmatrix_atom(e, true);
            case K::M: return rm_.constants().Minv.embed(e.slots, m_);
            case K::MInv: return rm_.constants().M.embed(e.slots, m_);
            case K::P: return eval(e);
            case K::ConjM: return conj_M(ltd_, inverse(*e.kids[0]), e.slots[0], 1, L_);
            case K::ConjMInv: return conj_M(ltd_, inverse(*e.kids[0]), e.slots[0], -1, L_);
            case K::Inverse: return eval(*e.kids[0]);
            // A partial transpose does not commute with inversion.
            case K::Transpose: break;
            case K::Product: {
                TensorOp r = inverse(*e.kids.back());
                for (std::size_t i = e.kids.size() - 1; i-- > 0;) r = r * inverse(*e.kids[i]);
                return r;
            }
            case K::Prefactor: return TensorOp::identity(ltd_.N, m_).scaled(Series(prefactor(e, -e.power)));
            case K::Odot: break;
        }
        try {
            return eval(e).inverse_unipotent();
        } catch (const std::exception& ex) {
            throw EvaluationError("cannot invert " + dsl::print_expr(e) + ": " + ex.what());
        }
    }

    // Combined coefficients of a linear form; spectral coefficients must be
    // integers.
    void linear(const LinearForm& f, const std::string& where, std::vector<std::pair<int, int>>& spectral,
                std::vector<std::pair<int, Rational>>& capped) const {
        std::map<int, Rational> sp;
        std::map<int, Rational> cp;
        for (const LinearTerm& t : f.terms) {
            Rational c = t.coeff;
            if (t.symbol == LinearTerm::Symbol::Kappa) c *= ltd_.kappa;
            if (t.symbol == LinearTerm::Symbol::Level) c *= level_;
            if (auto it = exp_var_.find(t.var); it != exp_var_.end()) {
                sp[it->second] += c;
            } else {
                cp[capped_var_.at(t.var)] += c;
            }
        }
        for (const auto& [var, c] : sp) {
            if (c.get_den() != 1) {
                throw EvaluationError("non-integer coefficient of " + names_.exp_name(var) + " in " + where);
            }
            if (c != 0) spectral.emplace_back(var, static_cast<int>(c.get_num().get_si()));
        }
        for (const auto& [var, c] : cp) {
            if (c != 0) capped.emplace_back(var, c);
        }
    }

    MultArg additive_arg(const LinearForm& f, const std::string& where) const {
        std::vector<std::pair<int, int>> spectral;
        std::vector<std::pair<int, Rational>> capped;
        linear(f, where, spectral, capped);
        return MultArg::from_additive(spectral, capped);
    }

    MultArg mult_arg(const MultForm& f, const std::string& where) const {
        MultArg r;
        for (const auto& fac : f.factors) {
            if (fac.name.empty()) {
                r = r * additive_arg(fac.exponent, where).inverse();
            } else {
                r.mono = r.mono * Mono::var(exp_var_.at(fac.name), fac.power);
            }
        }
        return r;
    }

    TensorOp rmatrix_atom(const Expr& e, bool inverted) {
        const std::string text = dsl::print_expr(e);
        const MultArg arg =
            e.kind == Expr::Kind::RHat ? additive_arg(e.additive, text) : mult_arg(e.multiplicative, text);
        try {
            TensorOp r = inverted ? rm_.inverse_at(arg, formal_) : rm_.at(arg, formal_);
            return r.embed(e.slots, m_);
        } catch (const std::domain_error& ex) {
            throw EvaluationError(std::string(ex.what()) + " in " + (inverted ? "inv(" + text + ")" : text));
        }
    }

    RatFunc prefactor(const Expr& e, int power) const {
        const Mono a = mult_arg(e.prefactor_left, "prefactor").mono;
        const Mono b = mult_arg(e.prefactor_right, "prefactor").mono;
        if (a == b) throw EvaluationError("prefactor " + dsl::print_expr(e) + " vanishes");
        // a - b = a (1 - b/a)
        const RatFunc base = RatFunc(Poly::monomial(Mono{}, 1) - Poly::monomial(b * a.inverse(), 1)).times_mono(a);
        RatFunc r(1);
        const RatFunc f = power >= 0 ? base : base.inverse();
        for (int i = 0; i < std::abs(power); ++i) r *= f;
        return r;
    }

    const RMatrix& rm_;
    const LieTypeData& ltd_;
    int L_;
    int m_;
    Rational level_;
    VarNames names_;
    std::map<std::string, int> exp_var_;
    std::map<std::string, int> capped_var_;
    CapList formal_;
    std::map<std::string, TensorOp> memo_;
};

std::string caps_text(const std::vector<std::pair<std::string, int>>& caps) {
    std::string r;
    for (const auto& [n, c] : caps) {
        if (!r.empty()) r += ",";
        r += n + "=" + std::to_string(c);
    }
    return r;
}

}  // namespace

void add_standard_params(CheckReport& report, const ResolvedSettings& s) {
    report.set_param("family", std::string(1, family_letter(s.family)));
    report.set_param("n", std::to_string(s.n));
    report.set_param("L", std::to_string(s.order));
    report.set_param("caps", caps_text(s.caps));
    report.set_param("level", to_string(s.level));
}

EvaluatedSides evaluate_sides(const dsl::IdentityScript& script, const RMatrix& rmatrix,
                              const ResolvedSettings& settings) {
    Evaluator ev(script, rmatrix, settings);
    TensorOp lhs = ev.eval(*script.lhs);
    TensorOp rhs = ev.eval(*script.rhs);
    return {std::move(lhs), std::move(rhs), ev.names()};
}

CheckReport evaluate(const std::string& name, const dsl::IdentityScript& script, RMatrixSource& source,
                     const EvalSettings& settings) {
    const auto start = std::chrono::steady_clock::now();
    CheckReport report;
    report.name = name;
    const ResolvedSettings rs = resolve_settings(script, settings);
    add_standard_params(report, rs);
    try {
        auto rm = source.get(rs.family, rs.n, rs.order);
        const EvaluatedSides sides = evaluate_sides(script, *rm, rs);
        const Residual res = residual(sides.lhs, sides.rhs, sides.names);
        report.residual_count = res.count;
        report.witness = res.witness;
        report.verdict = res.count == 0 ? Verdict::Pass : Verdict::Fail;
    } catch (const EvaluationError& ex) {
        report.verdict = Verdict::Error;
        report.witness = ex.what();
    }
    report.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace hqva
