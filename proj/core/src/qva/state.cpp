#include "hqva/qva/state.hpp"

#include <algorithm>
#include <stdexcept>

namespace hqva::qva {

ArgForm ArgForm::var(const std::string& name, const Rational& coeff) {
    ArgForm a;
    if (coeff != 0) a.terms[name] = coeff;
    return a;
}

ArgForm ArgForm::h_times(const Rational& d) {
    ArgForm a;
    a.h = d;
    return a;
}

Rational ArgForm::coeff(const std::string& name) const {
    auto it = terms.find(name);
    return it == terms.end() ? Rational(0) : it->second;
}

ArgForm ArgForm::substitute(const std::string& name, const ArgForm& by) const {
    const Rational c = coeff(name);
    if (c == 0) return *this;
    ArgForm r = *this;
    r.terms.erase(name);
    return r + by.scaled(c);
}

ArgForm ArgForm::operator+(const ArgForm& o) const {
    ArgForm r = *this;
    for (const auto& [n, c] : o.terms) {
        Rational& t = r.terms[n];
        t += c;
        if (t == 0) r.terms.erase(n);
    }
    r.h += o.h;
    return r;
}

ArgForm ArgForm::operator-(const ArgForm& o) const { return *this + (-o); }

ArgForm ArgForm::operator-() const { return scaled(-1); }

ArgForm ArgForm::scaled(const Rational& c) const {
    ArgForm r;
    if (c == 0) return r;
    for (const auto& [n, v] : terms) r.terms[n] = v * c;
    r.h = h * c;
    return r;
}

std::string ArgForm::to_string() const {
    std::string s;
    auto put = [&](const Rational& c, const std::string& name) {
        const bool neg = c < 0;
        const Rational a = neg ? Rational(-c) : c;
        if (s.empty()) {
            s += neg ? "-" : "";
        } else {
            s += neg ? " - " : " + ";
        }
        if (a != 1) s += hqva::to_string(a) + "*";
        s += name;
    };
    for (const auto& [n, c] : terms) put(c, n);
    if (h != 0) put(h, "h");
    return s.empty() ? "0" : s;
}

bool operator<(const ArgForm& a, const ArgForm& b) {
    if (a.terms != b.terms) return a.terms < b.terms;
    return a.h < b.h;
}

std::string Symbol::to_string() const {
    std::string s = "(" + arg.to_string() + ")";
    for (int i = 0; i < derivative; ++i) s += "'";
    return s;
}

std::string monomial_to_string(const Monomial& m) {
    std::string s = "[";
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i) s += " ";
        s += m[i].to_string();
    }
    return s + "]";
}

int generator_slots(const std::vector<Monomial>& factors) {
    int k = 0;
    for (const auto& m : factors) k += static_cast<int>(m.size());
    return k;
}

FreeState::FreeState(int N, int aux, int factors) : N_(N), aux_(aux), factors_(factors) {
    if (N < 1 || aux < 0 || factors < 1) throw std::invalid_argument("bad state shape");
}

FreeState FreeState::vacuum(int N, int factors) {
    FreeState s(N, 0, factors);
    s.add({std::vector<Monomial>(static_cast<std::size_t>(factors)), TensorOp::identity(N, 0)});
    return s;
}

std::string FreeState::key(const std::vector<Monomial>& factors) {
    std::string k;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i) k += " | ";
        k += monomial_to_string(factors[i]);
    }
    return k;
}

void FreeState::add(StateTerm term) {
    if (static_cast<int>(term.factors.size()) != factors_) throw std::invalid_argument("factor count mismatch");
    if (term.coeff.dim_site() != N_ || term.coeff.slots() != aux_ + generator_slots(term.factors)) {
        throw std::invalid_argument("coefficient slots do not match the state shape");
    }
    std::string k = key(term.factors);
    auto it = terms_.find(k);
    if (it == terms_.end()) {
        if (!term.coeff.is_zero()) terms_.emplace(std::move(k), std::move(term));
        return;
    }
    it->second.coeff += term.coeff;
    if (it->second.coeff.is_zero()) terms_.erase(it);
}

void FreeState::reduce_cap(const std::string& name) {
    for (auto& [n, c] : caps_) {
        if (n == name) {
            c = std::max(c - 1, 0);
            return;
        }
    }
}

FreeState FreeState::operator+(const FreeState& o) const {
    if (N_ != o.N_ || aux_ != o.aux_ || factors_ != o.factors_) throw std::invalid_argument("state shape mismatch");
    FreeState r = *this;
    for (const auto& [k, t] : o.terms_) r.add(t);
    return r;
}

FreeState FreeState::operator-(const FreeState& o) const { return *this + o.scaled(Series(-1)); }

FreeState FreeState::scaled(const Series& s) const {
    FreeState r(N_, aux_, factors_);
    r.caps_ = caps_;
    for (const auto& [k, t] : terms_) r.add({t.factors, t.coeff.scaled(s)});
    return r;
}

std::string FreeState::to_string(const VarNames& names) const {
    std::string s = "state N=" + std::to_string(N_) + " aux=" + std::to_string(aux_) +
                    " factors=" + std::to_string(factors_) + "\n";
    for (const auto& [k, t] : terms_) s += "term " + k + "\n" + t.coeff.to_string(names);
    return s;
}

Residual state_residual(const FreeState& a, const FreeState& b, const VarNames& names) {
    if (a.dim_site() != b.dim_site() || a.aux_slots() != b.aux_slots() || a.factor_count() != b.factor_count()) {
        throw std::invalid_argument("state shape mismatch");
    }
    Residual total;
    auto note = [&](const std::string& key, const Residual& r) {
        total.count += r.count;
        if (total.witness.empty() && r.count) total.witness = key + " " + r.witness;
    };
    for (const auto& [k, t] : a.terms()) {
        auto it = b.terms().find(k);
        note(k, it == b.terms().end() ? residual(t.coeff, TensorOp(t.coeff.dim_site(), t.coeff.slots()), names)
                                      : residual(t.coeff, it->second.coeff, names));
    }
    for (const auto& [k, t] : b.terms()) {
        if (!a.terms().count(k)) note(k, residual(TensorOp(t.coeff.dim_site(), t.coeff.slots()), t.coeff, names));
    }
    return total;
}

QvaContext::QvaContext(std::shared_ptr<const RMatrix> rmatrix, Rational level, std::vector<std::string> spectral,
                       std::vector<std::pair<std::string, int>> capped)
    : rm_(std::move(rmatrix)), level_(std::move(level)), spectral_(std::move(spectral)), capped_(std::move(capped)) {
    if (static_cast<int>(spectral_.size()) > Mono::kMaxVars) {
        throw std::invalid_argument("at most " + std::to_string(Mono::kMaxVars) + " spectral variables");
    }
    names_.exp = spectral_;
    names_.capped = {"h"};
    for (const auto& [n, cap] : capped_) {
        if (n == "h" || std::find(spectral_.begin(), spectral_.end(), n) != spectral_.end()) {
            throw std::invalid_argument("variable '" + n + "' declared twice");
        }
        formal_.push_back({static_cast<int>(names_.capped.size()), cap});
        names_.capped.push_back(n);
    }
}

bool QvaContext::is_spectral(const std::string& name) const { return spectral_index(name) >= 0; }

bool QvaContext::is_capped(const std::string& name) const { return capped_index(name) > 0; }

int QvaContext::spectral_index(const std::string& name) const { return names_.find_exp(name); }

int QvaContext::capped_index(const std::string& name) const {
    if (name == "h") return -1;
    return names_.find_capped(name);
}

MultArg QvaContext::mult_arg(const ArgForm& a) const {
    std::vector<std::pair<int, int>> spectral;
    std::vector<std::pair<int, Rational>> capped;
    if (a.h != 0) capped.emplace_back(kH, a.h);
    for (const auto& [n, c] : a.terms) {
        if (const int i = spectral_index(n); i >= 0) {
            if (c.get_den() != 1) {
                throw std::invalid_argument("non-integer coefficient of spectral variable " + n + " in " + a.to_string());
            }
            spectral.emplace_back(i, static_cast<int>(c.get_num().get_si()));
        } else if (const int j = capped_index(n); j > 0) {
            capped.emplace_back(j, c);
        } else {
            throw std::invalid_argument("undeclared variable '" + n + "'");
        }
    }
    return MultArg::from_additive(spectral, capped);
}

TensorOp QvaContext::cached(const ArgForm& a, bool inverted) const {
    const std::string key = (inverted ? "inv " : "") + a.to_string();
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
    }
    const MultArg arg = mult_arg(a);
    TensorOp r;
    try {
        r = inverted ? rm_->inverse_at(arg, formal_) : rm_->at(arg, formal_);
    } catch (const std::domain_error& ex) {
        throw std::domain_error(std::string(ex.what()) + " in Rhat(" + a.to_string() + ")");
    }
    std::lock_guard<std::mutex> lock(mutex_);
    return memo_.emplace(key, std::move(r)).first->second;
}

TensorOp QvaContext::rhat(const ArgForm& a) const { return cached(a, false); }

TensorOp QvaContext::rhat_inverse(const ArgForm& a) const { return cached(a, true); }

}  // namespace hqva::qva
