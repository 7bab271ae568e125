#include "hqva/exact/series.hpp"

#include <algorithm>
#include <stdexcept>

namespace hqva {

CapList merge_caps(const CapList& a, const CapList& b) {
    if (a == b) return a;
    CapList r;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].var < b[j].var)) {
            r.push_back(a[i++]);
        } else if (i == a.size() || b[j].var < a[i].var) {
            r.push_back(b[j++]);
        } else {
            r.push_back({a[i].var, std::min(a[i].cap, b[j].cap)});
            ++i;
            ++j;
        }
    }
    return r;
}

std::size_t Series::box(const CapList& caps) {
    std::size_t n = 1;
    for (const auto& c : caps) n *= static_cast<std::size_t>(c.cap);
    return n;
}

int Series::total_degree_bound() const {
    int d = 0;
    for (const auto& c : caps_) d += std::max(c.cap - 1, 0);
    return d;
}

Series Series::zero(const CapList& caps) {
    CapList sorted = caps;
    std::sort(sorted.begin(), sorted.end(), [](const Cap& x, const Cap& y) { return x.var < y.var; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i].cap < 0) throw std::invalid_argument("negative cap");
        if (i > 0 && sorted[i].var == sorted[i - 1].var) throw std::invalid_argument("duplicate cap");
    }
    return Series(sorted, std::vector<RatFunc>(box(sorted)));
}

Series Series::constant(const RatFunc& c, const CapList& caps) {
    Series r = zero(caps);
    if (!r.coeffs_.empty()) r.coeffs_[0] = c;
    return r;
}

Series Series::variable(int var, const CapList& caps) {
    Series r = zero(caps);
    const int cap = r.cap_of(var);
    if (cap < 0) throw std::invalid_argument("variable has no cap");
    if (cap < 2) return r;
    std::size_t flat = 0;
    std::size_t stride = 1;
    for (auto it = r.caps_.rbegin(); it != r.caps_.rend(); ++it) {
        if (it->var == var) flat += stride;
        stride *= static_cast<std::size_t>(it->cap);
    }
    r.coeffs_[flat] = RatFunc(1);
    return r;
}

Series Series::exp_linear(const std::vector<std::pair<int, Rational>>& form, const CapList& caps) {
    Series s = zero(caps);
    for (const auto& [var, c] : form) {
        if (c == 0) continue;
        s += variable(var, caps).scaled(c);
    }
    const int d = s.total_degree_bound();
    Series e = constant(RatFunc(1), caps);
    for (int j = d; j >= 1; --j) e = constant(RatFunc(1), caps) + (s * e).scaled(Rational(1, j));
    return e;
}

int Series::cap_of(int var) const {
    for (const auto& c : caps_) {
        if (c.var == var) return c.cap;
    }
    return -1;
}

bool Series::is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const RatFunc& c) { return c.is_zero(); });
}

const RatFunc& Series::leading() const {
    static const RatFunc kZero;
    return coeffs_.empty() ? kZero : coeffs_[0];
}

std::vector<int> Series::degrees_of(std::size_t flat) const {
    std::vector<int> d(caps_.size());
    for (std::size_t k = caps_.size(); k-- > 0;) {
        d[k] = static_cast<int>(flat % static_cast<std::size_t>(caps_[k].cap));
        flat /= static_cast<std::size_t>(caps_[k].cap);
    }
    return d;
}

RatFunc Series::coeff(const std::vector<std::pair<int, int>>& degrees) const {
    std::vector<int> d(caps_.size(), 0);
    for (const auto& [var, deg] : degrees) {
        if (deg < 0) throw std::out_of_range("negative degree");
        bool found = false;
        for (std::size_t k = 0; k < caps_.size(); ++k) {
            if (caps_[k].var != var) continue;
            found = true;
            if (deg >= caps_[k].cap) throw std::out_of_range("coefficient beyond truncation cap");
            d[k] = deg;
        }
        if (!found && deg > 0) return RatFunc();
    }
    std::size_t flat = 0;
    for (std::size_t k = 0; k < caps_.size(); ++k) flat = flat * static_cast<std::size_t>(caps_[k].cap) + d[k];
    return coeffs_.at(flat);
}

Series Series::h_coeff(int k) const {
    CapList rest;
    for (const auto& c : caps_) {
        if (c.var != kH) rest.push_back(c);
    }
    Series r = zero(rest);
    const int hcap = cap_of(kH);
    if (hcap >= 0 && k >= hcap) throw std::out_of_range("coefficient beyond truncation cap");
    if (hcap < 0 && k > 0) return r;
    for (std::size_t f = 0; f < coeffs_.size(); ++f) {
        if (coeffs_[f].is_zero()) continue;
        const auto d = degrees_of(f);
        std::size_t flat = 0;
        bool match = true;
        for (std::size_t i = 0; i < caps_.size(); ++i) {
            if (caps_[i].var == kH) {
                match = d[i] == k;
            } else {
                flat = flat * static_cast<std::size_t>(caps_[i].cap) + d[i];
            }
        }
        if (match) r.coeffs_[flat] = coeffs_[f];
    }
    return r;
}

Series Series::conform(const CapList& caps) const {
    if (caps == caps_) return *this;
    Series r = zero(caps);
    for (const auto& c : caps_) {
        const int nc = r.cap_of(c.var);
        if (nc < 0) throw std::logic_error("conform drops a capped variable");
        if (nc > c.cap) throw std::logic_error("conform cannot raise a cap");
    }
    // Position of each target variable in the source caps.
    std::vector<int> src_pos(r.caps_.size(), -1);
    for (std::size_t i = 0; i < r.caps_.size(); ++i) {
        for (std::size_t k = 0; k < caps_.size(); ++k) {
            if (caps_[k].var == r.caps_[i].var) src_pos[i] = static_cast<int>(k);
        }
    }
    for (std::size_t f = 0; f < coeffs_.size(); ++f) {
        if (coeffs_[f].is_zero()) continue;
        const auto d = degrees_of(f);
        std::size_t flat = 0;
        bool inside = true;
        for (std::size_t i = 0; i < r.caps_.size(); ++i) {
            const int deg = src_pos[i] < 0 ? 0 : d[src_pos[i]];
            if (deg >= r.caps_[i].cap) {
                inside = false;
                break;
            }
            flat = flat * static_cast<std::size_t>(r.caps_[i].cap) + deg;
        }
        if (inside) r.coeffs_[flat] = coeffs_[f];
    }
    return r;
}

Series Series::operator+(const Series& o) const {
    if (caps_ == o.caps_) {
        Series r = *this;
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (!o.coeffs_[i].is_zero()) r.coeffs_[i] += o.coeffs_[i];
        }
        return r;
    }
    const CapList caps = merge_caps(caps_, o.caps_);
    return conform(caps) + o.conform(caps);
}

Series Series::operator-() const {
    Series r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
}

Series Series::operator-(const Series& o) const { return *this + (-o); }

Series Series::operator*(const Series& o) const {
    if (caps_ != o.caps_) {
        const CapList caps = merge_caps(caps_, o.caps_);
        return conform(caps) * o.conform(caps);
    }
    Series r = zero(caps_);
    if (caps_.empty()) {
        r.coeffs_[0] = coeffs_[0] * o.coeffs_[0];
        return r;
    }
    std::vector<std::size_t> nz_a;
    std::vector<std::size_t> nz_b;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (!coeffs_[i].is_zero()) nz_a.push_back(i);
        if (!o.coeffs_[i].is_zero()) nz_b.push_back(i);
    }
    if (nz_a.empty() || nz_b.empty()) return r;
    std::vector<std::vector<int>> da;
    std::vector<std::vector<int>> db;
    for (auto i : nz_a) da.push_back(degrees_of(i));
    for (auto i : nz_b) db.push_back(degrees_of(i));
    for (std::size_t x = 0; x < nz_a.size(); ++x) {
        for (std::size_t y = 0; y < nz_b.size(); ++y) {
            std::size_t flat = 0;
            bool inside = true;
            for (std::size_t k = 0; k < caps_.size(); ++k) {
                const int deg = da[x][k] + db[y][k];
                if (deg >= caps_[k].cap) {
                    inside = false;
                    break;
                }
                flat = flat * static_cast<std::size_t>(caps_[k].cap) + deg;
            }
            if (inside) r.coeffs_[flat] += coeffs_[nz_a[x]] * o.coeffs_[nz_b[y]];
        }
    }
    return r;
}

Series& Series::operator+=(const Series& o) { return *this = *this + o; }
Series& Series::operator-=(const Series& o) { return *this = *this - o; }
Series& Series::operator*=(const Series& o) { return *this = *this * o; }

Series Series::scaled(const RatFunc& c) const {
    return map([&](const RatFunc& x) { return x * c; });
}

Series Series::scaled(const Rational& c) const {
    if (c == 0) return zero(caps_);
    return map([&](const RatFunc& x) { return x.scaled(c); });
}

Series Series::inverse() const {
    if (leading().is_zero()) throw std::domain_error("series with zero leading coefficient is not invertible");
    RatFunc inv0;
    try {
        inv0 = leading().inverse();
    } catch (const std::invalid_argument&) {
        throw std::domain_error("leading coefficient " + leading().to_string() + " is not invertible");
    }
    const Series one = constant(RatFunc(1), caps_);
    const Series rest = scaled(inv0) - one;
    Series s = one;
    for (int j = 0; j < total_degree_bound(); ++j) s = one - rest * s;
    return s.scaled(inv0);
}

Series Series::log1p_part() const {
    const Series one = constant(RatFunc(1), caps_);
    const Series delta = *this - one;
    if (!delta.leading().is_zero()) throw std::domain_error("log of a series with leading coefficient != 1");
    const int d = total_degree_bound();
    // log(1 + x) = x (1 - x (1/2 - x (1/3 - ...)))
    Series acc = zero(caps_);
    for (int j = d; j >= 1; --j) acc = one.scaled(Rational(1, j)) - delta * acc;
    return delta * acc;
}

Series Series::subst_mult(int var, const Series& factor) const {
    const RatFunc& lead = factor.leading();
    if (!lead.is_polynomial() || !lead.numerator().is_monomial() || lead.numerator().terms()[0].coeff != 1) {
        throw std::invalid_argument("substitution factor must have a monic monomial leading coefficient");
    }
    const Mono m = lead.numerator().terms()[0].mono;
    const std::vector<std::pair<int, Mono>> map{{var, m}};
    const CapList caps = merge_caps(caps_, factor.caps_);
    bool depends = false;
    for (const auto& c : coeffs_) depends = depends || c.depends_on(var);
    if (!depends) return conform(caps);
    const Series lambda = factor.times_mono(m.inverse()).conform(caps).log1p_part();
    const int d = zero(caps).total_degree_bound();
    Series result = substitute(map).conform(caps);
    Series derived = *this;
    Series power = constant(RatFunc(1), caps);
    Rational fact = 1;
    for (int j = 1; j <= d; ++j) {
        derived = derived.theta(var);
        power = power * lambda;
        fact *= j;
        if (power.is_zero()) break;
        result += derived.substitute(map).conform(caps) * power.scaled(1 / fact);
    }
    return result;
}

Series Series::substitute(const std::vector<std::pair<int, Mono>>& map_) const {
    return map([&](const RatFunc& x) { return x.substitute(map_); });
}

Series Series::theta(int var) const {
    return map([&](const RatFunc& x) { return x.theta(var); });
}

Series Series::times_mono(const Mono& m) const {
    return map([&](const RatFunc& x) { return x.times_mono(m); });
}

Series Series::derivative(int capped_var) const {
    int pos = -1;
    for (std::size_t k = 0; k < caps_.size(); ++k) {
        if (caps_[k].var == capped_var) pos = static_cast<int>(k);
    }
    if (pos < 0) return zero(caps_);
    CapList caps = caps_;
    caps[pos].cap = std::max(caps[pos].cap - 1, 0);
    Series r = zero(caps);
    for (std::size_t f = 0; f < coeffs_.size(); ++f) {
        if (coeffs_[f].is_zero()) continue;
        auto d = degrees_of(f);
        if (d[pos] == 0) continue;
        const int e = d[pos];
        d[pos] -= 1;
        std::size_t flat = 0;
        for (std::size_t k = 0; k < caps.size(); ++k) flat = flat * static_cast<std::size_t>(caps[k].cap) + d[k];
        r.coeffs_[flat] = coeffs_[f].scaled(e);
    }
    return r;
}

std::size_t Series::nonzero_count() const {
    return static_cast<std::size_t>(
        std::count_if(coeffs_.begin(), coeffs_.end(), [](const RatFunc& c) { return !c.is_zero(); }));
}

std::string Series::to_string(const VarNames& names) const {
    std::string s = "{";
    for (std::size_t k = 0; k < caps_.size(); ++k) {
        if (k > 0) s += ",";
        s += names.capped_name(caps_[k].var) + "<" + std::to_string(caps_[k].cap);
    }
    s += "|";
    bool first = true;
    for (std::size_t f = 0; f < coeffs_.size(); ++f) {
        if (coeffs_[f].is_zero()) continue;
        if (!first) s += ";";
        first = false;
        s += " [";
        const auto d = degrees_of(f);
        for (std::size_t k = 0; k < d.size(); ++k) {
            if (k > 0) s += ",";
            s += std::to_string(d[k]);
        }
        s += "] " + coeffs_[f].to_string(names);
    }
    return s + " }";
}

bool operator==(const Series& a, const Series& b) { return (a - b).is_zero(); }

}  // namespace hqva
