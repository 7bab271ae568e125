#include "hqva/rmatrix/rmatrix.hpp"

#include <map>
#include <stdexcept>

namespace hqva {

namespace {

CapList h_caps(int L) { return {{kH, L}}; }

const Mono kZMono = Mono::var(kZ);

Series z_series() { return Series(RatFunc::monomial(kZMono)); }

}  // namespace

Series q_power(const Rational& a, int L) {
    if (a == 0) return Series::constant(1, h_caps(L));
    return Series::exp_linear({{kH, a / 2}}, h_caps(L));
}

ConstantOps build_constant_ops(const LieTypeData& ltd, int L) {
    const int N = ltd.N;
    auto idx = [N](int a, int b) { return static_cast<std::size_t>(a * N + b); };
    ConstantOps ops{TensorOp::flip(N), TensorOp(N, 2), TensorOp(N, 2), TensorOp(N, 1), TensorOp(N, 1)};
    const Series q = q_power(1, L);
    const Series qinv = q_power(-1, L);
    const Series q_minus_qinv = q - qinv;
    std::map<std::pair<int, int>, Series> q_bar;
    auto qb = [&](int i, int j) -> const Series& {
        auto it = q_bar.find({i, j});
        if (it == q_bar.end()) {
            it = q_bar.emplace(std::make_pair(i, j), q_power(ltd.bar[static_cast<std::size_t>(i)] -
                                                                     ltd.bar[static_cast<std::size_t>(j)],
                                                                 L))
                     .first;
        }
        return it->second;
    };
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            const int sign = ltd.eps[static_cast<std::size_t>(i)] * ltd.eps[static_cast<std::size_t>(j)];
            // Q: q^{bar_i - bar_j} eps_i eps_j e_{i'j'} ⊗ e_ij
            ops.Q.add_to(idx(ltd.prime(i), i), idx(ltd.prime(j), j), qb(i, j).scaled(Rational(sign)));
        }
    }
    for (int i = 0; i < N; ++i) {
        const int ip = ltd.prime(i);
        if (i != ip) {
            ops.R.add_to(idx(i, i), idx(i, i), q);
            ops.R.add_to(idx(i, ip), idx(i, ip), qinv);
        }
        for (int j = 0; j < N; ++j) {
            if (j != i && j != ltd.prime(i)) ops.R.add_to(idx(i, j), idx(i, j), Series(1));
            if (i < j) ops.R.add_to(idx(i, j), idx(j, i), q_minus_qinv);
            if (i > j) {
                const int sign = ltd.eps[static_cast<std::size_t>(i)] * ltd.eps[static_cast<std::size_t>(j)];
                ops.R.add_to(idx(ltd.prime(i), i), idx(ltd.prime(j), j),
                             (q_minus_qinv * qb(i, j)).scaled(Rational(-sign)));
            }
        }
    }
    if (ltd.N == 2 * ltd.n + 1) ops.R.add_to(idx(ltd.n, ltd.n), idx(ltd.n, ltd.n), Series(1));
    for (int i = 0; i < N; ++i) {
        ops.M.set(static_cast<std::size_t>(i), static_cast<std::size_t>(i), q_power(ltd.bar[static_cast<std::size_t>(i)], L));
        ops.Minv.set(static_cast<std::size_t>(i), static_cast<std::size_t>(i),
                     q_power(-ltd.bar[static_cast<std::size_t>(i)], L));
    }
    return ops;
}

TensorOp rplus(const LieTypeData& ltd, const ConstantOps& ops, const Series& x, int L) {
    const Series one = Series::constant(1, h_caps(L));
    const Series qinv = q_power(-1, L);
    const Series qinv2_minus_1 = q_power(-2, L) - one;
    const Series xi = q_power(ltd.xi_exponent, L);
    const Series c_r = qinv * (x - one) * (x - xi);
    const Series c_p = -(qinv2_minus_1 * (x - xi));
    const Series c_q = xi * qinv2_minus_1 * (x - one);
    return ops.R.scaled(c_r) + ops.P.scaled(c_p) + ops.Q.scaled(c_q);
}

Series Normalizer::as_series() const {
    const CapList caps = h_caps(order);
    Series s = Series::zero(caps);
    Series power = Series::constant(1, caps);
    for (int l = 0; l < order; ++l) {
        s += power.scaled(g1[static_cast<std::size_t>(l)]);
        power = power * Series::variable(kH, caps);
    }
    return s;
}

Series normalizer_rhs(const LieTypeData& ltd, int L) {
    const CapList caps = h_caps(L);
    const Series base(RatFunc::inv_binomial(kZMono));
    Series rhs = Series::constant(1, caps);
    for (const Rational& a : {Rational(-1), Rational(1), Rational(-ltd.kappa), Rational(ltd.kappa)}) {
        const Series factor = z_series() * Series::exp_linear({{kH, a}}, caps);
        rhs = rhs * base.subst_mult(kZ, factor);
    }
    return rhs;
}

std::vector<std::vector<Rational>> normalizer_series_oracle(const LieTypeData& ltd, int L, int z_degree) {
    const int D = z_degree;
    using Table = std::vector<std::vector<Rational>>;
    auto table = [&] { return Table(static_cast<std::size_t>(L), std::vector<Rational>(static_cast<std::size_t>(D) + 1)); };
    std::vector<Rational> inv_fact(static_cast<std::size_t>(L));
    Rational f = 1;
    for (int n = 0; n < L; ++n) {
        if (n > 0) f *= n;
        inv_fact[static_cast<std::size_t>(n)] = 1 / f;
    }
    auto power = [](Rational b, int e) {
        Rational r = 1;
        for (int i = 0; i < e; ++i) r *= b;
        return r;
    };
    // 1/(1 - z e^{a h}) = sum_d z^d e^{d a h}: coefficient of h^n z^d is (d a)^n / n!.
    Table rhs = table();
    rhs[0][0] = 1;
    for (const Rational& a : {Rational(-1), Rational(1), Rational(-ltd.kappa), Rational(ltd.kappa)}) {
        Table factor = table();
        for (int n = 0; n < L; ++n) {
            for (int d = 0; d <= D; ++d) factor[n][d] = power(a * d, n) * inv_fact[n];
        }
        Table prod = table();
        for (int n1 = 0; n1 < L; ++n1) {
            for (int d1 = 0; d1 <= D; ++d1) {
                if (rhs[n1][d1] == 0) continue;
                for (int n2 = 0; n1 + n2 < L; ++n2) {
                    for (int d2 = 0; d1 + d2 <= D; ++d2) prod[n1 + n2][d1 + d2] += rhs[n1][d1] * factor[n2][d2];
                }
            }
        }
        rhs = std::move(prod);
    }
    // g(z) g(z e^{-kappa h}) at h^n z^d: sum over d1 + d2 = d, n1 + n2 + n3 = n of
    // c[n1][d1] c[n2][d2] (-d2 kappa)^{n3} / n3!. The unknown c[n][d] enters twice
    // (d1 = d and d2 = d), so 2 c[n][d] + known = rhs.
    Table c = table();
    c[0][0] = 1;
    for (int d = 1; d <= D; ++d) {
        for (int n = 0; n < L; ++n) {
            Rational known = 0;
            for (int d1 = 0; d1 <= d; ++d1) {
                const int d2 = d - d1;
                for (int n1 = 0; n1 <= n; ++n1) {
                    for (int n2 = 0; n1 + n2 <= n; ++n2) {
                        const int n3 = n - n1 - n2;
                        if (c[n1][d1] == 0 || c[n2][d2] == 0) continue;
                        known += c[n1][d1] * c[n2][d2] * power(-ltd.kappa * d2, n3) * inv_fact[n3];
                    }
                }
            }
            c[n][d] = (rhs[n][d] - known) / 2;
        }
    }
    return c;
}

std::vector<Rational> expand_at_zero(const RatFunc& f, int var, int degree) {
    std::vector<Rational> series(static_cast<std::size_t>(degree) + 1);
    for (const auto& t : f.numerator().terms()) {
        const int e = t.mono.get(var);
        Mono rest = t.mono;
        rest.set(var, 0);
        if (!rest.is_one() || e < 0) throw std::invalid_argument("expand_at_zero: not a power series in one variable");
        if (e <= degree) series[static_cast<std::size_t>(e)] += t.coeff;
    }
    for (const auto& fac : f.denominator()) {
        const int k = fac.base.get(var);
        Mono rest = fac.base;
        rest.set(var, 0);
        if (!rest.is_one() || k <= 0) throw std::invalid_argument("expand_at_zero: unexpected denominator");
        for (int p = 0; p < fac.power; ++p) {
            // multiply by 1/(1 - z^k)
            for (int d = k; d <= degree; ++d) series[static_cast<std::size_t>(d)] += series[static_cast<std::size_t>(d - k)];
        }
    }
    return series;
}

Normalizer solve_normalizer(const LieTypeData& ltd, int L, int z_degree) {
    if (L < 1) throw std::invalid_argument("normalizer order must be at least 1");
    Normalizer nz;
    nz.ltd = ltd;
    nz.order = L;
    nz.z_degree = z_degree;
    const CapList caps = h_caps(L);
    const Series rhs = normalizer_rhs(ltd, L);
    const Series shift = z_series() * Series::exp_linear({{kH, -ltd.kappa}}, caps);
    const RatFunc one_minus_z_sq(Poly::binomial_power(kZMono, 2));
    nz.g1.assign(static_cast<std::size_t>(L), RatFunc());
    nz.g1[0] = RatFunc::inv_binomial(kZMono, 2);
    for (int n = 1; n < L; ++n) {
        // Known orders below n; g1[n..] are still zero.
        const Series partial = nz.as_series();
        const Series lhs = partial * partial.subst_mult(kZ, shift);
        const RatFunc known = lhs.coeff({{kH, n}});
        nz.g1[static_cast<std::size_t>(n)] = ((rhs.coeff({{kH, n}}) - known) * one_minus_z_sq).scaled(Rational(1, 2));
    }
    nz.order = L;
    const Series g = nz.as_series();
    if ((g * g.subst_mult(kZ, shift) - rhs).nonzero_count() != 0) {
        throw std::logic_error("normalizer does not satisfy its functional equation");
    }
    for (const auto& gl : nz.g1) {
        int r = 0;
        for (const auto& f : gl.denominator()) {
            if (f.base != kZMono) throw std::logic_error("normalizer denominator is not a power of (1 - z)");
            r = f.power;
        }
        nz.denominator_power.push_back(r);
    }
    nz.g1_series = normalizer_series_oracle(ltd, L, z_degree);
    for (int l = 0; l < L; ++l) {
        if (expand_at_zero(nz.g1[static_cast<std::size_t>(l)], kZ, z_degree) != nz.g1_series[static_cast<std::size_t>(l)]) {
            throw std::logic_error("normalizer rational form disagrees with the series recursion at h^" +
                                   std::to_string(l));
        }
    }
    return nz;
}

MultArg MultArg::from_additive(const std::vector<std::pair<int, int>>& spectral,
                               const std::vector<std::pair<int, Rational>>& capped) {
    MultArg m;
    for (const auto& [var, c] : spectral) m.mono = m.mono * Mono::var(var, -c);
    for (const auto& [var, c] : capped) {
        if (c != 0) m.shift.emplace_back(var, -c);
    }
    return m;
}

MultArg MultArg::inverse() const {
    MultArg r;
    r.mono = mono.inverse();
    for (const auto& [var, c] : shift) r.shift.emplace_back(var, -c);
    return r;
}

MultArg MultArg::operator*(const MultArg& o) const {
    MultArg r;
    r.mono = mono * o.mono;
    std::map<int, Rational> s;
    for (const auto& [var, c] : shift) s[var] += c;
    for (const auto& [var, c] : o.shift) s[var] += c;
    for (const auto& [var, c] : s) {
        if (c != 0) r.shift.emplace_back(var, c);
    }
    return r;
}

Series MultArg::as_series(const CapList& caps) const {
    Series m(RatFunc::monomial(mono));
    if (shift.empty()) return m;
    return m * Series::exp_linear(shift, caps);
}

RMatrix::RMatrix(const Normalizer& normalizer)
    : ltd_(normalizer.ltd), order_(normalizer.order), normalizer_(normalizer), ops_(build_constant_ops(ltd_, order_)) {
    const Series prefactor = Series::exp_linear({{kH, (1 + 2 * ltd_.kappa) / 2}}, h_caps(order_));
    base_ = rplus(ltd_, ops_, z_series(), order_).scaled(prefactor * normalizer_.as_series());
}

const TensorOp& RMatrix::theta_power(int j) const {
    std::lock_guard<std::mutex> lock(mutex_);
    if (theta_cache_.empty()) theta_cache_.push_back(std::make_unique<TensorOp>(base_));
    while (static_cast<int>(theta_cache_.size()) <= j) {
        const TensorOp& last = *theta_cache_.back();
        theta_cache_.push_back(std::make_unique<TensorOp>(last.map([](const Series& s) { return s.theta(kZ); })));
    }
    return *theta_cache_[static_cast<std::size_t>(j)];
}

TensorOp RMatrix::at(const MultArg& x, const CapList& formal) const {
    const std::vector<std::pair<int, Mono>> subst{{kZ, x.mono}};
    auto eval = [&](const Series& s) { return s.substitute(subst); };
    try {
        if (x.shift.empty()) return base_.map(eval);
        const CapList caps = merge_caps(h_caps(order_), formal);
        Series shift = Series::zero(caps);
        for (const auto& [var, c] : x.shift) {
            shift += Series::variable(var, caps).scaled(c);
        }
        TensorOp result = base_.map(eval);
        Series power = Series::constant(1, caps);
        Rational fact = 1;
        for (int j = 1;; ++j) {
            power = power * shift;
            if (power.is_zero()) break;
            fact *= j;
            const Series weight = power.scaled(1 / fact);
            result += theta_power(j).map([&](const Series& s) { return eval(s) * weight; });
        }
        return result;
    } catch (const std::domain_error&) {
        throw std::domain_error("R-matrix pole: argument " + mono_to_string(x.mono, VarNames::defaults()) +
                                " makes a denominator vanish");
    }
}

TensorOp RMatrix::inverse_at(const MultArg& x, const CapList& formal) const {
    return ops_.P * at(x.inverse(), formal) * ops_.P;
}

TensorOp conj_M(const LieTypeData& ltd, const TensorOp& x, int slot, int sign, int L) {
    std::map<std::pair<int, int>, Series> cache;
    TensorOp r(x.dim_site(), x.slots());
    for (std::size_t i = 0; i < x.dim(); ++i) {
        for (const auto& e : x.row(i)) {
            const int a = x.digit(i, slot);
            const int b = x.digit(e.col, slot);
            auto it = cache.find({a, b});
            if (it == cache.end()) {
                const Rational d = (ltd.bar[static_cast<std::size_t>(a)] - ltd.bar[static_cast<std::size_t>(b)]) * sign;
                it = cache.emplace(std::make_pair(a, b), q_power(d, L)).first;
            }
            r.set(i, e.col, e.value * it->second);
        }
    }
    return r;
}

}  // namespace hqva
