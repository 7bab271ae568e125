#include "hqva/qva/module_checks.hpp"

#include <chrono>
#include <stdexcept>

namespace hqva::qva {

namespace {

using Clock = std::chrono::steady_clock;

ArgForm var(const std::string& n) { return ArgForm::var(n); }

std::vector<std::string> numbered(const std::string& prefix, int count) {
    std::vector<std::string> r;
    for (int i = 1; i <= count; ++i) r.push_back(prefix + std::to_string(i));
    return r;
}

Monomial symbols(const std::vector<std::string>& names, const ArgForm& offset = {}) {
    Monomial m;
    for (const auto& n : names) m.push_back(Symbol{offset + var(n), 0});
    return m;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

void require_size(const char* what, int v) {
    if (v < 1 || v > 2) throw std::invalid_argument(std::string(what) + " must be 1 or 2");
}

struct Sides {
    FreeState lhs;
    FreeState rhs;
};

struct Setup {
    std::vector<std::string> spectral;
    std::vector<std::pair<std::string, int>> capped;
    // Compare after sorting monomials by RTT swaps as well.
    bool canonical = false;
    bool uses_k = false;
    bool uses_m = false;
};

using SidesFn = std::function<std::vector<Sides>(const QvaContext&, const CheckParams&, CheckReport&)>;

CheckReport run_check(const std::string& name, const CheckParams& p, RMatrixSource& source, const Setup& setup,
                      const SidesFn& fn) {
    const auto start = Clock::now();
    CheckReport report;
    report.name = name;
    add_standard_params(report, {p.family, p.n, p.order, p.level, setup.capped});
    if (setup.uses_k) report.set_param("k", std::to_string(p.k));
    if (setup.uses_m) report.set_param("m", std::to_string(p.m));
    auto finish = [&] {
        report.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        return report;
    };
    try {
        const QvaContext ctx(source.get(p.family, p.n, p.order), p.level, setup.spectral, setup.capped);
        const auto sides = fn(ctx, p, report);
        if (report.verdict == Verdict::Inconclusive) return finish();
        std::size_t raw = 0;
        std::size_t total = 0;
        for (const auto& s : sides) {
            const Residual r = state_residual(s.lhs, s.rhs, ctx.names());
            raw += r.count;
            Residual used = r;
            if (setup.canonical) used = state_residual(canonicalize(ctx, s.lhs), canonicalize(ctx, s.rhs), ctx.names());
            total += used.count;
            if (report.witness.empty() && used.count) report.witness = clip_witness(used.witness);
        }
        if (setup.canonical) report.set_param("raw_residual", std::to_string(raw));
        report.residual_count = total;
        report.verdict = total == 0 ? Verdict::Pass : Verdict::Fail;
    } catch (const std::domain_error& e) {
        report.verdict = Verdict::Error;
        report.witness = clip_witness(e.what());
    } catch (const UnsupportedAction& e) {
        report.verdict = Verdict::Error;
        report.witness = clip_witness(e.what());
    }
    return finish();
}

std::vector<Sides> tminus_vacuum(const QvaContext& ctx, const CheckParams& p, CheckReport&) {
    const FreeState start = p.perturb ? basis_state(ctx.N(), symbols({"v"})) : FreeState::vacuum(ctx.N());
    const FreeState expected = insert_aux(start, 1);
    return {{apply_tminus(ctx, start, var("u"), 1), expected}, {apply_tminus_inv(ctx, start, var("u"), 1), expected}};
}

std::vector<Sides> tminus_roundtrip(const QvaContext& ctx, const CheckParams& p, CheckReport&) {
    const FreeState w = basis_state(ctx.N(), symbols(numbered("v", p.k)));
    const ArgForm u = var("u");
    const ArgForm u_inv = p.perturb ? -u : u;
    const FreeState expected = insert_aux(w, 1);
    const FreeState a = merge_aux(apply_tminus(ctx, apply_tminus_inv(ctx, w, u_inv, 1), u, 1), 1, 2);
    const FreeState b = merge_aux(apply_tminus_inv(ctx, apply_tminus(ctx, w, u, 1), u_inv, 1), 1, 2);
    return {{a, expected}, {b, expected}};
}

// Rhat_12(u1 - u2) T-_1(u1) T-_2(u2) = T-_2(u2) T-_1(u1) Rhat_12(u1 - u2)
std::vector<Sides> rtt_minus(const QvaContext& ctx, const CheckParams& p, CheckReport&) {
    const FreeState w = basis_state(ctx.N(), symbols(numbered("v", p.k)));
    const ArgForm u1 = var("u1");
    const ArgForm u2 = var("u2");
    const ArgForm left_arg = p.perturb ? u2 - u1 : u1 - u2;
    const FreeState lhs =
        left_multiply(ctx.rhat(left_arg), {1, 2}, apply_tminus(ctx, apply_tminus(ctx, w, u2, 1), u1, 1));
    const FreeState rhs =
        right_multiply(apply_tminus(ctx, apply_tminus(ctx, w, u1, 1), u2, 2), ctx.rhat(u1 - u2), {1, 2});
    return {{lhs, rhs}};
}

// T-(u) M T-(u + kappa h)^t M^{-1} = 1
std::vector<Sides> rel_minus(const QvaContext& ctx, const CheckParams& p, CheckReport&) {
    const FreeState w = basis_state(ctx.N(), symbols(numbered("v", p.k)));
    const ArgForm u = var("u");
    FreeState s = apply_tminus(ctx, w, u + ArgForm::h_times(ctx.kappa()), 1);
    if (!p.perturb) s = transpose_aux(s, 1, ctx.ltd().eps);
    s = right_multiply(left_multiply(ctx.M(), {1}, s), ctx.Minv(), {1});
    s = apply_tminus(ctx, s, u, 1);
    return {{merge_aux(s, 1, 2), insert_aux(w, 1)}};
}

// Rhat_12(-v + u - hc/2) T+_1(u) T-_2(v) = T-_2(v) T+_1(u) Rhat_12(-v + u + hc/2)
std::vector<Sides> mixed(const QvaContext& ctx, const CheckParams& p, CheckReport&) {
    const FreeState w = basis_state(ctx.N(), symbols(numbered("w", p.k)));
    const ArgForm u = var("u");
    const ArgForm v = var("v");
    const ArgForm half = ArgForm::h_times(ctx.level() / 2);
    const ArgForm left_arg = p.perturb ? v - u - half : u - v - half;
    const FreeState lhs = left_multiply(ctx.rhat(left_arg), {1, 2},
                                        apply_tplus(insert_aux(apply_tminus(ctx, w, v, 1), 1), u, 1));
    const FreeState rhs =
        right_multiply(apply_tminus(ctx, apply_tplus(insert_aux(w, 1), u, 1), v, 2), ctx.rhat(u - v + half), {1, 2});
    return {{lhs, rhs}};
}

FreeState pair_state(int N, int m, int k) {
    return tensor(basis_state(N, symbols(numbered("u", m))), basis_state(N, symbols(numbered("v", k))));
}

FreeState triple_state(int N, int m, int k) {
    return tensor(pair_state(N, m, k), basis_state(N, symbols({"w1"})));
}

// (D ⊗ 1) S(z) - S(z) (D ⊗ 1) = -dS/dz on T+(u) 1 ⊗ T+(v) 1. S(z)(D ⊗ 1) on the
// basis state is the total derivative in the u's.
std::vector<Sides> s_shift(const QvaContext& ctx, const CheckParams& p, CheckReport&) {
    const FreeState s = braiding_s(ctx, pair_state(ctx.N(), p.m, p.k), var("z"));
    FreeState lhs = translate_d(s, 0);
    for (const auto& u : numbered("u", p.m)) lhs = lhs - differentiate(ctx, s, u);
    const FreeState dz = differentiate(ctx, s, "z");
    lhs = p.perturb ? lhs - dz : lhs + dz;
    return {{lhs, FreeState(lhs.dim_site(), lhs.aux_slots(), lhs.factor_count())}};
}

// S_12(z) S_21(-z) = 1
std::vector<Sides> s_unitarity(const QvaContext& ctx, const CheckParams& p, CheckReport&) {
    const FreeState s0 = pair_state(ctx.N(), p.m, p.k);
    const ArgForm z = var("z");
    const FreeState inner = swap_factors(braiding_s(ctx, swap_factors(s0, 0, 1), p.perturb ? z : -z), 0, 1);
    return {{braiding_s(ctx, inner, z), s0}};
}

// S_12(z1) S_13(z1 + z2) S_23(z2) = S_23(z2) S_13(z1 + z2) S_12(z1)
std::vector<Sides> s_ybe(const QvaContext& ctx, const CheckParams& p, CheckReport&) {
    const FreeState s0 = triple_state(ctx.N(), p.m, p.k);
    const ArgForm z1 = var("z1");
    const ArgForm z2 = var("z2");
    const ArgForm mid = p.perturb ? z1 - z2 : z1 + z2;
    const FreeState lhs = braiding_s(ctx, braiding_s(ctx, braiding_s(ctx, s0, z2, 1, 2), mid, 0, 2), z1, 0, 1);
    const FreeState rhs = braiding_s(ctx, braiding_s(ctx, braiding_s(ctx, s0, z1, 0, 1), z1 + z2, 0, 2), z2, 1, 2);
    return {{lhs, rhs}};
}

// S(z1) (Y(z2) ⊗ 1) = (Y(z2) ⊗ 1) S_23(z1) S_13(z1 + z2)
std::vector<Sides> hexagon(const QvaContext& ctx, const CheckParams& p, CheckReport&) {
    const FreeState s0 = triple_state(ctx.N(), p.m, p.k);
    const ArgForm z1 = var("z1");
    const ArgForm z2 = var("z2");
    const ArgForm outer = p.perturb ? z1 - z2 : z1 + z2;
    const FreeState lhs = braiding_s(ctx, vertex_y(ctx, s0, z2, 0), z1, 0, 1);
    const FreeState rhs = vertex_y(ctx, braiding_s(ctx, braiding_s(ctx, s0, outer, 0, 2), z1, 1, 2), z2, 0);
    return {{lhs, rhs}};
}

RatFunc binomial_power(const RatFunc& base, int r) {
    RatFunc out(1);
    for (int i = 0; i < r; ++i) out *= base;
    return out;
}

// Direct against the reordered form, then (z1 - z2)^r Y_W(a, z1) Y_W(b, z2) 1
// at z1 = z2 - z0 against z2^r (e^{-z0} - 1)^r Y_W(Y(a, z0) b, z2) 1, in
// Z = e^{z}.
std::vector<Sides> weak_assoc(const QvaContext& ctx, const CheckParams& p, CheckReport& report) {
    const WeakAssocSides w = weak_assoc_sides(ctx, p.k, p.m);
    const int z1 = ctx.spectral_index("z1");
    const int z2 = ctx.spectral_index("z2");
    const int z0 = ctx.spectral_index("z0");
    const Mono Z1 = Mono::var(z1);
    const Mono Z2 = Mono::var(z2);

    std::vector<TensorOp> coeffs;
    std::vector<std::vector<Monomial>> factors;
    for (const auto& [key, t] : w.direct.terms()) {
        coeffs.push_back(t.coeff);
        factors.push_back(t.factors);
    }
    std::vector<TensorOp*> ptrs;
    for (auto& c : coeffs) ptrs.push_back(&c);
    const RatFunc z1_minus_z2(Poly::monomial(Z1) - Poly::monomial(Z2));
    const auto r = clear_denominators(ptrs, z1_minus_z2, p.r_start, p.r_bound,
                                      [](const RatFunc& c) { return c.is_polynomial(); });
    if (!r) {
        report.set_param("r", "");
        report.set_param("r_bound", std::to_string(p.r_bound));
        report.verdict = Verdict::Inconclusive;
        report.witness = "no r <= " + std::to_string(p.r_bound) + " clears the denominators";
        return {};
    }
    report.set_param("r", std::to_string(*r));
    FreeState prefixed(w.direct.dim_site(), w.direct.aux_slots(), w.direct.factor_count());
    for (std::size_t i = 0; i < coeffs.size(); ++i) prefixed.add({factors[i], coeffs[i]});
    const ArgForm z0_arg = p.perturb ? -var("z0") : var("z0");
    const FreeState substituted = substitute_spectral(ctx, prefixed, "z1", var("z2") - z0_arg);

    const Monomial u = symbols(numbered("u", p.k));
    const FreeState inner = vertex_y(ctx, u, var("z0"), basis_state(ctx.N(), symbols(numbered("v", p.m))));
    const FreeState composed = phi_yw(ctx, tensor(inner, FreeState::vacuum(ctx.N())), var("z2"), 0);
    const RatFunc e_minus_one(Poly::monomial(Mono::var(z0, -1)) - Poly::monomial(Mono{}));
    const RatFunc scalar = RatFunc::monomial(Z2.pow(*r)) * binomial_power(e_minus_one, *r);
    return {{w.direct, w.reordered}, {substituted, scale_state(composed, Series(scalar))}};
}

Setup sized(std::vector<std::string> spectral, bool k, bool m) {
    Setup s;
    s.spectral = std::move(spectral);
    s.uses_k = k;
    s.uses_m = m;
    return s;
}

}  // namespace

FreeState scale_state(const FreeState& s, const Series& factor) { return s.scaled(factor); }

WeakAssocSides weak_assoc_sides(const QvaContext& ctx, int k, int m) {
    const int N = ctx.N();
    const auto us = numbered("u", k);
    const auto vs = numbered("v", m);
    const FreeState vacuum_w = FreeState::vacuum(N);
    const ArgForm z1 = var("z1");
    const ArgForm z2 = var("z2");
    WeakAssocSides out;
    out.direct = phi_yw(ctx, symbols(us), z1, phi_yw(ctx, symbols(vs), z2, vacuum_w));

    // Coefficient slots: x (k), y (m), then k + m generator slots.
    const int total = 2 * (k + m);
    auto x_slot = [](int i) { return i; };
    auto y_slot = [k](int j) { return k + j; };
    auto log_x = [&](int i) { return z1 - var(us[static_cast<std::size_t>(i - 1)]); };
    auto log_y = [&](int j) { return z2 - var(vs[static_cast<std::size_t>(j - 1)]); };
    Monomial mono;
    for (int i = 1; i <= k; ++i) mono.push_back(Symbol{log_x(i), 0});
    for (int j = 1; j <= m; ++j) mono.push_back(Symbol{log_y(j), 0});
    FreeState plus = basis_state(N, mono);

    // Rtilde^{12}_{mk}(y/x): j ascending, i descending
    TensorOp rt = TensorOp::identity(N, total);
    for (int j = 1; j <= m; ++j) {
        for (int i = k; i >= 1; --i) rt = rt * ctx.rtilde(log_y(j) - log_x(i)).embed({y_slot(j), x_slot(i)}, total);
    }
    // A: j descending, i ascending, transposed on y, with M^{-1} ... M around
    // the chain (see the T- inverse).
    const ArgForm shift = ArgForm::h_times(ctx.level() + ctx.kappa());
    TensorOp a = TensorOp::identity(N, total);
    for (int j = 1; j <= m; ++j) a = a * ctx.Minv().embed({y_slot(j)}, total);
    for (int j = m; j >= 1; --j) {
        for (int i = 1; i <= k; ++i) {
            a = a * ctx.rtilde(log_y(j) - log_x(i) + shift)
                        .embed({y_slot(j), x_slot(i)}, total)
                        .partial_transpose(y_slot(j), ctx.ltd().eps);
        }
    }
    for (int j = 1; j <= m; ++j) a = a * ctx.M().embed({y_slot(j)}, total);

    std::vector<int> left;
    std::vector<int> right;
    for (int j = 1; j <= m; ++j) left.push_back(y_slot(j));
    for (int g = k + m + 1; g <= total; ++g) left.push_back(g);
    for (int i = 1; i <= k; ++i) right.push_back(x_slot(i));
    out.reordered = FreeState(N, k + m, 1);
    for (const auto& [key, t] : plus.terms()) {
        out.reordered.add({t.factors, odot(a, t.coeff * rt, left, right, OdotMode::LR)});
    }
    return out;
}

const std::vector<CheckEntry>& module_checks() {
    static const std::vector<CheckEntry> entries = [] {
        std::vector<CheckEntry> e;
        auto add = [&](const char* name, const char* summary, auto setup_fn, SidesFn fn) {
            e.push_back({name, summary, [n = std::string(name), setup_fn, fn](const CheckParams& p, RMatrixSource& s) {
                             return run_check(n, p, s, setup_fn(p), fn);
                         }});
        };
        add("tminus_vacuum", "T-(u) and its inverse fix the vacuum",
            [](const CheckParams&) { return sized({"u", "v"}, false, false); }, tminus_vacuum);
        add("tminus_roundtrip", "T-(u) composed with its inverse is the identity on T+_[k](v) 1",
            [](const CheckParams& p) {
                require_size("k", p.k);
                return sized(concat({"u"}, numbered("v", p.k)), true, false);
            },
            tminus_roundtrip);
        add("rtt_minus", "RTT relation for T- on T+_[k](v) 1",
            [](const CheckParams& p) {
                require_size("k", p.k);
                return sized(concat({"u1", "u2"}, numbered("v", p.k)), true, false);
            },
            rtt_minus);
        add("rel_minus", "T-(u) M T-(u + kappa h)^t M^-1 = 1 on T+_[k](v) 1",
            [](const CheckParams& p) {
                require_size("k", p.k);
                return sized(concat({"u"}, numbered("v", p.k)), true, false);
            },
            rel_minus);
        add("mixed", "relation between T+ and T- with the level shifts",
            [](const CheckParams& p) {
                require_size("k", p.k);
                return sized(concat({"u", "v"}, numbered("w", p.k)), true, false);
            },
            mixed);
        auto pair_setup = [](std::vector<std::string> extra) {
            return [extra](const CheckParams& p) {
                require_size("k", p.k);
                require_size("m", p.m);
                return sized(concat(concat(extra, numbered("u", p.m)), numbered("v", p.k)), true, true);
            };
        };
        add("s_shift", "shift condition for the braiding S(z)", pair_setup({"z"}), s_shift);
        auto canonical = [](auto f) {
            return [f](const CheckParams& p) {
                Setup s = f(p);
                s.canonical = true;
                return s;
            };
        };
        add("s_unitarity", "S_12(z) S_21(-z) = 1", canonical(pair_setup({"z"})), s_unitarity);
        add("s_ybe", "Yang-Baxter equation for S", canonical(pair_setup({"z1", "z2", "w1"})), s_ybe);
        add("hexagon", "hexagon identity between S and Y", canonical(pair_setup({"z1", "z2", "w1"})), hexagon);
        add("weak_assoc_chain", "weak associativity of Y_W on the vacuum module of the quantum affine algebra",
            [](const CheckParams& p) {
                require_size("k", p.k);
                require_size("m", p.m);
                Setup s = sized({"z1", "z2", "z0"}, true, true);
                const int a = p.cap("u", 2);
                const int b = p.cap("v", 2);
                if (a < 1 || b < 1) throw std::invalid_argument("weak_assoc_chain needs caps >= 1");
                for (const auto& u : numbered("u", p.k)) s.capped.emplace_back(u, a);
                for (const auto& v : numbered("v", p.m)) s.capped.emplace_back(v, b);
                return s;
            },
            weak_assoc);
        return e;
    }();
    return entries;
}

CheckReport module_check(const std::string& name, const CheckParams& params, RMatrixSource& source) {
    for (const auto& e : module_checks()) {
        if (e.name == name) return e.run(params, source);
    }
    throw std::invalid_argument("unknown check '" + name + "'");
}

}  // namespace hqva::qva
