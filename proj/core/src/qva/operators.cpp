#include "hqva/qva/operators.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace hqva::qva {

namespace {

// Offsets (number of preceding coefficient slots) of each factor's
// generator slots.
std::vector<int> gen_offsets(int aux, const std::vector<Monomial>& factors) {
    std::vector<int> off;
    int o = aux;
    for (const auto& m : factors) {
        off.push_back(o);
        o += static_cast<int>(m.size());
    }
    return off;
}

// P_{a,b} on an m-slot space.
TensorOp flip_at(int N, int a, int b, int m) { return TensorOp::flip(N).embed({a, b}, m); }

// prod_i P_{first_i, second_i}; a permutation operator, built directly.
TensorOp pair_flips(int N, const std::vector<std::pair<int, int>>& pairs, int m) {
    TensorOp t(N, m);
    for (std::size_t r = 0; r < t.dim(); ++r) {
        std::size_t c = r;
        for (const auto& [a, b] : pairs) {
            c = t.with_digit(c, a, t.digit(r, b));
            c = t.with_digit(c, b, t.digit(r, a));
        }
        t.set(r, c, 1);
    }
    return t;
}

void require_plain(const Monomial& m, const char* what) {
    for (const auto& s : m) {
        if (s.derivative != 0) throw UnsupportedAction(std::string(what) + " on derivative symbols");
    }
}

Rational half_level(const QvaContext& ctx) { return ctx.level() / 2; }

FreeState like(const FreeState& s, int aux, int factors) {
    FreeState r(s.dim_site(), aux, factors);
    r.set_cap_record(s.cap_record());
    return r;
}

}  // namespace

FreeState act(const FreeState& s, const std::vector<int>& factors, const std::vector<int>& new_aux_positions,
              const BasisFn& basis) {
    const int F = s.factor_count();
    const int m = s.aux_slots();
    const int a_new = static_cast<int>(new_aux_positions.size());
    const int aux_out = m + a_new;
    {
        std::vector<int> sorted = factors;
        std::sort(sorted.begin(), sorted.end());
        if (sorted.empty() || std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted.front() < 0 ||
            sorted.back() >= F) {
            throw std::invalid_argument("bad factor list");
        }
        std::vector<int> pos = new_aux_positions;
        std::sort(pos.begin(), pos.end());
        if (std::adjacent_find(pos.begin(), pos.end()) != pos.end() ||
            (!pos.empty() && (pos.front() < 1 || pos.back() > aux_out))) {
            throw std::invalid_argument("bad auxiliary positions");
        }
    }
    // Old auxiliary slots fill the positions not taken by new ones.
    std::vector<int> old_aux_pos;
    for (int p = 1; p <= aux_out; ++p) {
        if (std::find(new_aux_positions.begin(), new_aux_positions.end(), p) == new_aux_positions.end()) {
            old_aux_pos.push_back(p);
        }
    }
    std::vector<int> others;
    for (int f = 0; f < F; ++f) {
        if (std::find(factors.begin(), factors.end(), f) == factors.end()) others.push_back(f);
    }

    std::map<std::string, BasisImage> cache;
    std::optional<FreeState> out;
    for (const auto& [key, term] : s.terms()) {
        std::vector<Monomial> inputs;
        for (int f : factors) inputs.push_back(term.factors[static_cast<std::size_t>(f)]);
        const std::string ik = FreeState::key(inputs);
        auto it = cache.find(ik);
        if (it == cache.end()) it = cache.emplace(ik, basis(inputs)).first;
        const BasisImage& img = it->second;
        const int k_in = generator_slots(inputs);
        const int k_out = generator_slots(img.outputs);
        if (img.outputs.empty() || img.outputs.size() > factors.size()) {
            throw std::logic_error("action must produce between one and the number of input factors");
        }
        if (img.coeff.slots() != k_in + a_new + k_out) throw std::logic_error("basis image has the wrong slot count");

        // Coefficient slots reordered to (aux, other factors, acted factors).
        const auto off = gen_offsets(m, term.factors);
        const int total = term.coeff.slots();
        std::vector<int> perm(static_cast<std::size_t>(total));
        std::iota(perm.begin(), perm.begin() + m, 1);
        int next = m + 1;
        for (int f : others) {
            for (std::size_t p = 0; p < term.factors[static_cast<std::size_t>(f)].size(); ++p) {
                perm[static_cast<std::size_t>(off[static_cast<std::size_t>(f)]) + p] = next++;
            }
        }
        for (int f : factors) {
            for (std::size_t p = 0; p < term.factors[static_cast<std::size_t>(f)].size(); ++p) {
                perm[static_cast<std::size_t>(off[static_cast<std::size_t>(f)]) + p] = next++;
            }
        }
        const TensorOp contracted = contract(term.coeff.embed(perm, total), img.coeff, k_in);

        // Result factor list.
        std::vector<Monomial> fac = term.factors;
        std::vector<int> dropped;
        for (std::size_t j = 0; j < factors.size(); ++j) {
            if (j < img.outputs.size()) {
                fac[static_cast<std::size_t>(factors[j])] = img.outputs[j];
            } else {
                dropped.push_back(factors[j]);
            }
        }
        std::vector<int> new_index(static_cast<std::size_t>(F), -1);
        std::vector<Monomial> result_factors;
        for (int f = 0; f < F; ++f) {
            if (std::find(dropped.begin(), dropped.end(), f) != dropped.end()) continue;
            new_index[static_cast<std::size_t>(f)] = static_cast<int>(result_factors.size());
            result_factors.push_back(fac[static_cast<std::size_t>(f)]);
        }
        const auto new_off = gen_offsets(aux_out, result_factors);

        // Contracted slots: (aux, others, new aux, outputs) -> final layout.
        std::vector<int> place;
        for (int i = 0; i < m; ++i) place.push_back(old_aux_pos[static_cast<std::size_t>(i)]);
        for (int f : others) {
            const int base = new_off[static_cast<std::size_t>(new_index[static_cast<std::size_t>(f)])];
            for (std::size_t p = 0; p < term.factors[static_cast<std::size_t>(f)].size(); ++p) {
                place.push_back(base + static_cast<int>(p) + 1);
            }
        }
        for (int p : new_aux_positions) place.push_back(p);
        for (std::size_t j = 0; j < img.outputs.size(); ++j) {
            const int base = new_off[static_cast<std::size_t>(new_index[static_cast<std::size_t>(factors[j])])];
            for (std::size_t p = 0; p < img.outputs[j].size(); ++p) place.push_back(base + static_cast<int>(p) + 1);
        }
        if (!out) out = like(s, aux_out, static_cast<int>(result_factors.size()));
        out->add({std::move(result_factors), contracted.embed(place, contracted.slots())});
    }
    if (!out) {
        const int outs = F - static_cast<int>(factors.size()) + 1;
        return like(s, aux_out, std::max(outs, 1));
    }
    return *out;
}

FreeState basis_state(int N, const Monomial& m) {
    const int k = static_cast<int>(m.size());
    FreeState s(N, k, 1);
    std::vector<std::pair<int, int>> pairs;
    for (int i = 1; i <= k; ++i) pairs.emplace_back(i, k + i);
    s.add({{m}, pair_flips(N, pairs, 2 * k)});
    return s;
}

FreeState tensor(const FreeState& a, const FreeState& b) {
    if (a.dim_site() != b.dim_site()) throw std::invalid_argument("state dimension mismatch");
    const int ma = a.aux_slots();
    const int mb = b.aux_slots();
    FreeState r(a.dim_site(), ma + mb, a.factor_count() + b.factor_count());
    for (const auto& [ka, ta] : a.terms()) {
        const int ga = generator_slots(ta.factors);
        for (const auto& [kb, tb] : b.terms()) {
            const int gb = generator_slots(tb.factors);
            const int total = ma + mb + ga + gb;
            // a: aux 1..ma, gens after all aux; b: aux ma+1.., gens last.
            std::vector<int> pa;
            for (int i = 1; i <= ma; ++i) pa.push_back(i);
            for (int i = 1; i <= ga; ++i) pa.push_back(ma + mb + i);
            std::vector<int> pb;
            for (int i = 1; i <= mb; ++i) pb.push_back(ma + i);
            for (int i = 1; i <= gb; ++i) pb.push_back(ma + mb + ga + i);
            std::vector<Monomial> fac = ta.factors;
            fac.insert(fac.end(), tb.factors.begin(), tb.factors.end());
            r.add({std::move(fac), ta.coeff.embed(pa, total) * tb.coeff.embed(pb, total)});
        }
    }
    return r;
}

FreeState insert_aux(const FreeState& s, int position) {
    const int m = s.aux_slots();
    if (position < 1 || position > m + 1) throw std::invalid_argument("bad auxiliary position");
    FreeState r = like(s, m + 1, s.factor_count());
    for (const auto& [k, t] : s.terms()) {
        const int total = t.coeff.slots();
        std::vector<int> perm;
        for (int i = 1; i <= total; ++i) perm.push_back(i < position ? i : i + 1);
        r.add({t.factors, t.coeff.embed(perm, total + 1)});
    }
    return r;
}

namespace {

void check_aux_slots(const FreeState& s, const std::vector<int>& slots) {
    for (int x : slots) {
        if (x < 1 || x > s.aux_slots()) throw std::invalid_argument("auxiliary slot out of range");
    }
}

}  // namespace

FreeState left_multiply(const TensorOp& op, const std::vector<int>& slots, const FreeState& s) {
    check_aux_slots(s, slots);
    FreeState r = like(s, s.aux_slots(), s.factor_count());
    for (const auto& [k, t] : s.terms()) r.add({t.factors, op.embed(slots, t.coeff.slots()) * t.coeff});
    return r;
}

FreeState right_multiply(const FreeState& s, const TensorOp& op, const std::vector<int>& slots) {
    check_aux_slots(s, slots);
    FreeState r = like(s, s.aux_slots(), s.factor_count());
    for (const auto& [k, t] : s.terms()) r.add({t.factors, t.coeff * op.embed(slots, t.coeff.slots())});
    return r;
}

FreeState transpose_aux(const FreeState& s, int slot, const std::vector<int>& eps) {
    check_aux_slots(s, {slot});
    FreeState r = like(s, s.aux_slots(), s.factor_count());
    for (const auto& [k, t] : s.terms()) r.add({t.factors, t.coeff.partial_transpose(slot, eps)});
    return r;
}

FreeState merge_aux(const FreeState& s, int into, int from) {
    check_aux_slots(s, {into, from});
    FreeState r = like(s, s.aux_slots() - 1, s.factor_count());
    for (const auto& [k, t] : s.terms()) r.add({t.factors, merge_slots(t.coeff, into, from)});
    return r;
}

FreeState swap_factors(const FreeState& s, int i, int j) {
    const int F = s.factor_count();
    if (i < 0 || j < 0 || i >= F || j >= F) throw std::invalid_argument("factor out of range");
    FreeState r = like(s, s.aux_slots(), F);
    for (const auto& [k, t] : s.terms()) {
        std::vector<Monomial> fac = t.factors;
        std::swap(fac[static_cast<std::size_t>(i)], fac[static_cast<std::size_t>(j)]);
        const auto off = gen_offsets(s.aux_slots(), t.factors);
        const auto new_off = gen_offsets(s.aux_slots(), fac);
        std::vector<int> perm;
        for (int a = 1; a <= s.aux_slots(); ++a) perm.push_back(a);
        for (int f = 0; f < F; ++f) {
            const int g = f == i ? j : f == j ? i : f;
            for (std::size_t p = 0; p < t.factors[static_cast<std::size_t>(f)].size(); ++p) {
                perm.push_back(new_off[static_cast<std::size_t>(g)] + static_cast<int>(p) + 1);
            }
        }
        (void)off;
        r.add({std::move(fac), t.coeff.embed(perm, t.coeff.slots())});
    }
    return r;
}

FreeState apply_tplus(const FreeState& s0, const ArgForm& arg, int slot, int factor) {
    if (factor < 0 || factor >= s0.factor_count()) throw std::invalid_argument("factor out of range");
    if (slot < 1 || slot > s0.aux_slots() + 1) throw std::invalid_argument("auxiliary slot out of range");
    const FreeState s = slot == s0.aux_slots() + 1 ? insert_aux(s0, slot) : s0;
    const int m = s.aux_slots();
    FreeState r = like(s, m, s.factor_count());
    for (const auto& [k, t] : s.terms()) {
        const auto off = gen_offsets(m, t.factors);
        const int g = off[static_cast<std::size_t>(factor)] + 1;
        const int total = t.coeff.slots() + 1;
        std::vector<int> perm;
        for (int i = 1; i < total; ++i) perm.push_back(i < g ? i : i + 1);
        std::vector<Monomial> fac = t.factors;
        auto& mono = fac[static_cast<std::size_t>(factor)];
        mono.insert(mono.begin(), Symbol{arg, 0});
        r.add({std::move(fac), flip_at(s.dim_site(), slot, g, total) * t.coeff.embed(perm, total)});
    }
    return r;
}

FreeState apply_lplus(const FreeState& s, const ArgForm& log_x, int slot, int factor) {
    return apply_tplus(s, log_x, slot, factor);
}

namespace {

// Slots (G_1..G_k, n, G'_1..G'_k) for images that add one auxiliary slot.
struct FreshLayout {
    int k;
    int n;
    int total;
    int G(int i) const { return i; }
    int Gp(int i) const { return k + 1 + i; }
};

TensorOp fresh_symbols(int N, const FreshLayout& l) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 1; i <= l.k; ++i) pairs.emplace_back(l.G(i), l.Gp(i));
    return pair_flips(N, pairs, l.total);
}

}  // namespace

BasisImage tminus_image(const QvaContext& ctx, const Monomial& m, const ArgForm& u) {
    require_plain(m, "T-");
    const int k = static_cast<int>(m.size());
    const FreshLayout l{k, k + 1, 2 * k + 1};
    const int N = ctx.N();
    TensorOp left = TensorOp::identity(N, l.total);
    TensorOp right = TensorOp::identity(N, l.total);
    const ArgForm half = ArgForm::h_times(half_level(ctx));
    for (int i = 1; i <= k; ++i) {
        const ArgForm base = m[static_cast<std::size_t>(i - 1)].arg - u;
        left = left * ctx.rhat(base - half).embed({l.G(i), l.n}, l.total);
    }
    for (int i = k; i >= 1; --i) {
        const ArgForm base = m[static_cast<std::size_t>(i - 1)].arg - u;
        right = right * ctx.rhat_inverse(base + half).embed({l.G(i), l.n}, l.total);
    }
    return {left * fresh_symbols(N, l) * right, {m}};
}

BasisImage tminus_inv_image(const QvaContext& ctx, const Monomial& m, const ArgForm& u) {
    require_plain(m, "T- inverse");
    const int k = static_cast<int>(m.size());
    const FreshLayout l{k, k + 1, 2 * k + 1};
    const int N = ctx.N();
    const auto& eps = ctx.ltd().eps;
    const ArgForm half = ArgForm::h_times(half_level(ctx));
    const ArgForm kappa_h = ArgForm::h_times(ctx.kappa());
    TensorOp a = TensorOp::identity(N, l.total);
    TensorOp b = TensorOp::identity(N, l.total);
    // M^{-1} on the transposed side and M on the other: with M in front, as
    // displayed, the product is not an inverse already at k = 1.
    for (int i = 1; i <= k; ++i) {
        a = a * ctx.Minv().embed({l.G(i)}, l.total);
        b = b * ctx.M().embed({l.G(i)}, l.total);
    }
    for (int i = k; i >= 1; --i) {
        const ArgForm base = m[static_cast<std::size_t>(i - 1)].arg - u;
        a = a * ctx.rhat(base - half - kappa_h).embed({l.G(i), l.n}, l.total).partial_transpose(l.G(i), eps);
    }
    b = b * fresh_symbols(N, l);
    for (int i = 1; i <= k; ++i) {
        const ArgForm base = m[static_cast<std::size_t>(i - 1)].arg - u;
        b = b * ctx.rhat(base + half).embed({l.G(i), l.n}, l.total);
    }
    std::vector<int> left;
    for (int i = 1; i <= k; ++i) left.push_back(l.G(i));
    for (int i = 1; i <= k; ++i) left.push_back(l.Gp(i));
    return {odot(a, b, left, {l.n}, OdotMode::LR), {m}};
}

TensorOp invert_fresh_action(const TensorOp& image, int k) {
    const int N = image.dim_site();
    if (image.slots() != 2 * k + 1) throw std::invalid_argument("image needs 2k+1 slots");
    std::size_t dk = 1;
    for (int i = 0; i < k; ++i) dk *= static_cast<std::size_t>(N);
    const std::size_t n = static_cast<std::size_t>(N);
    // Op[(p, r, c), (q, J, I)] = C[(I, p, r), (J, q, c)]: the (p, q) entry
    // maps the matrix unit e_JI of G to the G' units.
    auto split = [&](std::size_t x, std::size_t& g, std::size_t& p, std::size_t& gp) {
        gp = x % dk;
        p = (x / dk) % n;
        g = x / dk / n;
    };
    TensorOp op(N, 2 * k + 1);
    for (std::size_t row = 0; row < image.dim(); ++row) {
        std::size_t I, p, r;
        split(row, I, p, r);
        for (const auto& e : image.row(row)) {
            std::size_t J, q, c;
            split(e.col, J, q, c);
            op.set((p * dk + r) * dk + c, (q * dk + J) * dk + I, e.value);
        }
    }
    const TensorOp inv = op.inverse_unipotent();
    TensorOp out(N, 2 * k + 1);
    for (std::size_t row = 0; row < inv.dim(); ++row) {
        const std::size_t c = row % dk;
        const std::size_t r = (row / dk) % dk;
        const std::size_t p = row / dk / dk;
        for (const auto& e : inv.row(row)) {
            const std::size_t I = e.col % dk;
            const std::size_t J = (e.col / dk) % dk;
            const std::size_t q = e.col / dk / dk;
            out.set((I * n + p) * dk + r, (J * n + q) * dk + c, e.value);
        }
    }
    return out;
}

FreeState apply_tminus(const QvaContext& ctx, const FreeState& s, const ArgForm& arg, int position, int factor) {
    return act(s, {factor}, {position},
               [&](const std::vector<Monomial>& in) { return tminus_image(ctx, in[0], arg); });
}

FreeState apply_tminus_inv(const QvaContext& ctx, const FreeState& s, const ArgForm& arg, int position,
                           int factor) {
    return act(s, {factor}, {position},
               [&](const std::vector<Monomial>& in) { return tminus_inv_image(ctx, in[0], arg); });
}

BasisImage lminus_image(const QvaContext& ctx, const Monomial& m, const ArgForm& log_y) {
    require_plain(m, "L-");
    const int k = static_cast<int>(m.size());
    const FreshLayout l{k, k + 1, 2 * k + 1};
    const int N = ctx.N();
    TensorOp left = TensorOp::identity(N, l.total);
    TensorOp right = TensorOp::identity(N, l.total);
    const ArgForm half = ArgForm::h_times(half_level(ctx));
    for (int i = 1; i <= k; ++i) {
        const ArgForm ratio = m[static_cast<std::size_t>(i - 1)].arg - log_y;
        left = left * ctx.rtilde(ratio + half).embed({l.G(i), l.n}, l.total);
    }
    for (int i = k; i >= 1; --i) {
        const ArgForm ratio = m[static_cast<std::size_t>(i - 1)].arg - log_y;
        right = right * ctx.rtilde_inverse(ratio - half).embed({l.G(i), l.n}, l.total);
    }
    return {left * fresh_symbols(N, l) * right, {m}};
}

FreeState apply_lminus(const QvaContext& ctx, const FreeState& s, const ArgForm& log_y, int position, int factor) {
    return act(s, {factor}, {position},
               [&](const std::vector<Monomial>& in) { return lminus_image(ctx, in[0], log_y); });
}

FreeState apply_lminus_inv(const QvaContext& ctx, const FreeState& s, const ArgForm& log_y, int position,
                           int factor) {
    return act(s, {factor}, {position}, [&](const std::vector<Monomial>& in) {
        BasisImage img = lminus_image(ctx, in[0], log_y);
        img.coeff = invert_fresh_action(img.coeff, static_cast<int>(in[0].size()));
        return img;
    });
}

namespace {

using MinusInv = FreeState (*)(const QvaContext&, const FreeState&, const ArgForm&, int, int);

// a(z) b for a = plus_[k](z + sign u) minus_[k](z + sign u + sign hc/2)^{-1}.
BasisImage vertex_like(const QvaContext& ctx, const std::vector<Monomial>& in, const ArgForm& z, int sign,
                       MinusInv minus_inv) {
    const Monomial& u = in[0];
    require_plain(u, "vertex operator");
    const int k = static_cast<int>(u.size());
    const ArgForm half = ArgForm::h_times(half_level(ctx) * sign);
    FreeState st = basis_state(ctx.N(), in[1]);
    for (int i = 1; i <= k; ++i) {
        st = minus_inv(ctx, st, z + u[static_cast<std::size_t>(i - 1)].arg.scaled(sign) + half, i, 0);
    }
    for (int i = k; i >= 1; --i) st = apply_tplus(st, z + u[static_cast<std::size_t>(i - 1)].arg.scaled(sign), i, 0);
    if (st.terms().size() != 1) throw std::logic_error("vertex operator image must be a single monomial");
    const StateTerm& t = st.terms().begin()->second;
    return {t.coeff, t.factors};
}

FreeState with_front(int N, const Monomial& u, const FreeState& w) { return tensor(basis_state(N, u), w); }

}  // namespace

FreeState vertex_y(const QvaContext& ctx, const FreeState& s, const ArgForm& z, int factor) {
    return act(s, {factor, factor + 1}, {},
               [&](const std::vector<Monomial>& in) { return vertex_like(ctx, in, z, 1, apply_tminus_inv); });
}

FreeState vertex_y(const QvaContext& ctx, const Monomial& u, const ArgForm& z, const FreeState& w) {
    return vertex_y(ctx, with_front(ctx.N(), u, w), z, 0);
}

FreeState phi_yw(const QvaContext& ctx, const FreeState& s, const ArgForm& log_z, int factor) {
    return act(s, {factor, factor + 1}, {},
               [&](const std::vector<Monomial>& in) { return vertex_like(ctx, in, log_z, -1, apply_lminus_inv); });
}

FreeState phi_yw(const QvaContext& ctx, const Monomial& u, const ArgForm& log_z, const FreeState& w) {
    return phi_yw(ctx, with_front(ctx.N(), u, w), log_z, 0);
}

BasisImage braiding_image(const QvaContext& ctx, const Monomial& u, const Monomial& v, const ArgForm& z) {
    require_plain(u, "braiding");
    require_plain(v, "braiding");
    const int m = static_cast<int>(u.size());
    const int k = static_cast<int>(v.size());
    const int total = 2 * (m + k);
    const int N = ctx.N();
    auto g1 = [&](int i) { return i; };
    auto g2 = [&](int j) { return m + j; };
    auto g1p = [&](int i) { return m + k + i; };
    auto g2p = [&](int j) { return 2 * m + k + j; };
    std::vector<std::pair<int, int>> p1;
    std::vector<std::pair<int, int>> p2;
    for (int i = 1; i <= m; ++i) p1.emplace_back(g1(i), g1p(i));
    for (int j = 1; j <= k; ++j) p2.emplace_back(g2(j), g2p(j));
    const TensorOp u1 = pair_flips(N, p1, total);
    const TensorOp u2 = pair_flips(N, p2, total);
    if (m == 0 || k == 0) return {u1 * u2, {u, v}};

    auto arg = [&](int i, int j, const Rational& shift) {
        return z + u[static_cast<std::size_t>(i - 1)].arg - v[static_cast<std::size_t>(j - 1)].arg +
               ArgForm::h_times(shift);
    };
    // i ascending, j descending
    auto product = [&](const Rational& shift) {
        TensorOp r = TensorOp::identity(N, total);
        for (int i = 1; i <= m; ++i) {
            for (int j = k; j >= 1; --j) r = r * ctx.rhat(arg(i, j, shift)).embed({g1(i), g2(j)}, total);
        }
        return r;
    };
    auto product_inverse = [&](const Rational& shift) {
        TensorOp r = TensorOp::identity(N, total);
        for (int i = m; i >= 1; --i) {
            for (int j = 1; j <= k; ++j) r = r * ctx.rhat_inverse(arg(i, j, shift)).embed({g1(i), g2(j)}, total);
        }
        return r;
    };
    const Rational c = ctx.level();
    TensorOp a = TensorOp::identity(N, total);
    // M^{-1} ... M around the transposed chain, as for the T- inverse.
    for (int i = 1; i <= m; ++i) a = a * ctx.Minv().embed({g1(i)}, total);
    // i descending, j ascending, transposed in the first group
    for (int i = m; i >= 1; --i) {
        for (int j = 1; j <= k; ++j) {
            a = a * ctx.rhat(arg(i, j, -(c + ctx.kappa()))).embed({g1(i), g2(j)}, total).partial_transpose(g1(i), ctx.ltd().eps);
        }
    }
    for (int i = 1; i <= m; ++i) a = a * ctx.M().embed({g1(i)}, total);
    const TensorOp rz = product(0);
    const TensorOp b = rz * u1 * product_inverse(c) * u2 * rz;
    std::vector<int> left;
    std::vector<int> right;
    for (int i = 1; i <= m; ++i) left.push_back(g1(i));
    for (int i = 1; i <= m; ++i) left.push_back(g1p(i));
    for (int j = 1; j <= k; ++j) left.push_back(g2p(j));
    for (int j = 1; j <= k; ++j) right.push_back(g2(j));
    return {odot(a, b, left, right, OdotMode::LR), {u, v}};
}

FreeState braiding_s(const QvaContext& ctx, const FreeState& s, const ArgForm& z, int i, int j) {
    return act(s, {i, j}, {},
               [&](const std::vector<Monomial>& in) { return braiding_image(ctx, in[0], in[1], z); });
}

FreeState translate_d(const FreeState& s, int factor) {
    if (factor < 0 || factor >= s.factor_count()) throw std::invalid_argument("factor out of range");
    FreeState r = like(s, s.aux_slots(), s.factor_count());
    for (const auto& [k, t] : s.terms()) {
        const auto& mono = t.factors[static_cast<std::size_t>(factor)];
        for (std::size_t p = 0; p < mono.size(); ++p) {
            std::vector<Monomial> fac = t.factors;
            ++fac[static_cast<std::size_t>(factor)][p].derivative;
            r.add({std::move(fac), t.coeff});
        }
    }
    return r;
}

FreeState differentiate_coefficients(const QvaContext& ctx, const FreeState& s, const std::string& var) {
    FreeState r = like(s, s.aux_slots(), s.factor_count());
    std::function<Series(const Series&)> d;
    if (const int i = ctx.spectral_index(var); i >= 0) {
        d = [i](const Series& x) { return x.theta(i); };
    } else if (const int j = ctx.capped_index(var); j > 0) {
        d = [j](const Series& x) { return x.derivative(j); };
        auto caps = s.cap_record();
        if (std::none_of(caps.begin(), caps.end(), [&](const auto& c) { return c.first == var; })) {
            for (const auto& c : ctx.formal()) {
                if (c.var == j) caps.emplace_back(var, c.cap);
            }
        }
        r.set_cap_record(caps);
        r.reduce_cap(var);
    } else {
        throw std::invalid_argument("cannot differentiate in '" + var + "'");
    }
    for (const auto& [k, t] : s.terms()) r.add({t.factors, t.coeff.map(d)});
    return r;
}

FreeState differentiate(const QvaContext& ctx, const FreeState& s, const std::string& var) {
    FreeState r = differentiate_coefficients(ctx, s, var);
    for (const auto& [k, t] : s.terms()) {
        for (std::size_t f = 0; f < t.factors.size(); ++f) {
            for (std::size_t p = 0; p < t.factors[f].size(); ++p) {
                const Rational c = t.factors[f][p].arg.coeff(var);
                if (c == 0) continue;
                std::vector<Monomial> fac = t.factors;
                ++fac[f][p].derivative;
                r.add({std::move(fac), t.coeff.scaled(Series(c))});
            }
        }
    }
    return r;
}

FreeState rtt_swap(const QvaContext& ctx, const FreeState& s, int i, int factor) {
    return act(s, {factor}, {}, [&](const std::vector<Monomial>& in) {
        const Monomial& a = in[0];
        const int k = static_cast<int>(a.size());
        if (i < 0 || i + 1 >= k) throw std::invalid_argument("swap position outside the monomial");
        require_plain(a, "RTT swap");
        const int total = 2 * k;
        const ArgForm diff = a[static_cast<std::size_t>(i)].arg - a[static_cast<std::size_t>(i) + 1].arg;
        std::vector<std::pair<int, int>> pairs;
        for (int j = 1; j <= k; ++j) {
            int target = j;
            if (j == i + 1) target = i + 2;
            if (j == i + 2) target = i + 1;
            pairs.emplace_back(j, k + target);
        }
        const std::vector<int> slots{i + 1, i + 2};
        const TensorOp coeff = ctx.rhat_inverse(diff).embed(slots, total) * pair_flips(ctx.N(), pairs, total) *
                               ctx.rhat(diff).embed(slots, total);
        Monomial out = a;
        std::swap(out[static_cast<std::size_t>(i)], out[static_cast<std::size_t>(i) + 1]);
        return BasisImage{coeff, {out}};
    });
}

FreeState canonicalize(const QvaContext& ctx, const FreeState& s) {
    FreeState r = like(s, s.aux_slots(), s.factor_count());
    for (const auto& [k, t] : s.terms()) {
        FreeState cur = like(s, s.aux_slots(), s.factor_count());
        cur.add(t);
        for (;;) {
            if (cur.is_zero()) break;
            const StateTerm& ct = cur.terms().begin()->second;
            int factor = -1;
            int pos = -1;
            for (std::size_t f = 0; f < ct.factors.size() && factor < 0; ++f) {
                for (std::size_t p = 0; p + 1 < ct.factors[f].size(); ++p) {
                    if (ct.factors[f][p + 1].arg < ct.factors[f][p].arg) {
                        factor = static_cast<int>(f);
                        pos = static_cast<int>(p);
                        break;
                    }
                }
            }
            if (factor < 0) break;
            cur = rtt_swap(ctx, cur, pos, factor);
        }
        for (const auto& [ck, c] : cur.terms()) r.add(c);
    }
    return r;
}

FreeState substitute_spectral(const QvaContext& ctx, const FreeState& s, const std::string& var, const ArgForm& by) {
    const int idx = ctx.spectral_index(var);
    if (idx < 0) throw std::invalid_argument("'" + var + "' is not a spectral variable");
    if (by.h != 0) throw std::invalid_argument("substitution must not shift by h");
    Mono image;
    for (const auto& [n, c] : by.terms) {
        const int j = ctx.spectral_index(n);
        if (j < 0 || c.get_den() != 1) throw std::invalid_argument("substitution must be spectral with integer coefficients");
        image = image * Mono::var(j, static_cast<int>(c.get_num().get_si()));
    }
    const std::vector<std::pair<int, Mono>> map{{idx, image}};
    FreeState r = like(s, s.aux_slots(), s.factor_count());
    for (const auto& [k, t] : s.terms()) {
        std::vector<Monomial> fac = t.factors;
        for (auto& mono : fac) {
            for (auto& sym : mono) sym.arg = sym.arg.substitute(var, by);
        }
        r.add({std::move(fac), t.coeff.map([&](const Series& x) { return x.substitute(map); })});
    }
    return r;
}

}  // namespace hqva::qva
