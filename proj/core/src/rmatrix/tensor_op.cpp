#include "hqva/rmatrix/tensor_op.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace hqva {

TensorOp::TensorOp(int N, int m) : N_(N), m_(m) {
    if (N < 1 || m < 0) throw std::invalid_argument("bad tensor dimensions");
    std::size_t d = 1;
    stride_.assign(static_cast<std::size_t>(m), 1);
    for (int s = m - 1; s >= 0; --s) {
        stride_[static_cast<std::size_t>(s)] = d;
        d *= static_cast<std::size_t>(N);
    }
    rows_.resize(d);
}

TensorOp TensorOp::identity(int N, int m) {
    TensorOp t(N, m);
    for (std::size_t i = 0; i < t.dim(); ++i) t.rows_[i].push_back({static_cast<std::uint32_t>(i), Series(1)});
    return t;
}

TensorOp TensorOp::diagonal(const std::vector<Series>& diag) {
    TensorOp t(static_cast<int>(diag.size()), 1);
    for (std::size_t i = 0; i < diag.size(); ++i) t.set(i, i, diag[i]);
    return t;
}

TensorOp TensorOp::flip(int N) {
    TensorOp t(N, 2);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) t.set(static_cast<std::size_t>(i * N + j), static_cast<std::size_t>(j * N + i), 1);
    }
    return t;
}

const Series* TensorOp::find(std::size_t r, std::size_t c) const {
    const auto& row = rows_.at(r);
    auto it = std::lower_bound(row.begin(), row.end(), c, [](const Entry& e, std::size_t col) { return e.col < col; });
    if (it == row.end() || it->col != c) return nullptr;
    return &it->value;
}

Series TensorOp::at(std::size_t r, std::size_t c) const {
    const Series* s = find(r, c);
    return s ? *s : Series();
}

void TensorOp::add_to(std::size_t r, std::size_t c, const Series& v) {
    auto& row = rows_.at(r);
    if (c >= dim()) throw std::out_of_range("column out of range");
    auto it = std::lower_bound(row.begin(), row.end(), c, [](const Entry& e, std::size_t col) { return e.col < col; });
    if (it != row.end() && it->col == c) {
        it->value += v;
        if (it->value.is_zero()) row.erase(it);
    } else if (!v.is_zero()) {
        row.insert(it, {static_cast<std::uint32_t>(c), v});
    }
}

void TensorOp::set(std::size_t r, std::size_t c, const Series& v) {
    auto& row = rows_.at(r);
    if (c >= dim()) throw std::out_of_range("column out of range");
    auto it = std::lower_bound(row.begin(), row.end(), c, [](const Entry& e, std::size_t col) { return e.col < col; });
    if (it != row.end() && it->col == c) {
        if (v.is_zero()) {
            row.erase(it);
        } else {
            it->value = v;
        }
    } else if (!v.is_zero()) {
        row.insert(it, {static_cast<std::uint32_t>(c), v});
    }
}

int TensorOp::digit(std::size_t index, int slot) const {
    if (slot < 1 || slot > m_) throw std::out_of_range("slot out of range");
    return static_cast<int>((index / stride_[static_cast<std::size_t>(slot - 1)]) % static_cast<std::size_t>(N_));
}

std::size_t TensorOp::with_digit(std::size_t index, int slot, int value) const {
    const std::size_t st = stride_[static_cast<std::size_t>(slot - 1)];
    const int old = digit(index, slot);
    return index - static_cast<std::size_t>(old) * st + static_cast<std::size_t>(value) * st;
}

TensorOp TensorOp::operator*(const TensorOp& o) const {
    if (N_ != o.N_ || m_ != o.m_) throw std::invalid_argument("tensor dimension mismatch in product");
    TensorOp r(N_, m_);
    std::vector<Series> acc(dim());
    std::vector<char> touched(dim(), 0);
    std::vector<std::uint32_t> cols;
    for (std::size_t i = 0; i < dim(); ++i) {
        cols.clear();
        for (const auto& a : rows_[i]) {
            for (const auto& b : o.rows_[a.col]) {
                if (!touched[b.col]) {
                    touched[b.col] = 1;
                    cols.push_back(b.col);
                    acc[b.col] = a.value * b.value;
                } else {
                    acc[b.col] += a.value * b.value;
                }
            }
        }
        std::sort(cols.begin(), cols.end());
        for (auto c : cols) {
            if (!acc[c].is_zero()) r.rows_[i].push_back({c, std::move(acc[c])});
            acc[c] = Series();
            touched[c] = 0;
        }
    }
    return r;
}

TensorOp TensorOp::operator+(const TensorOp& o) const {
    if (N_ != o.N_ || m_ != o.m_) throw std::invalid_argument("tensor dimension mismatch in sum");
    TensorOp r(N_, m_);
    for (std::size_t i = 0; i < dim(); ++i) {
        const auto& a = rows_[i];
        const auto& b = o.rows_[i];
        auto& out = r.rows_[i];
        std::size_t x = 0;
        std::size_t y = 0;
        while (x < a.size() || y < b.size()) {
            if (y == b.size() || (x < a.size() && a[x].col < b[y].col)) {
                out.push_back(a[x++]);
            } else if (x == a.size() || b[y].col < a[x].col) {
                out.push_back(b[y++]);
            } else {
                Series s = a[x].value + b[y].value;
                if (!s.is_zero()) out.push_back({a[x].col, std::move(s)});
                ++x;
                ++y;
            }
        }
    }
    return r;
}

TensorOp TensorOp::operator-() const {
    return map([](const Series& s) { return -s; });
}

TensorOp TensorOp::operator-(const TensorOp& o) const { return *this + (-o); }

TensorOp& TensorOp::operator+=(const TensorOp& o) { return *this = *this + o; }

TensorOp TensorOp::scaled(const Series& s) const {
    return map([&](const Series& v) { return v * s; });
}

TensorOp TensorOp::map(const std::function<Series(const Series&)>& f) const {
    TensorOp r(N_, m_);
    for (std::size_t i = 0; i < dim(); ++i) {
        for (const auto& e : rows_[i]) {
            Series v = f(e.value);
            if (!v.is_zero()) r.rows_[i].push_back({e.col, std::move(v)});
        }
    }
    return r;
}

TensorOp TensorOp::embed(const std::vector<int>& slots, int m) const {
    if (static_cast<int>(slots.size()) != m_) throw std::invalid_argument("embed needs one target slot per slot");
    TensorOp r(N_, m);
    std::vector<char> used(static_cast<std::size_t>(m) + 1, 0);
    for (int s : slots) {
        if (s < 1 || s > m) throw std::out_of_range("embed slot out of range");
        if (used[static_cast<std::size_t>(s)]) throw std::invalid_argument("embed slot repeated");
        used[static_cast<std::size_t>(s)] = 1;
    }
    std::vector<int> free_slots;
    for (int s = 1; s <= m; ++s) {
        if (!used[static_cast<std::size_t>(s)]) free_slots.push_back(s);
    }
    std::size_t free_count = 1;
    for (std::size_t k = 0; k < free_slots.size(); ++k) free_count *= static_cast<std::size_t>(N_);
    for (std::size_t i = 0; i < dim(); ++i) {
        for (const auto& e : rows_[i]) {
            std::size_t row0 = 0;
            std::size_t col0 = 0;
            for (int k = 0; k < m_; ++k) {
                const std::size_t st = r.stride_[static_cast<std::size_t>(slots[k] - 1)];
                row0 += static_cast<std::size_t>(digit(i, k + 1)) * st;
                col0 += static_cast<std::size_t>(digit(e.col, k + 1)) * st;
            }
            for (std::size_t f = 0; f < free_count; ++f) {
                std::size_t off = 0;
                std::size_t rest = f;
                for (int s : free_slots) {
                    off += (rest % static_cast<std::size_t>(N_)) * r.stride_[static_cast<std::size_t>(s - 1)];
                    rest /= static_cast<std::size_t>(N_);
                }
                r.rows_[row0 + off].push_back({static_cast<std::uint32_t>(col0 + off), e.value});
            }
        }
    }
    for (auto& row : r.rows_) {
        std::sort(row.begin(), row.end(), [](const Entry& a, const Entry& b) { return a.col < b.col; });
    }
    return r;
}

TensorOp TensorOp::partial_transpose(int slot, const std::vector<int>& eps) const {
    if (static_cast<int>(eps.size()) != N_) throw std::invalid_argument("sign vector size mismatch");
    TensorOp r(N_, m_);
    for (std::size_t i = 0; i < dim(); ++i) {
        for (const auto& e : rows_[i]) {
            const int a = digit(i, slot);
            const int b = digit(e.col, slot);
            // e_ab -> eps_a eps_b e_{b'a'}
            const std::size_t row = with_digit(i, slot, N_ - 1 - b);
            const std::size_t col = with_digit(e.col, slot, N_ - 1 - a);
            const int sign = eps[static_cast<std::size_t>(a)] * eps[static_cast<std::size_t>(b)];
            r.rows_[row].push_back({static_cast<std::uint32_t>(col), sign > 0 ? e.value : -e.value});
        }
    }
    for (auto& row : r.rows_) {
        std::sort(row.begin(), row.end(), [](const Entry& a, const Entry& b) { return a.col < b.col; });
    }
    return r;
}

TensorOp TensorOp::inverse_unipotent() const {
    // A = 1 - X with X nilpotent modulo the caps; A^{-1} = sum X^j.
    const TensorOp one = identity(N_, m_);
    const TensorOp x = one - *this;
    int depth = 0;
    for (std::size_t i = 0; i < dim(); ++i) {
        for (const auto& e : x.rows_[i]) {
            if (!e.value.leading().is_zero()) {
                throw std::domain_error("operator is not the identity at leading order; cannot invert by Neumann series");
            }
            int d = 0;
            for (const auto& c : e.value.caps()) d += std::max(c.cap - 1, 0);
            depth = std::max(depth, d);
        }
    }
    TensorOp acc = one;
    for (int j = 0; j < depth; ++j) acc = one + x * acc;
    return acc;
}

std::size_t TensorOp::nonzero_count() const {
    std::size_t n = 0;
    for (const auto& row : rows_) {
        for (const auto& e : row) n += e.value.is_zero() ? 0 : 1;
    }
    return n;
}

std::optional<std::pair<std::size_t, std::size_t>> TensorOp::first_nonzero() const {
    for (std::size_t i = 0; i < dim(); ++i) {
        for (const auto& e : rows_[i]) {
            if (!e.value.is_zero()) return std::make_pair(i, static_cast<std::size_t>(e.col));
        }
    }
    return std::nullopt;
}

std::string TensorOp::index_label(std::size_t index) const {
    std::string s = "(";
    for (int k = 1; k <= m_; ++k) {
        if (k > 1) s += ",";
        s += std::to_string(digit(index, k) + 1);
    }
    return s + ")";
}

std::string TensorOp::to_string(const VarNames& names) const {
    std::string s = "tensor N=" + std::to_string(N_) + " m=" + std::to_string(m_) + "\n";
    for (std::size_t i = 0; i < dim(); ++i) {
        for (const auto& e : rows_[i]) {
            s += index_label(i) + " " + index_label(e.col) + " " + e.value.to_string(names) + "\n";
        }
    }
    return s;
}

bool operator==(const TensorOp& a, const TensorOp& b) { return (a - b).is_zero(); }

TensorOp odot(const TensorOp& a, const TensorOp& b, const std::vector<int>& left, const std::vector<int>& right,
              OdotMode mode) {
    if (a.dim_site() != b.dim_site() || a.slots() != b.slots()) {
        throw std::invalid_argument("tensor dimension mismatch in ordered product");
    }
    const int m = a.slots();
    std::vector<char> in_left(static_cast<std::size_t>(m) + 1, 0);
    std::vector<char> seen(static_cast<std::size_t>(m) + 1, 0);
    for (int s : left) {
        if (s < 1 || s > m || seen[static_cast<std::size_t>(s)]) throw std::invalid_argument("bad left slot group");
        seen[static_cast<std::size_t>(s)] = 1;
        in_left[static_cast<std::size_t>(s)] = 1;
    }
    for (int s : right) {
        if (s < 1 || s > m || seen[static_cast<std::size_t>(s)]) throw std::invalid_argument("bad right slot group");
        seen[static_cast<std::size_t>(s)] = 1;
    }
    for (int s = 1; s <= m; ++s) {
        if (!seen[static_cast<std::size_t>(s)]) throw std::invalid_argument("slot groups must cover every slot");
    }
    const std::size_t dim = a.dim();
    // Split an index into its left-group and right-group parts; the two parts
    // add back to the index.
    std::vector<std::size_t> part_left(dim);
    for (std::size_t x = 0; x < dim; ++x) {
        std::size_t p = x;
        for (int s = 1; s <= m; ++s) {
            if (!in_left[static_cast<std::size_t>(s)]) p = a.with_digit(p, s, 0);
        }
        part_left[x] = p;
    }
    auto pl = [&](std::size_t x) { return part_left[x]; };
    auto pr = [&](std::size_t x) { return x - part_left[x]; };

    struct BEntry {
        std::size_t row;
        std::size_t col;
        const Series* value;
    };
    std::unordered_map<std::uint64_t, std::vector<BEntry>> buckets;
    for (std::size_t k = 0; k < dim; ++k) {
        for (const auto& e : b.row(k)) {
            const std::size_t kc = e.col;
            const std::uint64_t key = mode == OdotMode::LR ? (static_cast<std::uint64_t>(pl(k)) << 32) | pr(kc)
                                                           : (static_cast<std::uint64_t>(pr(k)) << 32) | pl(kc);
            buckets[key].push_back({k, kc, &e.value});
        }
    }
    TensorOp r(a.dim_site(), m);
    for (std::size_t p = 0; p < dim; ++p) {
        for (const auto& e : a.row(p)) {
            const std::size_t q = e.col;
            // LR: K_L = Q_L, K'_R = P_R; I = (P_L, K_R), J = (K'_L, Q_R).
            // RL: K_R = Q_R, K'_L = P_L; I = (K_L, P_R), J = (Q_L, K'_R).
            const std::uint64_t key = mode == OdotMode::LR ? (static_cast<std::uint64_t>(pl(q)) << 32) | pr(p)
                                                           : (static_cast<std::uint64_t>(pr(q)) << 32) | pl(p);
            auto it = buckets.find(key);
            if (it == buckets.end()) continue;
            for (const auto& be : it->second) {
                std::size_t i;
                std::size_t j;
                if (mode == OdotMode::LR) {
                    i = pl(p) + pr(be.row);
                    j = pl(be.col) + pr(q);
                } else {
                    i = pl(be.row) + pr(p);
                    j = pl(q) + pr(be.col);
                }
                r.add_to(i, j, e.value * *be.value);
            }
        }
    }
    return r;
}

namespace {

std::size_t power_of(int N, int k) {
    std::size_t d = 1;
    for (int i = 0; i < k; ++i) d *= static_cast<std::size_t>(N);
    return d;
}

// Rows collected out of order, then sorted and summed.
TensorOp from_triples(int N, int m, std::vector<std::vector<TensorOp::Entry>>& rows) {
    TensorOp r(N, m);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& row = rows[i];
        std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.col < b.col; });
        std::size_t j = 0;
        while (j < row.size()) {
            Series acc = std::move(row[j].value);
            const std::uint32_t col = row[j].col;
            for (++j; j < row.size() && row[j].col == col; ++j) acc += row[j].value;
            if (!acc.is_zero()) r.set(i, col, acc);
        }
    }
    return r;
}

}  // namespace

TensorOp contract(const TensorOp& x, const TensorOp& y, int k) {
    if (x.dim_site() != y.dim_site()) throw std::invalid_argument("tensor dimension mismatch in contraction");
    if (k < 0 || k > x.slots() || k > y.slots()) throw std::invalid_argument("bad contraction width");
    const int N = x.dim_site();
    const int a = x.slots() - k;
    const int b = y.slots() - k;
    const std::size_t dk = power_of(N, k);
    const std::size_t db = power_of(N, b);
    std::vector<std::vector<TensorOp::Entry>> rows(power_of(N, a + b));
    for (std::size_t xr = 0; xr < x.dim(); ++xr) {
        const std::size_t ar = xr / dk;
        const std::size_t J = xr % dk;
        for (const auto& xe : x.row(xr)) {
            const std::size_t ac = xe.col / dk;
            const std::size_t I = xe.col % dk;
            for (std::size_t br = 0; br < db; ++br) {
                const auto& yrow = y.row(I * db + br);
                auto it = std::lower_bound(yrow.begin(), yrow.end(), J * db,
                                           [](const TensorOp::Entry& e, std::size_t c) { return e.col < c; });
                for (; it != yrow.end() && it->col < (J + 1) * db; ++it) {
                    const std::size_t bc = it->col - J * db;
                    rows[ar * db + br].push_back({static_cast<std::uint32_t>(ac * db + bc), xe.value * it->value});
                }
            }
        }
    }
    return from_triples(N, a + b, rows);
}

TensorOp merge_slots(const TensorOp& x, int into, int from) {
    const int m = x.slots();
    if (into < 1 || into > m || from < 1 || from > m || into == from) throw std::invalid_argument("bad slots to merge");
    const int N = x.dim_site();
    TensorOp shape(N, m - 1);
    auto drop = [&](std::size_t index) {
        std::size_t r = 0;
        int t = 1;
        for (int s = 1; s <= m; ++s) {
            if (s == from) continue;
            r = shape.with_digit(r, t++, x.digit(index, s));
        }
        return r;
    };
    const int into_after = into < from ? into : into - 1;
    std::vector<std::vector<TensorOp::Entry>> rows(shape.dim());
    for (std::size_t r = 0; r < x.dim(); ++r) {
        for (const auto& e : x.row(r)) {
            // (into: p -> c) (from: c -> s) contributes to (into: p -> s).
            if (x.digit(e.col, into) != x.digit(r, from)) continue;
            const std::size_t col = shape.with_digit(drop(e.col), into_after, x.digit(e.col, from));
            rows[drop(r)].push_back({static_cast<std::uint32_t>(col), e.value});
        }
    }
    return from_triples(N, m - 1, rows);
}

Residual residual(const TensorOp& lhs, const TensorOp& rhs, const VarNames& names) {
    const TensorOp d = lhs - rhs;
    Residual res;
    res.count = d.nonzero_count();
    if (auto w = d.first_nonzero()) {
        res.witness = "entry " + d.index_label(w->first) + "," + d.index_label(w->second) + ": " +
                      d.at(w->first, w->second).to_string(names);
    }
    return res;
}

}  // namespace hqva
