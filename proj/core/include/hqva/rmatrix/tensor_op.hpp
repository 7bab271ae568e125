#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hqva/exact/series.hpp"

namespace hqva {

// Sparse operator on (C^N)^{⊗m} with Series entries. Multi-indices are
// written with slot 1 most significant; slot arguments in this API are
// 1-based to match the A_{rs} embedding convention.
class TensorOp {
public:
    struct Entry {
        std::uint32_t col;
        Series value;
    };

    TensorOp() = default;
    TensorOp(int N, int m);
    static TensorOp identity(int N, int m);
    // Single-slot diagonal operator.
    static TensorOp diagonal(const std::vector<Series>& diag);
    // Permutation operator sum e_ij ⊗ e_ji on two slots.
    static TensorOp flip(int N);

    int dim_site() const { return N_; }
    int slots() const { return m_; }
    std::size_t dim() const { return rows_.size(); }

    const std::vector<Entry>& row(std::size_t r) const { return rows_[r]; }
    // Returns nullptr for a structural zero.
    const Series* find(std::size_t r, std::size_t c) const;
    Series at(std::size_t r, std::size_t c) const;
    void add_to(std::size_t r, std::size_t c, const Series& v);
    void set(std::size_t r, std::size_t c, const Series& v);

    // Digit of slot s (1-based) in a flat index, and the reverse.
    int digit(std::size_t index, int slot) const;
    std::size_t with_digit(std::size_t index, int slot, int value) const;

    TensorOp operator*(const TensorOp& o) const;
    TensorOp operator+(const TensorOp& o) const;
    TensorOp operator-(const TensorOp& o) const;
    TensorOp operator-() const;
    TensorOp& operator+=(const TensorOp& o);
    TensorOp scaled(const Series& s) const;
    TensorOp map(const std::function<Series(const Series&)>& f) const;

    // Places this operator on the given slots (1-based, in order) of an
    // m-slot space: slots = {r, s} gives A_{rs}.
    TensorOp embed(const std::vector<int>& slots, int m) const;
    // Partial transposition e_ij -> eps_i eps_j e_{j'i'} on one slot.
    TensorOp partial_transpose(int slot, const std::vector<int>& eps) const;
    // Inverse of an operator whose degree-zero part (in every capped
    // variable) is the identity, by Neumann series.
    TensorOp inverse_unipotent() const;

    // Number of nonzero entries and the first one in row-major order.
    std::size_t nonzero_count() const;
    std::optional<std::pair<std::size_t, std::size_t>> first_nonzero() const;
    bool is_zero() const { return nonzero_count() == 0; }

    std::string index_label(std::size_t index) const;
    std::string to_string(const VarNames& names = VarNames::defaults()) const;

    friend bool operator==(const TensorOp& a, const TensorOp& b);

private:
    int N_ = 0;
    int m_ = 0;
    std::vector<std::size_t> stride_;
    std::vector<std::vector<Entry>> rows_;
};

enum class OdotMode { LR, RL };

// A ⊙ B for A = sum a' ⊗ a'' split into the `left` slot group (a') and the
// `right` slot group (a''). LR gives sum a' B a'', RL gives sum a'' B a'.
TensorOp odot(const TensorOp& a, const TensorOp& b, const std::vector<int>& left, const std::vector<int>& right,
              OdotMode mode);

// Partial trace over k shared slots: x on (A, G) and y on (G, B), with G the
// last k slots of x and the first k slots of y, gives
// sum_{I,J} x[(a,J),(a',I)] y[(I,b),(J,b')] on (A, B). Substituting y for
// the matrix units of G this way is how operators act on symbol slots.
TensorOp contract(const TensorOp& x, const TensorOp& y, int k);

// Slot `from` moved into slot `into` as a matrix product on one copy of
// C^N, with `into` the left factor; the result has one slot fewer.
TensorOp merge_slots(const TensorOp& x, int into, int from);

// Residual summary for identity checks: nonzero entry count of lhs - rhs and
// one witness entry.
struct Residual {
    std::size_t count = 0;
    std::string witness;
};
Residual residual(const TensorOp& lhs, const TensorOp& rhs, const VarNames& names = VarNames::defaults());

}  // namespace hqva
