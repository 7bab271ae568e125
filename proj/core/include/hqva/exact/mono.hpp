#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>

namespace hqva {

// Laurent monomial in up to kMaxVars exponential variables. Exponents are stored
// as 16-bit offset-binary fields packed into two words, so that monomial
// multiplication is a word addition and unsigned comparison of the packed words
// is lexicographic comparison of exponent vectors (variable 0 most significant).
class Mono {
public:
    static constexpr int kMaxVars = 8;
    static constexpr int kMaxExp = 0x1FFF;
    static constexpr int kMinExp = -0x2000;

    Mono() : w_{kOne, kOne} {}

    static Mono var(int index, int exponent = 1) {
        Mono m;
        m.set(index, exponent);
        return m;
    }

    int get(int index) const {
        check_index(index);
        const std::uint64_t w = w_[index / 4];
        const int shift = 48 - 16 * (index % 4);
        return static_cast<int>((w >> shift) & 0xFFFFu) - 0x2000;
    }

    void set(int index, int exponent) {
        check_index(index);
        if (exponent > kMaxExp || exponent < kMinExp) {
            throw std::overflow_error("monomial exponent out of range");
        }
        std::uint64_t& w = w_[index / 4];
        const int shift = 48 - 16 * (index % 4);
        w &= ~(std::uint64_t{0xFFFF} << shift);
        w |= static_cast<std::uint64_t>(exponent + 0x2000) << shift;
    }

    bool is_one() const { return w_[0] == kOne && w_[1] == kOne; }

    Mono operator*(const Mono& o) const {
        Mono r;
        r.w_[0] = add_word(w_[0], o.w_[0]);
        r.w_[1] = add_word(w_[1], o.w_[1]);
        return r;
    }

    Mono inverse() const {
        Mono r;
        for (int i = 0; i < kMaxVars; ++i) r.set(i, -get(i));
        return r;
    }

    Mono pow(int k) const {
        Mono r;
        for (int i = 0; i < kMaxVars; ++i) r.set(i, get(i) * k);
        return r;
    }

    int total_degree() const {
        int d = 0;
        for (int i = 0; i < kMaxVars; ++i) d += get(i);
        return d;
    }

    // Index of the first variable with nonzero exponent, or -1 for the unit.
    int leading_var() const {
        for (int i = 0; i < kMaxVars; ++i) {
            if (get(i) != 0) return i;
        }
        return -1;
    }

    friend bool operator==(const Mono& a, const Mono& b) { return a.w_ == b.w_; }
    friend bool operator!=(const Mono& a, const Mono& b) { return a.w_ != b.w_; }
    friend bool operator<(const Mono& a, const Mono& b) { return a.w_ < b.w_; }
    friend bool operator>(const Mono& a, const Mono& b) { return b.w_ < a.w_; }

    std::size_t hash() const {
        return std::hash<std::uint64_t>{}(w_[0] * 0x9E3779B97F4A7C15ull ^ w_[1]);
    }

private:
    // Each 16-bit lane holds exponent + 0x2000 in its low 14 bits; bits 14 and 15
    // stay clear so lane sums never carry.
    static constexpr std::uint64_t kOne = 0x2000200020002000ull;
    static constexpr std::uint64_t kHigh = 0x8000800080008000ull;
    static constexpr std::uint64_t kBit14 = 0x4000400040004000ull;

    static void check_index(int index) {
        if (index < 0 || index >= kMaxVars) throw std::out_of_range("monomial variable index");
    }

    static std::uint64_t add_word(std::uint64_t a, std::uint64_t b) {
        const std::uint64_t r = ((a + b) | kHigh) - kOne;
        if ((r & kHigh) != kHigh || (r & kBit14) != 0) {
            throw std::overflow_error("monomial exponent out of range");
        }
        return r ^ kHigh;
    }

    std::array<std::uint64_t, 2> w_;
};

struct MonoHash {
    std::size_t operator()(const Mono& m) const { return m.hash(); }
};

}  // namespace hqva
