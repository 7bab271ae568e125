#include "hqva/rmatrix/lie_type.hpp"

#include <stdexcept>

namespace hqva {

Family parse_family(const std::string& s) {
    if (s == "B" || s == "b") return Family::B;
    if (s == "C" || s == "c") return Family::C;
    if (s == "D" || s == "d") return Family::D;
    throw std::invalid_argument("unknown family '" + s + "' (expected B, C or D)");
}

char family_letter(Family f) {
    switch (f) {
        case Family::B:
            return 'B';
        case Family::C:
            return 'C';
        case Family::D:
            return 'D';
    }
    return '?';
}

std::string LieTypeData::label() const { return std::string(1, family_letter(family)) + std::to_string(n); }

LieTypeData lie_type_data(Family family, int n) {
    if (n < 1) throw std::invalid_argument("rank must be at least 1");
    if (family == Family::D && n < 2) throw std::invalid_argument("type D needs rank at least 2 (o_2 is abelian)");
    LieTypeData t;
    t.family = family;
    t.n = n;
    t.N = family == Family::B ? 2 * n + 1 : 2 * n;
    t.eps.assign(static_cast<std::size_t>(t.N), 1);
    if (family == Family::C) {
        for (int i = n; i < t.N; ++i) t.eps[static_cast<std::size_t>(i)] = -1;
    }
    for (int i = 0; i < t.N; ++i) {
        Rational b;
        switch (family) {
            case Family::B:
                b = i < n ? Rational(2 * n - 1 - 2 * i, 2) : i == n ? Rational(0) : Rational(2 * n + 1 - 2 * i, 2);
                break;
            case Family::C:
                b = i < n ? Rational(n - i) : Rational(n - 1 - i);
                break;
            case Family::D:
                b = i < n ? Rational(n - 1 - i) : Rational(n - i);
                break;
        }
        b.canonicalize();
        t.bar.push_back(b);
    }
    if (family == Family::C) {
        t.kappa = Rational(t.N, 2) + 1;
        t.xi_exponent = -2 - t.N;
    } else {
        t.kappa = Rational(t.N, 2) - 1;
        t.xi_exponent = 2 - t.N;
    }
    t.kappa.canonicalize();
    return t;
}

}  // namespace hqva
