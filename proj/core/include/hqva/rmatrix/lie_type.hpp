#pragma once

#include <string>
#include <vector>

#include "hqva/exact/poly.hpp"

namespace hqva {

enum class Family { B, C, D };

Family parse_family(const std::string& s);
char family_letter(Family f);

// Index data of the orthogonal/symplectic series. Indices are 0-based here;
// prime(i) is the involution i -> i' = N+1-i written for 0-based indices.
struct LieTypeData {
    Family family;
    int n;
    int N;
    std::vector<Rational> bar;
    std::vector<int> eps;
    Rational kappa;
    int xi_exponent;  // xi = q^{xi_exponent}

    int prime(int i) const { return N - 1 - i; }
    std::string label() const;  // "C1", "B2", ...
};

// Throws std::invalid_argument for n < 1, or for type D with n < 2.
LieTypeData lie_type_data(Family family, int n);

}  // namespace hqva
