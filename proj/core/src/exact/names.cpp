#include "hqva/exact/names.hpp"

#include "hqva/exact/mono.hpp"

namespace hqva {

VarNames VarNames::defaults() {
    VarNames n;
    for (int i = 0; i < Mono::kMaxVars; ++i) {
        n.exp.push_back("x" + std::to_string(i));
        n.capped.push_back(i == 0 ? "h" : "t" + std::to_string(i));
    }
    return n;
}

std::string VarNames::exp_name(int i) const {
    if (i >= 0 && i < static_cast<int>(exp.size())) return exp[i];
    return "x" + std::to_string(i);
}

std::string VarNames::capped_name(int i) const {
    if (i >= 0 && i < static_cast<int>(capped.size())) return capped[i];
    return i == 0 ? "h" : "t" + std::to_string(i);
}

int VarNames::find_exp(const std::string& name) const {
    for (int i = 0; i < static_cast<int>(exp.size()); ++i) {
        if (exp[i] == name) return i;
    }
    return -1;
}

int VarNames::find_capped(const std::string& name) const {
    for (int i = 0; i < static_cast<int>(capped.size()); ++i) {
        if (capped[i] == name) return i;
    }
    return -1;
}

}  // namespace hqva
