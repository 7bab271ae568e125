#pragma once

#include <string>
#include <vector>

namespace hqva {

// Display names for exponential (ring) variables and capped formal variables.
// Values only carry variable indices; names are attached when printing or
// parsing. Capped variable 0 is always h.
struct VarNames {
    std::vector<std::string> exp;
    std::vector<std::string> capped;

    static VarNames defaults();
    std::string exp_name(int i) const;
    std::string capped_name(int i) const;
    // -1 when unknown.
    int find_exp(const std::string& name) const;
    int find_capped(const std::string& name) const;
};

}  // namespace hqva
