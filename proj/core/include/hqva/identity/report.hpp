#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace hqva {

// Error marks a check that could not be evaluated (a pole, an unsupported
// operand); it is reported separately from a nonzero residual.
enum class Verdict { Pass, Fail, Inconclusive, Error };

const char* verdict_name(Verdict v);

struct CheckReport {
    std::string name;
    // Ordered key/value pairs: family, n, L, caps, level, then check-specific
    // entries such as r.
    std::vector<std::pair<std::string, std::string>> params;
    Verdict verdict = Verdict::Fail;
    std::size_t residual_count = 0;
    std::string witness;
    double elapsed_ms = 0;

    void set_param(const std::string& key, const std::string& value);
    const std::string* param(const std::string& key) const;
};

}  // namespace hqva
