#pragma once

#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "hqva/identity/report.hpp"
#include "hqva/identity/script.hpp"
#include "hqva/rmatrix/rmatrix.hpp"

namespace hqva {

// Supplies solved R-matrices keyed by (family, n, L). Implementations must
// be safe to call from several threads.
class RMatrixSource {
public:
    virtual ~RMatrixSource() = default;
    virtual std::shared_ptr<const RMatrix> get(Family family, int n, int order) = 0;
};

// Solves on first request and keeps the result in memory.
class MemoryRMatrixSource : public RMatrixSource {
public:
    std::shared_ptr<const RMatrix> get(Family family, int n, int order) override;

private:
    std::mutex mutex_;
    std::map<std::tuple<Family, int, int>, std::shared_future<std::shared_ptr<const RMatrix>>> cache_;
};

// Raised while evaluating a script; names the atom that failed.
struct EvaluationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Evaluation parameters. Unset fields fall back to the script's declarations,
// then to C, n = 1, L = 3, level 0.
struct EvalSettings {
    std::optional<Family> family;
    std::optional<int> n;
    std::optional<int> order;
    std::optional<Rational> level;
    // Cap overrides for declared capped variables.
    std::vector<std::pair<std::string, int>> caps;
};

struct ResolvedSettings {
    Family family;
    int n;
    int order;
    Rational level;
    std::vector<std::pair<std::string, int>> caps;
};

ResolvedSettings resolve_settings(const dsl::IdentityScript& script, const EvalSettings& settings);

// Both sides as operators on the common slot count, plus the names used for
// printing their entries.
struct EvaluatedSides {
    TensorOp lhs;
    TensorOp rhs;
    VarNames names;
};

// Throws EvaluationError for poles and unsupported operands.
EvaluatedSides evaluate_sides(const dsl::IdentityScript& script, const RMatrix& rmatrix,
                              const ResolvedSettings& settings);

// Evaluates both sides and reports the exact residual. An EvaluationError
// becomes a report with verdict Error.
CheckReport evaluate(const std::string& name, const dsl::IdentityScript& script, RMatrixSource& source,
                     const EvalSettings& settings = {});

// Standard leading parameters of a report.
void add_standard_params(CheckReport& report, const ResolvedSettings& settings);

}  // namespace hqva
