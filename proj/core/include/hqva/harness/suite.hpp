#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hqva/identity/checks.hpp"

namespace hqva::harness {

// Raised for invalid configurations and flags; maps to exit code 64.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Format { Json, Text };

// One run: either a cataloged check or an identity script.
struct SuiteEntry {
    std::string check;   // catalog name; empty for a script entry
    std::string name;    // report name of a script entry
    std::string script;  // script text
    CheckParams params;
    // Overrides handed to the evaluator for script entries; unset fields
    // fall back to the script's own declarations.
    EvalSettings script_settings;
};

struct SuiteConfig {
    std::vector<SuiteEntry> entries;
    Format format = Format::Json;
    std::optional<std::filesystem::path> cache_dir;
    int parallel = 1;
    bool timing = false;
};

// Exit codes.
constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitUsage = 64;

// Catalog lookup: identity checks, then module checks.
bool is_cataloged(const std::string& name);
std::vector<std::string> catalog_names();
std::string catalog_summary(const std::string& name);

// Throws UsageError for unknown names, unsupported families/ranks and
// out-of-range sizes, orders, caps or bounds.
void validate(const SuiteEntry& entry);
void validate_target(Family family, int n, int order);

// Parses a suite file (JSON; see docs/format.md). Relative script paths
// resolve against `base_dir`. Sweeps expand in the order targets, level, k,
// m, alpha. Throws UsageError.
SuiteConfig parse_suite(const std::string& json_text, const std::filesystem::path& base_dir = {});

// Runs one entry. Exceptions from the check become an Error report.
CheckReport run_entry(const SuiteEntry& entry, RMatrixSource& source);

// Runs every entry with up to config.parallel workers; reports come back in
// entry order. elapsed_ms is zeroed unless config.timing.
std::vector<CheckReport> run_suite(const SuiteConfig& config, RMatrixSource& source);

// JSON: one array of {name, params, verdict, residual_count, witness,
// elapsed_ms}. Text: one line per report plus an indented witness line.
std::string format_reports(const std::vector<CheckReport>& reports, Format format);

// 1 if any report fails or errors, else 2 if any is inconclusive, else 0.
int exit_code(const std::vector<CheckReport>& reports);

// "u=2,v=2" -> {{"u",2},{"v",2}}. Throws UsageError.
std::vector<std::pair<std::string, int>> parse_caps(const std::string& text);

}  // namespace hqva::harness
