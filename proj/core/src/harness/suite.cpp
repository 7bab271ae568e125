#include "hqva/harness/suite.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "hqva/identity/script.hpp"
#include "hqva/qva/module_checks.hpp"

namespace hqva::harness {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kMaxOrder = 8;
constexpr int kMaxCap = 8;
constexpr int kMaxRBound = 64;
constexpr int kMaxParallel = 64;

const CheckEntry* find_entry(const std::string& name) {
    for (const auto& e : identity_checks()) {
        if (e.name == name) return &e;
    }
    for (const auto& e : qva::module_checks()) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

std::string where(const json& j) {
    std::string s = j.dump();
    if (s.size() > 80) s = s.substr(0, 77) + "...";
    return s;
}

Rational rational_of(const json& v, const std::string& field) {
    try {
        if (v.is_number_integer()) return Rational(v.get<long>());
        if (v.is_string()) return parse_rational(v.get<std::string>());
    } catch (const std::exception&) {
    }
    throw UsageError("field '" + field + "' needs an integer or a rational string, got " + where(v));
}

int int_of(const json& v, const std::string& field) {
    if (!v.is_number_integer()) throw UsageError("field '" + field + "' needs an integer, got " + where(v));
    return v.get<int>();
}

// A scalar or a list of scalars.
std::vector<json> values(const json& obj, const std::string& field) {
    if (!obj.contains(field)) return {};
    const json& v = obj.at(field);
    if (v.is_array()) {
        if (v.empty()) throw UsageError("field '" + field + "' is an empty list");
        return {v.begin(), v.end()};
    }
    return {v};
}

std::pair<Family, int> parse_target(const std::string& t) {
    if (t.size() < 2) throw UsageError("bad target '" + t + "' (expected e.g. C1)");
    try {
        std::size_t used = 0;
        const int n = std::stoi(t.substr(1), &used);
        if (used != t.size() - 1) throw std::invalid_argument(t);
        return {parse_family(t.substr(0, 1)), n};
    } catch (const std::exception&) {
        throw UsageError("bad target '" + t + "' (expected e.g. C1)");
    }
}

std::vector<std::pair<std::string, int>> caps_of(const json& v) {
    if (v.is_string()) return parse_caps(v.get<std::string>());
    if (!v.is_object()) throw UsageError("field 'caps' needs an object or \"u=2,v=2\"");
    std::vector<std::pair<std::string, int>> caps;
    for (const auto& [k, c] : v.items()) caps.emplace_back(k, int_of(c, "caps." + k));
    return caps;
}

const std::vector<std::string> kEntryFields = {"check", "script", "script_file", "name",  "family",  "n",
                                               "targets", "order", "caps",  "level", "k",    "m",
                                               "alpha",  "r_start", "r_bound", "perturb"};

void expand(const json& raw, const json& defaults, const fs::path& base_dir, std::vector<SuiteEntry>& out) {
    if (!raw.is_object()) throw UsageError("suite entry must be an object: " + where(raw));
    json e = defaults;
    if (raw.contains("targets")) {
        e.erase("family");
        e.erase("n");
    } else if (raw.contains("family") || raw.contains("n")) {
        e.erase("targets");
    }
    for (const auto& [k, v] : raw.items()) {
        if (std::find(kEntryFields.begin(), kEntryFields.end(), k) == kEntryFields.end()) {
            throw UsageError("unknown field '" + k + "' in " + where(raw));
        }
        e[k] = v;
    }
    const int kinds = raw.contains("check") + raw.contains("script") + raw.contains("script_file");
    if (kinds != 1) throw UsageError("entry needs exactly one of check, script, script_file: " + where(raw));

    SuiteEntry base;
    EvalSettings& es = base.script_settings;
    if (e.contains("check")) {
        if (!e.at("check").is_string()) throw UsageError("field 'check' needs a string");
        base.check = e.at("check").get<std::string>();
    } else {
        if (!raw.contains("name") || !raw.at("name").is_string()) throw UsageError("script entries need a name");
        base.name = raw.at("name").get<std::string>();
        if (raw.contains("script")) {
            if (!raw.at("script").is_string()) throw UsageError("field 'script' needs a string");
            base.script = raw.at("script").get<std::string>();
        } else {
            if (!raw.at("script_file").is_string()) throw UsageError("field 'script_file' needs a string");
            fs::path p = raw.at("script_file").get<std::string>();
            if (p.is_relative()) p = base_dir / p;
            std::ifstream in(p);
            if (!in) throw UsageError("cannot read script " + p.string());
            std::ostringstream s;
            s << in.rdbuf();
            base.script = s.str();
        }
        try {
            dsl::parse_script(base.script);
        } catch (const std::exception& ex) {
            throw UsageError("script '" + base.name + "': " + ex.what());
        }
    }

    CheckParams& p = base.params;
    if (e.contains("order")) es.order = p.order = int_of(e.at("order"), "order");
    if (e.contains("caps")) es.caps = p.caps = caps_of(e.at("caps"));
    if (e.contains("r_start")) p.r_start = int_of(e.at("r_start"), "r_start");
    if (e.contains("r_bound")) p.r_bound = int_of(e.at("r_bound"), "r_bound");
    if (e.contains("perturb")) {
        if (!e.at("perturb").is_boolean()) throw UsageError("field 'perturb' needs true or false");
        p.perturb = e.at("perturb").get<bool>();
    }

    std::vector<std::optional<std::pair<Family, int>>> targets;
    if (e.contains("targets")) {
        if (e.contains("family") || e.contains("n")) throw UsageError("use either targets or family/n: " + where(raw));
        for (const auto& t : values(e, "targets")) {
            if (!t.is_string()) throw UsageError("targets must be strings such as \"C1\"");
            targets.emplace_back(parse_target(t.get<std::string>()));
        }
    } else if (e.contains("family") || e.contains("n")) {
        Family f = Family::C;
        if (e.contains("family")) {
            if (!e.at("family").is_string()) throw UsageError("field 'family' needs B, C or D");
            try {
                f = parse_family(e.at("family").get<std::string>());
            } catch (const std::exception&) {
                throw UsageError("field 'family' needs B, C or D");
            }
        }
        targets.emplace_back(std::make_pair(f, e.contains("n") ? int_of(e.at("n"), "n") : 1));
    } else {
        targets.emplace_back(std::nullopt);
    }
    auto levels = values(e, "level");
    auto ks = values(e, "k");
    auto ms = values(e, "m");
    auto alphas = values(e, "alpha");
    const json unset;
    for (auto* v : {&levels, &ks, &ms, &alphas}) {
        if (v->empty()) v->push_back(unset);
    }
    for (const auto& t : targets) {
        for (const auto& lv : levels) {
            for (const auto& k : ks) {
                for (const auto& m : ms) {
                    for (const auto& a : alphas) {
                        SuiteEntry s = base;
                        if (t) {
                            s.params.family = t->first;
                            s.params.n = t->second;
                            s.script_settings.family = t->first;
                            s.script_settings.n = t->second;
                        }
                        if (!lv.is_null()) s.script_settings.level = s.params.level = rational_of(lv, "level");
                        if (!k.is_null()) s.params.k = int_of(k, "k");
                        if (!m.is_null()) s.params.m = int_of(m, "m");
                        if (!a.is_null()) s.params.alpha = rational_of(a, "alpha");
                        validate(s);
                        out.push_back(std::move(s));
                    }
                }
            }
        }
    }
}

}  // namespace

bool is_cataloged(const std::string& name) { return find_entry(name) != nullptr; }

std::vector<std::string> catalog_names() {
    std::vector<std::string> names;
    for (const auto& e : identity_checks()) names.push_back(e.name);
    for (const auto& e : qva::module_checks()) names.push_back(e.name);
    return names;
}

std::string catalog_summary(const std::string& name) {
    const CheckEntry* e = find_entry(name);
    return e ? e->summary : std::string();
}

std::vector<std::pair<std::string, int>> parse_caps(const std::string& text) {
    std::vector<std::pair<std::string, int>> caps;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("bad cap '" + item + "' (expected name=value)");
        const std::string name = item.substr(0, eq);
        try {
            std::size_t used = 0;
            const int value = std::stoi(item.substr(eq + 1), &used);
            if (used != item.size() - eq - 1) throw std::invalid_argument(item);
            caps.emplace_back(name, value);
        } catch (const std::exception&) {
            throw UsageError("bad cap '" + item + "' (expected name=value)");
        }
    }
    return caps;
}

void validate_target(Family family, int n, int order) {
    try {
        lie_type_data(family, n);
    } catch (const std::exception& ex) {
        throw UsageError(ex.what());
    }
    if (order < 1 || order > kMaxOrder) {
        throw UsageError("order = " + std::to_string(order) + " outside [1, " + std::to_string(kMaxOrder) + "]");
    }
}

void validate(const SuiteEntry& entry) {
    const CheckParams& p = entry.params;
    const std::string label = entry.check.empty() ? entry.name : entry.check;
    if (entry.check.empty() == entry.script.empty()) throw UsageError("entry needs a check name or a script");
    if (!entry.check.empty() && !is_cataloged(entry.check)) throw UsageError("unknown check '" + entry.check + "'");
    try {
        lie_type_data(p.family, p.n);
    } catch (const std::exception& ex) {
        throw UsageError(label + ": " + ex.what());
    }
    auto range = [&](const char* what, int v, int lo, int hi) {
        if (v < lo || v > hi) {
            throw UsageError(label + ": " + what + " = " + std::to_string(v) + " outside [" + std::to_string(lo) +
                             ", " + std::to_string(hi) + "]");
        }
    };
    range("order", p.order, 1, kMaxOrder);
    range("k", p.k, 1, 2);
    range("m", p.m, 1, 2);
    range("r_bound", p.r_bound, 0, kMaxRBound);
    range("r_start", p.r_start, 0, p.r_bound);
    for (const auto& [name, c] : p.caps) {
        if (name.empty() || name == "h") throw UsageError(label + ": bad cap name '" + name + "'");
        range(("cap " + name).c_str(), c, 0, kMaxCap);
    }
}

SuiteConfig parse_suite(const std::string& json_text, const fs::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& ex) {
        throw UsageError(std::string("suite is not valid JSON: ") + ex.what());
    }
    if (!doc.is_object()) throw UsageError("suite must be a JSON object");
    for (const auto& [k, v] : doc.items()) {
        if (k != "format" && k != "parallel" && k != "cache_dir" && k != "timing" && k != "defaults" &&
            k != "checks") {
            throw UsageError("unknown suite field '" + k + "'");
        }
    }
    SuiteConfig config;
    if (doc.contains("format")) {
        const json& f = doc.at("format");
        if (f == "json") {
            config.format = Format::Json;
        } else if (f == "text") {
            config.format = Format::Text;
        } else {
            throw UsageError("format must be json or text");
        }
    }
    if (doc.contains("parallel")) {
        config.parallel = int_of(doc.at("parallel"), "parallel");
        if (config.parallel < 1 || config.parallel > kMaxParallel) throw UsageError("parallel outside [1, 64]");
    }
    if (doc.contains("cache_dir")) {
        if (!doc.at("cache_dir").is_string()) throw UsageError("cache_dir needs a string");
        fs::path d = doc.at("cache_dir").get<std::string>();
        config.cache_dir = d.is_relative() ? base_dir / d : d;
    }
    if (doc.contains("timing")) {
        if (!doc.at("timing").is_boolean()) throw UsageError("timing needs true or false");
        config.timing = doc.at("timing").get<bool>();
    }
    json defaults = json::object();
    if (doc.contains("defaults")) {
        defaults = doc.at("defaults");
        if (!defaults.is_object()) throw UsageError("defaults must be an object");
        for (const auto& k : {"check", "script", "script_file", "name"}) {
            if (defaults.contains(k)) throw UsageError(std::string("defaults may not set '") + k + "'");
        }
    }
    if (!doc.contains("checks") || !doc.at("checks").is_array() || doc.at("checks").empty()) {
        throw UsageError("suite needs a non-empty 'checks' array");
    }
    for (const auto& raw : doc.at("checks")) expand(raw, defaults, base_dir, config.entries);
    return config;
}

CheckReport run_entry(const SuiteEntry& entry, RMatrixSource& source) {
    const auto start = std::chrono::steady_clock::now();
    CheckReport report;
    try {
        if (!entry.check.empty()) {
            report = find_entry(entry.check)->run(entry.params, source);
        } else {
            report = evaluate(entry.name, dsl::parse_script(entry.script), source, entry.script_settings);
        }
    } catch (const std::exception& ex) {
        report = CheckReport{};
        report.name = entry.check.empty() ? entry.name : entry.check;
        report.set_param("family", std::string(1, family_letter(entry.params.family)));
        report.set_param("n", std::to_string(entry.params.n));
        report.set_param("L", std::to_string(entry.params.order));
        report.verdict = Verdict::Error;
        report.witness = clip_witness(ex.what());
    }
    if (entry.params.perturb) report.set_param("perturb", "true");
    report.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::vector<CheckReport> run_suite(const SuiteConfig& config, RMatrixSource& source) {
    std::vector<CheckReport> reports(config.entries.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < reports.size(); i = next++) reports[i] = run_entry(config.entries[i], source);
    };
    const std::size_t width = std::min<std::size_t>(static_cast<std::size_t>(config.parallel), reports.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < width; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (!config.timing) {
        for (auto& r : reports) r.elapsed_ms = 0;
    }
    return reports;
}

std::string format_reports(const std::vector<CheckReport>& reports, Format format) {
    if (format == Format::Json) {
        ordered_json arr = ordered_json::array();
        for (const auto& r : reports) {
            ordered_json params = ordered_json::object();
            for (const auto& [k, v] : r.params) params[k] = v;
            ordered_json o;
            o["name"] = r.name;
            o["params"] = std::move(params);
            o["verdict"] = verdict_name(r.verdict);
            o["residual_count"] = r.residual_count;
            o["witness"] = r.witness;
            o["elapsed_ms"] = static_cast<long long>(std::llround(r.elapsed_ms));
            arr.push_back(std::move(o));
        }
        return arr.dump(2) + "\n";
    }
    std::string out;
    for (const auto& r : reports) {
        std::string verdict = verdict_name(r.verdict);
        for (auto& c : verdict) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        out += verdict + " " + r.name;
        for (const auto& [k, v] : r.params) out += " " + k + "=" + (v.empty() ? "-" : v);
        out += " residual_count=" + std::to_string(r.residual_count);
        if (r.elapsed_ms != 0) out += " elapsed_ms=" + std::to_string(std::llround(r.elapsed_ms));
        out += "\n";
        if (!r.witness.empty()) out += "  witness: " + r.witness + "\n";
    }
    return out;
}

int exit_code(const std::vector<CheckReport>& reports) {
    bool inconclusive = false;
    for (const auto& r : reports) {
        if (r.verdict == Verdict::Fail || r.verdict == Verdict::Error) return kExitFail;
        inconclusive = inconclusive || r.verdict == Verdict::Inconclusive;
    }
    return inconclusive ? kExitInconclusive : kExitPass;
}

}  // namespace hqva::harness
