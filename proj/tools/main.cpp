// hqva: command-line front end for the identity and module checks.
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hqva/harness/cache.hpp"
#include "hqva/harness/suite.hpp"

namespace {

using namespace hqva;
using namespace hqva::harness;

struct CommonFlags {
    std::string format = "json";
    std::string cache_dir;
    bool no_cache = false;
    bool timing = false;
    int parallel = 1;
};

Format format_of(const std::string& s) { return s == "text" ? Format::Text : Format::Json; }

std::shared_ptr<DiskCache> open_cache(const CommonFlags& f) {
    if (f.no_cache) return nullptr;
    return std::make_shared<DiskCache>(f.cache_dir.empty() ? default_cache_dir() : std::filesystem::path(f.cache_dir));
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_reports(const SuiteConfig& config, const std::shared_ptr<DiskCache>& cache) {
    CachedRMatrixSource source(cache);
    const auto reports = run_suite(config, source);
    std::cout << format_reports(reports, config.format) << std::flush;
    return exit_code(reports);
}

void print_series(const Normalizer& nz, Format format) {
    VarNames names;
    names.exp = {"z"};
    names.capped = {"h"};
    if (format == Format::Json) {
        nlohmann::ordered_json doc;
        doc["type"] = nz.ltd.label();
        doc["N"] = nz.ltd.N;
        doc["kappa"] = to_string(nz.ltd.kappa);
        doc["order"] = nz.order;
        doc["z_degree"] = nz.z_degree;
        doc["orders"] = nlohmann::ordered_json::array();
        for (int l = 0; l < nz.order; ++l) {
            nlohmann::ordered_json row;
            row["l"] = l;
            row["g1"] = nz.g1[l].to_string(names);
            row["denominator_power"] = nz.denominator_power[l];
            row["series"] = nlohmann::ordered_json::array();
            for (const auto& c : nz.g1_series[l]) row["series"].push_back(to_string(c));
            doc["orders"].push_back(std::move(row));
        }
        std::cout << doc.dump(2) << "\n";
        return;
    }
    std::cout << "type " << nz.ltd.label() << " N=" << nz.ltd.N << " kappa=" << to_string(nz.ltd.kappa)
              << " order=" << nz.order << " z_degree=" << nz.z_degree << "\n";
    for (int l = 0; l < nz.order; ++l) {
        std::cout << "h^" << l << ": g1 = " << nz.g1[l].to_string(names) << "\n";
        std::cout << "  (1 - z) power " << nz.denominator_power[l] << "\n  series";
        for (const auto& c : nz.g1_series[l]) std::cout << " " << to_string(c);
        std::cout << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact checks for R-matrix identities and the quantum vertex algebra module layer"};
    app.require_subcommand(1);
    CommonFlags common;

    auto add_common = [&](CLI::App* sub, bool runs_checks) {
        sub->add_option("--format", common.format, "Report format")->check(CLI::IsMember({"json", "text"}));
        sub->add_option("--cache-dir", common.cache_dir, "Cache directory (default $HQVA_CACHE_DIR)");
        sub->add_flag("--no-cache", common.no_cache, "Keep solved R-matrices in memory only");
        if (runs_checks) sub->add_flag("--timing", common.timing, "Report elapsed_ms");
    };

    // check
    std::string check_name, family = "C", caps, level = "0", alpha = "0";
    CheckParams params;
    auto* check = app.add_subcommand("check", "Run one cataloged check");
    check->add_option("name", check_name, "Check name (see `hqva list`)")->required();
    check->add_option("--family", family, "B, C or D")->check(CLI::IsMember({"B", "C", "D"}));
    check->add_option("--n", params.n, "Rank");
    check->add_option("--order", params.order, "Truncation order L (mod h^L)");
    check->add_option("--caps", caps, "Formal variable caps, e.g. u=2,v=2");
    check->add_option("--level", level, "Level c");
    check->add_option("--k", params.k, "Size of the first T+ block (module checks, csuni)");
    check->add_option("--m", params.m, "Size of the second T+ block (module checks)");
    check->add_option("--alpha", alpha, "Shift alpha (correspondence)");
    check->add_option("--r-start", params.r_start, "Least prefactor power tried");
    check->add_option("--r-bound", params.r_bound, "Largest prefactor power tried");
    check->add_flag("--perturb", params.perturb, "Evaluate the deliberately broken variant");
    add_common(check, true);

    // suite
    std::string suite_file;
    auto* suite = app.add_subcommand("suite", "Run a JSON suite file");
    suite->add_option("file", suite_file, "Suite file")->required();
    auto* parallel_opt = suite->add_option("--parallel", common.parallel, "Worker count")->check(CLI::Range(1, 64));
    add_common(suite, true);
    auto* suite_format = suite->get_option("--format");

    // series
    int zdeg = 10;
    auto* series = app.add_subcommand("series", "Print the normalizing series");
    series->add_option("--family", family, "B, C or D")->check(CLI::IsMember({"B", "C", "D"}));
    series->add_option("--n", params.n, "Rank");
    series->add_option("--order", params.order, "Truncation order L");
    series->add_option("--zdeg", zdeg, "Degree in z of the series cross-check")->check(CLI::Range(0, 64));
    add_common(series, false);

    // cache
    std::string cache_cmd;
    auto* cache = app.add_subcommand("cache", "Manage the on-disk normalizer cache");
    cache->add_option("command", cache_cmd, "warm, clear or inspect")
        ->required()
        ->check(CLI::IsMember({"warm", "clear", "inspect"}));
    auto* cache_family = cache->add_option("--family", family, "B, C or D")->check(CLI::IsMember({"B", "C", "D"}));
    cache->add_option("--n", params.n, "Rank");
    auto* cache_order = cache->add_option("--order", params.order, "Truncation order L");
    cache->add_option("--zdeg", zdeg, "Degree in z of the series cross-check")->check(CLI::Range(0, 64));
    cache->add_option("--cache-dir", common.cache_dir, "Cache directory (default $HQVA_CACHE_DIR)");

    app.add_subcommand("list", "List cataloged checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (check->parsed()) {
            SuiteEntry entry;
            entry.check = check_name;
            entry.params = params;
            entry.params.family = parse_family(family);
            if (!caps.empty()) entry.params.caps = parse_caps(caps);
            try {
                entry.params.level = parse_rational(level);
                entry.params.alpha = parse_rational(alpha);
            } catch (const std::exception&) {
                throw UsageError("--level and --alpha need integers or rationals such as 1/2");
            }
            validate(entry);
            SuiteConfig config;
            config.entries.push_back(std::move(entry));
            config.format = format_of(common.format);
            config.timing = common.timing;
            return run_reports(config, open_cache(common));
        }
        if (suite->parsed()) {
            const std::filesystem::path path(suite_file);
            SuiteConfig config = parse_suite(read_text(suite_file), path.parent_path());
            if (suite_format->count()) config.format = format_of(common.format);
            if (parallel_opt->count()) config.parallel = common.parallel;
            config.timing = config.timing || common.timing;
            if (!common.cache_dir.empty()) config.cache_dir = common.cache_dir;
            if (config.cache_dir && !common.no_cache) common.cache_dir = config.cache_dir->string();
            return run_reports(config, open_cache(common));
        }
        if (series->parsed()) {
            const CacheKey key{parse_family(family), params.n, params.order, zdeg};
            validate_target(key.family, key.n, key.order);
            const auto store = open_cache(common);
            const Normalizer nz = store ? store->load_or_solve(key)
                                        : solve_normalizer(lie_type_data(key.family, key.n), key.order, zdeg);
            print_series(nz, format_of(common.format));
            return kExitPass;
        }
        if (cache->parsed()) {
            DiskCache store(common.cache_dir.empty() ? default_cache_dir() : std::filesystem::path(common.cache_dir));
            const bool keyed = cache_family->count() || cache_order->count();
            const CacheKey key{parse_family(family), params.n, params.order, zdeg};
            if (keyed || cache_cmd == "warm") validate_target(key.family, key.n, key.order);
            if (cache_cmd == "warm") {
                std::cout << key.file_name() << " " << store.warm(key) << "\n";
            } else if (cache_cmd == "clear") {
                const int removed = keyed ? store.clear(key) : store.clear();
                std::cerr << "removed " << removed << " entr" << (removed == 1 ? "y" : "ies") << "\n";
            } else {
                int bad = 0;
                for (const auto& e : store.inspect()) {
                    if (keyed && !(e.key == key)) continue;
                    if (e.valid) {
                        std::cout << e.key.file_name() << " " << e.digest << "\n";
                    } else {
                        ++bad;
                        std::cout << e.key.file_name() << " corrupt: " << e.problem << "\n";
                    }
                }
                return bad ? kExitFail : kExitPass;
            }
            return kExitPass;
        }
        for (const auto& name : catalog_names()) std::cout << name << "  " << catalog_summary(name) << "\n";
        return kExitPass;
    } catch (const UsageError& e) {
        std::cerr << "hqva: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "hqva: error: " << e.what() << "\n";
        return kExitFail;
    }
}
