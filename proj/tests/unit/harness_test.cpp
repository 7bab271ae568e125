#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "hqva/harness/cache.hpp"
#include "hqva/harness/suite.hpp"
#include "json.hpp"

using namespace hqva;
using namespace hqva::harness;
namespace fs = std::filesystem;

namespace {

// Fresh directory under the system temp dir, removed afterwards.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = fs::temp_directory_path() / ("hqva_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::trunc);
    out << text;
}

CheckReport report(const std::string& name, Verdict v) {
    CheckReport r;
    r.name = name;
    r.verdict = v;
    r.set_param("family", "C");
    return r;
}

}  // namespace

TEST(HarnessCaps, ParsesPairs) {
    const auto caps = parse_caps("u=2,v=3");
    ASSERT_EQ(caps.size(), 2u);
    EXPECT_EQ(caps[0], std::make_pair(std::string("u"), 2));
    EXPECT_EQ(caps[1], std::make_pair(std::string("v"), 3));
    EXPECT_THROW(parse_caps("u2"), UsageError);
    EXPECT_THROW(parse_caps("u=x"), UsageError);
    EXPECT_THROW(parse_caps("=2"), UsageError);
}

TEST(HarnessSuite, SweepsExpandInFixedOrder) {
    const SuiteConfig c = parse_suite(R"({
      "defaults": {"targets": ["C1", "B1"], "order": 2},
      "checks": [{"check": "rtt_minus", "level": ["0", "1/2"], "k": [1, 2]},
                 {"check": "ybe_hat", "family": "D", "n": 2}]
    })");
    ASSERT_EQ(c.entries.size(), 9u);
    EXPECT_EQ(c.entries[0].params.family, Family::C);
    EXPECT_EQ(c.entries[1].params.k, 2);
    EXPECT_EQ(c.entries[2].params.level, Rational(1, 2));
    EXPECT_EQ(c.entries[4].params.family, Family::B);
    EXPECT_EQ(c.entries[8].check, "ybe_hat");
    EXPECT_EQ(c.entries[8].params.family, Family::D);
    EXPECT_EQ(c.entries[8].params.n, 2);
    EXPECT_EQ(c.entries[8].params.order, 2);
}

TEST(HarnessSuite, RejectsInvalidConfigs) {
    const char* bad[] = {
        "[]",
        R"({"checks": []})",
        R"({"checks": [{"check": "nosuch"}]})",
        R"({"checks": [{"check": "ybe_hat", "order": 0}]})",
        R"({"checks": [{"check": "ybe_hat", "family": "A"}]})",
        R"({"checks": [{"check": "ybe_hat", "family": "D", "n": 1}]})",
        R"({"checks": [{"check": "rtt_minus", "k": 3}]})",
        R"({"checks": [{"check": "ybe_hat", "colour": 1}]})",
        R"({"checks": [{"check": "ybe_hat", "script": "1 == 1"}]})",
        R"({"checks": [{"script": "1 == 1"}]})",
        R"({"checks": [{"name": "x", "script": "R12(u) =="}]})",
        R"({"checks": [{"check": "ybe_hat"}], "parallel": 0})",
        R"({"checks": [{"check": "ybe_hat"}], "format": "xml"})",
        R"({"checks": [{"check": "ybe_hat", "level": "a/b"}]})",
        "{not json",
    };
    for (const char* text : bad) EXPECT_THROW(parse_suite(text), UsageError) << text;
}

TEST(HarnessReports, JsonIsOneArrayWithStableFieldOrder) {
    auto r = report("ybe_hat", Verdict::Pass);
    r.elapsed_ms = 12.4;
    const std::string text = format_reports({r, report("rtt_minus", Verdict::Fail)}, Format::Json);
    const auto doc = nlohmann::ordered_json::parse(text);
    ASSERT_TRUE(doc.is_array());
    ASSERT_EQ(doc.size(), 2u);
    std::vector<std::string> keys;
    for (const auto& [k, v] : doc[0].items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"name", "params", "verdict", "residual_count", "witness", "elapsed_ms"}));
    EXPECT_EQ(doc[0]["elapsed_ms"], 12);
    EXPECT_EQ(doc[1]["verdict"], "fail");
}

TEST(HarnessReports, ExitCodeContract) {
    EXPECT_EQ(exit_code({report("a", Verdict::Pass)}), kExitPass);
    EXPECT_EQ(exit_code({report("a", Verdict::Pass), report("b", Verdict::Inconclusive)}), kExitInconclusive);
    EXPECT_EQ(exit_code({report("a", Verdict::Inconclusive), report("b", Verdict::Fail)}), kExitFail);
    EXPECT_EQ(exit_code({report("a", Verdict::Error)}), kExitFail);
    EXPECT_EQ(kExitUsage, 64);
}

TEST(HarnessReports, ContentDoesNotDependOnParallelism) {
    SuiteConfig c = parse_suite(R"({
      "defaults": {"targets": ["C1", "B1"], "order": 2},
      "checks": [{"check": "ybe_hat"}, {"check": "unitarity_hat", "perturb": true},
                 {"check": "rel_minus", "k": [1, 2]}, {"check": "correspondence", "r_bound": 1}]
    })");
    CachedRMatrixSource s1, s2;
    const auto serial = format_reports(run_suite(c, s1), Format::Json);
    c.parallel = 4;
    const auto parallel = format_reports(run_suite(c, s2), Format::Json);
    EXPECT_EQ(serial, parallel);
    const auto doc = nlohmann::json::parse(serial);
    EXPECT_EQ(doc[2]["verdict"], "fail");
    EXPECT_EQ(doc[2]["params"]["perturb"], "true");
    EXPECT_EQ(doc[8]["verdict"], "inconclusive");
}

TEST(HarnessReports, CheckErrorsBecomeErrorReports) {
    SuiteEntry e;
    e.check = "s_unitarity";
    e.params.m = 5;  // bypasses validate()
    MemoryRMatrixSource source;
    const CheckReport r = run_entry(e, source);
    EXPECT_EQ(r.verdict, Verdict::Error);
    EXPECT_FALSE(r.witness.empty());
}

TEST(HarnessCache, EntryRoundTrips) {
    const CacheKey key{Family::B, 1, 3, 6};
    const Normalizer nz = solve_normalizer(lie_type_data(Family::B, 1), 3, 6);
    const std::string body = serialize_entry(key, nz);
    const Normalizer back = parse_entry(body, key);
    EXPECT_EQ(serialize_entry(key, back), body);
    EXPECT_THROW(parse_entry(body, CacheKey{Family::B, 1, 3, 7}), std::invalid_argument);
}

TEST(HarnessCache, WarmInspectClear) {
    TempDir dir("cache");
    DiskCache cache(dir.path());
    const CacheKey key{Family::C, 1, 4, 10};
    EXPECT_TRUE(cache.inspect().empty());
    const std::string d1 = cache.warm(key);
    const auto stamp = fs::last_write_time(dir.path() / key.file_name());
    const std::string d2 = cache.warm(key);
    EXPECT_EQ(d1, d2);
    EXPECT_EQ(fs::last_write_time(dir.path() / key.file_name()), stamp);
    const auto seen = cache.inspect();
    ASSERT_EQ(seen.size(), 1u);
    EXPECT_TRUE(seen[0].valid);
    EXPECT_EQ(seen[0].digest, d1);
    EXPECT_EQ(cache.clear(), 1);
    EXPECT_TRUE(cache.inspect().empty());
}

TEST(HarnessCache, CorruptEntriesAreRecomputed) {
    TempDir dir("corrupt");
    DiskCache cache(dir.path());
    const CacheKey key{Family::C, 1, 3, 10};
    const std::string digest = cache.warm(key);
    const fs::path file = dir.path() / key.file_name();
    const std::string good = slurp(file);

    // Damaged bytes: digest mismatch.
    std::string damaged = good;
    damaged[damaged.find("g1 1") + 5] = '7';
    spit(file, damaged);
    EXPECT_FALSE(cache.inspect()[0].valid);
    bool warned = false;
    cache.load_or_solve(key, &warned);
    EXPECT_TRUE(warned);
    EXPECT_EQ(slurp(file), good);

    // Consistent digest over wrong content: caught by the recursion check.
    std::string body = good.substr(0, good.rfind("digest "));
    const auto pos = body.find("series 1 ");
    body.replace(pos, 10, "series 1 5");
    spit(file, body + "digest " + sha256_hex(body) + "\n");
    const auto info = cache.inspect();
    EXPECT_FALSE(info[0].valid);
    EXPECT_NE(info[0].problem.find("recursion"), std::string::npos) << info[0].problem;
    EXPECT_EQ(cache.warm(key), digest);
}

TEST(HarnessCache, SourceReadsThroughTheCache) {
    TempDir dir("source");
    auto cache = std::make_shared<DiskCache>(dir.path());
    CachedRMatrixSource source(cache);
    auto a = source.get(Family::C, 1, 2);
    EXPECT_EQ(a, source.get(Family::C, 1, 2));
    EXPECT_TRUE(fs::exists(dir.path() / CacheKey{Family::C, 1, 2, 10}.file_name()));
    CachedRMatrixSource again(cache);
    auto b = again.get(Family::C, 1, 2);
    EXPECT_EQ(a->base().to_string(), b->base().to_string());
}
