// Acceptance run: one line per criterion, exit status 0 iff every criterion
// passes. Every check demands an exactly zero residual.
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hqva/harness/suite.hpp"
#include "hqva/identity/script.hpp"
#include "hqva/qva/module_checks.hpp"

using namespace hqva;
using namespace hqva::harness;

namespace {

struct Target {
    Family family;
    int n;
};

const std::vector<Target> kThreeTypes = {{Family::C, 1}, {Family::B, 1}, {Family::D, 2}};

std::string label(const CheckReport& r) {
    std::string s = r.name;
    for (const auto& [k, v] : r.params) s += " " + k + "=" + v;
    return s;
}

// Collects reports for one criterion and its failure notes.
class Criterion {
public:
    Criterion(int number, std::string title) : number_(number), title_(std::move(title)) {}

    void expect_pass(const CheckReport& r) {
        ++checks_;
        if (r.verdict != Verdict::Pass || r.residual_count != 0) {
            fail(label(r) + ": " + verdict_name(r.verdict) + " residual_count=" + std::to_string(r.residual_count) +
                 (r.witness.empty() ? "" : " witness " + clip_witness(r.witness, 160)));
        }
    }

    void expect_fail(const CheckReport& r) {
        ++checks_;
        if (r.verdict != Verdict::Fail || r.residual_count == 0) {
            fail("negative control " + label(r) + " did not fail: " + verdict_name(r.verdict));
        }
    }

    void expect(bool ok, const std::string& what) {
        ++checks_;
        if (!ok) fail(what);
    }

    void fail(const std::string& note) { notes_.push_back(note); }

    bool report() const {
        const bool ok = notes_.empty();
        std::cout << "criterion " << number_ << ": " << (ok ? "PASS" : "FAIL") << "  " << title_ << " ("
                  << checks_ << " checks)" << std::endl;
        for (const auto& n : notes_) std::cout << "    " << n << std::endl;
        return ok;
    }

private:
    int number_;
    std::string title_;
    int checks_ = 0;
    std::vector<std::string> notes_;
};

CheckParams params(Target t, int order) {
    CheckParams p;
    p.family = t.family;
    p.n = t.n;
    p.order = order;
    return p;
}

CheckReport run(const std::string& name, const CheckParams& p, RMatrixSource& source) {
    SuiteEntry e;
    e.check = name;
    e.params = p;
    validate(e);
    return run_entry(e, source);
}

CheckReport run_script(const std::string& name, const std::string& text, Target t, int order,
                       RMatrixSource& source) {
    EvalSettings s;
    s.family = t.family;
    s.n = t.n;
    s.order = order;
    try {
        return evaluate(name, dsl::parse_script(text), source, s);
    } catch (const std::exception& ex) {
        CheckReport r;
        r.name = name;
        r.verdict = Verdict::Error;
        r.witness = ex.what();
        return r;
    }
}

struct Outcome {
    int status = -1;
    std::string out;
};

Outcome run_cli(const std::string& args) {
    const std::string cmd = std::string(HQVA_CLI) + " " + args + " 2>/dev/null";
    Outcome o;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return o;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) o.out.append(buf, n);
    const int raw = ::pclose(pipe);
    o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return o;
}

}  // namespace

int main() {
    MemoryRMatrixSource source;
    bool all = true;

    {
        Criterion c(1, "normalizer at L=4: functional equation and series oracle to z^10");
        for (Target t : kThreeTypes) {
            const LieTypeData ltd = lie_type_data(t.family, t.n);
            try {
                const Normalizer nz = solve_normalizer(ltd, 4, 10);
                const auto oracle = normalizer_series_oracle(ltd, 4, 10);
                for (int l = 0; l < 4; ++l) {
                    c.expect(expand_at_zero(nz.g1[l], kZ, 10) == oracle[l],
                             ltd.label() + ": rational form differs from the recursion at h^" + std::to_string(l));
                }
            } catch (const std::exception& ex) {
                c.fail(ltd.label() + ": " + ex.what());
            }
            c.expect_pass(run("gfunc", params(t, 4), source));
        }
        all &= c.report();
    }

    {
        Criterion c(2, "classical limits: Rhat and Rtilde are the identity at h^0");
        for (Target t : kThreeTypes) {
            c.expect_pass(run_script("rhat_classical", "spectral u\nRhat(u) == 1\n", t, 1, source));
            c.expect_pass(run_script("rtilde_classical", "Rt(x) == 1\n", t, 1, source));
            // The identity is only the leading term.
            c.expect_fail(run_script("rhat_first_order", "spectral u\nRhat(u) == 1\n", t, 2, source));
        }
        all &= c.report();
    }

    {
        Criterion c(3, "Rhat: Yang-Baxter, crossing, unitarity at L=3, N = 2, 3, 4");
        for (Target t : {Target{Family::C, 1}, Target{Family::B, 1}, Target{Family::C, 2}, Target{Family::D, 2}}) {
            for (const char* name : {"ybe_hat", "crossing_hat", "unitarity_hat"}) c.expect_pass(run(name, params(t, 3), source));
        }
        CheckParams bad = params({Family::C, 1}, 3);
        bad.perturb = true;
        c.expect_fail(run("ybe_hat", bad, source));
        all &= c.report();
    }

    {
        Criterion c(4, "G(u, h) = 1 at L=4");
        for (Target t : kThreeTypes) c.expect_pass(run("g_one", params(t, 4), source));
        CheckParams bad = params({Family::C, 1}, 4);
        bad.perturb = true;
        c.expect_fail(run("g_one", bad, source));
        all &= c.report();
    }

    {
        Criterion c(5, "Rtilde: Yang-Baxter and crossing at L=3, N = 2, 3");
        for (Target t : {Target{Family::C, 1}, Target{Family::B, 1}}) {
            c.expect_pass(run("ybe_tilde", params(t, 3), source));
            c.expect_pass(run("crossing_tilde", params(t, 3), source));
        }
        CheckParams bad = params({Family::B, 1}, 3);
        bad.perturb = true;
        c.expect_fail(run("crossing_tilde", bad, source));
        all &= c.report();
    }

    {
        Criterion c(6, "correspondence at caps u=2, v=2, L=3, alpha = 0, 1/2, -1/2, N = 2, 3");
        for (Target t : {Target{Family::C, 1}, Target{Family::B, 1}}) {
            for (const Rational& alpha : {Rational(0), Rational(1, 2), Rational(-1, 2)}) {
                CheckParams p = params(t, 3);
                p.caps = {{"u", 2}, {"v", 2}};
                p.alpha = alpha;
                const CheckReport r = run("correspondence", p, source);
                c.expect_pass(r);
                const std::string* rr = r.param("r");
                c.expect(rr && !rr->empty() && std::stoi(*rr) <= 16, label(r) + ": no r <= 16");
            }
        }
        CheckParams bad = params({Family::C, 1}, 3);
        bad.caps = {{"u", 2}, {"v", 2}};
        bad.perturb = true;
        c.expect_fail(run("correspondence", bad, source));
        all &= c.report();
    }

    {
        Criterion c(7, "csuni at k = 1, 2, L=3");
        for (Target t : kThreeTypes) {
            for (int k : {1, 2}) {
                CheckParams p = params(t, 3);
                p.k = k;
                c.expect_pass(run("csuni", p, source));
            }
        }
        CheckParams bad = params({Family::C, 1}, 3);
        bad.perturb = true;
        c.expect_fail(run("csuni", bad, source));
        all &= c.report();
    }

    {
        Criterion c(8, "module layer: T- relations at k = 1, 2, mixed at k = 1, s_shift at m = k = 1; L=3, c = 0, 1");
        for (Target t : kThreeTypes) {
            for (const Rational& level : {Rational(0), Rational(1)}) {
                CheckParams p = params(t, 3);
                p.caps = {{"u", 2}, {"v", 2}};
                p.level = level;
                c.expect_pass(run("tminus_vacuum", p, source));
                for (int k : {1, 2}) {
                    p.k = k;
                    for (const char* name : {"tminus_roundtrip", "rtt_minus", "rel_minus"}) c.expect_pass(run(name, p, source));
                }
                p.k = 1;
                p.m = 1;
                c.expect_pass(run("mixed", p, source));
                c.expect_pass(run("s_shift", p, source));
            }
        }
        CheckParams bad = params({Family::C, 1}, 3);
        bad.level = 1;
        bad.perturb = true;
        c.expect_fail(run("mixed", bad, source));
        all &= c.report();
    }

    {
        Criterion c(9, "s_unitarity and hexagon at m = k = 1, L=3 (canonicalized residual; raw reported)");
        for (Target t : kThreeTypes) {
            for (const char* name : {"s_unitarity", "hexagon"}) {
                const CheckReport r = run(name, params(t, 3), source);
                c.expect_pass(r);
                const std::string* raw = r.param("raw_residual");
                std::cout << "    " << name << " " << lie_type_data(t.family, t.n).label()
                          << " raw_residual=" << (raw ? *raw : "?") << " canonical=" << r.residual_count << std::endl;
            }
        }
        CheckParams bad = params({Family::C, 1}, 3);
        bad.perturb = true;
        c.expect_fail(run("hexagon", bad, source));
        all &= c.report();
    }

    {
        Criterion c(10, "weak associativity chain at C1, k = m = 1, c = 0, caps 2, L=2");
        CheckParams p = params({Family::C, 1}, 2);
        p.caps = {{"u", 2}, {"v", 2}};
        const CheckReport r = run("weak_assoc_chain", p, source);
        c.expect_pass(r);
        if (const std::string* rr = r.param("r")) std::cout << "    prefactor power r=" << *rr << std::endl;
        p.perturb = true;
        c.expect_fail(run("weak_assoc_chain", p, source));
        all &= c.report();
    }

    {
        Criterion c(11, "negative controls and CLI exit codes");
        const std::string suites = HQVA_SUITES;
        const Outcome perturbed = run_cli("suite --no-cache " + suites + "/perturbed.json");
        c.expect(perturbed.status == kExitFail, "perturbed suite exit " + std::to_string(perturbed.status));
        try {
            const auto doc = nlohmann::json::parse(perturbed.out);
            bool named = false;
            for (const auto& r : doc) named = named || (r.at("name") == "ybe_hat_swapped" && r.at("verdict") == "fail" &&
                                                        r.at("residual_count").get<int>() > 0);
            c.expect(doc.is_array() && named, "perturbed suite report does not name the failing script");
        } catch (const std::exception& ex) {
            c.fail(std::string("perturbed suite output is not one JSON array: ") + ex.what());
        }
        const Outcome pass = run_cli("check unitarity_hat --no-cache --family B --n 1 --order 3");
        c.expect(pass.status == kExitPass, "passing check exit " + std::to_string(pass.status));
        const Outcome fail = run_cli("check unitarity_hat --no-cache --perturb");
        c.expect(fail.status == kExitFail, "perturbed check exit " + std::to_string(fail.status));
        const Outcome inconclusive = run_cli("check correspondence --no-cache --caps u=2,v=2 --r-bound 1");
        c.expect(inconclusive.status == kExitInconclusive, "bounded correspondence exit " + std::to_string(inconclusive.status));
        for (const char* args : {"check nosuch", "check ybe_hat --family A", "check ybe_hat --order 0",
                                 "suite /nonexistent.json", "frobnicate"}) {
            const Outcome o = run_cli(args);
            c.expect(o.status == kExitUsage, std::string("'") + args + "' exit " + std::to_string(o.status));
        }
        all &= c.report();
    }

    std::cout << (all ? "all criteria pass" : "some criteria fail") << std::endl;
    return all ? 0 : 1;
}
