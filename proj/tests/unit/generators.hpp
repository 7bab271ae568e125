#pragma once

#include <random>
#include <vector>

#include "hqva/exact/series.hpp"

namespace hqva::testing {

// Seeded generators for property tests. Everything is deterministic for a
// given seed so failures reproduce.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    Rational rational() {
        const int num = integer(-5, 5);
        const int den = integer(1, 4);
        Rational q(num, den);
        q.canonicalize();
        return q;
    }

    Mono mono(int vars, int spread = 2) {
        Mono m;
        for (int v = 0; v < vars; ++v) m.set(v, integer(-spread, spread));
        return m;
    }

    Poly poly(int vars, int terms = 3) {
        std::vector<Term> t;
        for (int i = 0; i < terms; ++i) t.push_back({mono(vars), rational()});
        return Poly::from_terms(std::move(t));
    }

    // Denominator bases drawn from a fixed pool so that sums share factors.
    RatFunc ratfunc(int vars) {
        static const std::vector<Mono> pool = {
            Mono::var(0), Mono::var(0, 2), Mono::var(1), Mono::var(0) * Mono::var(1),
            Mono::var(0) * Mono::var(1, -1)};
        std::vector<DenFactor> den;
        const int k = integer(0, 2);
        for (int i = 0; i < k; ++i) {
            Mono b = pool[integer(0, static_cast<int>(pool.size()) - 1)];
            if (vars < 2 && b.get(1) != 0) continue;
            den.push_back({b, integer(1, 2)});
        }
        return RatFunc::fraction(poly(vars), den);
    }

    Series series(int vars, const CapList& caps) {
        Series s = Series::zero(caps);
        Series mono = Series::constant(RatFunc(1), caps);
        const int h_cap = s.cap_of(kH);
        for (int k = 0; k < std::max(h_cap, 1); ++k) {
            s += mono.scaled(ratfunc(vars));
            if (h_cap > 0) mono = mono * Series::variable(kH, caps);
        }
        for (const auto& c : caps) {
            if (c.var == kH) continue;
            s += Series::variable(c.var, caps).scaled(ratfunc(vars));
        }
        return s;
    }

    // Series with invertible leading coefficient (unit times binomials).
    Series unit_series(int vars, const CapList& caps) {
        Series s = series(vars, caps);
        const RatFunc lead = RatFunc::monomial(mono(vars), Rational(integer(1, 3))) *
                             RatFunc(Poly::binomial(Mono::var(0)));
        return s - Series::constant(s.leading(), caps) + Series::constant(lead, caps);
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace hqva::testing
