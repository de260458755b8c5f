#pragma once

// Randomized construction of selectors and KG codes.
//
// Selectors are sampled entry by entry from Bernoulli(p). In verified mode a
// sample is kept only once the exhaustive selector check accepts it, so the
// output is always correct and only the number of attempts is random. In whp
// mode the first sample is returned unchecked.
//
// A KG code stacks the selectors of the halving chain (see kg_components)
// and closes with one all-ones row.
//
// Seeds: attempt a of component c draws from mt19937_64 seeded with
// derive_seed(seed, c, a), so every output is a pure function of its inputs.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mpr/channel.hpp"
#include "mpr/core.hpp"
#include "mpr/plan.hpp"
#include "mpr/verify.hpp"

namespace mpr {

inline constexpr const char* kGeneratorName = "mt19937_64+splitmix64/v1";
inline constexpr std::size_t kDefaultMaxAttempts = 1000;

/// Raised when verified generation runs out of attempts.
class generation_failed : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

/// Uniform double in [0,1) from the top 53 bits of one engine draw.
inline double unit_uniform(std::mt19937_64& eng) { return static_cast<double>(eng() >> 11) * 0x1p-53; }

/// t x n matrix with i.i.d. Bernoulli(p) entries, filled row by row.
inline ScheduleMatrix sample_bernoulli(std::size_t t, std::size_t n, double p, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    MatrixBuilder b(t, n);
    for (std::size_t i = 0; i < t; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (unit_uniform(eng) < p) b.set0(i, j);
    return std::move(b).build();
}

struct GenOptions {
    std::size_t max_attempts = kDefaultMaxAttempts;
    VerifyOptions verify{};
};

struct SelectorResult {
    ScheduleMatrix matrix;
    GenPlan plan;
    std::size_t attempts;
};

/// Generates one selector; `component` selects the seed sub-stream.
inline SelectorResult generate_selector(const SelectorParams& sp, double eps, std::uint64_t seed, GenMode mode,
                                        std::uint64_t component = 0, const GenOptions& opt = {}) {
    GenPlan plan = plan_selector(sp, eps, mode);
    const SelectorParams eff{sp.k, sp.m, plan.effective_d, sp.n};
    for (std::size_t a = 0; a < opt.max_attempts; ++a) {
        auto m = sample_bernoulli(plan.t, sp.n, plan.p, derive_seed(seed, component, a));
        if (mode == GenMode::whp || is_selector(m, eff, opt.verify).pass) return {std::move(m), plan, a + 1};
    }
    throw generation_failed("no selector found in " + std::to_string(opt.max_attempts) + " attempts (k=" +
                            std::to_string(sp.k) + " m=" + std::to_string(sp.m) + " d=" + std::to_string(sp.d) +
                            " n=" + std::to_string(sp.n) + ")");
}

inline ScheduleMatrix gen_selector(const SelectorParams& sp, double eps, std::uint64_t seed, GenMode mode,
                                   const GenOptions& opt = {}) {
    return generate_selector(sp, eps, seed, mode, 0, opt).matrix;
}

struct ComponentRecord {
    SelectorParams params;  // d holds the effective capacity
    std::size_t t;
    std::size_t attempts;
};

struct KGCode {
    ScheduleMatrix matrix;
    KGParams params;
    double eps;
    std::vector<ComponentRecord> plan;  // top to bottom; the all-ones row follows
    GenMode mode;
    std::uint64_t seed;
    std::string generator = kGeneratorName;
};

inline KGCode build_kg(const KGParams& p, double eps, std::uint64_t seed, GenMode mode, const GenOptions& opt = {}) {
    check_eps(eps);
    const auto comps = kg_components(p);
    std::vector<ScheduleMatrix> parts;
    std::vector<ComponentRecord> plan;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        auto r = generate_selector(comps[c], eps, seed, mode, c, opt);
        plan.push_back({comps[c], r.matrix.t(), r.attempts});
        parts.push_back(std::move(r.matrix));
    }
    parts.push_back(ScheduleMatrix::ones(1, p.n));
    return KGCode{stack(parts), p, eps, std::move(plan), mode, seed};
}

inline constexpr std::uint64_t kStageSalt = 0x5354414745ULL;

/// Stage k values min(2^i, n) for i = 0..ceil(log2 n).
inline std::vector<std::size_t> stage_sizes(std::size_t n) {
    if (n < 1) throw invalid_input("need n >= 1");
    std::vector<std::size_t> ks;
    for (int i = 0; i <= ceil_log2(n); ++i) ks.push_back(std::min<std::size_t>(std::size_t{1} << i, n));
    return ks;
}

/// Codes for the doubling scheme used when k is unknown. Stage i is a KG code
/// for k_i = min(2^i, n) at capacity min(d, k_i).
inline std::vector<KGCode> build_staged(std::size_t n, std::size_t d, double eps, std::uint64_t seed, GenMode mode,
                                        const GenOptions& opt = {}) {
    if (d < 1) throw invalid_input("need d >= 1");
    std::vector<KGCode> stages;
    const auto ks = stage_sizes(n);
    for (std::size_t i = 0; i < ks.size(); ++i)
        stages.push_back(build_kg({ks[i], std::min(d, ks[i]), n}, eps, derive_seed(seed, kStageSalt, i), mode, opt));
    return stages;
}

inline ScheduleMatrix stacked(const std::vector<KGCode>& stages) {
    std::vector<ScheduleMatrix> ms;
    for (const auto& s : stages) ms.push_back(s.matrix);
    return stack(ms);
}

// ---- brute-force minimal length ------------------------------------------

enum class Property { kg, selector, lt_leq, lt_exact };

inline Property parse_property(const std::string& s) {
    if (s == "kg") return Property::kg;
    if (s == "selector") return Property::selector;
    if (s == "lt-leq" || s == "lt_leq") return Property::lt_leq;
    if (s == "lt-exact" || s == "lt_exact") return Property::lt_exact;
    throw invalid_input("unknown property '" + s + "' (kg, selector, lt-leq, lt-exact)");
}

/// Parameters for any property; m is read for selectors only.
struct PropertyParams {
    std::size_t k;
    std::size_t m;
    std::size_t d;
    std::size_t n;
};

inline VerificationReport check_property(Property prop, const ScheduleMatrix& m, const PropertyParams& p,
                                         const VerifyOptions& opt = {}) {
    switch (prop) {
        case Property::kg: return is_kg_sim(m, {p.k, p.d, p.n}, opt);
        case Property::selector: return is_selector(m, {p.k, p.m, p.d, p.n}, opt);
        case Property::lt_leq: return is_locally_thin_leq(m, {p.k, p.d, p.n}, opt);
        case Property::lt_exact: return is_locally_thin_exact(m, {p.k, p.d, p.n}, opt);
    }
    throw invalid_input("unknown property");
}

/// Smallest t <= t_max for which some t x n matrix has the property, found by
/// enumerating column multisets (verdicts do not depend on column order).
inline std::optional<std::size_t> minimal_t_search(Property prop, const PropertyParams& p, std::size_t t_max,
                                                   bool override_caps = false) {
    if (!override_caps && (p.n > 5 || t_max > 4))
        throw cap_exceeded("minimal_t_search limited to n <= 5 and t_max <= 4 without override");
    if (t_max >= 63) throw cap_exceeded("minimal_t_search: t_max too large");

    VerifyOptions vo;
    vo.force = true;
    for (std::size_t t = 0; t <= t_max; ++t) {
        const std::uint64_t values = std::uint64_t{1} << t;
        std::vector<std::uint64_t> cols(p.n, 0);
        for (;;) {
            MatrixBuilder b(t, p.n);
            for (std::size_t j = 0; j < p.n; ++j)
                for (std::size_t i = 0; i < t; ++i)
                    if ((cols[j] >> i) & 1U) b.set0(i, j);
            if (check_property(prop, std::move(b).build(), p, vo).pass) return t;

            // next non-decreasing sequence over [0, values)
            std::size_t j = p.n;
            while (j > 0 && cols[j - 1] == values - 1) --j;
            if (j == 0) break;
            const std::uint64_t v = cols[j - 1] + 1;
            for (std::size_t x = j - 1; x < p.n; ++x) cols[x] = v;
        }
    }
    return std::nullopt;
}

}  // namespace mpr
