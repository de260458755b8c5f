#pragma once

// Row budgets for randomized selectors and for the stacked KG construction.
//
// A random t x n matrix with Bernoulli(p) entries fails to be a
// (k,m,d,n)-selector with probability at most
//     C(n,k) C(k,k-m+1) (P1+P2)^t,
// so t >= (ln(C(n,k) C(k,k-m+1)) + ln(1/eps)) / -ln(P1+P2) keeps the failure
// probability of one attempt at or below eps.

#include <bit>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "mpr/bounds.hpp"
#include "mpr/core.hpp"

namespace mpr {

enum class GenMode { verified, whp };

inline const char* to_string(GenMode m) { return m == GenMode::verified ? "verified" : "whp"; }

inline GenMode parse_mode(const std::string& s) {
    if (s == "verified") return GenMode::verified;
    if (s == "whp") return GenMode::whp;
    throw invalid_input("mode must be 'verified' or 'whp', got '" + s + "'");
}

struct GenPlan {
    double p;
    std::size_t t;
    double eps;
    std::size_t effective_d;
    GenMode mode = GenMode::verified;
    P1P2 rates;
};

inline void check_eps(double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw invalid_input("eps must lie in (0, 1]");
}

/// Plans one randomized selector attempt. d > m is allowed and replaced by m.
inline GenPlan plan_selector(const SelectorParams& sp, double eps, GenMode mode = GenMode::verified) {
    check_eps(eps);
    const std::size_t de = std::min(sp.d, sp.m);
    SelectorParams eff{sp.k, sp.m, de, sp.n};
    eff.validate();
    if (!(2 * (sp.m - 1) < sp.k))
        throw invalid_input("selector generation needs 2(m-1) < k (got k=" + std::to_string(sp.k) +
                            " m=" + std::to_string(sp.m) + ")");

    const double p = prescribed_p(sp.k, de);
    const P1P2 r = p1p2(sp.k, sp.m, de, p);
    if (!(r.log_rate > 0.0)) throw std::logic_error("plan_selector: non-positive rate -ln(P1+P2)");

    const double log_count = log_binomial(static_cast<double>(sp.n), static_cast<double>(sp.k)) +
                             log_binomial(static_cast<double>(sp.k), static_cast<double>(sp.k - sp.m + 1));
    const double x = (log_count - std::log(eps)) / r.log_rate;
    const auto t = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(x)));
    return GenPlan{p, t, eps, de, mode, r};
}

inline int ceil_log2(std::size_t x) { return x <= 1 ? 0 : static_cast<int>(std::bit_width(x - 1)); }
inline int floor_log2(std::size_t x) { return static_cast<int>(std::bit_width(x)) - 1; }

/// Selector parameters of the halving chain, top to bottom. The d field holds
/// the effective capacity min(d, m_v).
inline std::vector<SelectorParams> kg_components(const KGParams& p) {
    p.validate();
    std::vector<SelectorParams> out;
    for (int v = ceil_log2(p.k) - 1; v >= floor_log2(p.d); --v) {
        const std::size_t kv = std::min<std::size_t>(std::size_t{1} << (v + 1), p.n);
        const std::size_t mv = std::min<std::size_t>(std::size_t{1} << v, (kv + 1) / 2);
        out.push_back({kv, mv, std::min(p.d, mv), p.n});
    }
    return out;
}

/// Exact row count of the randomized KG construction: one planned selector per
/// chain component plus the final all-ones row.
inline BoundValue tkg_upper_explicit(const KGParams& p, double eps) {
    std::size_t total = 1;
    double closed = 1.0;
    for (const auto& c : kg_components(p)) {
        total += plan_selector(c, eps).t;
        closed += tsel_upper(c).raw;
    }
    BoundValue b{"tkg_upper_explicit", static_cast<double>(total), static_cast<long long>(total), true, {}};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", closed);
    b.notes = "components=" + std::to_string(kg_components(p).size()) + "; closed-form selector sum=" + buf;
    return b;
}

/// The same chain evaluated with the closed-form selector bound.
inline BoundValue tkg_upper_closed_form(const KGParams& p) {
    double closed = 1.0;
    bool pre = true;
    for (const auto& c : kg_components(p)) {
        const auto b = tsel_upper(c);
        closed += b.raw;
        pre = pre && b.preconditions_met;
    }
    return detail::upper_length("tkg_upper_closed_form", closed, pre, "1 + sum of tsel_upper over chain");
}

}  // namespace mpr
