#pragma once

// Closed-form bounds on schedule lengths.
//
// Selector upper bound and the per-row failure probabilities use natural
// logarithms; the locally-thin lower bounds use base 2. Every evaluator
// reports the raw value together with a rounded integer and a flag telling
// whether the hypotheses of the bound hold. Nothing is clamped silently.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "mpr/core.hpp"

namespace mpr {

struct BoundValue {
    std::string name;
    double raw = 0.0;
    /// ceil(raw) for admissible lengths, floor(raw)+1 for strict lower bounds,
    /// 0 for vacuous lower bounds; empty when raw is not finite.
    std::optional<long long> integral;
    bool preconditions_met = false;
    std::string notes;
};

/// ln C(n, k) for n up to ~1e6 and beyond.
inline double log_binomial(double n, double k) {
    if (k < 0 || k > n) return -INFINITY;
    return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

/// Per-row probabilities for a random k-column submatrix with Bernoulli(p) entries.
/// p1: the row is not w-good (weight 0 or > d).
/// p2: the row is w-good and zero on a fixed set of k-m+1 columns.
struct P1P2 {
    double p1;
    double p2;
    double log_rate;  // -ln(p1 + p2)
};

inline P1P2 p1p2(std::size_t k, std::size_t m, std::size_t d, double p) {
    if (!(1 <= d && d <= k)) throw invalid_input("p1p2 needs 1 <= d <= k");
    if (!(1 <= m && m <= k)) throw invalid_input("p1p2 needs 1 <= m <= k");
    if (!(p > 0.0 && p < 1.0)) throw invalid_input("p1p2 needs 0 < p < 1");

    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    const auto K = static_cast<double>(k);

    // P1 = Pr{weight 0} + Pr{weight >= d+1}, summed directly to avoid cancellation.
    double p1 = std::exp(K * lq);
    for (std::size_t i = d + 1; i <= k; ++i)
        p1 += std::exp(log_binomial(K, static_cast<double>(i)) + static_cast<double>(i) * lp + (K - static_cast<double>(i)) * lq);

    // P2 = (1-p)^k sum_{i=1}^{d} C(m-1, i) (p/(1-p))^i
    double p2 = 0.0;
    for (std::size_t i = 1; i <= d && i <= m - 1; ++i)
        p2 += std::exp(log_binomial(static_cast<double>(m - 1), static_cast<double>(i)) + static_cast<double>(i) * lp +
                       (K - static_cast<double>(i)) * lq);

    return {p1, p2, -std::log(p1 + p2)};
}

/// The Bernoulli parameter used by the probabilistic construction.
inline double prescribed_p(std::size_t k, std::size_t d) {
    return d <= 2 ? static_cast<double>(d) / (2.0 * static_cast<double>(k))
                  : static_cast<double>(d) / (4.0 * static_cast<double>(k));
}

inline bool selector_bound_hypotheses(std::size_t k, std::size_t m, std::size_t d, std::size_t n) {
    return 1 <= d && d <= m && 2 * (m - 1) < k && k <= n;
}

/// Closed-form lower bound on -ln(P1+P2) at the prescribed p.
inline double claim1_rate(std::size_t k, std::size_t m, std::size_t d) {
    if (!(1 <= d && d <= m && m >= 1 && 2 * (m - 1) < k))
        throw invalid_input("claim1_rate needs 1 <= d <= m and 2(m-1) < k");
    if (d <= 2) return 1.0 / 16.0;
    return static_cast<double>(k - m + 1) * static_cast<double>(d) / (4.0 * static_cast<double>(k)) -
           std::log(4.0 / 3.0);
}

namespace detail {

inline BoundValue upper_length(std::string name, double raw, bool pre, std::string notes) {
    BoundValue b{std::move(name), raw, std::nullopt, pre, std::move(notes)};
    if (std::isfinite(raw)) b.integral = static_cast<long long>(std::ceil(raw));
    return b;
}

inline BoundValue strict_lower(std::string name, double raw, bool pre, std::string notes) {
    BoundValue b{std::move(name), raw, std::nullopt, pre, std::move(notes)};
    if (!std::isfinite(raw)) return b;
    if (raw <= 0.0) {
        b.integral = 0;
        if (!b.notes.empty()) b.notes += "; ";
        b.notes += "vacuous (raw <= 0), effective value 0";
    } else {
        b.integral = static_cast<long long>(std::floor(raw)) + 1;
    }
    return b;
}

/// u / log2(e u) * log2(n / (k (d+1))), with u <= 0 giving 0.
inline double locally_thin_expr(long long u, std::size_t k, std::size_t d, std::size_t n) {
    if (u <= 0) return 0.0;
    const auto U = static_cast<double>(u);
    return U / std::log2(std::numbers::e * U) *
           std::log2(static_cast<double>(n) / (static_cast<double>(k) * static_cast<double>(d + 1)));
}

}  // namespace detail

/// Upper bound on the minimum size of a (k,m,d,n)-selector.
inline BoundValue tsel_upper(const SelectorParams& p) {
    const bool pre = selector_bound_hypotheses(p.k, p.m, p.d, p.n);
    const auto k = static_cast<double>(p.k), m = static_cast<double>(p.m), d = static_cast<double>(p.d);
    const auto n = static_cast<double>(p.n);
    const double r = k - m + 1.0;
    const double num = k * std::log(n / k) + r * std::log(k / r) + 2.0 * k - m + 1.0;
    std::string notes;
    double raw;
    if (p.d <= 2) {
        raw = 16.0 * num;
        notes = "branch d<=2";
    } else {
        const double den = d * r / (4.0 * k) - std::log(4.0 / 3.0);
        raw = den > 0.0 ? num / den : INFINITY;
        notes = den > 0.0 ? "branch d>=3" : "branch d>=3, non-positive denominator";
    }
    if (!pre) notes += "; hypotheses 1<=d<=m, 2(m-1)<k<=n violated";
    return detail::upper_length("tsel_upper", raw, pre, std::move(notes));
}

/// Lower bound on the length of (<=k,d,n)-locally thin codes (hence of KG codes).
inline BoundValue tlt_lower_leq(const KGParams& p) {
    const bool pre = 3 * (p.d + 1) <= p.k && p.k <= p.n && p.d >= 1;
    const auto u = static_cast<long long>(p.k / (p.d + 1));
    std::string notes = "u=" + std::to_string(u);
    if (!pre) notes += "; hypothesis 3(d+1)<=k<=n violated";
    return detail::strict_lower("tlt_lower_leq", detail::locally_thin_expr(u, p.k, p.d, p.n), pre, std::move(notes));
}

/// Lower bound on the length of (k,d,n)-locally thin codes (exactly k columns).
inline BoundValue tlt_lower_exact(const KGParams& p) {
    const bool pre = 4 * (p.d + 1) <= p.k && p.k <= p.n && p.d >= 1;
    const auto u = static_cast<long long>(p.k / (p.d + 1)) - 1;
    std::string notes = "u=" + std::to_string(u);
    if (!pre) notes += "; hypothesis 4(d+1)<=k<=n violated";
    return detail::strict_lower("tlt_lower_exact", detail::locally_thin_expr(u, p.k, p.d, p.n), pre, std::move(notes));
}

}  // namespace mpr
