#pragma once

// Exhaustive verifiers for the schedule-matrix properties:
//
//   is_selector          every k-column submatrix has rows of weight in [1,d]
//                        whose union covers >= m columns
//   is_kg_sim            every k-set of stations is fully resolved by the channel
//   is_kg_def            every k-column submatrix admits an ordered partition
//                        into blocks of size 1..d, block j all-ones in slot i_j
//                        and later blocks all-zero there (i_1 < ... < i_l)
//   is_locally_thin_leq  every s-subset, d <= s <= k, has a row of weight in [1,d]
//   is_locally_thin_exact  same, s = k only
//
// Subsets are scanned in lexicographic order (by size first where several
// sizes are involved) and the first failing subset is reported. The parallel
// mode splits the rank space into chunks and keeps the smallest failing rank,
// so its report is identical to the sequential one.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <optional>
#include <set>
#include <stdexcept>
#include <thread>
#include <utility>
#include <variant>

#include "mpr/channel.hpp"
#include "mpr/core.hpp"

namespace mpr {

inline constexpr std::uint64_t kDefaultMaxCombos = 100'000'000;
inline constexpr std::size_t kDefaultMaxStations = 30;

/// Raised when a verification would exceed the desk-scale caps.
class cap_exceeded : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct VerifyOptions {
    unsigned workers = 1;
    bool force = false;
    std::uint64_t max_combos = kDefaultMaxCombos;
    std::size_t max_stations = kDefaultMaxStations;

    /// Defaults, with the combination cap taken from MPR_MAX_COMBOS when set.
    static VerifyOptions from_env() {
        VerifyOptions o;
        if (const char* v = std::getenv("MPR_MAX_COMBOS"); v && *v) {
            char* end = nullptr;
            const unsigned long long x = std::strtoull(v, &end, 10);
            if (end && *end == '\0') o.max_combos = x;
        }
        return o;
    }
};

struct SelectorWitness {
    StationSet subset;                  // the k columns the witness is for
    std::vector<std::size_t> good_rows; // rows with restricted weight in [1,d]
    StationSet covered;                 // union of their supports within subset
};

struct KGWitness {
    StationSet subset;
    std::vector<std::size_t> slot_indices;  // strictly increasing
    std::vector<StationSet> blocks;         // blocks[j] is served in slot_indices[j]
};

using Witness = std::variant<std::monostate, SelectorWitness, KGWitness>;

struct VerificationReport {
    bool pass = false;
    std::optional<StationSet> counterexample;
    Witness witness;
    std::uint64_t subsets_checked = 0;
};

namespace detail {

inline ColumnMask mask_of(const std::vector<std::size_t>& comb0, std::size_t n) {
    ColumnMask m(words_for(n), 0);
    for (std::size_t j : comb0) m[j / kWordBits] |= Word{1} << (j % kWordBits);
    return m;
}

/// Smallest rank (lexicographic) of a k-subset failing `ok`, or nullopt.
template <class Check>
std::optional<std::uint64_t> first_failing_rank(std::size_t n, std::size_t k, const Check& ok, unsigned workers) {
    const std::uint64_t total = binomial(n, k);
    if (total == 0) return std::nullopt;

    auto scan = [&](std::uint64_t lo, std::uint64_t hi, const std::atomic<std::uint64_t>* best)
        -> std::optional<std::uint64_t> {
        auto c = unrank_combination(n, k, lo);
        for (std::uint64_t r = lo; r < hi; ++r) {
            if (best && (r & 0x3ff) == 0 && r > best->load(std::memory_order_relaxed)) return std::nullopt;
            if (!ok(mask_of(c, n))) return r;
            next_combination(c, n);
        }
        return std::nullopt;
    };

    if (workers <= 1 || total < 2 * static_cast<std::uint64_t>(workers)) return scan(0, total, nullptr);

    const std::uint64_t chunks = std::min<std::uint64_t>(total, static_cast<std::uint64_t>(workers) * 16);
    const std::uint64_t step = (total + chunks - 1) / chunks;
    std::atomic<std::uint64_t> next_chunk{0};
    std::atomic<std::uint64_t> best{std::numeric_limits<std::uint64_t>::max()};

    auto worker = [&] {
        for (;;) {
            const std::uint64_t ci = next_chunk.fetch_add(1);
            const std::uint64_t lo = ci * step;
            if (lo >= total || lo > best.load()) return;
            const std::uint64_t hi = std::min(total, lo + step);
            if (auto r = scan(lo, hi, &best)) {
                std::uint64_t cur = best.load();
                while (*r < cur && !best.compare_exchange_weak(cur, *r)) {
                }
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    const std::uint64_t b = best.load();
    if (b == std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
    return b;
}

inline void check_caps(std::size_t n, std::uint64_t combos, const VerifyOptions& opt) {
    if (opt.force) return;
    if (n > opt.max_stations)
        throw cap_exceeded("verification refused: n=" + std::to_string(n) + " exceeds " +
                           std::to_string(opt.max_stations) + " stations (use --force)");
    if (combos > opt.max_combos)
        throw cap_exceeded("verification refused: " + std::to_string(combos) + " subsets exceed cap " +
                           std::to_string(opt.max_combos) + " (use --force or MPR_MAX_COMBOS)");
}

inline void check_match(const ScheduleMatrix& m, std::size_t n) {
    if (m.n() != n)
        throw invalid_input("matrix has " + std::to_string(m.n()) + " columns but n=" + std::to_string(n));
}

/// Runs `ok` over all subsets of each size in [lo, hi], size-major.
template <class Check>
VerificationReport scan_sizes(std::size_t n, std::size_t lo, std::size_t hi, const Check& ok,
                              const VerifyOptions& opt) {
    std::uint64_t total = 0;
    for (std::size_t s = lo; s <= hi; ++s) total = std::min(total + binomial(n, s), std::numeric_limits<std::uint64_t>::max() - 1);
    check_caps(n, total, opt);

    VerificationReport rep;
    std::uint64_t before = 0;
    for (std::size_t s = lo; s <= hi; ++s) {
        if (auto r = first_failing_rank(n, s, ok, opt.workers)) {
            auto c = unrank_combination(n, s, *r);
            for (auto& x : c) ++x;
            rep.pass = false;
            rep.counterexample = StationSet(std::move(c));
            rep.subsets_checked = before + *r + 1;
            return rep;
        }
        before += binomial(n, s);
    }
    rep.pass = true;
    rep.subsets_checked = before;
    return rep;
}

inline StationSet first_subset(std::size_t k) { return StationSet::full(k); }

inline bool is_good_weight(std::size_t w, std::size_t d) { return w >= 1 && w <= d; }

inline SelectorWitness selector_witness(const ScheduleMatrix& m, const StationSet& subset, std::size_t d) {
    const auto mask = subset.mask(m.n());
    SelectorWitness w{subset, {}, {}};
    ColumnMask cov(mask.size(), 0);
    for (std::size_t i = 0; i < m.t(); ++i) {
        const auto row = m.row0(i);
        if (!is_good_weight(popcount(row, mask), d)) continue;
        w.good_rows.push_back(i + 1);
        for (std::size_t x = 0; x < cov.size(); ++x) cov[x] |= row[x] & mask[x];
    }
    w.covered = StationSet::from_mask(cov, m.n());
    return w;
}

/// Witness read off the channel run: every success slot serves one block.
inline KGWitness kg_witness_from_trace(const ScheduleMatrix& m, const StationSet& subset, std::size_t d) {
    const auto tr = simulate(m, subset, d);
    KGWitness w{subset, {}, {}};
    for (const auto& o : tr.outcomes) {
        if (o.kind != SlotKind::success) continue;
        w.slot_indices.push_back(o.slot);
        w.blocks.push_back(o.succeeded);
    }
    return w;
}

/// Backtracking search for an ordered block partition of `remaining` using
/// slots >= start. Restricted to the still-unassigned columns, the row of the
/// chosen slot must be exactly the next block, so each choice of slot fixes
/// its block; the search ranges over which slots are used.
class KGDefSearch {
   public:
    KGDefSearch(const ScheduleMatrix& m, std::size_t d) : m_(m), d_(d) {}

    bool run(const ColumnMask& columns, std::vector<std::size_t>* slots, std::vector<ColumnMask>* blocks) {
        dead_.clear();
        return search(columns, 0, slots, blocks);
    }

   private:
    bool search(const ColumnMask& remaining, std::size_t start, std::vector<std::size_t>* slots,
                std::vector<ColumnMask>* blocks) {
        if (popcount(remaining) == 0) return true;
        if (dead_.contains({remaining, start})) return false;
        ColumnMask block(remaining.size()), rest(remaining.size());
        for (std::size_t i = start; i < m_.t(); ++i) {
            const auto row = m_.row0(i);
            std::size_t size = 0;
            for (std::size_t w = 0; w < remaining.size(); ++w) {
                block[w] = row[w] & remaining[w];
                rest[w] = remaining[w] & ~row[w];
                size += static_cast<std::size_t>(std::popcount(block[w]));
            }
            if (!is_good_weight(size, d_)) continue;
            if (slots) slots->push_back(i + 1);
            if (blocks) blocks->push_back(block);
            if (search(rest, i + 1, slots, blocks)) return true;
            if (slots) slots->pop_back();
            if (blocks) blocks->pop_back();
        }
        dead_.insert({remaining, start});
        return false;
    }

    const ScheduleMatrix& m_;
    std::size_t d_;
    std::set<std::pair<ColumnMask, std::size_t>> dead_;
};

}  // namespace detail

inline VerificationReport is_selector(const ScheduleMatrix& m, const SelectorParams& p,
                                      const VerifyOptions& opt = {}) {
    p.validate();
    detail::check_match(m, p.n);
    auto ok = [&](const ColumnMask& mask) {
        ColumnMask cov(mask.size(), 0);
        for (std::size_t i = 0; i < m.t(); ++i) {
            const auto row = m.row0(i);
            if (!detail::is_good_weight(popcount(row, mask), p.d)) continue;
            for (std::size_t w = 0; w < cov.size(); ++w) cov[w] |= row[w] & mask[w];
        }
        return popcount(cov) >= p.m;
    };
    auto rep = detail::scan_sizes(p.n, p.k, p.k, ok, opt);
    if (rep.pass) rep.witness = detail::selector_witness(m, detail::first_subset(p.k), p.d);
    return rep;
}

inline VerificationReport is_kg_sim(const ScheduleMatrix& m, const KGParams& p, const VerifyOptions& opt = {}) {
    p.validate();
    detail::check_match(m, p.n);
    auto ok = [&](const ColumnMask& mask) {
        ColumnMask active = mask;
        return detail::run_masked(m, active, p.d);
    };
    auto rep = detail::scan_sizes(p.n, p.k, p.k, ok, opt);
    if (rep.pass) rep.witness = detail::kg_witness_from_trace(m, detail::first_subset(p.k), p.d);
    return rep;
}

inline VerificationReport is_kg_def(const ScheduleMatrix& m, const KGParams& p, const VerifyOptions& opt = {}) {
    p.validate();
    detail::check_match(m, p.n);
    auto ok = [&](const ColumnMask& mask) {
        detail::KGDefSearch s(m, p.d);
        return s.run(mask, nullptr, nullptr);
    };
    auto rep = detail::scan_sizes(p.n, p.k, p.k, ok, opt);
    if (rep.pass) {
        const auto subset = detail::first_subset(p.k);
        detail::KGDefSearch s(m, p.d);
        KGWitness w{subset, {}, {}};
        std::vector<ColumnMask> blocks;
        s.run(subset.mask(m.n()), &w.slot_indices, &blocks);
        for (const auto& b : blocks) w.blocks.push_back(StationSet::from_mask(b, m.n()));
        rep.witness = std::move(w);
    }
    return rep;
}

inline VerificationReport is_locally_thin_leq(const ScheduleMatrix& m, const KGParams& p,
                                              const VerifyOptions& opt = {}) {
    p.validate();
    detail::check_match(m, p.n);
    auto ok = [&](const ColumnMask& mask) {
        for (std::size_t i = 0; i < m.t(); ++i)
            if (detail::is_good_weight(popcount(m.row0(i), mask), p.d)) return true;
        return false;
    };
    return detail::scan_sizes(p.n, p.d, p.k, ok, opt);
}

inline VerificationReport is_locally_thin_exact(const ScheduleMatrix& m, const KGParams& p,
                                                const VerifyOptions& opt = {}) {
    p.validate();
    detail::check_match(m, p.n);
    auto ok = [&](const ColumnMask& mask) {
        for (std::size_t i = 0; i < m.t(); ++i)
            if (detail::is_good_weight(popcount(m.row0(i), mask), p.d)) return true;
        return false;
    };
    return detail::scan_sizes(p.n, p.k, p.k, ok, opt);
}

}  // namespace mpr
