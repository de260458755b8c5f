#pragma once

// Schedule matrices, station sets and parameter records.
//
// Rows are time slots and columns are stations. All public indices are
// 1-based; storage is row-major in 64-bit words so that the restricted
// weight of a row is a handful of popcounts.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpr {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

inline constexpr std::size_t words_for(std::size_t n) { return (n + kWordBits - 1) / kWordBits; }

/// Raised for malformed inputs and violated preconditions.
class invalid_input : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// A column mask over [n]; bit j-1 is station j.
using ColumnMask = std::vector<Word>;

inline std::size_t popcount(std::span<const Word> a, std::span<const Word> b) {
    std::size_t c = 0;
    for (std::size_t w = 0; w < a.size(); ++w) c += static_cast<std::size_t>(std::popcount(a[w] & b[w]));
    return c;
}

inline std::size_t popcount(std::span<const Word> a) {
    std::size_t c = 0;
    for (Word w : a) c += static_cast<std::size_t>(std::popcount(w));
    return c;
}

/// Sorted, duplicate-free set of 1-based station ids.
class StationSet {
   public:
    StationSet() = default;
    StationSet(std::initializer_list<std::size_t> ids) : StationSet(std::vector<std::size_t>(ids)) {}
    explicit StationSet(std::vector<std::size_t> ids) : members_(std::move(ids)) {
        std::sort(members_.begin(), members_.end());
        if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
            throw invalid_input("station set contains duplicates");
        if (!members_.empty() && members_.front() == 0) throw invalid_input("station ids are 1-based");
    }

    static StationSet full(std::size_t n) {
        StationSet s;
        s.members_.resize(n);
        for (std::size_t j = 0; j < n; ++j) s.members_[j] = j + 1;
        return s;
    }

    static StationSet from_mask(std::span<const Word> mask, std::size_t n) {
        StationSet s;
        for (std::size_t j = 0; j < n; ++j)
            if ((mask[j / kWordBits] >> (j % kWordBits)) & 1U) s.members_.push_back(j + 1);
        return s;
    }

    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    auto begin() const { return members_.begin(); }
    auto end() const { return members_.end(); }
    std::size_t operator[](std::size_t i) const { return members_[i]; }
    const std::vector<std::size_t>& members() const { return members_; }

    bool contains(std::size_t id) const { return std::binary_search(members_.begin(), members_.end(), id); }

    /// Throws unless every member lies in 1..n.
    void check_within(std::size_t n) const {
        if (!members_.empty() && members_.back() > n)
            throw invalid_input("station " + std::to_string(members_.back()) + " out of range 1.." + std::to_string(n));
    }

    ColumnMask mask(std::size_t n) const {
        check_within(n);
        ColumnMask m(words_for(n), 0);
        for (std::size_t id : members_) m[(id - 1) / kWordBits] |= Word{1} << ((id - 1) % kWordBits);
        return m;
    }

    friend bool operator==(const StationSet&, const StationSet&) = default;

   private:
    std::vector<std::size_t> members_;
};

/// Immutable t x n binary schedule.
class ScheduleMatrix {
   public:
    /// Empty schedule (t = 0) over n stations.
    explicit ScheduleMatrix(std::size_t n) : ScheduleMatrix(0, n) {}

    static ScheduleMatrix zeros(std::size_t t, std::size_t n) { return ScheduleMatrix(t, n); }

    static ScheduleMatrix ones(std::size_t t, std::size_t n) {
        ScheduleMatrix m(t, n);
        for (std::size_t i = 0; i < t; ++i)
            for (std::size_t j = 0; j < n; ++j) m.set(i, j);
        return m;
    }

    static ScheduleMatrix identity(std::size_t n) {
        ScheduleMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i);
        return m;
    }

    /// Builds from explicit rows; rows must be non-empty, equal length, entries 0/1.
    static ScheduleMatrix from_rows(const std::vector<std::vector<int>>& rows) {
        if (rows.empty()) throw invalid_input("cannot infer n from an empty row list");
        return from_rows(rows.front().size(), rows);
    }

    /// As above, with n explicit so that t = 0 is allowed.
    static ScheduleMatrix from_rows(std::size_t n, const std::vector<std::vector<int>>& rows) {
        if (n == 0) throw invalid_input("matrix needs at least one column");
        ScheduleMatrix m(rows.size(), n);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != n) throw invalid_input("ragged rows: row " + std::to_string(i + 1));
            for (std::size_t j = 0; j < n; ++j) {
                if (rows[i][j] == 1)
                    m.set(i, j);
                else if (rows[i][j] != 0)
                    throw invalid_input("non-binary entry in row " + std::to_string(i + 1));
            }
        }
        return m;
    }

    std::size_t t() const { return t_; }
    std::size_t n() const { return n_; }
    std::size_t words_per_row() const { return wpr_; }

    /// Entry (i, j), 1-based.
    bool at(std::size_t i, std::size_t j) const {
        check_row(i);
        if (j == 0 || j > n_) throw invalid_input("column index out of range");
        return get(i - 1, j - 1);
    }

    /// Row i (1-based) as packed words.
    std::span<const Word> row(std::size_t i) const {
        check_row(i);
        return row0(i - 1);
    }

    /// Row by 0-based index, unchecked. For inner loops.
    std::span<const Word> row0(std::size_t i) const { return {bits_.data() + i * wpr_, wpr_}; }

    std::size_t ones() const { return popcount(bits_); }

    friend bool operator==(const ScheduleMatrix&, const ScheduleMatrix&) = default;

   private:
    friend class MatrixBuilder;

    ScheduleMatrix(std::size_t t, std::size_t n) : t_(t), n_(n), wpr_(words_for(n)), bits_(t * wpr_, 0) {
        if (n == 0) throw invalid_input("matrix needs at least one column");
    }

    void check_row(std::size_t i) const {
        if (i == 0 || i > t_) throw invalid_input("row index " + std::to_string(i) + " out of range");
    }
    bool get(std::size_t i, std::size_t j) const { return (bits_[i * wpr_ + j / kWordBits] >> (j % kWordBits)) & 1U; }
    void set(std::size_t i, std::size_t j) { bits_[i * wpr_ + j / kWordBits] |= Word{1} << (j % kWordBits); }

    std::size_t t_;
    std::size_t n_;
    std::size_t wpr_;
    std::vector<Word> bits_;
};

/// Mutable staging area that yields an immutable ScheduleMatrix.
class MatrixBuilder {
   public:
    MatrixBuilder(std::size_t t, std::size_t n) : m_(t, n) {}
    /// 0-based set, used by generators.
    void set0(std::size_t i, std::size_t j) { m_.set(i, j); }
    ScheduleMatrix build() && { return std::move(m_); }

   private:
    ScheduleMatrix m_;
};

struct KGParams {
    std::size_t k;
    std::size_t d;
    std::size_t n;

    void validate() const {
        if (!(1 <= d && d <= k && k <= n))
            throw invalid_input("KG parameters need 1 <= d <= k <= n (got k=" + std::to_string(k) +
                                " d=" + std::to_string(d) + " n=" + std::to_string(n) + ")");
    }
    friend bool operator==(const KGParams&, const KGParams&) = default;
};

struct SelectorParams {
    std::size_t k;
    std::size_t m;
    std::size_t d;
    std::size_t n;

    void validate() const {
        if (!(1 <= d && d <= m && m <= k && k <= n))
            throw invalid_input("selector parameters need 1 <= d <= m <= k <= n (got k=" + std::to_string(k) +
                                " m=" + std::to_string(m) + " d=" + std::to_string(d) +
                                " n=" + std::to_string(n) + ")");
    }
    friend bool operator==(const SelectorParams&, const SelectorParams&) = default;
};

/// M[S]: the columns of S in the order of S.
inline ScheduleMatrix column_submatrix(const ScheduleMatrix& m, const StationSet& s) {
    s.check_within(m.n());
    if (s.empty()) throw invalid_input("column_submatrix of an empty set");
    MatrixBuilder b(m.t(), s.size());
    for (std::size_t i = 1; i <= m.t(); ++i)
        for (std::size_t c = 0; c < s.size(); ++c)
            if (m.at(i, s[c])) b.set0(i - 1, c);
    return std::move(b).build();
}

/// Number of ones of row i inside the columns of S.
inline std::size_t restricted_row_weight(const ScheduleMatrix& m, std::size_t i, const StationSet& s) {
    const auto mask = s.mask(m.n());
    return popcount(m.row(i), mask);
}

/// Vertical concatenation, first matrix on top.
inline ScheduleMatrix stack(std::span<const ScheduleMatrix> ms) {
    if (ms.empty()) throw invalid_input("stack of zero matrices");
    const std::size_t n = ms.front().n();
    std::size_t t = 0;
    for (const auto& m : ms) {
        if (m.n() != n) throw invalid_input("stack: column counts differ");
        t += m.t();
    }
    MatrixBuilder b(t, n);
    std::size_t r = 0;
    for (const auto& m : ms)
        for (std::size_t i = 1; i <= m.t(); ++i, ++r)
            for (std::size_t j = 1; j <= n; ++j)
                if (m.at(i, j)) b.set0(r, j - 1);
    return std::move(b).build();
}

inline ScheduleMatrix stack(std::initializer_list<ScheduleMatrix> ms) {
    return stack(std::span<const ScheduleMatrix>(ms.begin(), ms.size()));
}

/// Column relabeling: column j of the input becomes column perm[j-1] of the output.
inline ScheduleMatrix permute_columns(const ScheduleMatrix& m, std::span<const std::size_t> perm) {
    if (perm.size() != m.n()) throw invalid_input("permutation size mismatch");
    MatrixBuilder b(m.t(), m.n());
    for (std::size_t i = 1; i <= m.t(); ++i)
        for (std::size_t j = 1; j <= m.n(); ++j)
            if (m.at(i, j)) b.set0(i - 1, perm[j - 1] - 1);
    return std::move(b).build();
}

inline StationSet permute_set(const StationSet& s, std::span<const std::size_t> perm) {
    std::vector<std::size_t> out;
    out.reserve(s.size());
    for (std::size_t id : s) out.push_back(perm[id - 1]);
    return StationSet(std::move(out));
}

// ---- combinatorics -------------------------------------------------------

/// C(n, k), saturating at UINT64_MAX.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(r);
}

/// Advances a 0-based k-combination of [0, n) in lexicographic order.
inline bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
    const std::size_t k = c.size();
    std::size_t i = k;
    while (i > 0) {
        --i;
        if (c[i] < n - k + i) {
            ++c[i];
            for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

/// The rank-th (0-based) k-combination of [0, n) in lexicographic order.
inline std::vector<std::size_t> unrank_combination(std::size_t n, std::size_t k, std::uint64_t rank) {
    std::vector<std::size_t> c;
    c.reserve(k);
    std::size_t x = 0;
    for (std::size_t i = 0; i < k; ++i) {
        for (;; ++x) {
            const std::uint64_t below = binomial(n - x - 1, k - i - 1);
            if (rank < below) break;
            rank -= below;
        }
        c.push_back(x++);
    }
    return c;
}

}  // namespace mpr
