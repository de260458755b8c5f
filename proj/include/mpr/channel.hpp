#pragma once

// Slotted multiple-access channel with capacity d and per-station success
// feedback. A slot with 1..d transmitters delivers all of them; more than d
// is a conflict and nobody is delivered. Delivered stations go silent for
// the rest of the schedule.

#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "mpr/core.hpp"

namespace mpr {

enum class SlotKind { silence, success, conflict };

inline const char* to_string(SlotKind k) {
    switch (k) {
        case SlotKind::silence: return "silence";
        case SlotKind::success: return "success";
        case SlotKind::conflict: return "conflict";
    }
    return "?";
}

struct SlotOutcome {
    std::size_t slot;
    StationSet transmitters;
    SlotKind kind;
    StationSet succeeded;
};

struct SimulationTrace {
    std::vector<SlotOutcome> outcomes;
    /// One entry per initially active station; nullopt means it never succeeded.
    std::map<std::size_t, std::optional<std::size_t>> success_slot;
    bool resolved = false;

    /// Largest success slot, or nullopt if nobody succeeded.
    std::optional<std::size_t> slots_used() const {
        std::optional<std::size_t> last;
        for (const auto& [_, s] : success_slot)
            if (s && (!last || *s > *last)) last = s;
        return last;
    }
};

namespace detail {

/// Mask-level channel step shared by the simulators. Returns the transmitter count.
inline std::size_t channel_step(std::span<const Word> row, ColumnMask& active, ColumnMask& tx) {
    std::size_t count = 0;
    for (std::size_t w = 0; w < active.size(); ++w) {
        tx[w] = row[w] & active[w];
        count += static_cast<std::size_t>(std::popcount(tx[w]));
    }
    return count;
}

/// Runs the schedule on a mask of active stations and leaves the survivors in `active`.
/// Returns true once nobody is left.
inline bool run_masked(const ScheduleMatrix& m, ColumnMask& active, std::size_t d) {
    ColumnMask tx(active.size());
    bool any = popcount(active) > 0;
    for (std::size_t i = 0; i < m.t() && any; ++i) {
        const std::size_t c = channel_step(m.row0(i), active, tx);
        if (c >= 1 && c <= d) {
            for (std::size_t w = 0; w < active.size(); ++w) active[w] &= ~tx[w];
            any = popcount(active) > 0;
        }
    }
    return !any;
}

}  // namespace detail

inline SimulationTrace simulate(const ScheduleMatrix& m, const StationSet& s, std::size_t d) {
    if (d < 1) throw invalid_input("channel capacity d must be >= 1");
    ColumnMask active = s.mask(m.n());
    ColumnMask tx(active.size());

    SimulationTrace tr;
    for (std::size_t id : s) tr.success_slot[id] = std::nullopt;
    tr.outcomes.reserve(m.t());

    for (std::size_t i = 0; i < m.t(); ++i) {
        const std::size_t c = detail::channel_step(m.row0(i), active, tx);
        SlotOutcome o{i + 1, StationSet::from_mask(tx, m.n()), SlotKind::silence, {}};
        if (c > d) {
            o.kind = SlotKind::conflict;
        } else if (c >= 1) {
            o.kind = SlotKind::success;
            o.succeeded = o.transmitters;
            for (std::size_t id : o.succeeded) tr.success_slot[id] = i + 1;
            for (std::size_t w = 0; w < active.size(); ++w) active[w] &= ~tx[w];
        }
        tr.outcomes.push_back(std::move(o));
    }
    tr.resolved = popcount(active) == 0;
    return tr;
}

inline bool resolves(const ScheduleMatrix& m, const StationSet& s, std::size_t d) {
    if (d < 1) throw invalid_input("channel capacity d must be >= 1");
    ColumnMask active = s.mask(m.n());
    return detail::run_masked(m, active, d);
}

inline StationSet residual_active(const ScheduleMatrix& m, const StationSet& s, std::size_t d) {
    if (d < 1) throw invalid_input("channel capacity d must be >= 1");
    ColumnMask active = s.mask(m.n());
    detail::run_masked(m, active, d);
    return StationSet::from_mask(active, m.n());
}

/// Runs the stage codes back to back; activity carries across stage boundaries
/// and slots are numbered globally.
inline SimulationTrace staged_simulate(std::span<const ScheduleMatrix> stages, const StationSet& s, std::size_t d) {
    return simulate(stack(stages), s, d);
}

/// CSV export: slot,kind,num_transmitters,succeeded_stations
inline void write_trace_csv(std::ostream& os, const SimulationTrace& tr) {
    os << "slot,kind,num_transmitters,succeeded_stations\n";
    for (const auto& o : tr.outcomes) {
        os << o.slot << ',' << to_string(o.kind) << ',' << o.transmitters.size() << ',';
        for (std::size_t i = 0; i < o.succeeded.size(); ++i) os << (i ? ";" : "") << o.succeeded[i];
        os << '\n';
    }
}

inline std::string trace_summary(const SimulationTrace& tr) {
    const auto used = tr.slots_used();
    return std::string("resolved=") + (tr.resolved ? "true" : "false") +
           " slots_used=" + (used ? std::to_string(*used) : std::string("n/a"));
}

}  // namespace mpr
