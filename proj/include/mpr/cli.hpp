#pragma once

// Command-line front end.
//
//   gen kg|selector|staged   write a generated matrix (+ JSON sidecar with -o)
//   verify <property> FILE   JSON report; exit 0 pass, 1 fail, 2 error
//   simulate FILE...         trace CSV on stdout, summary on stderr
//   bounds <name>            one JSON object per line
//   sweep                    Monte Carlo CSV: k,d,n,eps,trial,measurement,value
//
// Exit codes: 0 success/pass, 1 property failure, 2 usage, cap or input error.

#include <future>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mpr/bounds.hpp"
#include "mpr/channel.hpp"
#include "mpr/construct.hpp"
#include "mpr/matrix_io.hpp"
#include "mpr/plan.hpp"
#include "mpr/serialize.hpp"
#include "mpr/verify.hpp"

namespace mpr::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitError = 2;

enum class Measurement { construction_length, resolution_slots, residual_actives, gen_attempts };

inline Measurement parse_measurement(const std::string& s) {
    if (s == "construction_length") return Measurement::construction_length;
    if (s == "resolution_slots") return Measurement::resolution_slots;
    if (s == "residual_actives") return Measurement::residual_actives;
    if (s == "gen_attempts") return Measurement::gen_attempts;
    throw invalid_input("unknown measurement '" + s + "'");
}

inline const char* to_string(Measurement m) {
    switch (m) {
        case Measurement::construction_length: return "construction_length";
        case Measurement::resolution_slots: return "resolution_slots";
        case Measurement::residual_actives: return "residual_actives";
        case Measurement::gen_attempts: return "gen_attempts";
    }
    return "?";
}

struct SweepSpec {
    std::vector<std::size_t> ks, ds, ns;
    std::vector<double> epss{0.5};
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    Measurement measurement = Measurement::construction_length;
    std::optional<std::size_t> m;  // selector coverage; default ceil(k/2)
    std::optional<GenMode> mode;   // default: whp for lengths, verified otherwise
    unsigned workers = 1;

    void validate() const {
        if (ks.empty() || ds.empty() || ns.empty() || epss.empty()) throw invalid_input("sweep grid must be non-empty");
        if (trials < 1) throw invalid_input("sweep needs trials >= 1");
    }
};

/// Random s-subset of [n] drawn with a seeded engine.
inline StationSet random_subset(std::size_t n, std::size_t s, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::vector<std::size_t> ids(n);
    for (std::size_t j = 0; j < n; ++j) ids[j] = j + 1;
    // partial Fisher-Yates with explicit index draws (portable across std libs)
    for (std::size_t i = 0; i < s; ++i) {
        const std::size_t r = i + static_cast<std::size_t>(eng() % (n - i));
        std::swap(ids[i], ids[r]);
    }
    ids.resize(s);
    return StationSet(std::move(ids));
}

/// CSV rows (without header) for one grid cell.
inline std::string sweep_cell(const SweepSpec& spec, std::size_t cell, std::size_t k, std::size_t d, std::size_t n,
                              double eps) {
    std::ostringstream os;
    const GenMode mode = spec.mode.value_or(spec.measurement == Measurement::construction_length ? GenMode::whp
                                                                                                  : GenMode::verified);
    GenOptions gopt;
    gopt.verify = VerifyOptions::from_env();
    for (std::size_t trial = 0; trial < spec.trials; ++trial) {
        const std::uint64_t ts = derive_seed(spec.seed, cell, trial);
        std::string value;
        switch (spec.measurement) {
            case Measurement::construction_length: {
                value = std::to_string(build_kg({k, d, n}, eps, ts, mode, gopt).matrix.t());
                break;
            }
            case Measurement::resolution_slots: {
                const auto code = build_kg({k, d, n}, eps, ts, mode, gopt);
                const auto tr = simulate(code.matrix, random_subset(n, k, splitmix64(ts)), d);
                const auto used = tr.slots_used();
                value = tr.resolved && used ? std::to_string(*used) : "NA";
                break;
            }
            case Measurement::residual_actives: {
                const std::size_t m = spec.m.value_or((k + 1) / 2);
                const auto sel = generate_selector({k, m, d, n}, eps, ts, GenMode::verified, 0, gopt);
                std::mt19937_64 eng(splitmix64(ts));
                const std::size_t s = 1 + static_cast<std::size_t>(eng() % k);
                value = std::to_string(residual_active(sel.matrix, random_subset(n, s, eng()), d).size());
                break;
            }
            case Measurement::gen_attempts: {
                const std::size_t m = spec.m.value_or((k + 1) / 2);
                value = std::to_string(generate_selector({k, m, d, n}, eps, ts, GenMode::verified, 0, gopt).attempts);
                break;
            }
        }
        os << k << ',' << d << ',' << n << ',' << eps << ',' << trial << ',' << to_string(spec.measurement) << ','
           << value << '\n';
    }
    return os.str();
}

/// Runs the sweep; rows come out in grid order (k, d, n, eps) whatever the
/// completion order of the cells. Cells with d > k or k > n are skipped.
inline void run_sweep(const SweepSpec& spec, std::ostream& out, std::ostream& err) {
    spec.validate();
    struct Cell {
        std::size_t k, d, n;
        double eps;
    };
    std::vector<Cell> cells;
    for (auto k : spec.ks)
        for (auto d : spec.ds)
            for (auto n : spec.ns)
                for (auto e : spec.epss) {
                    if (!(1 <= d && d <= k && k <= n)) {
                        err << "skipping cell k=" << k << " d=" << d << " n=" << n << " (needs 1<=d<=k<=n)\n";
                        continue;
                    }
                    check_eps(e);
                    cells.push_back({k, d, n, e});
                }

    std::vector<std::string> rows(cells.size());
    const unsigned w = std::max(1U, spec.workers);
    for (std::size_t base = 0; base < cells.size(); base += w) {
        std::vector<std::future<std::string>> batch;
        for (std::size_t i = base; i < std::min(cells.size(), base + w); ++i)
            batch.push_back(std::async(w > 1 ? std::launch::async : std::launch::deferred, [&, i] {
                return sweep_cell(spec, i, cells[i].k, cells[i].d, cells[i].n, cells[i].eps);
            }));
        for (std::size_t i = 0; i < batch.size(); ++i) rows[base + i] = batch[i].get();
    }
    out << "k,d,n,eps,trial,measurement,value\n";
    for (const auto& r : rows) out << r;
}

/// Parses "1,2,3" (whitespace tolerated); empty string gives the empty set.
inline StationSet parse_station_list(const std::string& s) {
    std::vector<std::size_t> ids;
    std::string tok;
    std::istringstream is(s);
    while (std::getline(is, tok, ',')) {
        tok.erase(0, tok.find_first_not_of(" \t"));
        tok.erase(tok.find_last_not_of(" \t") + 1);
        if (tok.empty()) continue;
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != tok.size() || v < 1) throw invalid_input("bad station id '" + tok + "'");
        ids.push_back(static_cast<std::size_t>(v));
    }
    return StationSet(std::move(ids));
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw invalid_input("cannot write '" + path + "'");
    f << text;
}

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed, std::ostream& err) {
    if (seed) return *seed;
    std::random_device rd;
    const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    err << "seed=" << s << " (auto-generated)\n";
    return s;
}

/// Entry point shared by the binary and the tests.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Conflict-resolution codes for d-capacity multiple-access channels", "mpr"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a selector, KG code or staged code");
    gen->require_subcommand(1);
    struct GenArgs {
        std::size_t k = 0, m = 0, d = 1, n = 0;
        double eps = 0.5;
        std::optional<std::uint64_t> seed;
        std::string mode = "verified";
        std::string out;
        bool force = false;
    } ga;
    auto add_gen_common = [&](CLI::App* c) {
        c->add_option("--d", ga.d, "channel capacity")->required();
        c->add_option("--n", ga.n, "number of stations")->required();
        c->add_option("--eps", ga.eps, "per-attempt failure probability target")->capture_default_str();
        c->add_option("--seed", ga.seed, "random seed");
        c->add_option("--mode", ga.mode, "verified|whp")->capture_default_str();
        c->add_option("-o,--out", ga.out, "matrix output path (sidecar at <path>.json)");
        c->add_flag("--force", ga.force, "lift verification caps");
    };
    auto* gen_kg = gen->add_subcommand("kg", "KG (k,d,n)-code");
    gen_kg->add_option("--k", ga.k, "max active stations")->required();
    add_gen_common(gen_kg);
    auto* gen_sel = gen->add_subcommand("selector", "(k,m,d,n)-selector");
    gen_sel->add_option("--k", ga.k)->required();
    gen_sel->add_option("--m", ga.m, "coverage target")->required();
    add_gen_common(gen_sel);
    auto* gen_staged = gen->add_subcommand("staged", "stage codes for unknown k, stacked");
    add_gen_common(gen_staged);

    // verify
    auto* ver = app.add_subcommand("verify", "exhaustively verify a matrix property");
    struct VerArgs {
        std::string property;
        std::string file;
        std::size_t k = 0;
        std::optional<std::size_t> m, d, n;
        bool force = false;
        unsigned workers = 1;
    } va;
    ver->add_option("property", va.property, "kg|kg-def|selector|lt-leq|lt-exact")->required();
    ver->add_option("matrix", va.file, "matrix file");
    ver->add_option("--k", va.k)->required();
    ver->add_option("--m", va.m);
    ver->add_option("--d", va.d);
    ver->add_option("--n", va.n);
    ver->add_flag("--force", va.force, "lift verification caps");
    ver->add_option("--workers", va.workers, "parallel workers")->capture_default_str();

    // simulate
    auto* sim = app.add_subcommand("simulate", "simulate the channel; several files run as stages");
    struct SimArgs {
        std::vector<std::string> files;
        std::string active;
        std::size_t d = 1;
    } sa;
    sim->add_option("matrices", sa.files, "matrix files (stacked in order)")->required();
    sim->add_option("--active", sa.active, "comma-separated active stations")->required();
    sim->add_option("--d", sa.d, "channel capacity")->required();

    // bounds
    auto* bnd = app.add_subcommand("bounds", "evaluate closed-form bounds");
    struct BndArgs {
        std::string name;
        std::size_t k = 0, d = 1;
        std::optional<std::size_t> n;
        std::optional<std::size_t> m;
        std::optional<double> p;
        double eps = 0.5;
    } ba;
    bnd->add_option("name", ba.name, "tsel|tkg|tkg-closed|tlt-leq|tlt-exact|p1p2|claim1")->required();
    bnd->add_option("--k", ba.k)->required();
    bnd->add_option("--m", ba.m);
    bnd->add_option("--d", ba.d)->capture_default_str();
    bnd->add_option("--n", ba.n);
    bnd->add_option("--p", ba.p, "Bernoulli parameter for p1p2 (default: prescribed)");
    bnd->add_option("--eps", ba.eps)->capture_default_str();

    // sweep
    auto* swp = app.add_subcommand("sweep", "Monte Carlo sweep to CSV");
    SweepSpec ss;
    std::string meas = "construction_length";
    std::optional<std::uint64_t> sweep_seed;
    std::optional<std::string> sweep_mode;
    swp->add_option("--measurement", meas, "construction_length|resolution_slots|residual_actives|gen_attempts")
        ->capture_default_str();
    swp->add_option("--k", ss.ks)->delimiter(',')->required();
    swp->add_option("--d", ss.ds)->delimiter(',')->required();
    swp->add_option("--n", ss.ns)->delimiter(',')->required();
    swp->add_option("--eps", ss.epss)->delimiter(',');
    swp->add_option("--m", ss.m, "selector coverage (default ceil(k/2))");
    swp->add_option("--trials", ss.trials)->capture_default_str();
    swp->add_option("--seed", sweep_seed);
    swp->add_option("--mode", sweep_mode, "verified|whp");
    swp->add_option("--workers", ss.workers)->capture_default_str();

    std::vector<std::string> argv_store{"mpr"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitPass : kExitError;
    }

    try {
        if (*gen) {
            const GenMode mode = parse_mode(ga.mode);
            const std::uint64_t seed = resolve_seed(ga.seed, err);
            GenOptions gopt;
            gopt.verify = VerifyOptions::from_env();
            gopt.verify.force = ga.force;
            ScheduleMatrix matrix(1);
            json meta;
            if (*gen_kg) {
                const auto code = build_kg({ga.k, ga.d, ga.n}, ga.eps, seed, mode, gopt);
                matrix = code.matrix;
                meta = sidecar_json(code);
            } else if (*gen_sel) {
                const SelectorParams sp{ga.k, ga.m, ga.d, ga.n};
                const auto r = generate_selector(sp, ga.eps, seed, mode, 0, gopt);
                matrix = r.matrix;
                meta = json{{"k", sp.k},       {"m", sp.m},       {"d", sp.d},
                            {"n", sp.n},       {"eps", ga.eps},   {"seed", seed},
                            {"mode", to_string(mode)},
                            {"plan", json::array({json{{"k", sp.k}, {"m", sp.m}, {"d_eff", r.plan.effective_d}, {"t", r.plan.t}}})},
                            {"p", r.plan.p},   {"generator", kGeneratorName}};
            } else {
                const auto stages = build_staged(ga.n, ga.d, ga.eps, seed, mode, gopt);
                matrix = stacked(stages);
                json st = json::array();
                for (const auto& s : stages)
                    st.push_back(json{{"k", s.params.k}, {"d", s.params.d}, {"t", s.matrix.t()}, {"plan", plan_json(s.plan)}});
                meta = json{{"n", ga.n},     {"d", ga.d},
                            {"eps", ga.eps}, {"seed", seed},
                            {"mode", to_string(mode)}, {"stages", st},
                            {"generator", kGeneratorName}};
            }
            if (ga.out.empty()) {
                write_matrix(out, matrix);
            } else {
                save_matrix(ga.out, matrix);
                write_text_file(ga.out + ".json", meta.dump(2) + "\n");
            }
            return kExitPass;
        }

        if (*ver) {
            VerifyOptions vo = VerifyOptions::from_env();
            vo.force = va.force;
            vo.workers = std::max(1U, va.workers);
            // Cap check first so oversized requests fail fast, before any I/O.
            if (va.n) detail::check_caps(*va.n, binomial(*va.n, va.k), vo);
            if (va.file.empty()) throw invalid_input("verify: matrix file required");
            const auto m = load_matrix(va.file);
            const std::size_t n = va.n.value_or(m.n());
            const std::size_t d = va.d.value_or(1);
            VerificationReport rep;
            if (va.property == "kg")
                rep = is_kg_sim(m, {va.k, d, n}, vo);
            else if (va.property == "kg-def")
                rep = is_kg_def(m, {va.k, d, n}, vo);
            else if (va.property == "selector") {
                if (!va.m) throw invalid_input("verify selector: --m required");
                rep = is_selector(m, {va.k, *va.m, d, n}, vo);
            } else if (va.property == "lt-leq")
                rep = is_locally_thin_leq(m, {va.k, d, n}, vo);
            else if (va.property == "lt-exact")
                rep = is_locally_thin_exact(m, {va.k, d, n}, vo);
            else
                throw invalid_input("unknown property '" + va.property + "'");
            out << to_json(rep).dump() << '\n';
            return rep.pass ? kExitPass : kExitFail;
        }

        if (*sim) {
            std::vector<ScheduleMatrix> ms;
            for (const auto& f : sa.files) ms.push_back(load_matrix(f));
            const auto s = parse_station_list(sa.active);
            const auto tr = staged_simulate(ms, s, sa.d);
            write_trace_csv(out, tr);
            err << trace_summary(tr) << '\n';
            return tr.resolved ? kExitPass : kExitFail;
        }

        if (*bnd) {
            const std::size_t n = ba.n.value_or(ba.k);
            const std::size_t m = ba.m.value_or((ba.k + 1) / 2);
            if (ba.name == "tsel") {
                out << to_json(tsel_upper({ba.k, m, ba.d, n})).dump() << '\n';
            } else if (ba.name == "tkg") {
                out << to_json(tkg_upper_explicit({ba.k, ba.d, n}, ba.eps)).dump() << '\n';
            } else if (ba.name == "tkg-closed") {
                out << to_json(tkg_upper_closed_form({ba.k, ba.d, n})).dump() << '\n';
            } else if (ba.name == "tlt-leq") {
                out << to_json(tlt_lower_leq({ba.k, ba.d, n})).dump() << '\n';
            } else if (ba.name == "tlt-exact") {
                out << to_json(tlt_lower_exact({ba.k, ba.d, n})).dump() << '\n';
            } else if (ba.name == "p1p2") {
                const double p = ba.p.value_or(prescribed_p(ba.k, ba.d));
                const auto r = p1p2(ba.k, m, ba.d, p);
                out << json{{"name", "p1p2"}, {"p", p}, {"P1", r.p1}, {"P2", r.p2}, {"log_rate", r.log_rate}}.dump()
                    << '\n';
            } else if (ba.name == "claim1") {
                const double c = claim1_rate(ba.k, m, ba.d);
                const auto r = p1p2(ba.k, m, ba.d, prescribed_p(ba.k, ba.d));
                out << json{{"name", "claim1_rate"}, {"raw", c}, {"exact_log_rate", r.log_rate}}.dump() << '\n';
            } else {
                throw invalid_input("unknown bound '" + ba.name + "'");
            }
            return kExitPass;
        }

        if (*swp) {
            ss.measurement = parse_measurement(meas);
            ss.seed = resolve_seed(sweep_seed, err);
            if (sweep_mode) ss.mode = parse_mode(*sweep_mode);
            run_sweep(ss, out, err);
            return kExitPass;
        }
    } catch (const cap_exceeded& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

}  // namespace mpr::cli
