// Acceptance gate: ten behavioral criteria, one line each, exit code equal to
// the number of failures. Tolerances are pinned here on purpose; do not widen
// them to make a run pass.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "lazybits/analysis.hpp"
#include "lazybits/cli.hpp"
#include "lazybits/engine.hpp"
#include "lazybits/ratio.hpp"

using namespace lazybits;

namespace {

struct Gate {
    bool pass = false;
    std::string detail;
};

mpq_class q(const char* s) { return parse_ratio(s); }

// ---- 1: mean bits of the threshold comparison ------------------------------

Gate gate_compare_two_bits() {
    auto r = empirical_compare(q("1/3"), 1000000, 1001);
    std::ostringstream os;
    os << "mean=" << r.mean_bits << " over 1e6 trials, want [1.99, 2.01]";
    const bool pass =
        r.overflow == 0 && r.mean_bits >= 1.99 && r.mean_bits <= 2.01;
    return {pass, os.str()};
}

// ---- 2: mean bits of the one-coordinate decision ---------------------------

Gate gate_identity_four_bits() {
    AltStrategy alt;
    auto identity = make_oracle("identity", 1);
    auto r = empirical_bits(*identity, alt, 1, 1000000, 1002);
    std::ostringstream os;
    os << "mean=" << r.mean_bits << " over 1e6 runs, want [3.98, 4.02]";
    const bool pass =
        r.overflow == 0 && r.mean_bits >= 3.98 && r.mean_bits <= 4.02;
    return {pass, os.str()};
}

// ---- 3: series value against an independent closed form --------------------

Gate gate_series_closed_form() {
    const mpq_class eps = q("1/1000000000");
    auto bound = theorem1_bound(1, eps);

    // independent oracle: per-k term 3.5*2^-k - 1.5*4^-k, truncated by the
    // same documented rule (smallest K with 2*(n+1)^2*2^-K <= eps)
    unsigned long K = 0;
    for (mpq_class tail = 8; tail > eps; tail /= 2)
        ++K;
    mpq_class expected = 0;
    for (unsigned long k = 0; k <= K; ++k) {
        mpz_class t = mpz_class(1) << k;
        mpq_class term(7 * t - 3, 2 * t * t);
        term.canonicalize();
        expected += term;
    }

    const bool exact = bound.value == expected;
    mpq_class err = 5 - bound.value;
    if (err < 0)
        err = -err;
    const bool close = err <= eps;
    std::ostringstream os;
    os << "value=" << bound.to_double() << " (5 - " << err.get_d() << "), "
       << (exact ? "exactly equal to the closed-form sum"
                 : "DIFFERS from the closed-form sum");
    return {exact && close, os.str()};
}

// ---- 4: ordered bound chain -------------------------------------------------

Gate gate_bound_chain() {
    const mpq_class eps = q("1/1000000");
    for (unsigned n = 1; n <= 50; ++n) {
        auto r = bound_report(n, eps);
        const bool ok = r.lower == n + 1 && r.theorem1.value >= r.lower &&
                        r.theorem1.value <= r.slack1.value &&
                        r.slack1.value <= r.slack2 && r.theorem1.tail <= eps &&
                        r.slack1.tail <= eps;
        if (!ok) {
            std::ostringstream os;
            os << "chain broken at n=" << n;
            return {false, os.str()};
        }
    }
    return {true, "n+1 <= series <= coarse series <= 2(n+1)^2 for n=1..50, "
                  "tails certified <= 1e-6"};
}

// ---- 5: staircase crossing counts vs the cap -------------------------------

Gate gate_staircase_crossings() {
    const std::vector<std::vector<long>> families = {{6, 6}, {5, 5, 5},
                                                     {4, 4, 4, 4}};
    std::uint64_t cases_run = 0, violations = 0;
    std::string first;
    for (std::size_t fam = 0; fam < families.size(); ++fam) {
        const auto& caps = families[fam];
        for (std::uint64_t i = 0; i < 1000; ++i) {
            const std::uint64_t case_seed =
                derive_trial_seed(5000 + fam, i);
            Xoshiro256StarStar rng(case_seed);
            std::vector<long> dims(caps.size());
            for (std::size_t a = 0; a < caps.size(); ++a)
                dims[a] = 1 + static_cast<long>(rng.next_below(
                                  static_cast<std::uint64_t>(caps[a])));
            auto g = random_staircase(derive_trial_seed(case_seed, 1), dims);
            ++cases_run;
            if (count_crossed(g) > prop1_bound(dims)) {
                ++violations;
                if (first.empty()) {
                    std::ostringstream os;
                    os << "first violation: family=" << fam << " case=" << i;
                    first = os.str();
                }
            }
        }
    }
    std::ostringstream os;
    os << cases_run << " random staircases across " << families.size()
       << " grid families, " << violations << " violations";
    if (!first.empty())
        os << " (" << first << ")";
    return {violations == 0, os.str()};
}

// ---- 6: cut-count floor under every strategy -------------------------------

Gate gate_cut_floor() {
    std::ostringstream os;
    bool pass = true;
    for (unsigned n = 1; n <= 4; ++n) {
        auto hard = make_oracle("hard", n);
        for (const auto& sname : shipped_strategy_names()) {
            auto strategy = make_strategy(sname);
            std::size_t min_cuts = SIZE_MAX;
            std::uint64_t floor_hits = 0;
            for (std::uint64_t i = 0; i < 10000; ++i) {
                auto out = decide(*hard, *strategy,
                                  make_pseudo_box(n + 1,
                                                  derive_trial_seed(6000 + n, i)));
                min_cuts = std::min(min_cuts, out.cuts.length());
                if (out.cuts.length() == n + 1)
                    ++floor_hits;
            }
            if (min_cuts < n + 1)
                pass = false;
            os << sname << "/n=" << n << " min=" << min_cuts
               << (floor_hits ? "" : " (floor unreached)") << "; ";
        }
    }
    std::string detail = os.str();
    detail += pass ? "no run below n+1" : "FLOOR UNDERCUT";
    return {pass, detail};
}

// ---- 7: growth exponents ----------------------------------------------------

Gate gate_growth_exponents() {
    const mpq_class eps = q("1/1000000000");
    std::vector<std::pair<double, double>> t1, s2;
    for (unsigned n = 10; n <= 200; n += 10) {
        t1.emplace_back(n, theorem1_bound(n, eps).to_double());
        s2.emplace_back(n, slack2_bound(n).get_d());
    }
    const double slope_t1 = fit_exponent(t1);
    const double slope_s2 = fit_exponent(s2);
    std::ostringstream os;
    os << "series slope=" << slope_t1 << " (want [1.10, 1.25]), quadratic slope="
       << slope_s2 << " (want [1.95, 2.05])";
    const bool pass = slope_t1 > 1.10 && slope_t1 < 1.25 && slope_s2 > 1.95 &&
                      slope_s2 < 2.05;
    return {pass, os.str()};
}

// ---- 8: sampler distribution and acceptance rate ---------------------------

Gate gate_sampler_distribution() {
    AltStrategy alt;
    std::ostringstream os;
    bool pass = true;

    auto run_gof = [&](const char* spec, std::uint64_t seed,
                       std::uint64_t* attempts_out) {
        auto f = make_oracle(spec, 1);
        std::vector<mpq_class> xs;
        xs.reserve(100000);
        std::uint64_t attempts = 0;
        for (std::uint64_t i = 0; i < 100000; ++i) {
            auto s = sample(*f, alt, derive_trial_seed(seed, i));
            attempts += s.attempts;
            while (s.box.prefix(0).exponent < 32)
                s.box.reveal(0);
            xs.push_back(s.box.lower(0));
        }
        if (attempts_out)
            *attempts_out = attempts;
        return chi_square_gof(xs, *f, 10);
    };

    auto gi = run_gof("identity", 8001, nullptr);
    os << "identity p=" << gi.p_value;
    if (gi.p_value <= 1e-3)
        pass = false;

    std::uint64_t attempts = 0;
    auto gh = run_gof("hard", 8002, &attempts);
    os << ", steep-ramp p=" << gh.p_value;
    if (gh.p_value <= 1e-3)
        pass = false;

    const double rate = 100000.0 / static_cast<double>(attempts);
    const double target = 21.0 / 32.0; // exact mass of min(3/4, 3x) on [0,1)
    os << ", acceptance rate=" << rate << " (want " << target << " +- 0.01)";
    if (rate < target - 0.01 || rate > target + 0.01)
        pass = false;
    return {pass, os.str()};
}

// ---- 9: decisions against exact rational comparison ------------------------

Gate gate_decision_soundness() {
    AltStrategy alt;
    std::uint64_t checked = 0, ties = 0, mismatches = 0;
    std::string first;
    const auto specs = builtin_oracle_specs();
    for (unsigned n : {1u, 2u}) {
        for (std::size_t fi = 0; fi < specs.size(); ++fi) {
            if (specs[fi] == "identity" && n != 1)
                continue; // one-dimensional only
            auto f = make_oracle(specs[fi], n);
            Xoshiro256StarStar rng(derive_trial_seed(9000 + n, fi));
            std::vector<mpq_class> x(n + 1);
            std::vector<mpq_class> spatial(n);
            for (std::uint64_t i = 0; i < 100000; ++i) {
                mpq_class fx;
                for (;;) {
                    for (std::size_t j = 0; j <= n; ++j) {
                        // odd denominators keep the tapes off dyadic points
                        const std::uint64_t den = 3 + 2 * rng.next_below(32767);
                        const std::uint64_t num = rng.next_below(den);
                        x[j] = mpq_class(num, den);
                        x[j].canonicalize();
                    }
                    for (std::size_t j = 0; j < n; ++j)
                        spatial[j] = x[j];
                    fx = f->eval(spatial);
                    if (fx != x[n])
                        break;
                    ++ties; // measure-zero boundary, draw a fresh point
                }
                ++checked;
                bool ok;
                try {
                    auto out = decide(*f, alt, make_tape_box(x));
                    ok = (out.verdict == Verdict::LT) == (fx < x[n]);
                } catch (const CutBudgetExceeded&) {
                    ok = false; // off-boundary input must halt
                }
                if (!ok) {
                    ++mismatches;
                    if (first.empty()) {
                        std::ostringstream os;
                        os << "first mismatch: fn=" << specs[fi] << " n=" << n
                           << " trial=" << i;
                        first = os.str();
                    }
                }
            }
        }
    }
    std::ostringstream os;
    os << checked << " inputs across " << specs.size() << " functions x n in {1,2}, "
       << mismatches << " mismatches, " << ties << " boundary redraws";
    if (!first.empty())
        os << " (" << first << ")";
    return {mismatches == 0, os.str()};
}

// ---- 10: byte-identical command output -------------------------------------

Gate gate_cli_reproducible() {
    struct Cmd {
        std::vector<std::string> args;
        bool threaded = false;
    };
    const std::vector<Cmd> cmds = {
        {{"bounds", "--n", "1..8"}, false},
        {{"decide", "--fn", "hard", "--n", "2", "--seed", "7"}, false},
        {{"sample", "--fn", "identity", "--n", "1", "--count", "20",
          "--precision", "16", "--seed", "3"}, true},
        {{"bench", "--fn", "identity", "--n", "1", "--trials", "5000",
          "--seed", "5"}, true},
        {{"verify-prop1", "--dims", "4,4", "--cases", "100", "--seed", "11"}, false},
        {{"verify-lb", "--n", "1", "--trials", "1000", "--seed", "3"}, false},
        {{"gof", "--fn", "identity", "--samples", "2000", "--bins", "5",
          "--seed", "31"}, true},
        {{"fit", "--curve", "slack2", "--n", "10..100"}, false},
    };

    auto run_one = [](std::vector<std::string> args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return std::pair<int, std::string>(code, out.str());
    };

    std::uint64_t diffs = 0;
    std::string first;
    for (const auto& cmd : cmds) {
        auto a = run_one(cmd.args);
        auto b = run_one(cmd.args);
        bool same = a.first == 0 && a == b;
        if (same && cmd.threaded) {
            auto t1 = cmd.args;
            t1.insert(t1.end(), {"--threads", "1"});
            auto t8 = cmd.args;
            t8.insert(t8.end(), {"--threads", "8"});
            auto r1 = run_one(t1);
            auto r8 = run_one(t8);
            same = r1 == r8 && r1.second == a.second;
        }
        if (!same) {
            ++diffs;
            if (first.empty())
                first = cmd.args.front();
        }
    }
    std::ostringstream os;
    os << cmds.size() << " commands run twice";
    os << ", threads 1 vs 8 compared for sample/bench/gof";
    if (diffs)
        os << "; " << diffs << " MISMATCHED (first: " << first << ")";
    else
        os << "; all byte-identical";
    return {diffs == 0, os.str()};
}

} // namespace

int main() {
    unsetenv("LAZYBITS_SEED"); // results must not depend on the caller's env

    struct Criterion {
        const char* label;
        double time_limit; // seconds, 0 = untimed
        std::function<Gate()> fn;
    };

    const std::vector<Criterion> criteria = {
        {"threshold comparison costs two bits on average", 10.0,
         gate_compare_two_bits},
        {"one-coordinate decision costs four bits on average", 30.0,
         gate_identity_four_bits},
        {"series bound matches the independent closed form", 0.0,
         gate_series_closed_form},
        {"bound chain stays ordered for n=1..50", 10.0, gate_bound_chain},
        {"random staircases respect the crossing cap", 60.0,
         gate_staircase_crossings},
        {"no strategy beats the cut floor on the steep ramp", 0.0,
         gate_cut_floor},
        {"bound growth exponents sit in their windows", 0.0,
         gate_growth_exponents},
        {"sampler matches the target density and rate", 0.0,
         gate_sampler_distribution},
        {"decisions agree with exact rational comparison", 0.0,
         gate_decision_soundness},
        {"command-line output is byte-for-byte reproducible", 0.0,
         gate_cli_reproducible},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Gate g;
        try {
            g = criteria[i].fn();
        } catch (const std::exception& e) {
            g = {false, std::string("exception: ") + e.what()};
        }
        const double elapsed = std::chrono::duration<double>(
                                   std::chrono::steady_clock::now() - start)
                                   .count();
        bool pass = g.pass;
        std::string note;
        if (criteria[i].time_limit > 0 && elapsed > criteria[i].time_limit) {
            pass = false;
            note = " [exceeded " + std::to_string(criteria[i].time_limit) +
                   "s budget]";
        }
        if (!pass)
            ++failures;
        std::printf("[%2zu/10] %s  %6.2fs  %s: %s%s\n", i + 1,
                    pass ? "PASS" : "FAIL", elapsed, criteria[i].label,
                    g.detail.c_str(), note.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/10 criteria passed\n", 10 - failures);
    return failures;
}
