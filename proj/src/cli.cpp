#include "lazybits/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "lazybits/analysis.hpp"
#include "lazybits/ratio.hpp"

namespace lazybits {

namespace {

using ordered_json = nlohmann::ordered_json;

enum class Format { Csv, Json, Svg };

std::uint64_t default_seed() {
    const char* env = std::getenv("LAZYBITS_SEED");
    if (!env)
        return 42;
    try {
        std::size_t used = 0;
        std::string s(env);
        std::uint64_t v = std::stoull(s, &used);
        if (used != s.size())
            throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::invalid_argument("LAZYBITS_SEED is not an unsigned integer");
    }
}

std::pair<unsigned, unsigned> parse_range(const std::string& text) {
    auto parse_one = [](const std::string& s) {
        std::size_t used = 0;
        unsigned long v = std::stoul(s, &used);
        if (used != s.size() || v < 1)
            throw std::invalid_argument("bad range bound '" + s + "'");
        return static_cast<unsigned>(v);
    };
    try {
        auto dots = text.find("..");
        if (dots == std::string::npos) {
            unsigned v = parse_one(text);
            return {v, v};
        }
        unsigned lo = parse_one(text.substr(0, dots));
        unsigned hi = parse_one(text.substr(dots + 2));
        if (lo > hi)
            throw std::invalid_argument("empty range");
        return {lo, hi};
    } catch (const std::invalid_argument&) {
        throw;
    } catch (...) {
        throw std::invalid_argument("bad range '" + text + "' (want n or lo..hi)");
    }
}

std::vector<long> parse_dims(const std::string& text) {
    std::vector<long> dims;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            std::size_t used = 0;
            long v = std::stol(part, &used);
            if (used != part.size() || v < 1)
                throw std::invalid_argument("");
            dims.push_back(v);
        } catch (...) {
            throw std::invalid_argument("bad dims '" + text + "'");
        }
    }
    if (dims.size() < 2)
        throw std::invalid_argument("dims needs at least two axes, e.g. 6,6");
    return dims;
}

std::vector<mpq_class> parse_tapes(const std::string& text) {
    std::vector<mpq_class> tapes;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ','))
        tapes.push_back(parse_ratio(part));
    return tapes;
}

Format pick_format(std::string flag, const std::string& outpath) {
    if (flag.empty()) {
        auto dot = outpath.rfind('.');
        if (dot != std::string::npos) {
            std::string ext = outpath.substr(dot + 1);
            if (ext == "json")
                return Format::Json;
            if (ext == "svg")
                return Format::Svg;
        }
        return Format::Csv;
    }
    if (flag == "csv")
        return Format::Csv;
    if (flag == "json")
        return Format::Json;
    if (flag == "svg")
        return Format::Svg;
    throw std::invalid_argument("unknown format '" + flag + "'");
}

// Key=value config echo carried in every output header.
class Echo {
public:
    explicit Echo(std::string command) : command_(std::move(command)) {}

    void add(const std::string& key, const std::string& value) {
        kv_.emplace_back(key, value);
    }
    void add(const std::string& key, std::uint64_t value) {
        add(key, std::to_string(value));
    }

    std::string header_line() const {
        std::ostringstream os;
        os << "# lazybits " << kVersion << " | " << command_;
        for (const auto& [k, v] : kv_)
            os << " | " << k << '=' << v;
        return os.str();
    }

    ordered_json json_document() const {
        ordered_json j;
        j["tool"] = "lazybits";
        j["version"] = kVersion;
        j["command"] = command_;
        ordered_json cfg;
        for (const auto& [k, v] : kv_)
            cfg[k] = v;
        j["config"] = std::move(cfg);
        return j;
    }

private:
    std::string command_;
    std::vector<std::pair<std::string, std::string>> kv_;
};

// Round-trip through the 12-digit decimal so CSV and JSON carry the same
// value.
double json_number(double v) {
    return std::strtod(format_decimal(v).c_str(), nullptr);
}

std::string csv_quote(const std::string& field) {
    return '"' + field + '"';
}

std::string dyadic_str(const DyadicRational& d) {
    mpz_class den = 1;
    den <<= d.exponent;
    return d.mantissa.get_str() + "/" + den.get_str();
}

void write_output(const std::string& body, const std::string& outpath,
                  std::ostream& out) {
    if (outpath.empty() || outpath == "-") {
        out << body;
        return;
    }
    std::ofstream file(outpath, std::ios::binary);
    if (!file)
        throw std::runtime_error("cannot open output file '" + outpath + "'");
    file << body;
}

// Contiguous index partition; any thread count produces the same results
// because work item i depends only on i.
template <typename Fn>
void parallel_indexed(std::uint64_t count, unsigned threads, Fn&& fn) {
    if (threads <= 1 || count < 2) {
        for (std::uint64_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    const std::uint64_t chunk = (count + threads - 1) / threads;
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::uint64_t lo = w * chunk;
                const std::uint64_t hi = std::min(count, lo + chunk);
                for (std::uint64_t i = lo; i < hi; ++i)
                    fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

// ---- bounds ----------------------------------------------------------------

std::string svg_bounds_chart(const Echo& echo,
                             const std::vector<BoundReport>& rows) {
    // log-log chart, four curves
    const double width = 720, height = 480;
    const double left = 70, right = 680, top = 40, bottom = 430;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& r : rows) {
        const double x = std::log10(static_cast<double>(r.n));
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        for (double v : {r.lower.get_d(), r.theorem1.to_double(),
                         r.slack1.to_double(), mpz_class(r.slack2).get_d()}) {
            const double y = std::log10(v);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (xmax - xmin < 1e-9) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax - ymin < 1e-9) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    auto sx = [&](double x) {
        return left + (x - xmin) / (xmax - xmin) * (right - left);
    };
    auto sy = [&](double y) {
        return bottom - (y - ymin) / (ymax - ymin) * (bottom - top);
    };
    auto polyline = [&](const char* color, auto&& value_of) {
        std::ostringstream os;
        os << "  <polyline fill=\"none\" stroke=\"" << color
           << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i)
                os << ' ';
            os << format_decimal(sx(std::log10(static_cast<double>(rows[i].n))), 6)
               << ',' << format_decimal(sy(std::log10(value_of(rows[i]))), 6);
        }
        os << "\"/>\n";
        return os.str();
    };

    std::ostringstream os;
    os << "<!-- " << echo.header_line().substr(2) << " -->\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
       << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
       << height << "\">\n";
    os << "  <rect width=\"" << width << "\" height=\"" << height
       << "\" fill=\"white\"/>\n";
    os << "  <line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right
       << "\" y2=\"" << bottom << "\" stroke=\"black\"/>\n";
    os << "  <line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << left
       << "\" y2=\"" << top << "\" stroke=\"black\"/>\n";
    // tick labels at the extremes only
    os << "  <text x=\"" << left << "\" y=\"" << bottom + 18
       << "\" font-size=\"12\">n=" << rows.front().n << "</text>\n";
    os << "  <text x=\"" << right - 40 << "\" y=\"" << bottom + 18
       << "\" font-size=\"12\">n=" << rows.back().n << "</text>\n";
    os << "  <text x=\"" << left - 60 << "\" y=\"" << bottom
       << "\" font-size=\"12\">" << format_decimal(std::pow(10.0, ymin), 3)
       << "</text>\n";
    os << "  <text x=\"" << left - 60 << "\" y=\"" << top + 4
       << "\" font-size=\"12\">" << format_decimal(std::pow(10.0, ymax), 3)
       << "</text>\n";
    os << "  <text x=\"" << (left + right) / 2 - 60 << "\" y=\"" << 20
       << "\" font-size=\"13\">expected bits vs n (log-log)</text>\n";
    os << polyline("#1f77b4", [](const BoundReport& r) {
        return r.lower.get_d();
    });
    os << polyline("#2ca02c", [](const BoundReport& r) {
        return r.theorem1.to_double();
    });
    os << polyline("#ff7f0e", [](const BoundReport& r) {
        return r.slack1.to_double();
    });
    os << polyline("#d62728", [](const BoundReport& r) {
        return mpz_class(r.slack2).get_d();
    });
    const char* names[4] = {"lower", "theorem1", "slack1", "slack2"};
    const char* colors[4] = {"#1f77b4", "#2ca02c", "#ff7f0e", "#d62728"};
    for (int i = 0; i < 4; ++i) {
        const double y = top + 16 + 18 * i;
        os << "  <line x1=\"" << left + 10 << "\" y1=\"" << y << "\" x2=\""
           << left + 40 << "\" y2=\"" << y << "\" stroke=\"" << colors[i]
           << "\" stroke-width=\"1.5\"/>\n";
        os << "  <text x=\"" << left + 46 << "\" y=\"" << y + 4
           << "\" font-size=\"12\">" << names[i] << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

int cmd_bounds(const std::string& range_str, const std::string& eps_str,
               Format format, const Echo& echo, const std::string& outpath,
               std::ostream& out) {
    auto [lo, hi] = parse_range(range_str);
    const mpq_class eps = parse_ratio(eps_str);
    std::vector<BoundReport> rows;
    for (unsigned n = lo; n <= hi; ++n)
        rows.push_back(bound_report(n, eps));

    std::ostringstream body;
    if (format == Format::Csv) {
        body << echo.header_line() << '\n';
        body << "n,lower,theorem1,slack1,slack2,eps\n";
        for (const auto& r : rows)
            body << r.n << ',' << r.lower.get_str() << ','
                 << format_decimal(r.theorem1.to_double()) << ','
                 << format_decimal(r.slack1.to_double()) << ','
                 << r.slack2.get_str() << ',' << eps_str << '\n';
    } else if (format == Format::Json) {
        ordered_json j = echo.json_document();
        j["rows"] = ordered_json::array();
        for (const auto& r : rows) {
            ordered_json row;
            row["n"] = r.n;
            row["lower"] = r.lower.get_si();
            row["theorem1"] = json_number(r.theorem1.to_double());
            row["slack1"] = json_number(r.slack1.to_double());
            row["slack2"] = r.slack2.get_si();
            row["eps"] = eps_str;
            j["rows"].push_back(std::move(row));
        }
        body << j.dump(2) << '\n';
    } else {
        body << svg_bounds_chart(echo, rows);
    }
    write_output(body.str(), outpath, out);
    return kExitOk;
}

// ---- decide ----------------------------------------------------------------

std::string join_csv(const std::vector<std::size_t>& xs, long offset = 0) {
    std::ostringstream os;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i)
            os << ',';
        os << static_cast<long>(xs[i]) + offset;
    }
    return os.str();
}

int cmd_decide(const std::string& fn, unsigned n, const std::string& tapes_str,
               std::uint64_t seed, bool seed_given, const std::string& strategy_name,
               std::uint64_t cut_cap, Format format, const Echo& echo,
               const std::string& outpath, std::ostream& out) {
    auto f = make_oracle(fn, n);
    auto strategy = make_strategy(strategy_name);

    FeasibleBox box = [&] {
        if (!tapes_str.empty()) {
            if (seed_given)
                throw std::invalid_argument("decide: give --tapes or --seed, not both");
            auto tapes = parse_tapes(tapes_str);
            if (tapes.size() != n + 1)
                throw std::invalid_argument("decide: need exactly " +
                                            std::to_string(n + 1) + " tapes");
            return make_tape_box(tapes);
        }
        return make_pseudo_box(n + 1, seed);
    }();

    auto outcome = decide(*f, *strategy, std::move(box), cut_cap);

    std::vector<std::size_t> bits_per_coord = outcome.cuts.counts();
    std::ostringstream body;
    if (format == Format::Csv) {
        body << echo.header_line() << '\n';
        body << "verdict,cuts,cut_count,bits_per_coord\n";
        body << to_string(outcome.verdict) << ','
             << csv_quote(join_csv(outcome.cuts.cuts(), 1)) << ','
             << outcome.cuts.length() << ','
             << csv_quote(join_csv(bits_per_coord)) << '\n';
    } else if (format == Format::Json) {
        ordered_json j = echo.json_document();
        j["verdict"] = to_string(outcome.verdict);
        j["cuts"] = ordered_json::array();
        for (std::size_t c : outcome.cuts.cuts())
            j["cuts"].push_back(c + 1);
        j["cut_count"] = outcome.cuts.length();
        j["bits_per_coord"] = bits_per_coord;
        body << j.dump(2) << '\n';
    } else {
        throw std::invalid_argument("decide: svg output not supported");
    }
    write_output(body.str(), outpath, out);
    return kExitOk;
}

// ---- sample ----------------------------------------------------------------

int cmd_sample(const std::string& fn, unsigned n, std::uint64_t seed,
               std::uint64_t count, unsigned precision,
               const std::string& strategy_name, std::uint64_t cut_cap,
               std::uint64_t attempt_cap, unsigned threads, Format format,
               const Echo& echo, const std::string& outpath, std::ostream& out) {
    auto f = make_oracle(fn, n);
    auto strategy = make_strategy(strategy_name);
    if (count < 1)
        throw std::invalid_argument("sample: count must be >= 1");

    struct Row {
        std::vector<std::string> coords;
        std::uint64_t attempts = 0;
        std::uint64_t bits = 0;
    };
    std::vector<Row> rows(count);
    parallel_indexed(count, threads, [&](std::uint64_t i) {
        auto s = sample(*f, *strategy, derive_trial_seed(seed, i), cut_cap,
                        attempt_cap);
        // uniform precision per row: the requested t, or deeper if the
        // decision already went past it on some coordinate
        unsigned t = precision;
        for (std::size_t j = 0; j < n; ++j)
            t = std::max(t, s.box.prefix(j).exponent);
        refine(s.box, n, t);
        Row& row = rows[i];
        for (std::size_t j = 0; j < n; ++j)
            row.coords.push_back(dyadic_str(s.box.prefix(j)));
        row.attempts = s.attempts;
        row.bits = s.total_bits;
    });

    std::ostringstream body;
    if (format == Format::Csv) {
        body << echo.header_line() << '\n';
        body << "sample_index";
        for (unsigned j = 1; j <= n; ++j)
            body << ",x_" << j;
        body << ",attempts,bits\n";
        for (std::uint64_t i = 0; i < count; ++i) {
            body << i;
            for (const auto& c : rows[i].coords)
                body << ',' << c;
            body << ',' << rows[i].attempts << ',' << rows[i].bits << '\n';
        }
    } else if (format == Format::Json) {
        ordered_json j = echo.json_document();
        j["samples"] = ordered_json::array();
        for (std::uint64_t i = 0; i < count; ++i) {
            ordered_json row;
            row["index"] = i;
            row["x"] = rows[i].coords;
            row["attempts"] = rows[i].attempts;
            row["bits"] = rows[i].bits;
            j["samples"].push_back(std::move(row));
        }
        body << j.dump(2) << '\n';
    } else {
        throw std::invalid_argument("sample: svg output not supported");
    }
    write_output(body.str(), outpath, out);
    return kExitOk;
}

// ---- bench -----------------------------------------------------------------

int cmd_bench(const std::string& fn, const std::string& compare_c, unsigned n,
              const std::string& strategy_name, std::uint64_t trials,
              std::uint64_t seed, std::uint64_t cut_cap, unsigned threads,
              Format format, const Echo& echo, const std::string& outpath,
              std::ostream& out) {
    BenchResult r;
    if (!compare_c.empty()) {
        r = empirical_compare(parse_ratio(compare_c), trials, seed, cut_cap,
                              threads);
    } else {
        auto f = make_oracle(fn, n);
        auto strategy = make_strategy(strategy_name);
        r = empirical_bits(*f, *strategy, n, trials, seed, cut_cap, threads);
    }

    std::ostringstream body;
    if (format == Format::Csv) {
        body << echo.header_line() << '\n';
        body << "n,fn,strategy,trials,seed,cut_cap,mean_bits,stderr,"
                "ci95_halfwidth,overflow\n";
        body << r.n << ',' << r.fn << ',' << r.strategy << ',' << r.trials << ','
             << r.seed << ',' << r.cut_cap << ','
             << format_decimal(r.mean_bits) << ','
             << format_decimal(r.stderr_bits) << ','
             << format_decimal(r.ci95_halfwidth) << ',' << r.overflow << '\n';
    } else if (format == Format::Json) {
        ordered_json j = echo.json_document();
        j["n"] = r.n;
        j["fn"] = r.fn;
        j["strategy"] = r.strategy;
        j["trials"] = r.trials;
        j["seed"] = r.seed;
        j["cut_cap"] = r.cut_cap;
        j["mean_bits"] = json_number(r.mean_bits);
        j["stderr"] = json_number(r.stderr_bits);
        j["ci95_halfwidth"] = json_number(r.ci95_halfwidth);
        j["overflow"] = r.overflow;
        j["histogram"] = r.histogram;
        body << j.dump(2) << '\n';
    } else {
        throw std::invalid_argument("bench: svg output not supported");
    }
    write_output(body.str(), outpath, out);
    return kExitOk;
}

// ---- verify-prop1 ----------------------------------------------------------

int cmd_verify_prop1(const std::string& dims_str, std::uint64_t cases,
                     std::uint64_t seed, Format format, const Echo& echo,
                     const std::string& outpath, std::ostream& out,
                     std::ostream& err) {
    auto caps = parse_dims(dims_str);
    if (cases < 1)
        throw std::invalid_argument("verify-prop1: cases must be >= 1");

    std::uint64_t violations = 0;
    mpz_class min_margin = -1;
    std::string first_violation;
    for (std::uint64_t i = 0; i < cases; ++i) {
        const std::uint64_t case_seed = derive_trial_seed(seed, i);
        Xoshiro256StarStar rng(case_seed);
        std::vector<long> dims(caps.size());
        for (std::size_t a = 0; a < caps.size(); ++a)
            dims[a] = 1 + static_cast<long>(
                              rng.next_below(static_cast<std::uint64_t>(caps[a])));
        const std::uint64_t grid_seed = derive_trial_seed(case_seed, 1);
        GridFunction g = random_staircase(grid_seed, dims);
        const long crossed = count_crossed(g);
        const mpz_class bound = prop1_bound(dims);
        const mpz_class margin = bound - crossed;
        if (min_margin < 0 || margin < min_margin)
            min_margin = margin;
        if (margin < 0) {
            ++violations;
            if (first_violation.empty()) {
                std::ostringstream os;
                os << "prop1 violation: case=" << i << " seed=" << case_seed
                   << " grid_seed=" << grid_seed << " dims=";
                for (std::size_t a = 0; a < dims.size(); ++a)
                    os << (a ? "," : "") << dims[a];
                os << " crossed=" << crossed << " bound=" << bound.get_str()
                   << " values=";
                const auto& vals = g.values();
                for (std::size_t v = 0; v < vals.size(); ++v)
                    os << (v ? "," : "") << vals[v];
                first_violation = os.str();
            }
        }
    }

    std::ostringstream body;
    if (format == Format::Csv) {
        body << echo.header_line() << '\n';
        body << "cases,dims_cap,violations,min_margin\n";
        body << cases << ',' << csv_quote(dims_str) << ',' << violations << ','
             << min_margin.get_str() << '\n';
    } else if (format == Format::Json) {
        ordered_json j = echo.json_document();
        j["cases"] = cases;
        j["dims_cap"] = dims_str;
        j["violations"] = violations;
        j["min_margin"] = min_margin.get_si();
        body << j.dump(2) << '\n';
    } else {
        throw std::invalid_argument("verify-prop1: svg output not supported");
    }
    write_output(body.str(), outpath, out);
    if (violations > 0) {
        err << first_violation << '\n';
        return kExitViolation;
    }
    return kExitOk;
}

// ---- verify-lb -------------------------------------------------------------

int cmd_verify_lb(unsigned n, std::uint64_t trials,
                  const std::string& strategy_flag, std::uint64_t seed,
                  std::uint64_t cut_cap, Format format, const Echo& echo,
                  const std::string& outpath, std::ostream& out,
                  std::ostream& err) {
    if (trials < 1)
        throw std::invalid_argument("verify-lb: trials must be >= 1");
    std::vector<std::string> strategies;
    if (strategy_flag == "all")
        strategies = shipped_strategy_names();
    else
        strategies = {strategy_flag};

    auto hard = make_oracle("hard", n);
    const std::size_t floor_cuts = n + 1;

    struct RowData {
        std::string strategy;
        std::size_t min_cuts = SIZE_MAX;
        std::uint64_t floor_hits = 0;
        std::uint64_t violation_seed = 0;
        bool violated = false;
    };
    std::vector<RowData> table;
    for (const auto& sname : strategies) {
        auto strategy = make_strategy(sname);
        RowData row;
        row.strategy = sname;
        for (std::uint64_t i = 0; i < trials; ++i) {
            const std::uint64_t trial_seed = derive_trial_seed(seed, i);
            auto outcome =
                decide(*hard, *strategy, make_pseudo_box(n + 1, trial_seed), cut_cap);
            const std::size_t cuts = outcome.cuts.length();
            row.min_cuts = std::min(row.min_cuts, cuts);
            if (cuts == floor_cuts)
                ++row.floor_hits;
            if (cuts < floor_cuts && !row.violated) {
                row.violated = true;
                row.violation_seed = trial_seed;
            }
        }
        table.push_back(std::move(row));
    }

    std::ostringstream body;
    bool any_violation = false;
    if (format == Format::Csv) {
        body << echo.header_line() << '\n';
        body << "n,strategy,trials,floor,min_cuts,floor_hits\n";
        for (const auto& row : table)
            body << n << ',' << row.strategy << ',' << trials << ',' << floor_cuts
                 << ',' << row.min_cuts << ',' << row.floor_hits << '\n';
    } else if (format == Format::Json) {
        ordered_json j = echo.json_document();
        j["rows"] = ordered_json::array();
        for (const auto& row : table) {
            ordered_json r;
            r["n"] = n;
            r["strategy"] = row.strategy;
            r["trials"] = trials;
            r["floor"] = floor_cuts;
            r["min_cuts"] = row.min_cuts;
            r["floor_hits"] = row.floor_hits;
            j["rows"].push_back(std::move(r));
        }
        body << j.dump(2) << '\n';
    } else {
        throw std::invalid_argument("verify-lb: svg output not supported");
    }
    write_output(body.str(), outpath, out);
    for (const auto& row : table)
        if (row.violated) {
            any_violation = true;
            err << "floor violation: n=" << n << " strategy=" << row.strategy
                << " trial_seed=" << row.violation_seed
                << " min_cuts=" << row.min_cuts << " floor=" << floor_cuts
                << '\n';
        }
    return any_violation ? kExitViolation : kExitOk;
}

// ---- gof -------------------------------------------------------------------

int cmd_gof(const std::string& fn, std::uint64_t samples, unsigned bins,
            std::uint64_t seed, const std::string& strategy_name,
            std::uint64_t cut_cap, std::uint64_t attempt_cap, unsigned precision,
            const std::string& min_p_str, unsigned threads, Format format,
            const Echo& echo, const std::string& outpath, std::ostream& out) {
    auto f = make_oracle(fn, 1);
    auto strategy = make_strategy(strategy_name);
    if (samples < 1)
        throw std::invalid_argument("gof: samples must be >= 1");
    const double min_p = parse_ratio(min_p_str).get_d();

    std::vector<mpq_class> xs(samples);
    std::vector<std::uint64_t> attempts(samples, 0);
    parallel_indexed(samples, threads, [&](std::uint64_t i) {
        auto s = sample(*f, *strategy, derive_trial_seed(seed, i), cut_cap,
                        attempt_cap);
        while (s.box.prefix(0).exponent < precision)
            s.box.reveal(0);
        xs[i] = s.box.lower(0);
        attempts[i] = s.attempts;
    });
    std::uint64_t total_attempts = 0;
    for (std::uint64_t a : attempts)
        total_attempts += a;
    const double accept_rate =
        static_cast<double>(samples) / static_cast<double>(total_attempts);

    GofResult r = chi_square_gof(xs, *f, bins);
    const bool pass = r.p_value > min_p;

    std::ostringstream body;
    if (format == Format::Csv) {
        body << echo.header_line() << '\n';
        body << "fn,samples,bins,statistic,p_value,total_attempts,accept_rate,"
                "min_p,pass\n";
        body << f->name() << ',' << samples << ',' << bins << ','
             << format_decimal(r.statistic) << ',' << format_decimal(r.p_value)
             << ',' << total_attempts << ',' << format_decimal(accept_rate)
             << ',' << min_p_str << ',' << (pass ? "true" : "false") << '\n';
    } else if (format == Format::Json) {
        ordered_json j = echo.json_document();
        j["fn"] = f->name();
        j["samples"] = samples;
        j["bins"] = bins;
        j["statistic"] = json_number(r.statistic);
        j["p_value"] = json_number(r.p_value);
        j["total_attempts"] = total_attempts;
        j["accept_rate"] = json_number(accept_rate);
        j["min_p"] = min_p_str;
        j["pass"] = pass;
        j["bin_detail"] = ordered_json::array();
        for (std::size_t i = 0; i < r.bins.size(); ++i) {
            ordered_json b;
            b["bin"] = i;
            b["lo"] = r.bins[i].lo.get_str();
            b["hi"] = r.bins[i].hi.get_str();
            b["observed"] = r.bins[i].observed;
            b["expected"] = json_number(r.bins[i].expected);
            j["bin_detail"].push_back(std::move(b));
        }
        body << j.dump(2) << '\n';
    } else {
        throw std::invalid_argument("gof: svg output not supported");
    }
    write_output(body.str(), outpath, out);
    return pass ? kExitOk : kExitViolation;
}

// ---- fit -------------------------------------------------------------------

int cmd_fit(const std::string& curve, const std::string& range_str,
            const std::string& eps_str, Format format, const Echo& echo,
            const std::string& outpath, std::ostream& out) {
    auto [lo, hi] = parse_range(range_str);
    const mpq_class eps = parse_ratio(eps_str);
    std::vector<std::pair<double, double>> pairs;
    for (unsigned n = lo; n <= hi; ++n) {
        double v = 0;
        if (curve == "theorem1")
            v = theorem1_bound(n, eps).to_double();
        else if (curve == "slack1")
            v = slack1_bound(n, eps).to_double();
        else if (curve == "slack2")
            v = slack2_bound(n).get_d();
        else if (curve == "lower")
            v = lower_bound(n).get_d();
        else
            throw std::invalid_argument("fit: unknown curve '" + curve + "'");
        pairs.emplace_back(static_cast<double>(n), v);
    }
    const double slope = fit_exponent(pairs);

    std::ostringstream body;
    if (format == Format::Csv) {
        body << echo.header_line() << '\n';
        body << "curve,n_lo,n_hi,eps,slope\n";
        body << curve << ',' << lo << ',' << hi << ',' << eps_str << ','
             << format_decimal(slope) << '\n';
    } else if (format == Format::Json) {
        ordered_json j = echo.json_document();
        j["curve"] = curve;
        j["n_lo"] = lo;
        j["n_hi"] = hi;
        j["eps"] = eps_str;
        j["slope"] = json_number(slope);
        body << j.dump(2) << '\n';
    } else {
        throw std::invalid_argument("fit: svg output not supported");
    }
    write_output(body.str(), outpath, out);
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"lazy-bit rejection sampling toolkit"};
    app.name("lazybits");
    app.set_version_flag("--version", std::string("lazybits ") + kVersion);
    app.require_subcommand(1);

    // shared flag storage
    std::string fn = "identity", strategy = "alt", lb_strategy = "all";
    std::string tapes, compare_c;
    std::string range = "1..10", fit_range = "10..200", eps = "1e-9";
    std::string dims = "6,6", curve = "theorem1";
    std::string format_flag, outpath, min_p = "1/1000";
    unsigned n = 1, bins = 10, precision = 16, threads = 1;
    std::uint64_t seed = 0, trials = 100000, count = 10, cases = 1000;
    std::uint64_t cut_cap = kDefaultCutCap, attempt_cap = kDefaultAttemptCap;

    auto add_common = [&](CLI::App* cmd, bool with_threads) {
        cmd->add_option("--format", format_flag, "csv|json|svg");
        cmd->add_option("--out", outpath, "output file, '-' for stdout");
        cmd->add_option("--seed", seed, "master seed");
        if (with_threads)
            cmd->add_option("--threads", threads, "worker threads")
                ->check(CLI::Range(1u, 64u));
    };

    auto* bounds = app.add_subcommand("bounds", "bound table per n");
    bounds->add_option("--n", range, "n or lo..hi");
    bounds->add_option("--eps", eps, "truncation tolerance");
    add_common(bounds, false);

    auto* decide_cmd = app.add_subcommand("decide", "one decision run");
    decide_cmd->add_option("--fn", fn, "function spec");
    decide_cmd->add_option("--n", n, "spatial dimension");
    decide_cmd->add_option("--tapes", tapes, "n+1 rationals, comma separated");
    decide_cmd->add_option("--strategy", strategy, "cut strategy");
    decide_cmd->add_option("--cut-cap", cut_cap, "max cuts");
    add_common(decide_cmd, false);

    auto* sample_cmd = app.add_subcommand("sample", "accepted samples");
    sample_cmd->add_option("--fn", fn, "function spec");
    sample_cmd->add_option("--n", n, "spatial dimension");
    sample_cmd->add_option("--count", count, "samples to emit");
    sample_cmd->add_option("--precision", precision, "bits per coordinate")
        ->check(CLI::Range(1u, 256u));
    sample_cmd->add_option("--strategy", strategy, "cut strategy");
    sample_cmd->add_option("--cut-cap", cut_cap, "max cuts per decision");
    sample_cmd->add_option("--attempt-cap", attempt_cap, "max attempts per sample");
    add_common(sample_cmd, true);

    auto* bench = app.add_subcommand("bench", "mean decision bits");
    bench->add_option("--fn", fn, "function spec");
    bench->add_option("--compare", compare_c, "threshold comparison constant");
    bench->add_option("--n", n, "spatial dimension");
    bench->add_option("--strategy", strategy, "cut strategy");
    bench->add_option("--trials", trials, "trial count");
    bench->add_option("--cut-cap", cut_cap, "max cuts per decision");
    add_common(bench, true);

    auto* vprop = app.add_subcommand("verify-prop1", "crossing-count bound check");
    vprop->add_option("--dims", dims, "per-axis caps, e.g. 6,6");
    vprop->add_option("--cases", cases, "random staircases");
    add_common(vprop, false);

    auto* vlb = app.add_subcommand("verify-lb", "cut-count floor check");
    vlb->add_option("--n", n, "spatial dimension");
    vlb->add_option("--trials", trials, "runs per strategy");
    vlb->add_option("--strategy", lb_strategy, "strategy or 'all'");
    vlb->add_option("--cut-cap", cut_cap, "max cuts per decision");
    add_common(vlb, false);

    auto* gof = app.add_subcommand("gof", "sampler goodness of fit");
    gof->add_option("--fn", fn, "function spec (1-dimensional)");
    gof->add_option("--samples", trials, "accepted samples");
    gof->add_option("--bins", bins, "histogram bins");
    gof->add_option("--strategy", strategy, "cut strategy");
    gof->add_option("--cut-cap", cut_cap, "max cuts per decision");
    gof->add_option("--attempt-cap", attempt_cap, "max attempts per sample");
    gof->add_option("--precision", precision, "bits before binning")
        ->check(CLI::Range(1u, 256u));
    gof->add_option("--min-p", min_p, "violation threshold for the p-value");
    add_common(gof, true);

    auto* fit = app.add_subcommand("fit", "log-log growth exponent");
    fit->add_option("--curve", curve, "theorem1|slack1|slack2|lower");
    fit->add_option("--n", fit_range, "n range, e.g. 10..200");
    fit->add_option("--eps", eps, "truncation tolerance");
    add_common(fit, false);

    std::vector<const char*> argv;
    argv.push_back("lazybits");
    for (const auto& a : args)
        argv.push_back(a.c_str());

    try {
        try {
            app.parse(static_cast<int>(argv.size()), argv.data());
        } catch (const CLI::ParseError& e) {
            const int rc = app.exit(e, out, err);
            return rc == 0 ? kExitOk : kExitUsage;
        }

        CLI::App* active = app.get_subcommands().front();
        if (active != bounds && active != fit && !active->count("--seed"))
            seed = default_seed();
        const Format format = pick_format(format_flag, outpath);
        const std::string outname = outpath.empty() ? "-" : outpath;
        const char* format_name =
            format == Format::Csv ? "csv" : (format == Format::Json ? "json" : "svg");

        if (active == bounds) {
            Echo echo("bounds");
            echo.add("n", range);
            echo.add("eps", eps);
            echo.add("format", format_name);
            echo.add("out", outname);
            return cmd_bounds(range, eps, format, echo, outpath, out);
        }
        if (active == decide_cmd) {
            Echo echo("decide");
            echo.add("fn", fn);
            echo.add("n", n);
            if (!tapes.empty())
                echo.add("tapes", tapes);
            else
                echo.add("seed", seed);
            echo.add("strategy", strategy);
            echo.add("cut_cap", cut_cap);
            echo.add("format", format_name);
            echo.add("out", outname);
            return cmd_decide(fn, n, tapes, seed, active->count("--seed") > 0,
                              strategy, cut_cap, format, echo, outpath, out);
        }
        if (active == sample_cmd) {
            Echo echo("sample");
            echo.add("fn", fn);
            echo.add("n", n);
            echo.add("count", count);
            echo.add("precision", precision);
            echo.add("seed", seed);
            echo.add("strategy", strategy);
            echo.add("cut_cap", cut_cap);
            echo.add("attempt_cap", attempt_cap);
            echo.add("format", format_name);
            echo.add("out", outname);
            return cmd_sample(fn, n, seed, count, precision, strategy, cut_cap,
                              attempt_cap, threads, format, echo, outpath, out);
        }
        if (active == bench) {
            Echo echo("bench");
            if (!compare_c.empty())
                echo.add("compare", compare_c);
            else
                echo.add("fn", fn);
            echo.add("n", n);
            echo.add("strategy", strategy);
            echo.add("trials", trials);
            echo.add("seed", seed);
            echo.add("cut_cap", cut_cap);
            echo.add("format", format_name);
            echo.add("out", outname);
            return cmd_bench(fn, compare_c, n, strategy, trials, seed, cut_cap,
                             threads, format, echo, outpath, out);
        }
        if (active == vprop) {
            Echo echo("verify-prop1");
            echo.add("dims", dims);
            echo.add("cases", cases);
            echo.add("seed", seed);
            echo.add("format", format_name);
            echo.add("out", outname);
            return cmd_verify_prop1(dims, cases, seed, format, echo, outpath, out,
                                    err);
        }
        if (active == vlb) {
            Echo echo("verify-lb");
            echo.add("n", n);
            echo.add("trials", trials);
            echo.add("strategy", lb_strategy);
            echo.add("seed", seed);
            echo.add("cut_cap", cut_cap);
            echo.add("format", format_name);
            echo.add("out", outname);
            return cmd_verify_lb(n, trials, lb_strategy, seed, cut_cap, format,
                                 echo, outpath, out, err);
        }
        if (active == gof) {
            Echo echo("gof");
            echo.add("fn", fn);
            echo.add("samples", trials);
            echo.add("bins", bins);
            echo.add("seed", seed);
            echo.add("strategy", strategy);
            echo.add("cut_cap", cut_cap);
            echo.add("attempt_cap", attempt_cap);
            echo.add("precision", precision);
            echo.add("min_p", min_p);
            echo.add("format", format_name);
            echo.add("out", outname);
            return cmd_gof(fn, trials, bins, seed, strategy, cut_cap, attempt_cap,
                           precision, min_p, threads, format, echo, outpath, out);
        }
        if (active == fit) {
            Echo echo("fit");
            echo.add("curve", curve);
            echo.add("n", fit_range);
            echo.add("eps", eps);
            echo.add("format", format_name);
            echo.add("out", outname);
            return cmd_fit(curve, fit_range, eps, format, echo, outpath, out);
        }
        err << "no command selected\n";
        return kExitUsage;
    } catch (const CutBudgetExceeded& e) {
        err << e.what() << '\n';
        err << "partial state: cuts=" << e.cuts.to_string() << '\n';
        for (std::size_t j = 0; j < e.prefixes.size(); ++j)
            err << "  x_" << j + 1 << " prefix " << dyadic_str(e.prefixes[j])
                << " (" << e.prefixes[j].exponent << " bits)\n";
        return kExitBudget;
    } catch (const AttemptBudgetExceeded& e) {
        err << e.what() << '\n';
        return kExitBudget;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace lazybits
