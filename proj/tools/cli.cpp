#include "cli.hpp"

#include "qmtbdd/analysis.hpp"
#include "qmtbdd/records.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace qmtbdd::cli {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

constexpr double kDefaultDelta = 0.0;
constexpr int kDefaultBits = 53;

std::string sci(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot open '" + path + "'");
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::ofstream open_output(const std::string& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw UsageError("cannot write '" + path + "'");
    }
    return f;
}

// "A..B" or "N".
std::pair<unsigned, unsigned> parse_range(const std::string& text)
{
    const auto dots = text.find("..");
    auto number = [&](const std::string& s) {
        unsigned v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
            throw UsageError("bad qubit range '" + text + "' (expected N or A..B)");
        }
        return v;
    };
    if (dots == std::string::npos) {
        const unsigned n = number(text);
        return {n, n};
    }
    const unsigned a = number(text.substr(0, dots));
    const unsigned b = number(text.substr(dots + 2));
    if (a > b) {
        throw UsageError("empty qubit range '" + text + "'");
    }
    return {a, b};
}

unsigned worker_count(unsigned requested)
{
    unsigned workers = requested != 0 ? requested : std::max(1U, std::thread::hardware_concurrency());
    if (const char* cap = std::getenv(kWorkersEnv)) {
        unsigned limit = 0;
        const std::string_view s(cap);
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), limit);
        if (ec != std::errc() || ptr != s.data() + s.size() || limit == 0) {
            throw UsageError(std::string(kWorkersEnv) + " must be a positive integer");
        }
        workers = std::min(workers, limit);
    }
    return workers;
}

void check_delta(double delta)
{
    if (!(delta >= 0.0) || !std::isfinite(delta)) {
        throw UsageError("--delta must be a finite value >= 0");
    }
}

void check_bits(int bits)
{
    if (bits < PrecConfig::kMinBits || bits > PrecConfig::kMaxBits) {
        throw UsageError("--bits must be between " + std::to_string(PrecConfig::kMinBits) + " and " +
                         std::to_string(PrecConfig::kMaxBits));
    }
}

std::string echo(double value, bool defaulted)
{
    return format_real(value) + (defaulted ? " (default)" : "");
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string circuit;
    double delta = kDefaultDelta;
    int bits = kDefaultBits;
    bool reference = false;
    std::string dump_state;
    std::string format = "text";
};

void dump_state(const std::string& path, const NodeStore& store, const VectorDD& state)
{
    std::ofstream f = open_output(path);
    if (state.n <= 16) {
        const auto dense = to_dense(store, state);
        for (std::size_t i = 0; i < dense.size(); ++i) {
            f << i << ' ' << dense[i].re.to_string() << ' ' << dense[i].im.to_string() << '\n';
        }
    } else {
        f << to_dot(store, state.root);
    }
}

int cmd_simulate(const SimulateArgs& a, bool delta_defaulted, bool bits_defaulted, std::ostream& out)
{
    check_delta(a.delta);
    check_bits(a.bits);
    const Circuit c = parse_circuit(read_file(a.circuit));

    NodeStore store(PrecConfig(a.bits), a.delta);
    const SimulationResult sim = simulate(store, c);
    std::optional<StateDifference> diff;
    if (a.reference) {
        const ReferenceRun ref(c);
        diff = max_difference(store, sim.state, ref.store(), ref.state());
    }
    if (!a.dump_state.empty()) {
        dump_state(a.dump_state, store, sim.state);
    }

    if (a.format == "json") {
        nlohmann::ordered_json j{{"circuit", a.circuit},   {"n", c.n},
                                 {"gates", c.gates.size()}, {"delta", a.delta},
                                 {"bits", a.bits},          {"final_nodes", sim.final_nodes},
                                 {"peak_nodes", sim.peak_nodes}};
        if (diff) {
            j["max_error"] = diff->max_error;
            j["worst_index"] = diff->worst_index;
        }
        out << j.dump(2) << '\n';
    } else if (a.format == "csv") {
        SweepRecord r;
        r.family = "circuit";
        r.n = c.n;
        r.delta = a.delta;
        r.bits = a.bits;
        r.final_nodes = sim.final_nodes;
        r.peak_nodes = sim.peak_nodes;
        if (diff) {
            r.max_error = diff->max_error;
            r.worst_index = diff->worst_index;
        } else {
            r.max_error = std::nan("");
        }
        write_csv(out, {r});
    } else {
        out << "circuit: " << a.circuit << " (" << c.n << " qubits, " << c.gates.size() << " gates)\n";
        out << "delta: " << echo(a.delta, delta_defaulted) << '\n';
        out << "bits: " << a.bits << (bits_defaulted ? " (default)" : "") << '\n';
        out << "final_nodes: " << sim.final_nodes << '\n';
        out << "peak_nodes: " << sim.peak_nodes << '\n';
        if (diff) {
            out << "max_error: " << format_real(diff->max_error) << '\n';
            out << "worst_index: " << diff->worst_index << '\n';
        }
    }
    return kOk;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
    std::vector<std::string> families{"dj", "qpe", "wstate"};
    std::string qubits;
    std::vector<double> deltas{kDefaultDelta};
    std::vector<int> bits{kDefaultBits};
    std::uint64_t seed = 0;
    std::string csv;
    std::string json;
    unsigned workers = 0;
    bool timing = false;
    bool quiet = false;
};

int cmd_sweep(const SweepArgs& a, bool deltas_defaulted, bool bits_defaulted, std::ostream& out, std::ostream& err)
{
    SweepConfig cfg;
    for (const auto& f : a.families) {
        try {
            cfg.families.push_back(parse_family(f));
        } catch (const CircuitError& e) {
            throw UsageError(e.what());
        }
    }
    std::tie(cfg.n_min, cfg.n_max) = parse_range(a.qubits);
    if (cfg.n_min < kMinFamilyQubits || cfg.n_max > kMaxFamilyQubits) {
        throw UsageError("--qubits must lie in " + std::to_string(kMinFamilyQubits) + ".." +
                         std::to_string(kMaxFamilyQubits));
    }
    for (double d : a.deltas) {
        check_delta(d);
    }
    for (int b : a.bits) {
        check_bits(b);
    }
    cfg.deltas = a.deltas;
    cfg.bits = a.bits;
    cfg.seed = a.seed;
    cfg.workers = worker_count(a.workers);
    cfg.timing = a.timing;

    // Fail on unwritable paths before any work starts.
    std::optional<std::ofstream> csv_file;
    std::optional<std::ofstream> json_file;
    if (!a.csv.empty()) {
        csv_file = open_output(a.csv);
    }
    if (!a.json.empty()) {
        json_file = open_output(a.json);
    }
    if (deltas_defaulted) {
        err << "delta: " << echo(kDefaultDelta, true) << '\n';
    }
    if (bits_defaulted) {
        err << "bits: " << kDefaultBits << " (default)\n";
    }

    const auto progress = [&](const SweepRecord& r) {
        if (!a.quiet) {
            err << r.family << " n=" << r.n << " delta=" << format_real(r.delta) << " bits=" << r.bits << ": "
                << r.status << '\n';
        }
    };
    const auto records = sweep(cfg, progress);

    if (csv_file) {
        write_csv(*csv_file, records);
    }
    if (json_file) {
        *json_file << to_json(records);
    }
    if (!csv_file && !json_file) {
        write_csv(out, records);
    }
    const bool failed = std::any_of(records.begin(), records.end(), [](const SweepRecord& r) { return r.status != "ok"; });
    if (failed) {
        err << "some grid points failed; see the status column\n";
    }
    return kOk;
}

// ---------------------------------------------------------------------------

struct BoundArgs {
    std::vector<unsigned> n;
    double eps = 0x1p-53;
    double delta = kDefaultDelta;
    std::optional<double> c_m;
    std::optional<double> c_v;
};

int cmd_bound(const BoundArgs& a, bool eps_defaulted, bool delta_defaulted, std::ostream& out)
{
    check_delta(a.delta);
    if (a.c_m.has_value() != a.c_v.has_value()) {
        throw UsageError("--cM and --cV go together");
    }
    out << "eps: " << echo(a.eps, eps_defaulted) << '\n';
    out << "delta: " << echo(a.delta, delta_defaulted) << '\n';
    if (a.c_m) {
        out << "C <= 2^n * " << format_real(*a.c_m) << " * " << format_real(*a.c_v) << '\n';
    }
    out << "n\t(n+1)eps*C\tdelta*2^(n+1)\ttotal\thigher-order\n";
    for (unsigned n : a.n) {
        const BoundReport r = a.c_m ? bound_general(n, a.eps, a.delta, *a.c_m, *a.c_v) : bound_unit(n, a.eps, a.delta);
        out << n << '\t' << sci(r.term_fp) << '\t' << sci(r.term_merge) << '\t' << sci(r.total) << '\t'
            << sci(r.higher_fp + r.higher_merge) << '\n';
    }
    return kOk;
}

struct SuggestArgs {
    std::vector<unsigned> n;
    double eps = 0x1p-53;
    std::vector<double> allowed;
};

int cmd_suggest(const SuggestArgs& a, bool eps_defaulted, std::ostream& out)
{
    out << "eps: " << echo(a.eps, eps_defaulted) << '\n';
    out << "n\tallowed_error\tdelta_max\tbits_for_delta\n";
    for (unsigned n : a.n) {
        for (double e : a.allowed) {
            const double d = suggest_delta(n, a.eps, e);
            out << n << '\t' << sci(e) << '\t' << sci(d) << '\t';
            if (d > 0.0) {
                out << suggest_bits(d);
            } else {
                out << '-';
            }
            out << '\n';
        }
    }
    return kOk;
}

struct AdversarialArgs {
    std::string qubits;
    double delta = kDefaultDelta;
    int bits = kDefaultBits;
};

int cmd_adversarial(const AdversarialArgs& a, bool delta_defaulted, bool bits_defaulted, std::ostream& out)
{
    check_delta(a.delta);
    check_bits(a.bits);
    const auto [lo, hi] = parse_range(a.qubits);
    out << "delta: " << echo(a.delta, delta_defaulted) << '\n';
    out << "bits: " << a.bits << (bits_defaulted ? " (default)" : "") << '\n';
    out << "n\terror\tpredicted(0.9*delta*2^n)\tratio\tnodes\n";
    for (unsigned n = lo; n <= hi; ++n) {
        const ErrorReport r = adversarial_run(n, a.delta, a.bits);
        const double predicted = std::ldexp(0.9 * a.delta, static_cast<int>(n));
        out << n << '\t' << sci(r.max_error) << '\t' << sci(predicted) << '\t';
        if (predicted > 0.0) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.4f", r.max_error / predicted);
            out << buf;
        } else {
            out << '-';
        }
        out << '\t' << r.final_nodes << '\n';
    }
    return kOk;
}

struct GenArgs {
    std::string family;
    unsigned qubits = 0;
    std::uint64_t seed = 0;
    std::string out;
    bool h_as_ry = false;
    int angle_digits = 17;
};

int cmd_gen(const GenArgs& a, std::ostream& out)
{
    Family f{};
    try {
        f = parse_family(a.family);
    } catch (const CircuitError& e) {
        throw UsageError(e.what());
    }
    Circuit c;
    switch (f) {
    case Family::DJ: c = gen_dj(a.qubits, DjOptions{a.h_as_ry}); break;
    case Family::QPE: c = gen_qpe_exact(a.qubits, a.seed); break;
    case Family::WState: c = gen_wstate(a.qubits, WStateOptions{a.angle_digits}); break;
    }
    std::ostringstream text;
    text << "// " << family_name(f) << ", " << a.qubits << " qubits";
    if (f == Family::QPE) {
        text << ", seed " << a.seed << ", phase " << qpe_phase_numerator(a.qubits, a.seed) << "/2^" << a.qubits - 1;
    }
    text << '\n' << emit_circuit(c);
    if (a.out.empty()) {
        out << text.str();
    } else {
        open_output(a.out) << text.str();
    }
    return kOk;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"MTBDD quantum circuit simulation with leaf merging and error analysis", "qmtbdd"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Simulate a circuit file gate by gate");
    s->add_option("--circuit", sim.circuit, "Circuit file")->required();
    auto* sim_delta = s->add_option("--delta", sim.delta, "Leaf merging threshold (default 0)");
    auto* sim_bits = s->add_option("--bits", sim.bits, "Significand bits (default 53)");
    s->add_flag("--reference", sim.reference, "Also report the max error against a 128-bit run");
    s->add_option("--dump-state", sim.dump_state, "Write the final state (dense for n <= 16, DOT otherwise)");
    s->add_option("--format", sim.format, "Output format")->check(CLI::IsMember({"text", "json", "csv"}));

    SweepArgs sw;
    auto* w = app.add_subcommand("sweep", "Run the error/node-count experiment grid");
    w->add_option("--families", sw.families, "Comma-separated families: dj,qpe,wstate")->delimiter(',');
    w->add_option("--qubits", sw.qubits, "Qubit range A..B or a single N")->required();
    auto* sw_deltas = w->add_option("--deltas", sw.deltas, "Comma-separated merging thresholds")->delimiter(',');
    auto* sw_bits = w->add_option("--bits", sw.bits, "Comma-separated precisions")->delimiter(',');
    w->add_option("--seed", sw.seed, "Seed for the QPE phase");
    w->add_option("--csv", sw.csv, "CSV output path (stdout when neither --csv nor --json is given)");
    w->add_option("--json", sw.json, "JSON output path");
    w->add_option("--workers", sw.workers, std::string("Worker threads (default: all cores, capped by ") + kWorkersEnv +
                                               ")");
    w->add_flag("--timing", sw.timing, "Fill wall_ms (makes output run-dependent)");
    w->add_flag("--quiet", sw.quiet, "No progress lines");

    BoundArgs bd;
    auto* b = app.add_subcommand("bound", "First-order error bound of one multiplication");
    b->add_option("--n", bd.n, "Qubit counts, comma-separated")->required()->delimiter(',');
    auto* bd_eps = b->add_option("--eps", bd.eps, "Unit roundoff (default 2^-53)");
    auto* bd_delta = b->add_option("--delta", bd.delta, "Leaf merging threshold (default 0)");
    b->add_option("--cM", bd.c_m, "Bound on matrix entry moduli (general bound)");
    b->add_option("--cV", bd.c_v, "Bound on vector entry moduli (general bound)");

    SuggestArgs sg;
    auto* g = app.add_subcommand("suggest", "Largest delta meeting an error budget");
    g->add_option("--n", sg.n, "Qubit counts, comma-separated")->required()->delimiter(',');
    auto* sg_eps = g->add_option("--eps", sg.eps, "Unit roundoff (default 2^-53)");
    g->add_option("--allowed-error", sg.allowed, "Error budgets, comma-separated")->required()->delimiter(',');

    AdversarialArgs ad;
    auto* v = app.add_subcommand("adversarial", "Merging worst case: H^n times the uniform state");
    v->add_option("--n", ad.qubits, "Qubit count N or range A..B")->required();
    auto* ad_delta = v->add_option("--delta", ad.delta, "Leaf merging threshold (default 0)");
    auto* ad_bits = v->add_option("--bits", ad.bits, "Significand bits (default 53)");

    GenArgs gn;
    auto* n = app.add_subcommand("gen", "Write a benchmark circuit");
    n->add_option("--family", gn.family, "dj, qpe or wstate")->required();
    n->add_option("--qubits", gn.qubits, "Qubit count")->required();
    n->add_option("--seed", gn.seed, "Seed for the QPE phase");
    n->add_option("--out", gn.out, "Output path (stdout by default)");
    n->add_flag("--h-as-ry", gn.h_as_ry, "DJ: prepare the ancilla with Z and RY(pi/2)");
    n->add_option("--angle-digits", gn.angle_digits, "W-state: significant digits of the angles");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (s->parsed()) {
            return cmd_simulate(sim, sim_delta->count() == 0, sim_bits->count() == 0, out);
        }
        if (w->parsed()) {
            return cmd_sweep(sw, sw_deltas->count() == 0, sw_bits->count() == 0, out, err);
        }
        if (b->parsed()) {
            return cmd_bound(bd, bd_eps->count() == 0, bd_delta->count() == 0, out);
        }
        if (g->parsed()) {
            return cmd_suggest(sg, sg_eps->count() == 0, out);
        }
        if (v->parsed()) {
            return cmd_adversarial(ad, ad_delta->count() == 0, ad_bits->count() == 0, out);
        }
        if (n->parsed()) {
            return cmd_gen(gn, out);
        }
    } catch (const NumericRangeError& e) {
        err << "numeric range error: " << e.what() << '\n';
        return kNumericRange;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kUsage;
    } catch (const CircuitError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const AnalysisError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    err << "no subcommand\n";
    return kUsage;
}

} // namespace qmtbdd::cli
