#include "qmtbdd/analysis.hpp"

#include "mpfr_scratch.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>
#include <unordered_map>

namespace qmtbdd {

namespace {

constexpr unsigned kMaxAdversarialQubits = 24;

double elapsed_ms(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

// H^(x)n as (P, N) with N = -P, entries +-h.
MatrixDD hadamard_power(NodeStore& s, unsigned n, const PrecValue& h)
{
    const PrecValue zero(s.config());
    NodeRef p = s.make_leaf(PrecComplex(h, zero));
    NodeRef m = s.make_leaf(PrecComplex(-h, zero));
    for (unsigned q = n; q-- > 0;) {
        const Var row = 2 * q;
        const Var col = 2 * q + 1;
        // Row 0: (P, P); row 1: (P, N). Negated for N.
        const NodeRef next_p = s.make_node(row, p, s.make_node(col, p, m));
        const NodeRef next_m = s.make_node(row, m, s.make_node(col, m, p));
        p = next_p;
        m = next_m;
    }
    return MatrixDD{p, n};
}

struct PairKey {
    std::uint32_t a;
    std::uint32_t b;
    unsigned level;
    bool operator==(const PairKey&) const = default;
};

struct PairKeyHash {
    std::size_t operator()(const PairKey& k) const noexcept
    {
        std::uint64_t v = (static_cast<std::uint64_t>(k.a) << 32) ^ k.b ^ (static_cast<std::uint64_t>(k.level) << 58);
        v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
        v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
        return static_cast<std::size_t>(v ^ (v >> 31));
    }
};

} // namespace

ErrorReport adversarial_run(unsigned n, double delta, int bits)
{
    if (n < 1 || n > kMaxAdversarialQubits) {
        throw AnalysisError("adversarial run needs 1 <= n <= " + std::to_string(kMaxAdversarialQubits));
    }
    const auto start = std::chrono::steady_clock::now();
    const PrecConfig cfg(bits);
    NodeStore store(cfg, delta);

    // h = round_b(2^(-n/2)), also the value of every vector entry.
    detail::Scratch x(cfg.bits());
    mpfr_set_ui_2exp(x, 1, -static_cast<long>(n), MPFR_RNDN);
    mpfr_sqrt(x, x, MPFR_RNDN);
    const PrecValue h = PrecValue::from_raw(cfg, x);
    const PrecValue zero(cfg);
    const PrecComplex entry(h, zero);
    const PrecComplex product = cmul(entry, entry);

    NodeRef seed;
    if (delta > 0.0) {
        const double shift = 0.9 * delta;
        seed = store.make_leaf(round_to(cfg, PrecComplex(product.re + PrecValue::from_double(cfg, shift), zero)));
        if (store.is_zero(seed)) {
            throw AnalysisError("products 2^-" + std::to_string(n) + " lie within delta of zero; no seed possible");
        }
    }
    const MatrixDD m = hadamard_power(store, n, h);
    const VectorDD v{store.make_leaf(entry), n};
    if (delta > 0.0 && store.make_leaf(product) != seed) {
        throw AnalysisError("the rounded product " + product.to_string() + " does not merge into the seeded leaf " +
                            store.value(seed).to_string());
    }

    const VectorDD y = multiply(store, m, v);
    store.register_root(y.root);

    // Exact first entry is 1.
    const PrecComplex one = PrecComplex::from_doubles(PrecConfig(ReferenceRun::kBits), 1.0);
    ErrorReport r;
    r.max_error = distance(eval_index(store, y, 0), one);
    r.worst_index = 0;
    r.final_nodes = count_nodes(store, y.root);
    r.peak_nodes = store.peak_nodes();
    r.wall_ms = elapsed_ms(start);
    return r;
}

StateDifference max_difference(const NodeStore& sa, const VectorDD& a, const NodeStore& sb, const VectorDD& b)
{
    if (a.n != b.n) {
        throw AnalysisError("states over different qubit counts: " + std::to_string(a.n) + " vs " +
                            std::to_string(b.n));
    }
    const unsigned n = a.n;
    std::unordered_map<PairKey, StateDifference, PairKeyHash> memo;
    auto rec = [&](auto&& self, NodeRef x, NodeRef y, unsigned level) -> StateDifference {
        if (sa.is_leaf(x) && sb.is_leaf(y)) {
            return StateDifference{distance(sa.value(x), sb.value(y)), 0};
        }
        if (level == n) {
            throw DDError("state depends on a variable beyond its qubit count");
        }
        const PairKey key{x.index(), y.index(), level};
        if (auto it = memo.find(key); it != memo.end()) {
            return it->second;
        }
        const StateDifference lo = self(self, sa.cofactor(x, level, false), sb.cofactor(y, level, false), level + 1);
        const StateDifference hi = self(self, sa.cofactor(x, level, true), sb.cofactor(y, level, true), level + 1);
        StateDifference r = lo;
        if (hi.max_error > lo.max_error) {
            r.max_error = hi.max_error;
            r.worst_index = (std::uint64_t{1} << (n - level - 1)) + hi.worst_index;
        }
        memo.emplace(key, r);
        return r;
    };
    return rec(rec, a.root, b.root, 0);
}

ReferenceRun::ReferenceRun(const Circuit& c) : store_(std::make_unique<NodeStore>(PrecConfig(kBits), 0.0))
{
    state_ = simulate(*store_, c).state;
}

ErrorReport compare_to_reference(const Circuit& c, double delta, int bits, const ReferenceRun& ref)
{
    if (ref.n() != c.n) {
        throw AnalysisError("reference run is for a different circuit");
    }
    const auto start = std::chrono::steady_clock::now();
    NodeStore store(PrecConfig(bits), delta);
    const SimulationResult sim = simulate(store, c);
    ErrorReport r;
    r.wall_ms = elapsed_ms(start);
    r.final_nodes = sim.final_nodes;
    r.peak_nodes = sim.peak_nodes;
    const StateDifference d = max_difference(store, sim.state, ref.store(), ref.state());
    r.max_error = d.max_error;
    r.worst_index = d.worst_index;
    return r;
}

ErrorReport compare_to_reference(const Circuit& c, double delta, int bits)
{
    const ReferenceRun ref(c);
    return compare_to_reference(c, delta, bits, ref);
}

PerGateReport per_gate_check(const Circuit& c, double delta, int bits)
{
    const PrecConfig cfg(bits);
    PerGateReport report;
    report.allowed = bound_unit(c.n, cfg.unit_roundoff(), delta).total + std::ldexp(1.0, -bits + 4);
    NodeStore store(cfg, delta);
    const auto observe = [&](std::size_t, const MatrixDD& m, const VectorDD& before, const VectorDD& after) {
        NodeStore exact(PrecConfig(ReferenceRun::kBits), 0.0);
        const MatrixDD m_ref{copy_into(store, m.root, exact), m.n};
        const VectorDD v_ref{copy_into(store, before.root, exact), before.n};
        const VectorDD y_ref = multiply(exact, m_ref, v_ref);
        const double err = max_difference(store, after, exact, y_ref).max_error;
        ++report.gates;
        report.max_error = std::max(report.max_error, err);
        report.max_ratio = std::max(report.max_ratio, err / report.allowed);
        if (err > report.allowed) {
            ++report.violations;
        }
    };
    const SimulationResult sim = simulate(store, c, observe);
    const ReferenceRun ref(c);
    report.accumulated = max_difference(store, sim.state, ref.store(), ref.state()).max_error;
    return report;
}

std::vector<SweepRecord> sweep(const SweepConfig& config, const std::function<void(const SweepRecord&)>& progress)
{
    if (config.families.empty() || config.deltas.empty() || config.bits.empty() || config.n_min > config.n_max) {
        throw AnalysisError("sweep grid is empty");
    }
    for (double d : config.deltas) {
        if (!(d >= 0.0) || !std::isfinite(d)) {
            throw AnalysisError("delta values must be finite and >= 0");
        }
    }
    for (int b : config.bits) {
        PrecConfig check(b); // throws on out-of-range precision
        (void)check;
    }

    // Work unit: one (family, n) pair sharing one reference run.
    struct Task {
        Family family;
        unsigned n;
        std::size_t first; // index of its first record
    };
    const std::size_t per_task = config.deltas.size() * config.bits.size();
    std::vector<Task> tasks;
    for (Family f : config.families) {
        for (unsigned n = config.n_min; n <= config.n_max; ++n) {
            tasks.push_back(Task{f, n, tasks.size() * per_task});
        }
    }
    std::vector<SweepRecord> records(tasks.size() * per_task);
    std::mutex emit;

    auto run_task = [&](const Task& t) {
        std::string failure;
        std::optional<Circuit> circuit;
        std::unique_ptr<ReferenceRun> ref;
        try {
            circuit = generate(t.family, t.n, config.seed);
            ref = std::make_unique<ReferenceRun>(*circuit);
        } catch (const std::exception& e) {
            failure = e.what();
        }
        std::size_t slot = t.first;
        for (double delta : config.deltas) {
            for (int bits : config.bits) {
                SweepRecord rec;
                rec.family = std::string(family_name(t.family));
                rec.n = t.n;
                rec.delta = delta;
                rec.bits = bits;
                rec.seed = config.seed;
                try {
                    if (!failure.empty()) {
                        throw std::runtime_error(failure);
                    }
                    const ErrorReport r = compare_to_reference(*circuit, delta, bits, *ref);
                    rec.max_error = r.max_error;
                    rec.worst_index = r.worst_index;
                    rec.final_nodes = r.final_nodes;
                    rec.peak_nodes = r.peak_nodes;
                    rec.wall_ms = config.timing ? r.wall_ms : 0.0;
                } catch (const std::exception& e) {
                    rec.max_error = std::numeric_limits<double>::quiet_NaN();
                    rec.status = std::string("error: ") + e.what();
                }
                std::lock_guard lock(emit);
                records[slot++] = rec;
                if (progress) {
                    progress(rec);
                }
            }
        }
    };

    const unsigned workers = std::max(1U, std::min<unsigned>(config.workers, static_cast<unsigned>(tasks.size())));
    if (workers == 1) {
        for (const Task& t : tasks) {
            run_task(t);
        }
        return records;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < tasks.size(); i = next++) {
                run_task(tasks[i]);
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    return records;
}

} // namespace qmtbdd
