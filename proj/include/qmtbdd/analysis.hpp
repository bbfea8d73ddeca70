#pragma once

// Error bounds for one MTBDD matrix-vector product, parameter suggestions,
// the adversarial merging experiment and comparisons against a 128-bit
// reference simulation.

#include "qmtbdd/mtbdd.hpp"
#include "qmtbdd/quantum.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmtbdd {

class AnalysisError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// First-order componentwise bound (n+1) eps C + delta 2^(n+1) for one
/// multiplication over n variables.
struct BoundReport {
    unsigned n = 0;
    double eps = 0.0;
    double delta = 0.0;
    double c = 0.0; // max_i sum_j |M_ij V_j|, or an upper bound on it
    double term_fp = 0.0;
    double term_merge = 0.0;
    double total = 0.0; // term_fp + term_merge
    // Not part of total: the exact second-order remainders
    // ((1+eps)^(n+1) - 1 - (n+1) eps) C  and  delta sum_j 2^j ((1+eps)^j - 1).
    double higher_fp = 0.0;
    double higher_merge = 0.0;
};

/// C bounded by 2^n c_M c_V, with c_M and c_V bounds on the entry moduli.
BoundReport bound_general(unsigned n, double eps, double delta, double c_m, double c_v);
/// Unitary/state or stochastic/distribution inputs: C = 1.
BoundReport bound_unit(unsigned n, double eps, double delta);

/// (allowed_error - (n+1) eps) / 2^(n+1). Throws AnalysisError when
/// allowed_error < (n+1) eps.
double suggest_delta(unsigned n, double eps, double allowed_error);
/// Smallest integer b with b > log2(1/delta). Throws for delta <= 0.
int suggest_bits(double delta);

struct ErrorReport {
    double max_error = 0.0;
    std::uint64_t worst_index = 0;
    std::size_t final_nodes = 0;
    std::size_t peak_nodes = 0;
    double wall_ms = 0.0;
};

/// H^(x)n times the uniform superposition with a leaf pre-seeded 0.9 delta
/// above the rounded product 2^-n, so all 2^n products merge upward. The
/// exact first entry is 1; the reported error is |y_0 - 1|. Throws
/// AnalysisError when n > 24 or when the products do not merge into the seed.
ErrorReport adversarial_run(unsigned n, double delta, int bits);

struct StateDifference {
    double max_error = 0.0;
    std::uint64_t worst_index = 0; // lowest index attaining max_error
};

/// max_j |a_j - b_j| by a synchronized walk of two DDs that may live in
/// different stores (and precisions).
StateDifference max_difference(const NodeStore& sa, const VectorDD& a, const NodeStore& sb, const VectorDD& b);

/// A circuit simulated at 128 bits with delta = 0, kept for comparisons.
class ReferenceRun {
public:
    static constexpr int kBits = 128;

    explicit ReferenceRun(const Circuit& c);

    const NodeStore& store() const noexcept { return *store_; }
    const VectorDD& state() const noexcept { return state_; }
    unsigned n() const noexcept { return state_.n; }

private:
    std::unique_ptr<NodeStore> store_;
    VectorDD state_;
};

/// Simulates c at (delta, bits) in a fresh store and reports the max modulus
/// error against the reference. wall_ms covers that simulation only.
ErrorReport compare_to_reference(const Circuit& c, double delta, int bits, const ReferenceRun& ref);
ErrorReport compare_to_reference(const Circuit& c, double delta, int bits);

/// Single-gate conformance: every product of the simulation is replayed on
/// exactly lifted operands in a 128-bit delta = 0 store.
struct PerGateReport {
    std::size_t gates = 0;
    double max_error = 0.0;      // worst single-gate error
    double max_ratio = 0.0;      // worst error / allowed
    std::size_t violations = 0;  // gates with error > allowed
    double allowed = 0.0;        // bound_unit(n, 2^-b, delta).total + 2^(-b+4)
    double accumulated = 0.0;    // final-state error vs a full 128-bit run, not bound-checked
};
PerGateReport per_gate_check(const Circuit& c, double delta, int bits);

struct SweepConfig {
    std::vector<Family> families;
    unsigned n_min = 0;
    unsigned n_max = 0;
    std::vector<double> deltas;
    std::vector<int> bits;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    /// Record wall-clock times. Off by default so reruns are byte-identical.
    bool timing = false;
};

struct SweepRecord {
    std::string family;
    unsigned n = 0;
    double delta = 0.0;
    int bits = 0;
    std::uint64_t seed = 0;
    double max_error = 0.0;
    std::uint64_t worst_index = 0;
    std::size_t final_nodes = 0;
    std::size_t peak_nodes = 0;
    double wall_ms = 0.0;
    std::string status = "ok";
};

/// One record per (family, n, delta, bits) in that nesting order. Failed
/// points carry status "error: ..." and NaN max_error; the sweep continues.
/// progress, if set, is called once per finished record (serialized).
std::vector<SweepRecord> sweep(const SweepConfig& config,
                               const std::function<void(const SweepRecord&)>& progress = {});

} // namespace qmtbdd
