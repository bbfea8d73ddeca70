#pragma once

// Gates, circuits, the line-oriented circuit format, benchmark generators and
// gate-by-gate simulation on MTBDDs. Qubit q is vector variable q; qubit 0 is
// the most significant bit of a basis-state index.

#include "qmtbdd/mtbdd.hpp"
#include "qmtbdd/numerics.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qmtbdd {

enum class GateKind { H, X, Z, CX, CCX, RY, RZ, CP, P };

/// Number of qubits the kind acts on.
unsigned arity(GateKind kind);
bool takes_angle(GateKind kind);
/// Lower-case circuit-file mnemonic ("h", "cx", "ry", ...).
std::string_view mnemonic(GateKind kind);

/// Raised for gates or circuits that violate their invariants.
class CircuitError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Gate {
    GateKind kind = GateKind::H;
    /// Controls first, target last. For the base matrix, qubits[0] is the
    /// most significant local index bit.
    std::vector<unsigned> qubits;
    Angle angle; // unused for fixed gates

    static Gate h(unsigned q) { return {GateKind::H, {q}, {}}; }
    static Gate x(unsigned q) { return {GateKind::X, {q}, {}}; }
    static Gate z(unsigned q) { return {GateKind::Z, {q}, {}}; }
    static Gate cx(unsigned c, unsigned t) { return {GateKind::CX, {c, t}, {}}; }
    static Gate ccx(unsigned c0, unsigned c1, unsigned t) { return {GateKind::CCX, {c0, c1, t}, {}}; }
    static Gate ry(Angle a, unsigned q) { return {GateKind::RY, {q}, std::move(a)}; }
    static Gate rz(Angle a, unsigned q) { return {GateKind::RZ, {q}, std::move(a)}; }
    static Gate p(Angle a, unsigned q) { return {GateKind::P, {q}, std::move(a)}; }
    static Gate cp(Angle a, unsigned c, unsigned t) { return {GateKind::CP, {c, t}, std::move(a)}; }

    /// Throws CircuitError on wrong arity, repeated or out-of-range qubits.
    void validate(unsigned n) const;

    bool operator==(const Gate& other) const;
};

struct Circuit {
    unsigned n = 0;
    std::vector<Gate> gates;

    void validate() const;
    bool operator==(const Circuit&) const = default;
};

/// 2^k x 2^k row-major matrix of the gate on its own qubits, at config.
std::vector<PrecComplex> base_matrix(const Gate& g, PrecConfig config);

/// Operator of g embedded in n qubits (identity elsewhere), built level by
/// level without a dense 4^n matrix. Leaves go through make_leaf.
MatrixDD gate_matrix(NodeStore& store, const Gate& g, unsigned n);

// ---------------------------------------------------------------------------
// Circuit file format
//
//   qreg q[<n>];
//   h q[i];  x q[i];  z q[i];  cx q[i],q[j];  ccx q[i],q[j],q[k];
//   ry(<angle>) q[i];  rz(<angle>) q[i];  p(<angle>) q[i];  cp(<angle>) q[i],q[j];
//
// <angle> is a decimal literal, [-]pi/<int> or [-]pi/2^<int>. Statements end
// with ';' and may share a line; '//' starts a comment.

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

Circuit parse_circuit(std::string_view text);
std::string emit_circuit(const Circuit& c);

// ---------------------------------------------------------------------------
// Benchmark families

struct DjOptions {
    /// Prepare the ancilla with Z then RY(pi/2) instead of H, so the circuit
    /// carries both 1/sqrt(2) and cos(pi/4) entries.
    bool h_as_ry = false;
};

struct WStateOptions {
    /// Significant digits of the emitted rotation angles.
    int angle_digits = 17;
};

inline constexpr unsigned kMinFamilyQubits = 2;
inline constexpr unsigned kMaxFamilyQubits = 30;

/// Deutsch-Jozsa with the balanced parity oracle over n-1 inputs and one
/// ancilla (qubit n-1). Final state |1...1> (x) |->.
Circuit gen_dj(unsigned n, DjOptions options = {});

/// Exact phase estimation: counting register q[0..n-2], eigenstate qubit
/// q[n-1] = |1>, phase p/2^(n-1) with p drawn from seed. Final state is the
/// basis state |p>|1> up to the decimal rounding of the controlled phases.
Circuit gen_qpe_exact(unsigned n, std::uint64_t seed);
/// The phase numerator p used by gen_qpe_exact(n, seed).
std::uint64_t qpe_phase_numerator(unsigned n, std::uint64_t seed);

/// W-state preparation: X, a cascade of controlled RY rotations (each as
/// RY, CX, RY, CX) with half-angles arccos(sqrt(1/(n-k))), then a CX chain.
Circuit gen_wstate(unsigned n, WStateOptions options = {});

enum class Family { DJ, QPE, WState };
std::string_view family_name(Family f);
/// Accepts "dj", "qpe" (or "qpeexact") and "wstate".
Family parse_family(std::string_view name);
Circuit generate(Family f, unsigned n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Simulation

struct SimulationResult {
    VectorDD state;
    std::size_t final_nodes = 0;
    /// Largest state DD seen after any gate (the initial state included).
    std::size_t peak_nodes = 0;
};

/// Called after each gate with (gate index, matrix, state before, state after).
using StepObserver = std::function<void(std::size_t, const MatrixDD&, const VectorDD&, const VectorDD&)>;

/// S <- e_0; for each gate S <- multiply(gate_matrix(U_k), S).
SimulationResult simulate(NodeStore& store, const Circuit& c, const StepObserver& observer = {});

} // namespace qmtbdd
