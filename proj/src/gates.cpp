#include "qmtbdd/quantum.hpp"

#include <algorithm>
#include <unordered_map>

namespace qmtbdd {

unsigned arity(GateKind kind)
{
    switch (kind) {
    case GateKind::H:
    case GateKind::X:
    case GateKind::Z:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::P:
        return 1;
    case GateKind::CX:
    case GateKind::CP:
        return 2;
    case GateKind::CCX:
        return 3;
    }
    return 0;
}

bool takes_angle(GateKind kind)
{
    return kind == GateKind::RY || kind == GateKind::RZ || kind == GateKind::CP || kind == GateKind::P;
}

std::string_view mnemonic(GateKind kind)
{
    switch (kind) {
    case GateKind::H: return "h";
    case GateKind::X: return "x";
    case GateKind::Z: return "z";
    case GateKind::CX: return "cx";
    case GateKind::CCX: return "ccx";
    case GateKind::RY: return "ry";
    case GateKind::RZ: return "rz";
    case GateKind::CP: return "cp";
    case GateKind::P: return "p";
    }
    return "?";
}

void Gate::validate(unsigned n) const
{
    if (qubits.size() != arity(kind)) {
        throw CircuitError(std::string(mnemonic(kind)) + " acts on " + std::to_string(arity(kind)) + " qubit(s), got " +
                           std::to_string(qubits.size()));
    }
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        if (qubits[i] >= n) {
            throw CircuitError("qubit " + std::to_string(qubits[i]) + " out of range for " + std::to_string(n) +
                               " qubits");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (qubits[i] == qubits[j]) {
                throw CircuitError(std::string(mnemonic(kind)) + " uses qubit " + std::to_string(qubits[i]) + " twice");
            }
        }
    }
}

bool Gate::operator==(const Gate& other) const
{
    if (kind != other.kind || qubits != other.qubits) {
        return false;
    }
    return !takes_angle(kind) || angle == other.angle;
}

void Circuit::validate() const
{
    if (n == 0) {
        throw CircuitError("circuit needs at least one qubit");
    }
    for (const auto& g : gates) {
        g.validate(n);
    }
}

std::vector<PrecComplex> base_matrix(const Gate& g, PrecConfig config)
{
    const std::size_t dim = std::size_t{1} << arity(g.kind);
    std::vector<PrecComplex> m(dim * dim, PrecComplex(config));
    const PrecComplex one = PrecComplex::from_doubles(config, 1.0);
    auto at = [&](std::size_t r, std::size_t c) -> PrecComplex& { return m[r * dim + c]; };

    switch (g.kind) {
    case GateKind::H: {
        const PrecValue s = sqrt_half(config);
        const PrecValue zero(config);
        at(0, 0) = PrecComplex(s, zero);
        at(0, 1) = PrecComplex(s, zero);
        at(1, 0) = PrecComplex(s, zero);
        at(1, 1) = PrecComplex(-s, zero);
        break;
    }
    case GateKind::X:
        at(0, 1) = one;
        at(1, 0) = one;
        break;
    case GateKind::Z:
        at(0, 0) = one;
        at(1, 1) = cneg(one);
        break;
    case GateKind::CX:
        at(0, 0) = one;
        at(1, 1) = one;
        at(2, 3) = one;
        at(3, 2) = one;
        break;
    case GateKind::CCX:
        for (std::size_t i = 0; i < 6; ++i) {
            at(i, i) = one;
        }
        at(6, 7) = one;
        at(7, 6) = one;
        break;
    case GateKind::RY: {
        const PrecValue half = scale2(g.angle.value(config), -1);
        const PrecValue c = cos_of(half);
        const PrecValue s = sin_of(half);
        const PrecValue zero(config);
        at(0, 0) = PrecComplex(c, zero);
        at(0, 1) = PrecComplex(-s, zero);
        at(1, 0) = PrecComplex(s, zero);
        at(1, 1) = PrecComplex(c, zero);
        break;
    }
    case GateKind::RZ: {
        const PrecValue half = scale2(g.angle.value(config), -1);
        at(0, 0) = exp_i(-half);
        at(1, 1) = exp_i(half);
        break;
    }
    case GateKind::P:
        at(0, 0) = one;
        at(1, 1) = exp_i(g.angle.value(config));
        break;
    case GateKind::CP:
        at(0, 0) = one;
        at(1, 1) = one;
        at(2, 2) = one;
        at(3, 3) = exp_i(g.angle.value(config));
        break;
    }
    return m;
}

MatrixDD gate_matrix(NodeStore& store, const Gate& g, unsigned n)
{
    try {
        g.validate(n);
    } catch (const CircuitError& e) {
        throw DDError(e.what());
    }
    const unsigned k = arity(g.kind);
    const std::size_t dim = std::size_t{1} << k;

    std::vector<NodeRef> leaves;
    leaves.reserve(dim * dim);
    for (const auto& v : base_matrix(g, store.config())) {
        leaves.push_back(store.make_leaf(v));
    }

    std::vector<int> position(n, -1);
    for (unsigned p = 0; p < k; ++p) {
        position[g.qubits[p]] = static_cast<int>(p);
    }

    // Sub-diagram below level q given the local row/column bits fixed so far.
    std::unordered_map<std::uint64_t, NodeRef> memo;
    auto build = [&](auto&& self, unsigned q, std::size_t row, std::size_t col) -> NodeRef {
        if (q == n) {
            return leaves[row * dim + col];
        }
        const std::uint64_t key = (static_cast<std::uint64_t>(q) * dim + row) * dim + col;
        if (auto it = memo.find(key); it != memo.end()) {
            return it->second;
        }
        const Var rv = 2 * q;
        const Var cv = 2 * q + 1;
        NodeRef r;
        if (position[q] < 0) {
            const NodeRef sub = self(self, q + 1, row, col);
            r = store.make_node(rv, store.make_node(cv, sub, store.zero()), store.make_node(cv, store.zero(), sub));
        } else {
            const unsigned bit = k - 1 - static_cast<unsigned>(position[q]);
            const std::size_t r1 = row | (std::size_t{1} << bit);
            const std::size_t c1 = col | (std::size_t{1} << bit);
            const NodeRef s00 = self(self, q + 1, row, col);
            const NodeRef s01 = self(self, q + 1, row, c1);
            const NodeRef s10 = self(self, q + 1, r1, col);
            const NodeRef s11 = self(self, q + 1, r1, c1);
            r = store.make_node(rv, store.make_node(cv, s00, s01), store.make_node(cv, s10, s11));
        }
        memo.emplace(key, r);
        return r;
    };
    return MatrixDD{build(build, 0, 0, 0), n};
}

SimulationResult simulate(NodeStore& store, const Circuit& c, const StepObserver& observer)
{
    c.validate();
    VectorDD state = basis_vector(store, c.n, 0);
    store.register_root(state.root);
    for (std::size_t k = 0; k < c.gates.size(); ++k) {
        const MatrixDD m = gate_matrix(store, c.gates[k], c.n);
        const VectorDD next = multiply(store, m, state);
        if (observer) {
            observer(k, m, state, next);
        }
        store.release_root(state.root);
        store.register_root(next.root);
        state = next;
    }
    SimulationResult result;
    result.state = state;
    result.final_nodes = count_nodes(store, state.root);
    result.peak_nodes = store.peak_nodes();
    store.release_root(state.root);
    return result;
}

} // namespace qmtbdd
