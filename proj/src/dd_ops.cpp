#include "qmtbdd/mtbdd.hpp"

#include <sstream>
#include <unordered_map>

namespace qmtbdd {

namespace {

constexpr unsigned kMaxDenseVars = 40;

NodeRef multiply_rec(NodeStore& s, NodeRef m, NodeRef v, unsigned level, unsigned n)
{
    // 0 * x is exact, so skipping the rounded product keeps values unchanged.
    if (s.is_zero(m) || s.is_zero(v)) {
        return s.zero();
    }
    if (level == n) {
        if (!s.is_leaf(m) || !s.is_leaf(v)) {
            throw DDError("operand depends on a variable beyond its declared size");
        }
        return s.make_leaf(cmul(s.value(m), s.value(v)));
    }
    if (auto hit = s.cache_find(OpTag::Multiply, level, m, v)) {
        return *hit;
    }
    const Var row = 2 * level;
    const Var col = 2 * level + 1;
    const NodeRef m0 = s.cofactor(m, row, false);
    const NodeRef m1 = s.cofactor(m, row, true);
    const NodeRef m00 = s.cofactor(m0, col, false);
    const NodeRef m01 = s.cofactor(m0, col, true);
    const NodeRef m10 = s.cofactor(m1, col, false);
    const NodeRef m11 = s.cofactor(m1, col, true);
    const NodeRef v0 = s.cofactor(v, level, false);
    const NodeRef v1 = s.cofactor(v, level, true);

    const NodeRef p00 = multiply_rec(s, m00, v0, level + 1, n);
    const NodeRef p10 = multiply_rec(s, m10, v0, level + 1, n);
    const NodeRef p01 = multiply_rec(s, m01, v1, level + 1, n);
    const NodeRef p11 = multiply_rec(s, m11, v1, level + 1, n);

    const NodeRef r0 = plus(s, p00, p01);
    const NodeRef r1 = plus(s, p10, p11);
    const NodeRef r = s.make_node(level, r0, r1);
    s.cache_put(OpTag::Multiply, level, m, v, r);
    return r;
}

NodeRef build_from_leaves(NodeStore& s, std::span<const PrecComplex> values, unsigned nvars)
{
    std::vector<NodeRef> layer;
    layer.reserve(values.size());
    for (const auto& v : values) {
        layer.push_back(s.make_leaf(v));
    }
    // Adjacent entries differ in the last variable; fold bottom-up.
    for (unsigned q = nvars; q-- > 0;) {
        std::vector<NodeRef> next(layer.size() / 2);
        for (std::size_t i = 0; i < next.size(); ++i) {
            next[i] = s.make_node(q, layer[2 * i], layer[2 * i + 1]);
        }
        layer = std::move(next);
    }
    return layer.front();
}

void expand(const NodeStore& s, NodeRef r, unsigned level, unsigned nvars, std::size_t offset,
            std::vector<PrecComplex>& out)
{
    if (level == nvars) {
        if (!s.is_leaf(r)) {
            throw DDError("DD depends on a variable beyond its declared size");
        }
        out[offset] = s.value(r);
        return;
    }
    const std::size_t half = std::size_t{1} << (nvars - level - 1);
    expand(s, s.cofactor(r, level, false), level + 1, nvars, offset, out);
    expand(s, s.cofactor(r, level, true), level + 1, nvars, offset + half, out);
}

std::uint64_t interleave(std::uint64_t row, std::uint64_t col, unsigned n)
{
    std::uint64_t z = 0;
    for (unsigned q = 0; q < n; ++q) {
        const auto r = (row >> (n - 1 - q)) & 1U;
        const auto c = (col >> (n - 1 - q)) & 1U;
        z |= r << (2 * n - 1 - 2 * q);
        z |= c << (2 * n - 2 - 2 * q);
    }
    return z;
}

void check_dense_vars(unsigned nvars)
{
    if (nvars > kMaxDenseVars) {
        throw DDError("dense conversion limited to " + std::to_string(kMaxDenseVars) + " variables");
    }
}

void check_dense_size(std::size_t got, unsigned nvars)
{
    check_dense_vars(nvars);
    if (got != (std::size_t{1} << nvars)) {
        throw DDError("expected " + std::to_string(std::size_t{1} << nvars) + " entries, got " + std::to_string(got));
    }
}

} // namespace

NodeRef plus(NodeStore& s, NodeRef a, NodeRef b)
{
    if (s.is_zero(a)) {
        return b;
    }
    if (s.is_zero(b)) {
        return a;
    }
    if (s.is_leaf(a) && s.is_leaf(b)) {
        return s.make_leaf(cadd(s.value(a), s.value(b)));
    }
    if (b < a) {
        std::swap(a, b); // complex addition commutes bit-exactly
    }
    if (auto hit = s.cache_find(OpTag::Plus, 0, a, b)) {
        return *hit;
    }
    const Var top = std::min(s.var(a), s.var(b));
    const NodeRef r0 = plus(s, s.cofactor(a, top, false), s.cofactor(b, top, false));
    const NodeRef r1 = plus(s, s.cofactor(a, top, true), s.cofactor(b, top, true));
    const NodeRef r = s.make_node(top, r0, r1);
    s.cache_put(OpTag::Plus, 0, a, b, r);
    return r;
}

VectorDD plus(NodeStore& s, const VectorDD& a, const VectorDD& b)
{
    if (a.n != b.n) {
        throw DDError("plus over different variable sets: " + std::to_string(a.n) + " vs " + std::to_string(b.n));
    }
    return VectorDD{plus(s, a.root, b.root), a.n};
}

VectorDD multiply(NodeStore& s, const MatrixDD& m, const VectorDD& v)
{
    if (m.n != v.n) {
        throw DDError("dimension mismatch: " + std::to_string(m.n) + "-bit matrix times " + std::to_string(v.n) +
                      "-bit vector");
    }
    return VectorDD{multiply_rec(s, m.root, v.root, 0, v.n), v.n};
}

const PrecComplex& eval(const NodeStore& s, NodeRef root, std::span<const std::uint8_t> assignment)
{
    NodeRef r = root;
    while (!s.is_leaf(r)) {
        const Var v = s.var(r);
        if (v >= assignment.size()) {
            throw DDError("assignment too short for variable x" + std::to_string(v));
        }
        r = assignment[v] ? s.high(r) : s.low(r);
    }
    return s.value(r);
}

const PrecComplex& eval_index(const NodeStore& s, const VectorDD& v, std::uint64_t index)
{
    std::vector<std::uint8_t> bits(v.n);
    for (unsigned q = 0; q < v.n; ++q) {
        bits[q] = static_cast<std::uint8_t>((index >> (v.n - 1 - q)) & 1U);
    }
    return eval(s, v.root, bits);
}

const PrecComplex& eval_entry(const NodeStore& s, const MatrixDD& m, std::uint64_t row, std::uint64_t col)
{
    std::vector<std::uint8_t> bits(2 * m.n);
    for (unsigned q = 0; q < m.n; ++q) {
        bits[2 * q] = static_cast<std::uint8_t>((row >> (m.n - 1 - q)) & 1U);
        bits[2 * q + 1] = static_cast<std::uint8_t>((col >> (m.n - 1 - q)) & 1U);
    }
    return eval(s, m.root, bits);
}

VectorDD from_dense(NodeStore& s, std::span<const PrecComplex> values, unsigned n)
{
    check_dense_size(values.size(), n);
    return VectorDD{build_from_leaves(s, values, n), n};
}

MatrixDD from_dense_matrix(NodeStore& s, std::span<const PrecComplex> values, unsigned n)
{
    check_dense_size(values.size(), 2 * n);
    const std::uint64_t dim = std::uint64_t{1} << n;
    std::vector<PrecComplex> interleaved(values.size(), PrecComplex(s.config()));
    for (std::uint64_t r = 0; r < dim; ++r) {
        for (std::uint64_t c = 0; c < dim; ++c) {
            interleaved[interleave(r, c, n)] = values[r * dim + c];
        }
    }
    return MatrixDD{build_from_leaves(s, interleaved, 2 * n), n};
}

std::vector<PrecComplex> to_dense(const NodeStore& s, const VectorDD& v)
{
    check_dense_vars(v.n);
    std::vector<PrecComplex> out(std::size_t{1} << v.n, PrecComplex(s.config()));
    expand(s, v.root, 0, v.n, 0, out);
    return out;
}

std::vector<PrecComplex> to_dense_matrix(const NodeStore& s, const MatrixDD& m)
{
    check_dense_vars(2 * m.n);
    std::vector<PrecComplex> z(std::size_t{1} << (2 * m.n), PrecComplex(s.config()));
    expand(s, m.root, 0, 2 * m.n, 0, z);
    const std::uint64_t dim = std::uint64_t{1} << m.n;
    std::vector<PrecComplex> out(z.size(), PrecComplex(s.config()));
    for (std::uint64_t r = 0; r < dim; ++r) {
        for (std::uint64_t c = 0; c < dim; ++c) {
            out[r * dim + c] = z[interleave(r, c, m.n)];
        }
    }
    return out;
}

VectorDD basis_vector(NodeStore& s, unsigned n, std::uint64_t index)
{
    if (n < 64 && index >= (std::uint64_t{1} << n)) {
        throw DDError("basis index out of range");
    }
    NodeRef r = s.make_leaf(1.0);
    for (unsigned q = n; q-- > 0;) {
        const bool bit = (index >> (n - 1 - q)) & 1U;
        r = bit ? s.make_node(q, s.zero(), r) : s.make_node(q, r, s.zero());
    }
    return VectorDD{r, n};
}

std::size_t count_nodes(const NodeStore& s, NodeRef root)
{
    std::vector<bool> seen(s.arena_size(), false);
    std::vector<NodeRef> stack{root};
    std::size_t count = 0;
    while (!stack.empty()) {
        const NodeRef r = stack.back();
        stack.pop_back();
        if (seen[r.index()]) {
            continue;
        }
        seen[r.index()] = true;
        ++count;
        if (!s.is_leaf(r)) {
            stack.push_back(s.low(r));
            stack.push_back(s.high(r));
        }
    }
    return count;
}

NodeRef copy_into(const NodeStore& from, NodeRef root, NodeStore& to)
{
    std::unordered_map<std::uint32_t, NodeRef> done;
    auto rec = [&](auto&& self, NodeRef r) -> NodeRef {
        if (auto it = done.find(r.index()); it != done.end()) {
            return it->second;
        }
        NodeRef out;
        if (from.is_leaf(r)) {
            out = to.make_leaf(round_to(to.config(), from.value(r)));
        } else {
            const NodeRef lo = self(self, from.low(r));
            const NodeRef hi = self(self, from.high(r));
            out = to.make_node(from.var(r), lo, hi);
        }
        done.emplace(r.index(), out);
        return out;
    };
    return rec(rec, root);
}

std::string to_dot(const NodeStore& s, NodeRef root)
{
    std::ostringstream out;
    out << "digraph mtbdd {\n";
    out << "  root [shape=point];\n";
    out << "  root -> n" << root.index() << ";\n";
    std::vector<bool> seen(s.arena_size(), false);
    std::vector<NodeRef> queue{root};
    seen[root.index()] = true;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const NodeRef r = queue[head];
        if (s.is_leaf(r)) {
            out << "  n" << r.index() << " [shape=box, label=\"" << s.value(r).to_string() << "\"];\n";
            continue;
        }
        out << "  n" << r.index() << " [shape=circle, label=\"x" << s.var(r) << "\"];\n";
        out << "  n" << r.index() << " -> n" << s.low(r).index() << " [style=dashed];\n";
        out << "  n" << r.index() << " -> n" << s.high(r).index() << " [style=solid];\n";
        for (NodeRef child : {s.low(r), s.high(r)}) {
            if (!seen[child.index()]) {
                seen[child.index()] = true;
                queue.push_back(child);
            }
        }
    }
    out << "}\n";
    return out.str();
}

} // namespace qmtbdd
