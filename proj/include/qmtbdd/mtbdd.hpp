#pragma once

// Multi-terminal BDDs over complex leaves with an absolute leaf-merging
// threshold (delta). Vector DDs over n variables use variable q for index bit
// q, with bit 0 the most significant. Matrix DDs over 2n variables interleave
// row and column bits: variable 2q is row bit q, variable 2q+1 column bit q.

#include "qmtbdd/numerics.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace qmtbdd {

using Var = std::uint32_t;
inline constexpr Var kLeafVar = std::numeric_limits<Var>::max();

/// Handle into one NodeStore. Meaningless in any other store.
class NodeRef {
public:
    constexpr NodeRef() = default;
    constexpr explicit NodeRef(std::uint32_t index) : index_(index) {}
    constexpr std::uint32_t index() const noexcept { return index_; }
    constexpr auto operator<=>(const NodeRef&) const = default;

private:
    std::uint32_t index_ = std::numeric_limits<std::uint32_t>::max();
};

struct VectorDD {
    NodeRef root;
    unsigned n = 0;
};

struct MatrixDD {
    NodeRef root;
    unsigned n = 0;
};

/// Raised on violated preconditions of DD construction or operations.
class DDError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct StoreOptions {
    bool enable_cache = true;
};

struct StoreStats {
    std::size_t internal_nodes = 0;
    std::size_t leaves = 0;
    std::size_t cache_lookups = 0;
    std::size_t cache_hits = 0;
};

enum class OpTag : std::uint32_t { Plus = 0, Multiply = 1 };

/// Canonical node arena. Internal nodes are hash-consed on (var, low, high);
/// leaves are hash-consed up to delta: make_leaf(v) returns an existing leaf
/// within complex distance delta of v when one is found, else a new leaf
/// holding v exactly. Nodes are never freed.
class NodeStore {
public:
    NodeStore(PrecConfig config, double delta, StoreOptions options = {});
    NodeStore(const NodeStore&) = delete;
    NodeStore& operator=(const NodeStore&) = delete;

    PrecConfig config() const noexcept { return config_; }
    double delta() const noexcept { return delta_; }
    bool cache_enabled() const noexcept { return options_.enable_cache; }

    /// Throws NumericRangeError for non-finite values and PrecisionMismatch
    /// when value is not at the store precision.
    NodeRef make_leaf(const PrecComplex& value);
    NodeRef make_leaf(double re, double im = 0.0);
    /// Returns low when low == high. Throws DDError unless var is strictly
    /// above the variables of both children.
    NodeRef make_node(Var var, NodeRef low, NodeRef high);

    /// The exact-zero leaf, created with the store.
    NodeRef zero() const noexcept { return zero_; }
    bool is_zero(NodeRef r) const noexcept { return r == zero_; }

    bool is_leaf(NodeRef r) const { return node(r).var == kLeafVar; }
    Var var(NodeRef r) const { return node(r).var; }
    NodeRef low(NodeRef r) const;
    NodeRef high(NodeRef r) const;
    const PrecComplex& value(NodeRef r) const;

    /// Cofactor of r with respect to var (r itself when r does not test var).
    NodeRef cofactor(NodeRef r, Var v, bool bit) const
    {
        const Node& nd = node(r);
        if (nd.var != v) {
            return r;
        }
        return NodeRef(bit ? nd.high : nd.low);
    }

    std::optional<NodeRef> cache_find(OpTag tag, std::uint32_t level, NodeRef a, NodeRef b);
    void cache_put(OpTag tag, std::uint32_t level, NodeRef a, NodeRef b, NodeRef result);

    /// Roots whose reachable nodes count as live. Registration updates the
    /// peak live count.
    void register_root(NodeRef r);
    void release_root(NodeRef r);
    std::size_t live_nodes() const;
    std::size_t peak_nodes() const noexcept { return peak_live_; }

    std::size_t arena_size() const noexcept { return nodes_.size(); }
    const StoreStats& stats() const noexcept { return stats_; }

private:
    struct Node {
        Var var;
        std::uint32_t low;  // leaf: index into values_
        std::uint32_t high;
    };

    struct TripleHash {
        std::size_t operator()(const Node& n) const noexcept;
    };
    struct TripleEq {
        bool operator()(const Node& a, const Node& b) const noexcept
        {
            return a.var == b.var && a.low == b.low && a.high == b.high;
        }
    };
    struct CacheKey {
        std::uint64_t op;
        std::uint64_t operands;
        bool operator==(const CacheKey&) const = default;
    };
    struct CacheKeyHash {
        std::size_t operator()(const CacheKey& k) const noexcept;
    };
    struct Cell {
        std::int64_t re;
        std::int64_t im;
        bool operator==(const Cell&) const = default;
    };
    struct CellHash {
        std::size_t operator()(const Cell& c) const noexcept;
    };

    const Node& node(NodeRef r) const;
    NodeRef new_leaf(const PrecComplex& value);
    Cell cell_of(const PrecComplex& value) const;
    std::optional<NodeRef> find_exact(const PrecComplex& value) const;
    std::optional<NodeRef> find_near(const PrecComplex& value) const;

    PrecConfig config_;
    double delta_;
    StoreOptions options_;
    long cell_exponent_ = 0; // grid cell width is 2^cell_exponent_

    std::vector<Node> nodes_;
    std::vector<PrecComplex> values_;
    std::unordered_map<Node, std::uint32_t, TripleHash, TripleEq> unique_;
    std::unordered_multimap<std::size_t, std::uint32_t> exact_leaves_;
    std::unordered_map<Cell, std::vector<std::uint32_t>, CellHash> grid_;
    std::unordered_map<CacheKey, std::uint32_t, CacheKeyHash> cache_;

    std::unordered_map<std::uint32_t, std::size_t> roots_;
    std::size_t peak_live_ = 0;
    StoreStats stats_;
    NodeRef zero_;
};

// ---------------------------------------------------------------------------
// Operations

/// Elementwise sum. Leaf sums are one rounded complex add followed by
/// make_leaf. Throws DDError on a variable-count mismatch.
VectorDD plus(NodeStore& store, const VectorDD& a, const VectorDD& b);
NodeRef plus(NodeStore& store, NodeRef a, NodeRef b);

/// Matrix-vector product by block recursion on the top row/column bits:
/// y|0 = M|00 v|0 + M|01 v|1 and y|1 = M|10 v|0 + M|11 v|1. Entry i is the
/// balanced binary-tree sum of the rounded products M[i][j] * v[j].
VectorDD multiply(NodeStore& store, const MatrixDD& m, const VectorDD& v);

/// Follows the assignment (one entry per variable) to a leaf.
const PrecComplex& eval(const NodeStore& store, NodeRef root, std::span<const std::uint8_t> assignment);
const PrecComplex& eval_index(const NodeStore& store, const VectorDD& v, std::uint64_t index);
const PrecComplex& eval_entry(const NodeStore& store, const MatrixDD& m, std::uint64_t row, std::uint64_t col);

VectorDD from_dense(NodeStore& store, std::span<const PrecComplex> values, unsigned n);
/// values in row-major order, 4^n entries.
MatrixDD from_dense_matrix(NodeStore& store, std::span<const PrecComplex> values, unsigned n);
std::vector<PrecComplex> to_dense(const NodeStore& store, const VectorDD& v);
std::vector<PrecComplex> to_dense_matrix(const NodeStore& store, const MatrixDD& m);

/// Basis vector e_index.
VectorDD basis_vector(NodeStore& store, unsigned n, std::uint64_t index);

/// Distinct nodes reachable from root, leaves included.
std::size_t count_nodes(const NodeStore& store, NodeRef root);

/// Rebuilds the DD rooted at root (in from) inside to. Leaf values are
/// rounded to the target precision, which is exact when it is not smaller.
NodeRef copy_into(const NodeStore& from, NodeRef root, NodeStore& to);

/// Graphviz text: internal nodes labeled x<var>, leaves by full-precision
/// value, dashed edge = low, solid edge = high.
std::string to_dot(const NodeStore& store, NodeRef root);

} // namespace qmtbdd
