#include "qmtbdd/mtbdd.hpp"

#include <cassert>
#include <cmath>

namespace qmtbdd {

namespace {

std::size_t mix64(std::uint64_t v) noexcept
{
    v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
    v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<std::size_t>(v ^ (v >> 31));
}

// Exponent k of the smallest power of two 2^k >= x, for x > 0.
long ceil_log2(double x)
{
    int e = 0;
    const double m = std::frexp(x, &e); // x = m * 2^e, m in [0.5, 1)
    return m == 0.5 ? e - 1 : e;
}

} // namespace

std::size_t NodeStore::TripleHash::operator()(const Node& n) const noexcept
{
    return mix64((static_cast<std::uint64_t>(n.var) << 40) ^ (static_cast<std::uint64_t>(n.low) << 20) ^
                 mix64(n.high));
}

std::size_t NodeStore::CacheKeyHash::operator()(const CacheKey& k) const noexcept
{
    return mix64(k.op * 0x9e3779b97f4a7c15ULL ^ mix64(k.operands));
}

std::size_t NodeStore::CellHash::operator()(const Cell& c) const noexcept
{
    return mix64(static_cast<std::uint64_t>(c.re) * 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(c.im));
}

NodeStore::NodeStore(PrecConfig config, double delta, StoreOptions options)
    : config_(config), delta_(delta), options_(options)
{
    if (!(delta >= 0.0) || !std::isfinite(delta)) {
        throw DDError("merge threshold delta must be a finite value >= 0");
    }
    if (delta_ > 0.0) {
        const double floor_width = std::ldexp(1.0, -config_.bits() - 2);
        cell_exponent_ = ceil_log2(std::max(delta_, floor_width));
    }
    zero_ = new_leaf(PrecComplex(config_));
}

const NodeStore::Node& NodeStore::node(NodeRef r) const
{
    assert(r.index() < nodes_.size());
    return nodes_[r.index()];
}

NodeRef NodeStore::low(NodeRef r) const
{
    const Node& nd = node(r);
    if (nd.var == kLeafVar) {
        throw DDError("low() of a leaf");
    }
    return NodeRef(nd.low);
}

NodeRef NodeStore::high(NodeRef r) const
{
    const Node& nd = node(r);
    if (nd.var == kLeafVar) {
        throw DDError("high() of a leaf");
    }
    return NodeRef(nd.high);
}

const PrecComplex& NodeStore::value(NodeRef r) const
{
    const Node& nd = node(r);
    if (nd.var != kLeafVar) {
        throw DDError("value() of an internal node");
    }
    return values_[nd.low];
}

NodeStore::Cell NodeStore::cell_of(const PrecComplex& value) const
{
    auto index = [this](const PrecValue& x) {
        const PrecValue scaled = scale2(x, -cell_exponent_); // exact
        if (!mpfr_fits_intmax_p(scaled.raw(), MPFR_RNDD)) {
            throw NumericRangeError("leaf value " + x.to_string() + " is too large for the merge grid");
        }
        return static_cast<std::int64_t>(mpfr_get_sj(scaled.raw(), MPFR_RNDD));
    };
    return Cell{index(value.re), index(value.im)};
}

std::optional<NodeRef> NodeStore::find_exact(const PrecComplex& value) const
{
    auto [it, end] = exact_leaves_.equal_range(value.hash());
    for (; it != end; ++it) {
        if (values_[nodes_[it->second].low] == value) {
            return NodeRef(it->second);
        }
    }
    return std::nullopt;
}

std::optional<NodeRef> NodeStore::find_near(const PrecComplex& value) const
{
    const Cell c = cell_of(value);
    // 3x3 neighbourhood, row-major, leaves within a cell in creation order.
    for (std::int64_t dr = -1; dr <= 1; ++dr) {
        for (std::int64_t di = -1; di <= 1; ++di) {
            auto it = grid_.find(Cell{c.re + dr, c.im + di});
            if (it == grid_.end()) {
                continue;
            }
            for (std::uint32_t leaf : it->second) {
                if (within(value, values_[nodes_[leaf].low], delta_)) {
                    return NodeRef(leaf);
                }
            }
        }
    }
    return std::nullopt;
}

NodeRef NodeStore::new_leaf(const PrecComplex& value)
{
    if (nodes_.size() >= std::numeric_limits<std::uint32_t>::max() - 1) {
        throw std::length_error("node arena exhausted");
    }
    const auto leaf = static_cast<std::uint32_t>(nodes_.size());
    // Store +0 for either signed zero so that equal values print alike.
    PrecComplex stored = value;
    if (stored.re.is_zero()) {
        stored.re = PrecValue(config_);
    }
    if (stored.im.is_zero()) {
        stored.im = PrecValue(config_);
    }
    values_.push_back(std::move(stored));
    nodes_.push_back(Node{kLeafVar, static_cast<std::uint32_t>(values_.size() - 1), 0});
    ++stats_.leaves;
    if (delta_ == 0.0) {
        exact_leaves_.emplace(value.hash(), leaf);
    } else {
        grid_[cell_of(value)].push_back(leaf);
    }
    return NodeRef(leaf);
}

NodeRef NodeStore::make_leaf(const PrecComplex& value)
{
    if (value.re.bits() != config_.bits() || value.im.bits() != config_.bits()) {
        throw PrecisionMismatch("leaf value has " + std::to_string(value.re.bits()) + " bits, store uses " +
                                std::to_string(config_.bits()));
    }
    if (value.is_zero()) {
        return zero_;
    }
    const auto found = delta_ == 0.0 ? find_exact(value) : find_near(value);
    if (found) {
        assert(within(value, values_[nodes_[found->index()].low], delta_));
        return *found;
    }
    return new_leaf(value);
}

NodeRef NodeStore::make_leaf(double re, double im) { return make_leaf(PrecComplex::from_doubles(config_, re, im)); }

NodeRef NodeStore::make_node(Var var, NodeRef low, NodeRef high)
{
    if (var == kLeafVar) {
        throw DDError("variable index out of range");
    }
    if (low == high) {
        return low;
    }
    if (!(var < node(low).var) || !(var < node(high).var)) {
        throw DDError("variable order violated: x" + std::to_string(var) + " above x" +
                      std::to_string(std::min(node(low).var, node(high).var)));
    }
    const Node key{var, low.index(), high.index()};
    if (auto it = unique_.find(key); it != unique_.end()) {
        return NodeRef(it->second);
    }
    if (nodes_.size() >= std::numeric_limits<std::uint32_t>::max() - 1) {
        throw std::length_error("node arena exhausted");
    }
    const auto index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(key);
    unique_.emplace(key, index);
    ++stats_.internal_nodes;
    return NodeRef(index);
}

std::optional<NodeRef> NodeStore::cache_find(OpTag tag, std::uint32_t level, NodeRef a, NodeRef b)
{
    if (!options_.enable_cache) {
        return std::nullopt;
    }
    ++stats_.cache_lookups;
    const CacheKey key{(static_cast<std::uint64_t>(tag) << 32) | level,
                       (static_cast<std::uint64_t>(a.index()) << 32) | b.index()};
    if (auto it = cache_.find(key); it != cache_.end()) {
        ++stats_.cache_hits;
        return NodeRef(it->second);
    }
    return std::nullopt;
}

void NodeStore::cache_put(OpTag tag, std::uint32_t level, NodeRef a, NodeRef b, NodeRef result)
{
    if (!options_.enable_cache) {
        return;
    }
    const CacheKey key{(static_cast<std::uint64_t>(tag) << 32) | level,
                       (static_cast<std::uint64_t>(a.index()) << 32) | b.index()};
    cache_.emplace(key, result.index());
}

void NodeStore::register_root(NodeRef r)
{
    ++roots_[r.index()];
    peak_live_ = std::max(peak_live_, live_nodes());
}

void NodeStore::release_root(NodeRef r)
{
    auto it = roots_.find(r.index());
    if (it == roots_.end()) {
        throw DDError("release of an unregistered root");
    }
    if (--it->second == 0) {
        roots_.erase(it);
    }
}

std::size_t NodeStore::live_nodes() const
{
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<std::uint32_t> stack;
    std::size_t count = 0;
    for (const auto& [root, refs] : roots_) {
        stack.push_back(root);
    }
    while (!stack.empty()) {
        const auto i = stack.back();
        stack.pop_back();
        if (seen[i]) {
            continue;
        }
        seen[i] = true;
        ++count;
        if (nodes_[i].var != kLeafVar) {
            stack.push_back(nodes_[i].low);
            stack.push_back(nodes_[i].high);
        }
    }
    return count;
}

} // namespace qmtbdd
