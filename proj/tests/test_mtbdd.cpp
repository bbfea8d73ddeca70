#include "qmtbdd/mtbdd.hpp"

#include "oracle/dense_oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace qmtbdd;

namespace {

std::vector<PrecComplex> reals(PrecConfig cfg, std::initializer_list<double> xs)
{
    std::vector<PrecComplex> out;
    for (double x : xs) {
        out.push_back(PrecComplex::from_doubles(cfg, x));
    }
    return out;
}

// The 3-variable example vector; its last entry is the double just above 2.
std::vector<PrecComplex> example_vector(PrecConfig cfg)
{
    return reals(cfg, {1, 1, -2, -2, 3, 1, 2, 2.0000000000000004});
}

std::vector<PrecComplex> hadamard_power_dense(PrecConfig cfg, unsigned n)
{
    const std::size_t dim = std::size_t{1} << n;
    const PrecValue s = sqrt_half(cfg);
    PrecValue mag = PrecValue::from_double(cfg, 1.0);
    for (unsigned i = 0; i < n; ++i) {
        mag = mag * s;
    }
    std::vector<PrecComplex> m;
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            const bool negative = __builtin_popcountll(r & c) & 1;
            m.emplace_back(negative ? -mag : mag, PrecValue(cfg));
        }
    }
    return m;
}

} // namespace

TEST(MakeLeaf, ExactCanonicity)
{
    NodeStore s(PrecConfig(53), 0.0);
    const NodeRef a = s.make_leaf(0.25, -1.5);
    EXPECT_EQ(s.make_leaf(0.25, -1.5), a);
    EXPECT_EQ(s.value(a), PrecComplex::from_doubles(PrecConfig(53), 0.25, -1.5));
    EXPECT_NE(s.make_leaf(0.25, -1.5000000000000002), a);
    EXPECT_EQ(s.make_leaf(0.0), s.zero());
    EXPECT_EQ(s.make_leaf(-0.0, -0.0), s.zero());
}

TEST(MakeLeaf, MergesNearbyValue)
{
    NodeStore s(PrecConfig(53), 1e-15);
    const NodeRef two = s.make_leaf(2.0);
    EXPECT_EQ(s.make_leaf(2.0000000000000004), two);
    EXPECT_NE(s.make_leaf(2.000000000000004), two); // 4e-15 away
}

TEST(MakeLeaf, ThresholdContract)
{
    NodeStore s(PrecConfig(53), 1e-3);
    const NodeRef half = s.make_leaf(0.5);
    EXPECT_EQ(s.make_leaf(0.4995), half);
    const NodeRef r = s.make_leaf(0.499);
    EXPECT_LE(distance(s.value(r), PrecComplex::from_doubles(PrecConfig(53), 0.499)), 1e-3);
    // Values within delta of zero become the zero leaf.
    EXPECT_EQ(s.make_leaf(0.0004, -0.0004), s.zero());
}

TEST(MakeLeaf, ContractHoldsForRandomValues)
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> coord(-0.01, 0.01);
    for (double delta : {1e-3, 1e-5, 3e-9, 1e-12}) {
        for (int b : {24, 53}) {
            const PrecConfig cfg(b);
            NodeStore s(cfg, delta);
            for (int i = 0; i < 3000; ++i) {
                const PrecComplex v = PrecComplex::from_doubles(cfg, coord(rng), coord(rng));
                const NodeRef leaf = s.make_leaf(v);
                ASSERT_TRUE(within(s.value(leaf), v, delta)) << v.to_string();
                ASSERT_LE(distance(s.value(leaf), v), delta);
            }
        }
    }
}

TEST(MakeLeaf, RejectsForeignPrecision)
{
    NodeStore s(PrecConfig(53), 0.0);
    EXPECT_THROW(s.make_leaf(PrecComplex::from_doubles(PrecConfig(24), 1.0)), PrecisionMismatch);
    EXPECT_THROW(s.make_leaf(NAN), NumericRangeError);
    EXPECT_THROW(NodeStore(PrecConfig(53), -1.0), DDError);
    EXPECT_THROW(NodeStore(PrecConfig(53), INFINITY), DDError);
}

TEST(MakeLeaf, HugeValuesOffTheMergeGridAreReported)
{
    const PrecConfig cfg(53);
    NodeStore s(cfg, 1e-300);
    const PrecValue big = scale2(PrecValue::from_double(cfg, 1.0), 1000);
    EXPECT_THROW(s.make_leaf(PrecComplex(big, PrecValue(cfg))), NumericRangeError);
}

TEST(MakeNode, ReductionUniquenessOrder)
{
    NodeStore s(PrecConfig(53), 0.0);
    const NodeRef a = s.make_leaf(1.0);
    const NodeRef b = s.make_leaf(2.0);
    EXPECT_EQ(s.make_node(0, a, a), a);
    const NodeRef n1 = s.make_node(1, a, b);
    EXPECT_EQ(s.make_node(1, a, b), n1);
    EXPECT_NE(s.make_node(1, b, a), n1);
    EXPECT_NO_THROW(s.make_node(0, n1, a));
    EXPECT_THROW(s.make_node(1, n1, a), DDError);
    EXPECT_THROW(s.make_node(2, n1, a), DDError);
    EXPECT_THROW(s.make_node(kLeafVar, a, b), DDError);
}

TEST(ExampleVector, NodeCountsAndEvaluation)
{
    const PrecConfig cfg(53);
    NodeStore exact(cfg, 0.0);
    const VectorDD a = from_dense(exact, example_vector(cfg), 3);
    EXPECT_EQ(count_nodes(exact, a.root), 10U);
    const std::uint8_t path[] = {1, 0, 0};
    EXPECT_EQ(eval(exact, a.root, path).re.to_double(), 3.0);
    EXPECT_EQ(eval_index(exact, a, 4).re.to_double(), 3.0);

    NodeStore merged(cfg, 1e-15);
    const VectorDD b = from_dense(merged, example_vector(cfg), 3);
    EXPECT_EQ(count_nodes(merged, b.root), 8U);
    EXPECT_EQ(eval_index(merged, b, 7).re.to_double(), 2.0);

    // Same structure built by hand: x0 -> (x1: leaf 1 | leaf -2), (x1: x2(3,1) | leaf 2).
    NodeStore manual(cfg, 1e-15);
    const NodeRef one = manual.make_leaf(1.0);
    const NodeRef m2 = manual.make_leaf(-2.0);
    const NodeRef three = manual.make_leaf(3.0);
    const NodeRef two = manual.make_leaf(2.0);
    const NodeRef root = manual.make_node(0, manual.make_node(1, one, m2),
                                          manual.make_node(1, manual.make_node(2, three, one), two));
    EXPECT_EQ(count_nodes(manual, root), 8U);
    EXPECT_EQ(from_dense(manual, example_vector(cfg), 3).root, root);
}

TEST(ExampleVector, DoublingWithPlus)
{
    const PrecConfig cfg(53);
    NodeStore s(cfg, 0.0);
    const VectorDD a = from_dense(s, example_vector(cfg), 3);
    const VectorDD twice = plus(s, a, a);
    const auto expected = reals(cfg, {2, 2, -4, -4, 6, 2, 4, 4.0000000000000008});
    EXPECT_TRUE(oracle::identical(to_dense(s, twice), expected));
}

TEST(Plus, ZeroIsIdentity)
{
    const PrecConfig cfg(53);
    NodeStore s(cfg, 0.0);
    std::mt19937_64 rng(4);
    const VectorDD v = from_dense(s, oracle::random_dense(rng, cfg, 16, 5, 0.3), 4);
    EXPECT_EQ(plus(s, v, VectorDD{s.zero(), 4}).root, v.root);
    EXPECT_EQ(plus(s, VectorDD{s.zero(), 4}, v).root, v.root);
}

TEST(Plus, MatchesDenseRoundedAddition)
{
    std::mt19937_64 rng(12);
    for (int b : {10, 24, 53}) {
        const PrecConfig cfg(b);
        for (int trial = 0; trial < 200; ++trial) {
            NodeStore s(cfg, 0.0);
            const auto x = oracle::random_dense(rng, cfg, 16, 4, 0.2);
            const auto y = oracle::random_dense(rng, cfg, 16, 4, 0.2);
            const VectorDD sum = plus(s, from_dense(s, x, 4), from_dense(s, y, 4));
            ASSERT_TRUE(oracle::identical(to_dense(s, sum), oracle::add(x, y)));
        }
    }
}

TEST(Plus, RejectsMismatchedSizes)
{
    NodeStore s(PrecConfig(53), 0.0);
    EXPECT_THROW(plus(s, basis_vector(s, 2, 0), basis_vector(s, 3, 0)), DDError);
}

TEST(Multiply, IdentityIsExact)
{
    const PrecConfig cfg(53);
    std::mt19937_64 rng(8);
    for (unsigned n = 1; n <= 5; ++n) {
        NodeStore s(cfg, 0.0);
        const std::size_t dim = std::size_t{1} << n;
        std::vector<PrecComplex> id(dim * dim, PrecComplex(cfg));
        for (std::size_t i = 0; i < dim; ++i) {
            id[i * dim + i] = PrecComplex::from_doubles(cfg, 1.0);
        }
        const auto v = oracle::random_dense(rng, cfg, dim, dim, 0.2);
        const VectorDD vd = from_dense(s, v, n);
        const VectorDD y = multiply(s, from_dense_matrix(s, id, n), vd);
        EXPECT_EQ(y.root, vd.root);
    }
}

TEST(Multiply, HadamardPairOnBasisState)
{
    const PrecConfig cfg(53);
    NodeStore s(cfg, 0.0);
    const MatrixDD h2 = from_dense_matrix(s, hadamard_power_dense(cfg, 2), 2);
    const VectorDD y = multiply(s, h2, basis_vector(s, 2, 0));
    const auto dense = to_dense(s, y);
    const PrecValue half = sqrt_half(cfg) * sqrt_half(cfg);
    for (const auto& z : dense) {
        EXPECT_EQ(z.re, half);
        EXPECT_TRUE(z.im.is_zero());
    }
    EXPECT_NEAR(half.to_double(), 0.5, 0x1p-53);
}

TEST(Multiply, HadamardPowerOnUniformState)
{
    for (int b : {24, 53}) {
        const PrecConfig cfg(b);
        const double eps = cfg.unit_roundoff();
        for (unsigned n = 1; n <= 6; ++n) {
            NodeStore s(cfg, 0.0);
            const auto m = hadamard_power_dense(cfg, n);
            // Uniform entries: the same magnitude as the matrix entries.
            const VectorDD u{s.make_leaf(m[0]), n};
            EXPECT_EQ(count_nodes(s, u.root), 1U);
            const auto y = to_dense(s, multiply(s, from_dense_matrix(s, m, n), u));
            // Exact result on the stored operands: 2^n * mag^2 (mag is itself rounded).
            const PrecConfig wide(256);
            const PrecValue mag = round_to(wide, m[0].re);
            const PrecValue exact = scale2(mag * mag, n);
            const double slack = (n + 1) * eps * 1.01;
            EXPECT_LE(std::fabs((round_to(wide, y[0].re) - exact).to_double()), slack);
            for (std::size_t i = 1; i < y.size(); ++i) {
                EXPECT_LE(modulus(y[i]), slack);
            }
        }
    }
}

TEST(Multiply, MatchesTreeSumOracle)
{
    std::mt19937_64 rng(2024);
    for (int b : {10, 24, 53}) {
        const PrecConfig cfg(b);
        for (unsigned n = 1; n <= 4; ++n) {
            const std::size_t dim = std::size_t{1} << n;
            for (int trial = 0; trial < 40; ++trial) {
                NodeStore s(cfg, 0.0);
                const auto m = oracle::random_dense(rng, cfg, dim * dim, 6, 0.3);
                const auto v = oracle::random_dense(rng, cfg, dim, 4, 0.2);
                const VectorDD y = multiply(s, from_dense_matrix(s, m, n), from_dense(s, v, n));
                ASSERT_TRUE(oracle::identical(to_dense(s, y), oracle::tree_matvec(m, v)))
                    << "b=" << b << " n=" << n << " trial=" << trial;
            }
        }
    }
}

TEST(Multiply, CacheIsTransparent)
{
    std::mt19937_64 rng(31);
    for (double delta : {0.0, 1e-3}) {
        const PrecConfig cfg(24);
        for (int trial = 0; trial < 30; ++trial) {
            const unsigned n = 4;
            const auto m = oracle::random_dense(rng, cfg, 256, 3, 0.3);
            const auto v = oracle::random_dense(rng, cfg, 16, 3, 0.2);
            NodeStore cached(cfg, delta);
            NodeStore plain(cfg, delta, StoreOptions{false});
            const auto y1 = to_dense(cached, multiply(cached, from_dense_matrix(cached, m, n), from_dense(cached, v, n)));
            const auto y2 = to_dense(plain, multiply(plain, from_dense_matrix(plain, m, n), from_dense(plain, v, n)));
            ASSERT_TRUE(oracle::identical(y1, y2));
            EXPECT_GT(cached.stats().cache_lookups, 0U);
            EXPECT_EQ(plain.stats().cache_lookups, 0U);
        }
    }
}

TEST(Multiply, RejectsDimensionMismatch)
{
    const PrecConfig cfg(53);
    NodeStore s(cfg, 0.0);
    const MatrixDD m = from_dense_matrix(s, hadamard_power_dense(cfg, 2), 2);
    EXPECT_THROW(multiply(s, m, basis_vector(s, 3, 0)), DDError);
}

TEST(Multiply, StochasticConformance)
{
    // Column-stochastic M, probability vector V; error vs an exact replay.
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double delta : {0.0, 1e-12}) {
        for (unsigned n = 1; n <= 6; ++n) {
            const PrecConfig cfg(53);
            const std::size_t dim = std::size_t{1} << n;
            for (int trial = 0; trial < 5; ++trial) {
                std::vector<double> m(dim * dim);
                for (std::size_t c = 0; c < dim; ++c) {
                    double total = 0.0;
                    for (std::size_t r = 0; r < dim; ++r) {
                        m[r * dim + c] = unit(rng) < 0.5 ? 0.0 : unit(rng);
                        total += m[r * dim + c];
                    }
                    for (std::size_t r = 0; r < dim; ++r) {
                        m[r * dim + c] = total > 0 ? m[r * dim + c] / total : (r == c ? 1.0 : 0.0);
                    }
                }
                std::vector<double> v(dim);
                double total = 0.0;
                for (auto& x : v) {
                    x = unit(rng);
                    total += x;
                }
                std::vector<PrecComplex> md, vd;
                for (double x : m) {
                    md.push_back(PrecComplex::from_doubles(cfg, x));
                }
                for (double x : v) {
                    vd.push_back(PrecComplex::from_doubles(cfg, x / total));
                }

                NodeStore s(cfg, delta);
                const MatrixDD mm = from_dense_matrix(s, md, n);
                const VectorDD vv = from_dense(s, vd, n);
                const VectorDD y = multiply(s, mm, vv);

                // Exact products and sums of the stored (b-bit) operands.
                NodeStore wide(PrecConfig(128), 0.0);
                const VectorDD yr = multiply(wide, MatrixDD{copy_into(s, mm.root, wide), n},
                                             VectorDD{copy_into(s, vv.root, wide), n});
                const auto got = to_dense(s, y);
                const auto ref = to_dense(wide, yr);
                const double bound = (n + 1) * cfg.unit_roundoff() + std::ldexp(delta, n + 1) + 0x1p-100;
                for (std::size_t i = 0; i < dim; ++i) {
                    EXPECT_LE(distance(got[i], ref[i]), bound) << "n=" << n << " i=" << i;
                }
            }
        }
    }
}

TEST(Canonicity, RebuildsShareNodes)
{
    std::mt19937_64 rng(55);
    const PrecConfig cfg(53);
    NodeStore s(cfg, 0.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto x = oracle::random_dense(rng, cfg, 32, 4, 0.3);
        const VectorDD a = from_dense(s, x, 5);
        const VectorDD b = from_dense(s, x, 5);
        EXPECT_EQ(a.root, b.root);
        // x + 0 and x rebuilt through plus of its two halves.
        std::vector<PrecComplex> lo(x), hi(x);
        for (std::size_t i = 0; i < 32; ++i) {
            (i < 16 ? hi : lo)[i] = PrecComplex(cfg);
        }
        EXPECT_EQ(plus(s, from_dense(s, lo, 5), from_dense(s, hi, 5)).root, a.root);
    }
}

TEST(Dense, EvalAgreesWithExpansion)
{
    std::mt19937_64 rng(66);
    const PrecConfig cfg(24);
    for (int trial = 0; trial < 50; ++trial) {
        NodeStore s(cfg, 0.0);
        const auto x = oracle::random_dense(rng, cfg, 16, 3, 0.2);
        const VectorDD v = from_dense(s, x, 4);
        const auto dense = to_dense(s, v);
        for (std::uint64_t i = 0; i < 16; ++i) {
            std::uint8_t bits[4];
            for (unsigned q = 0; q < 4; ++q) {
                bits[q] = (i >> (3 - q)) & 1U;
            }
            EXPECT_EQ(eval(s, v.root, bits), dense[i]);
            EXPECT_EQ(dense[i], x[i]);
        }
    }
}

TEST(Dense, ConstantVectorIsOneLeaf)
{
    const PrecConfig cfg(53);
    NodeStore s(cfg, 0.0);
    const std::vector<PrecComplex> c(64, PrecComplex::from_doubles(cfg, 0.125, 0.5));
    const VectorDD v = from_dense(s, c, 6);
    EXPECT_TRUE(s.is_leaf(v.root));
    EXPECT_EQ(count_nodes(s, v.root), 1U);
    const std::uint8_t any[6] = {1, 0, 1, 1, 0, 1};
    EXPECT_EQ(eval(s, v.root, any), c[0]);
}

TEST(Dense, MatrixRoundTripAndErrors)
{
    std::mt19937_64 rng(67);
    const PrecConfig cfg(53);
    NodeStore s(cfg, 0.0);
    const auto m = oracle::random_dense(rng, cfg, 64, 5, 0.3);
    const MatrixDD md = from_dense_matrix(s, m, 3);
    EXPECT_TRUE(oracle::identical(to_dense_matrix(s, md), m));
    for (std::uint64_t r = 0; r < 8; ++r) {
        for (std::uint64_t c = 0; c < 8; ++c) {
            EXPECT_EQ(eval_entry(s, md, r, c), m[r * 8 + c]);
        }
    }
    EXPECT_THROW(from_dense(s, m, 5), DDError);
    EXPECT_THROW(from_dense_matrix(s, m, 2), DDError);
    const std::uint8_t short_path[2] = {0, 1};
    const VectorDD v = from_dense(s, oracle::random_dense(rng, cfg, 8, 8, 0.0), 3);
    EXPECT_THROW(eval(s, v.root, short_path), DDError);
}

TEST(Store, BasisVectorAndLiveCounts)
{
    NodeStore s(PrecConfig(53), 0.0);
    const VectorDD e = basis_vector(s, 4, 0b1010);
    EXPECT_EQ(count_nodes(s, e.root), 4U + 2U);
    const auto dense = to_dense(s, e);
    for (std::size_t i = 0; i < 16; ++i) {
        EXPECT_EQ(dense[i].re.to_double(), i == 0b1010 ? 1.0 : 0.0);
    }
    s.register_root(e.root);
    EXPECT_EQ(s.live_nodes(), 6U);
    EXPECT_EQ(s.peak_nodes(), 6U);
    s.release_root(e.root);
    EXPECT_EQ(s.live_nodes(), 0U);
    EXPECT_EQ(s.peak_nodes(), 6U);
    EXPECT_THROW(s.release_root(e.root), DDError);
    EXPECT_THROW(basis_vector(s, 2, 4), DDError);
}

TEST(Store, CopyIntoWiderStoreIsExact)
{
    std::mt19937_64 rng(68);
    const PrecConfig cfg(24);
    NodeStore s(cfg, 0.0);
    NodeStore wide(PrecConfig(128), 0.0);
    const auto x = oracle::random_dense(rng, cfg, 32, 6, 0.2);
    const VectorDD v = from_dense(s, x, 5);
    const VectorDD w{copy_into(s, v.root, wide), 5};
    const auto back = to_dense(wide, w);
    for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_EQ(back[i], x[i]);
    }
    EXPECT_EQ(count_nodes(wide, w.root), count_nodes(s, v.root));
}

TEST(Dot, DrawingConventions)
{
    const PrecConfig cfg(53);
    NodeStore s(cfg, 0.0);
    const VectorDD v = from_dense(s, example_vector(cfg), 3);
    const std::string dot = to_dot(s, v.root);
    EXPECT_NE(dot.find("digraph"), std::string::npos);
    EXPECT_NE(dot.find("label=\"x0\""), std::string::npos);
    EXPECT_NE(dot.find("style=dashed"), std::string::npos);
    EXPECT_NE(dot.find("style=solid"), std::string::npos);
    EXPECT_NE(dot.find("label=\"2.0000000000000004\""), std::string::npos);
    EXPECT_NE(dot.find("label=\"-2\""), std::string::npos);
}
