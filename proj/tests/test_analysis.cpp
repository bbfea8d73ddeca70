#include "qmtbdd/analysis.hpp"

#include "oracle/dense_oracle.hpp"
#include "table_values.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <random>

using namespace qmtbdd;

namespace {

std::string sci4(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

double slope(const std::vector<double>& xs, const std::vector<double>& ys)
{
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    return num / den;
}

} // namespace

TEST(Bounds, ReproduceWorstCaseTable)
{
    for (const auto& row : tables::kBoundRows) {
        const BoundReport r = bound_unit(row.n, tables::kEps, tables::kMergeDelta);
        EXPECT_EQ(sci4(r.term_fp), row.term_fp) << row.n;
        EXPECT_EQ(sci4(r.term_merge), row.term_merge) << row.n;
        EXPECT_EQ(r.total, r.term_fp + r.term_merge);
        EXPECT_EQ(r.c, 1.0);
    }
}

TEST(Bounds, ZeroDeltaHasNoMergeTerm)
{
    for (unsigned n : {1U, 7U, 60U}) {
        const BoundReport r = bound_unit(n, 0x1p-53, 0.0);
        EXPECT_EQ(r.term_merge, 0.0);
        EXPECT_EQ(r.higher_merge, 0.0);
        EXPECT_EQ(r.total, r.term_fp);
    }
}

TEST(Bounds, HigherOrderTermsAreSecondOrder)
{
    const double eps = 0x1p-24;
    for (unsigned n = 1; n <= 40; ++n) {
        const BoundReport r = bound_unit(n, eps, 1e-9);
        const double k = n + 1;
        // (1+eps)^k - 1 - k eps ~ k(k-1)/2 eps^2.
        EXPECT_NEAR(r.higher_fp, k * (k - 1) / 2 * eps * eps, 1e-3 * k * (k - 1) / 2 * eps * eps + 1e-300);
        EXPECT_GE(r.higher_merge, 0.0);
        EXPECT_LT(r.higher_merge, r.term_merge * (n + 1) * eps * 2);
    }
}

TEST(Bounds, GeneralBoundUsesEntryMagnitudes)
{
    const BoundReport r = bound_general(4, 1e-7, 1e-9, 0.5, 0.25);
    EXPECT_DOUBLE_EQ(r.c, 16 * 0.5 * 0.25);
    EXPECT_DOUBLE_EQ(r.term_fp, 5 * 1e-7 * 2.0);
    EXPECT_DOUBLE_EQ(r.term_merge, 1e-9 * 32);
    EXPECT_THROW(bound_general(4, 1e-7, 1e-9, -1, 1), AnalysisError);
    EXPECT_THROW(bound_unit(0, 1e-7, 0), AnalysisError);
    EXPECT_THROW(bound_unit(3, -1e-7, 0), AnalysisError);
    EXPECT_THROW(bound_unit(3, 1e-7, NAN), AnalysisError);
}

TEST(Suggest, ReproduceThresholdTable)
{
    for (const auto& row : tables::kDeltaRows) {
        EXPECT_EQ(sci4(suggest_delta(row.n, tables::kEps, 1e-3)), row.for_1e3) << row.n;
        EXPECT_EQ(sci4(suggest_delta(row.n, tables::kEps, 1e-6)), row.for_1e6) << row.n;
    }
}

TEST(Suggest, BoundaryAndErrors)
{
    const double eps = tables::kEps;
    EXPECT_EQ(suggest_delta(10, eps, 11 * eps), 0.0);
    EXPECT_THROW(suggest_delta(10, eps, 10 * eps), AnalysisError);
    EXPECT_THROW(suggest_delta(10, eps, NAN), AnalysisError);
    EXPECT_EQ(suggest_bits(0x1p-10), 11);
    EXPECT_EQ(suggest_bits(1e-15), 50);
    EXPECT_EQ(suggest_bits(0.5), 2);
    EXPECT_EQ(suggest_bits(0.75), 1);
    EXPECT_THROW(suggest_bits(0.0), AnalysisError);
    EXPECT_THROW(suggest_bits(-1e-3), AnalysisError);
}

TEST(Suggest, BitsAgreeWithLog2)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> expo(-60.0, 2.0);
    for (int i = 0; i < 10000; ++i) {
        const double delta = std::exp2(expo(rng));
        const int b = suggest_bits(delta);
        const double l = std::log2(1.0 / delta);
        EXPECT_GT(b, l - 1e-9);
        EXPECT_LE(b - 1, l + 1e-9);
    }
}

TEST(Suggest, SuggestedDeltaMeetsTheAllowedError)
{
    for (double eps : {tables::kEps, 0x1p-24, 0x1p-53, 0x1p-112}) {
        for (unsigned n = 1; n <= 60; ++n) {
            for (double allowed : {1e-2, 1e-3, 1e-6, 1e-9, 1e-12}) {
                if (allowed < (n + 1) * eps) {
                    continue;
                }
                const double delta = suggest_delta(n, eps, allowed);
                EXPECT_GE(delta, 0.0);
                EXPECT_LE(bound_unit(n, eps, delta).total, allowed) << n << " " << allowed;
            }
        }
    }
}

TEST(Adversarial, LandsInPredictedWindow)
{
    const ErrorReport r = adversarial_run(10, 1e-6, 53);
    const double scale = 1e-6 * 1024;
    EXPECT_GE(r.max_error, 0.5 * scale);
    EXPECT_LE(r.max_error, 1.1 * scale);
    EXPECT_EQ(r.worst_index, 0U);
}

TEST(Adversarial, ErrorDoublesPerQubit)
{
    for (double delta : {1e-6, 1e-8}) {
        std::vector<double> xs, ys;
        for (unsigned n = 8; n <= 16; ++n) {
            const ErrorReport r = adversarial_run(n, delta, 53);
            EXPECT_GE(r.max_error, 0.5 * std::ldexp(delta, n));
            EXPECT_LE(r.max_error, 1.1 * std::ldexp(delta, n));
            xs.push_back(n);
            ys.push_back(std::log2(r.max_error));
        }
        const double s = slope(xs, ys);
        EXPECT_GE(s, 0.9);
        EXPECT_LE(s, 1.1);
    }
}

TEST(Adversarial, WithoutMergingStaysAtRoundingLevel)
{
    for (int b : {24, 53}) {
        for (unsigned n = 1; n <= 14; ++n) {
            const ErrorReport r = adversarial_run(n, 0.0, b);
            EXPECT_LE(r.max_error, (n + 1) * std::ldexp(1.0, -b) * 2) << "b=" << b << " n=" << n;
        }
    }
}

TEST(Adversarial, RejectsUnusableParameters)
{
    EXPECT_THROW(adversarial_run(25, 1e-6, 53), AnalysisError);
    EXPECT_THROW(adversarial_run(0, 1e-6, 53), AnalysisError);
    // 2^-20 is within delta of zero: no leaf can be seeded above it.
    EXPECT_THROW(adversarial_run(20, 1e-3, 53), AnalysisError);
}

TEST(Compare, ReferenceAgainstItselfIsExact)
{
    for (Family f : {Family::DJ, Family::QPE, Family::WState}) {
        const Circuit c = generate(f, 6, 1);
        const ErrorReport r = compare_to_reference(c, 0.0, ReferenceRun::kBits);
        EXPECT_EQ(r.max_error, 0.0);
        EXPECT_EQ(r.worst_index, 0U);
    }
}

TEST(Compare, MaxDifferenceAcrossStores)
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const unsigned n = 1 + trial % 6;
        const std::size_t dim = std::size_t{1} << n;
        NodeStore sa(PrecConfig(24), 0.0);
        NodeStore sb(PrecConfig(128), 0.0);
        const auto a = oracle::random_dense(rng, PrecConfig(24), dim, 3, 0.3);
        const auto b = oracle::random_dense(rng, PrecConfig(128), dim, 3, 0.3);
        const StateDifference d = max_difference(sa, from_dense(sa, a, n), sb, from_dense(sb, b, n));
        double worst = 0.0;
        std::uint64_t at = 0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double e = distance(round_to(PrecConfig(128), a[i]), b[i]);
            if (e > worst) {
                worst = e;
                at = i;
            }
        }
        EXPECT_EQ(d.max_error, worst);
        EXPECT_EQ(d.worst_index, at);
    }
    NodeStore s(PrecConfig(53), 0.0);
    EXPECT_THROW(max_difference(s, basis_vector(s, 2, 0), s, basis_vector(s, 3, 0)), AnalysisError);
}

TEST(Compare, DeutschJozsaErrorsStayTiny)
{
    for (unsigned n = 2; n <= 12; n += 2) {
        const Circuit c = gen_dj(n);
        const ReferenceRun ref(c);
        for (double delta : {0.0, 1e-15, 1e-12}) {
            EXPECT_LT(compare_to_reference(c, delta, 53, ref).max_error, 1e-12) << n << " " << delta;
        }
    }
}

TEST(Compare, WStateMergingShrinksTheDiagram)
{
    const Circuit c = gen_wstate(10);
    const ReferenceRun ref(c);
    const ErrorReport exact = compare_to_reference(c, 0.0, 53, ref);
    const ErrorReport merged = compare_to_reference(c, 1e-15, 53, ref);
    EXPECT_LT(merged.final_nodes, exact.final_nodes);
    EXPECT_LT(merged.max_error, 1e-9);
}

TEST(Compare, ReportsAreDeterministic)
{
    const Circuit c = gen_qpe_exact(8, 42);
    const ErrorReport a = compare_to_reference(c, 1e-9, 24);
    const ErrorReport b = compare_to_reference(c, 1e-9, 24);
    EXPECT_EQ(a.max_error, b.max_error);
    EXPECT_EQ(a.worst_index, b.worst_index);
    EXPECT_EQ(a.final_nodes, b.final_nodes);
    EXPECT_EQ(a.peak_nodes, b.peak_nodes);
    EXPECT_THROW(compare_to_reference(gen_dj(5), 0.0, 53, ReferenceRun(gen_dj(4))), AnalysisError);
}

TEST(PerGate, SingleProductsRespectTheBound)
{
    for (Family f : {Family::DJ, Family::QPE, Family::WState}) {
        for (unsigned n : {3U, 6U}) {
            const Circuit c = generate(f, n, 9);
            for (double delta : {0.0, 1e-12}) {
                for (int b : {24, 53}) {
                    const PerGateReport r = per_gate_check(c, delta, b);
                    EXPECT_EQ(r.gates, c.gates.size());
                    EXPECT_EQ(r.violations, 0U) << family_name(f) << " n=" << n << " delta=" << delta << " b=" << b;
                    EXPECT_LE(r.max_error, r.allowed);
                    EXPECT_LE(r.max_ratio, 1.0);
                    EXPECT_DOUBLE_EQ(r.allowed, bound_unit(n, std::ldexp(1.0, -b), delta).total + std::ldexp(1.0, 4 - b));
                }
            }
        }
    }
}

TEST(PerGate, RandomCircuitsRespectTheBound)
{
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 12; ++trial) {
        const unsigned n = 2 + trial % 6;
        const Circuit c = oracle::random_circuit(rng, n, 20);
        for (double delta : {0.0, 1e-12}) {
            EXPECT_EQ(per_gate_check(c, delta, 53).violations, 0U);
        }
    }
}

TEST(Sweep, GridOrderAndCount)
{
    SweepConfig cfg;
    cfg.families = {Family::DJ, Family::WState};
    cfg.n_min = 3;
    cfg.n_max = 5;
    cfg.deltas = {0.0, 1e-9};
    cfg.bits = {24, 53};
    cfg.seed = 4;
    std::size_t seen = 0;
    const auto recs = sweep(cfg, [&](const SweepRecord&) { ++seen; });
    ASSERT_EQ(recs.size(), 2U * 3 * 2 * 2);
    EXPECT_EQ(seen, recs.size());
    std::size_t i = 0;
    for (const char* fam : {"dj", "wstate"}) {
        for (unsigned n = 3; n <= 5; ++n) {
            for (double d : cfg.deltas) {
                for (int b : cfg.bits) {
                    EXPECT_EQ(recs[i].family, fam);
                    EXPECT_EQ(recs[i].n, n);
                    EXPECT_EQ(recs[i].delta, d);
                    EXPECT_EQ(recs[i].bits, b);
                    EXPECT_EQ(recs[i].seed, 4U);
                    EXPECT_EQ(recs[i].status, "ok");
                    EXPECT_EQ(recs[i].wall_ms, 0.0);
                    ++i;
                }
            }
        }
    }
}

TEST(Sweep, ParallelRunMatchesSerialRun)
{
    SweepConfig cfg;
    cfg.families = {Family::DJ, Family::QPE, Family::WState};
    cfg.n_min = 3;
    cfg.n_max = 7;
    cfg.deltas = {0.0, 1e-12, 1e-3};
    cfg.bits = {53};
    cfg.seed = 8;
    const auto serial = sweep(cfg);
    cfg.workers = 4;
    const auto parallel = sweep(cfg);
    ASSERT_EQ(serial.size(), parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        EXPECT_EQ(serial[i].family, parallel[i].family);
        EXPECT_EQ(serial[i].n, parallel[i].n);
        EXPECT_EQ(serial[i].delta, parallel[i].delta);
        EXPECT_EQ(serial[i].max_error, parallel[i].max_error);
        EXPECT_EQ(serial[i].worst_index, parallel[i].worst_index);
        EXPECT_EQ(serial[i].final_nodes, parallel[i].final_nodes);
        EXPECT_EQ(serial[i].peak_nodes, parallel[i].peak_nodes);
    }
}

TEST(Sweep, FailedPointsAreRecorded)
{
    SweepConfig cfg;
    cfg.families = {Family::DJ};
    cfg.n_min = 1;
    cfg.n_max = 2;
    cfg.deltas = {0.0};
    cfg.bits = {53};
    const auto recs = sweep(cfg);
    ASSERT_EQ(recs.size(), 2U);
    EXPECT_TRUE(std::isnan(recs[0].max_error));
    EXPECT_EQ(recs[0].status.rfind("error: ", 0), 0U);
    EXPECT_EQ(recs[1].status, "ok");

    cfg.deltas = {};
    EXPECT_THROW(sweep(cfg), AnalysisError);
    cfg.deltas = {-1.0};
    EXPECT_THROW(sweep(cfg), AnalysisError);
    cfg.deltas = {0.0};
    cfg.bits = {1};
    EXPECT_THROW(sweep(cfg), std::invalid_argument);
}
