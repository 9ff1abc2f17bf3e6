#include "bwshrink/besov.hpp"
#include "bwshrink/checks.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace bwshrink;

namespace {

// Direct evaluation of the sequence norm for finite p and q.
double brute_norm(const CoefficientTree& t, double s, double p, double q)
{
    double outer = 0.0;
    for (int j = 0; j <= t.j_max(); ++j) {
        double inner = 0.0;
        for (double v : t.level(j))
            inner += std::pow(std::abs(v), p);
        outer += std::pow(std::pow(2.0, j * (s + 0.5 - 1.0 / p)) * std::pow(inner, 1.0 / p), q);
    }
    return std::abs(t.alpha00()) + std::pow(outer, 1.0 / q);
}

} // namespace

TEST_CASE("BesovIndex validation")
{
    CHECK_NOTHROW(BesovIndex(1.0, 2.0, 2.0, 1.0));
    CHECK_NOTHROW(BesovIndex(0.6, 1.0, kInfinity, 1.0));
    CHECK_THROWS_AS(BesovIndex(1.0, 0.5, 2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(BesovIndex(0.5, 1.0, 2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(BesovIndex(1.0, 2.0, 0.9, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(BesovIndex(1.0, 2.0, 2.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(BesovIndex(0.0, 4.0, 2.0, 1.0), std::invalid_argument);
    CHECK(BesovIndex::validate(0.2, 1.0, 1.0, 1.0).find("0.5") != std::string::npos);
}

TEST_CASE("besov_norm worked examples")
{
    CHECK(besov_norm(CoefficientTree(4), BesovIndex(1.0, 2.0, 2.0)) == 0.0);

    const auto a = CoefficientTree::from_levels(0.5, {{1.0}});
    CHECK(besov_norm(a, BesovIndex(0.5, 2.0, 2.0)) == doctest::Approx(1.5).epsilon(1e-15));

    const auto b = CoefficientTree::from_levels(0.0, {{3.0}, {1.0, 1.0}});
    CHECK(besov_norm(b, BesovIndex(1.0, 1.0, 1.0)) == doctest::Approx(3.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(besov_norm(b, BesovIndex(1.0, 1.0, 1.0)) == doctest::Approx(brute_norm(b, 1.0, 1.0, 1.0)).epsilon(1e-14));
}

TEST_CASE("besov_norm against direct summation")
{
    SplitMix64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int j_max = static_cast<int>(rng() % 8);
        CoefficientTree t(j_max, rng.normal());
        for (double& v : t.flat())
            v = rng.normal() * std::exp2(-0.7 * static_cast<double>(rng() % 6));
        const double p = 1.0 + 4.0 * rng.uniform();
        const double q = 1.0 + 4.0 * rng.uniform();
        const double s = std::max(0.0, 1.0 / p - 0.5) + 0.1 + rng.uniform();
        CHECK(besov_norm(t, BesovIndex(s, p, q)) == doctest::Approx(brute_norm(t, s, p, q)).epsilon(1e-12));
    }
}

TEST_CASE("sup branches")
{
    const auto t = CoefficientTree::from_levels(0.25, {{3.0}, {1.0, -2.0}});
    // q = inf: sup over levels; p = inf: max within a level
    const double e = 1.0 + 0.5 - 0.5;
    const double level1 = std::exp2(e) * std::sqrt(5.0);
    CHECK(besov_norm(t, BesovIndex(1.0, 2.0, kInfinity)) == doctest::Approx(0.25 + std::max(3.0, level1)));
    const double e_inf = 1.5;
    CHECK(besov_norm(t, BesovIndex(1.0, kInfinity, 1.0)) == doctest::Approx(0.25 + 3.0 + std::exp2(e_inf) * 2.0));
}

TEST_CASE("in_ball is strict")
{
    const BesovIndex idx(0.5, 2.0, 2.0, 1.5);
    CHECK(in_ball(CoefficientTree(3), idx));
    const auto a = CoefficientTree::from_levels(0.5, {{1.0}});
    CHECK_FALSE(in_ball(a, idx));

    const auto b = CoefficientTree::from_levels(0.0, {{0.3}, {0.2, -0.1}});
    const double crossing = idx.radius() / besov_norm(b, idx);
    CHECK(in_ball(0.99 * crossing * b, idx));
    CHECK_FALSE(in_ball(1.01 * crossing * b, idx));
}

TEST_CASE("tail_energy")
{
    CoefficientTree t(3);
    t.level(2)[1] = 3.0;
    CHECK(tail_energy(t, 1) == 9.0);
    CHECK(tail_energy(t, 2) == 0.0);

    SplitMix64 rng(5);
    CoefficientTree r(5, 2.0);
    double sum = 0.0;
    for (double& v : r.flat()) {
        v = rng.normal();
        sum += v * v;
    }
    CHECK(tail_energy(r, -1) == doctest::Approx(sum).epsilon(1e-14));
}

TEST_CASE("generated truths have geometric tails")
{
    for (double p : {1.0, 2.0, 3.0}) {
        TruthSpec spec;
        spec.besov = BesovIndex(1.0, p, 2.0, 1.0);
        spec.j_max = 12;
        const CoefficientTree t = make_truth(spec, 3);
        const double s_prime = p >= 2.0 ? 1.0 : 1.0 + 0.5 - 1.0 / p;
        // direct per-level sums, independent of fitted_tail_constant's accumulation
        double C = 0.0;
        for (int J = 0; J <= 12; ++J) {
            double tail = 0.0;
            for (int j = J + 1; j <= 12; ++j)
                for (double v : t.level(j))
                    tail += v * v;
            C = std::max(C, tail * std::exp2(2.0 * J * s_prime));
        }
        CHECK(fitted_tail_constant(t, spec.besov) == doctest::Approx(C).epsilon(1e-12));
        for (int J = 0; J <= 12; ++J)
            CHECK(tail_energy(t, J) <= C * std::exp2(-2.0 * J * s_prime) * (1.0 + 1e-12));
    }
}

TEST_CASE("make_truth")
{
    for (auto kind : {TruthKind::level_uniform, TruthKind::level_sparse, TruthKind::dwt_of_signal}) {
        for (double q : {1.0, 2.0, kInfinity}) {
            TruthSpec spec;
            spec.kind = kind;
            spec.besov = BesovIndex(1.0, kind == TruthKind::level_sparse ? 1.0 : 2.0, q, 2.0);
            spec.j_max = 9;
            spec.alpha00 = 0.3;
            const CoefficientTree t = make_truth(spec, 17);
            CHECK(in_ball(t, spec.besov));
            CHECK(std::abs(besov_norm(t, spec.besov) - 0.9 * 2.0) <= 1e-9 * 2.0);
            CHECK(t.alpha00() == 0.3);
            CHECK(make_truth(spec, 17) == t);
        }
    }

    TruthSpec spec;
    spec.kind = TruthKind::level_uniform;
    spec.besov = BesovIndex(1.0, 2.0, 2.0, 1.0);
    spec.j_max = 4;
    const CoefficientTree t = make_truth(spec, 1);
    // level-uniform shape: all entries within a level are equal
    for (int j = 0; j <= 4; ++j)
        for (double v : t.level(j))
            CHECK(v == t.level(j)[0]);
    CHECK(t.level(1)[0] / t.level(0)[0] == doctest::Approx(std::exp2(-(1.0 + 0.5 + 0.01))));
}

TEST_CASE("level-sparse sup-norm example")
{
    TruthSpec spec;
    spec.kind = TruthKind::level_sparse;
    spec.besov = BesovIndex(1.0, 1.0, kInfinity, 1.0);
    spec.decay = 0.0;
    spec.alpha00 = 0.2;
    spec.j_max = 6;
    const CoefficientTree t = make_truth(spec, 8);
    const double c = 0.9 - 0.2;
    for (int j = 0; j <= 6; ++j) {
        int nonzero = 0;
        for (double v : t.level(j))
            if (v != 0.0) {
                ++nonzero;
                CHECK(std::abs(v) * std::exp2(j * 0.5) == doctest::Approx(c).epsilon(1e-8));
            }
        CHECK(nonzero == 1);
    }

    const CoefficientTree same = make_truth(spec, 8);
    const CoefficientTree other = make_truth(spec, 9);
    CHECK(same == t);
    bool positions_differ = false;
    for (int j = 1; j <= 6; ++j)
        for (std::size_t k = 0; k < level_width(j); ++k)
            positions_differ = positions_differ || ((t.level(j)[k] != 0.0) != (other.level(j)[k] != 0.0));
    CHECK(positions_differ);
}

TEST_CASE("make_truth rejects unreachable targets")
{
    TruthSpec spec;
    spec.alpha00 = 0.95;
    CHECK_THROWS_AS(make_truth(spec, 1), std::invalid_argument);
    spec.alpha00 = 0.0;
    spec.margin = 1.0;
    CHECK_THROWS_AS(make_truth(spec, 1), std::invalid_argument);
    CHECK_THROWS_AS(parse_truth_kind("uniform"), std::invalid_argument);
    CHECK(parse_truth_kind(to_string(TruthKind::dwt_of_signal)) == TruthKind::dwt_of_signal);
}

TEST_CASE("embedding properties on random trees")
{
    const EmbeddingViolations ev = besov_property_sweep(123, 300);
    CHECK(ev.trees == 300);
    CHECK(ev.homogeneity == 0);
    CHECK(ev.triangle == 0);
    CHECK(ev.projection == 0);
    CHECK(ev.level_l2 == 0);
    CHECK(ev.level_scaled == 0);
    CHECK(ev.chain == 0);
}

TEST_CASE("chain bound is tight for a single level-0 coefficient")
{
    const auto t = CoefficientTree::from_levels(0.0, {{2.0}, {0.0, 0.0}});
    for (double q : {1.0, 2.0, kInfinity}) {
        const BesovIndex idx(1.0, 2.0, q);
        CHECK(besov_detail_norm(t, idx, 0) == doctest::Approx(embedding_chain_bound(t, idx, 0)));
    }
}
