#include "bwshrink/coefficient_tree.hpp"
#include "bwshrink/sequence_model.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <limits>
#include <sstream>

using namespace bwshrink;

namespace {

CoefficientTree random_tree(Seed seed, int j_max)
{
    SplitMix64 rng(seed);
    CoefficientTree t(j_max, rng.normal());
    for (double& v : t.flat())
        v = rng.normal();
    return t;
}

} // namespace

TEST_CASE("tree layout and construction")
{
    CoefficientTree t(3, 0.5);
    CHECK(t.size() == 15);
    CHECK(t.level(2).size() == 4);
    CHECK(t.alpha00() == 0.5);
    CHECK(t.at(7, 3) == 0.0);

    auto from = CoefficientTree::from_levels(1.0, {{1.0}, {2.0, 3.0}});
    CHECK(from.j_max() == 1);
    CHECK(from.at(1, 1) == 3.0);

    CHECK_THROWS_AS(CoefficientTree(1, 0.0, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(CoefficientTree(0, 0.0, {std::numeric_limits<double>::quiet_NaN()}), std::invalid_argument);
    CHECK_THROWS(CoefficientTree::from_levels(0.0, {{1.0}, {2.0}}));
}

TEST_CASE("l2_distance_sq")
{
    const CoefficientTree t = random_tree(1, 4);
    CHECK(l2_distance_sq(t, t) == 0.0);

    auto a = CoefficientTree::from_levels(0.0, {{3.0}});
    CHECK(l2_distance_sq(a, CoefficientTree(0)) == 9.0);

    // zero-padding against direct summation
    const CoefficientTree s = random_tree(2, 2);
    const CoefficientTree l = random_tree(3, 5);
    double direct = (s.alpha00() - l.alpha00()) * (s.alpha00() - l.alpha00());
    for (int j = 0; j <= 5; ++j)
        for (std::size_t k = 0; k < level_width(j); ++k) {
            const double d = (j <= 2 ? s.level(j)[k] : 0.0) - l.level(j)[k];
            direct += d * d;
        }
    CHECK(l2_distance_sq(s, l) == doctest::Approx(direct).epsilon(1e-14));
    CHECK(l2_distance_sq(l, s) == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("truncate")
{
    const CoefficientTree t = random_tree(4, 5);
    CHECK(truncate(t, t.j_max()) == t);
    for (int J = -1; J <= 5; ++J) {
        const CoefficientTree p = truncate(t, J);
        CHECK(truncate(p, J) == p);
        CHECK(p.j_max() == t.j_max());
        // Pythagoras
        const double lhs = l2_norm_sq(t);
        const double rhs = l2_norm_sq(p) + l2_norm_sq(t - p);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * lhs);
    }
    CHECK(truncate(t, -1).flat()[0] == 0.0);
    CHECK(truncate(t, -1).alpha00() == t.alpha00());

    CoefficientTree level2(3);
    level2.level(2)[1] = 2.0;
    const CoefficientTree cut = truncate(level2, 1);
    CHECK(l2_norm_sq(cut) == 0.0);
    CHECK(l2_norm_sq(level2 - cut) == 4.0);
    CHECK_THROWS(truncate(t, -2));
}

TEST_CASE("tree text round trip and errors")
{
    const CoefficientTree t = random_tree(5, 4);
    std::stringstream ss;
    write_tree(ss, t);
    CHECK(read_tree(ss) == t);

    std::istringstream bad("1 0\n1\n2\n");
    try {
        read_tree(bad);
        FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    std::istringstream nan("0 0\nnan\n");
    CHECK_THROWS(read_tree(nan));
}

TEST_CASE("observation resolution")
{
    CHECK(observation_resolution(1) == 0);
    CHECK(observation_resolution(2) == 1);
    CHECK(observation_resolution(1024) == 10);
    CHECK(observation_resolution(1025) == 11);
    CHECK(observation_resolution(std::int64_t{1} << 40) == kMaxDefaultResolution);
}

TEST_CASE("simulate_observation contract")
{
    const CoefficientTree truth = random_tree(6, 3);
    const SequenceObservation obs = simulate_observation(truth, 16, 42);
    CHECK(obs.data.j_max() == 4);
    CHECK(obs.sigma_n * obs.sigma_n * 16.0 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(obs.data.alpha00() == truth.alpha00());
    CHECK(simulate_observation(truth, 16, 42).data == obs.data);
    CHECK_FALSE(simulate_observation(truth, 16, 43).data == obs.data);

    ObservationOptions noisy;
    noisy.noisy_alpha00 = true;
    CHECK(simulate_observation(truth, 16, 42, noisy).data.alpha00() != truth.alpha00());

    CHECK_THROWS_AS(simulate_observation(truth, 0, 1), std::invalid_argument);
    CoefficientTree bad(1);
    bad.flat()[0] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(simulate_observation(bad, 10, 1), std::invalid_argument);
}

TEST_CASE("noise variance and unbiasedness by Monte Carlo")
{
    const CoefficientTree zero(6);
    const std::int64_t n = 1024;
    const int reps = 10000;
    ObservationOptions opts;
    opts.resolution = 6;
    const std::size_t count = tree_size(6);
    std::vector<double> sum(count, 0.0);
    std::vector<double> sum_sq(count, 0.0);
    for (int r = 0; r < reps; ++r) {
        const auto obs = simulate_observation(zero, n, derive_seed(9, r), opts);
        auto f = obs.data.flat();
        for (std::size_t i = 0; i < count; ++i) {
            sum[i] += f[i];
            sum_sq[i] += f[i] * f[i];
        }
    }
    int bad_var = 0;
    int bad_mean = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const double mean = sum[i] / reps;
        const double var = sum_sq[i] / reps - mean * mean;
        bad_var += std::abs(var - 1.0 / n) > 0.1 / n ? 1 : 0;
        bad_mean += std::abs(mean) > 4.0 * std::sqrt(1.0 / n / reps) ? 1 : 0;
    }
    CHECK(bad_var == 0);
    CHECK(bad_mean <= 1);
}

TEST_CASE("noise scale at very large n")
{
    const CoefficientTree truth = random_tree(7, 6);
    const std::int64_t n = 1'000'000'000'000;
    ObservationOptions opts;
    opts.resolution = 6;
    const auto obs = simulate_observation(truth, n, 3, opts);
    double worst = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        worst = std::max(worst, std::abs(obs.data.flat()[i] - truth.flat()[i]));
    CHECK(worst < 10.0 / std::sqrt(static_cast<double>(n)));
}
