#include "bwshrink/besov.hpp"
#include "bwshrink/priors.hpp"
#include "bwshrink/probes.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace bwshrink;

TEST_CASE("choose_alpha")
{
    CHECK(choose_alpha(1.0, 2.0) == 3.0);
    CHECK(choose_alpha(1.0, 1.0) == 2.0);
    CHECK(choose_alpha(0.5, 3.0) == 2.0);
    CHECK(choose_alpha(1.0, std::numeric_limits<double>::infinity()) == 3.0);
    CHECK(choose_alpha(1.0, 1.5) == doctest::Approx(4.0 - 2.0 / 1.5));
}

TEST_CASE("level_params")
{
    SpikeSlabPrior prior;
    prior.j_max = 5;
    CHECK(level_params(prior, 0).pi == 1.0);
    CHECK(level_params(prior, 0).a_sq == 1.0);
    CHECK(level_params(prior, 2).a_sq == 0.015625);
    CHECK(level_params(prior, 4).pi == doctest::Approx(0.25));
    CHECK_THROWS_AS(level_params(prior, 6), std::out_of_range);
    CHECK_THROWS_AS(level_params(prior, -1), std::out_of_range);

    prior.gamma = 0.0;
    prior.c_pi = 0.3;
    for (int j = 0; j <= 5; ++j)
        CHECK(level_params(prior, j).pi == 0.3);
}

TEST_CASE("prior validation")
{
    CHECK_THROWS(SpikeSlabPrior{1.0, 0.5, 1.0, 1.0, 3}.validate());
    CHECK_THROWS(SpikeSlabPrior{2.0, -0.1, 1.0, 1.0, 3}.validate());
    CHECK_THROWS(SpikeSlabPrior{2.0, 0.5, 0.0, 1.0, 3}.validate());
    CHECK_THROWS(SpikeSlabPrior{2.0, 0.5, 1.0, 1.5, 3}.validate());
    CHECK_THROWS(SievePrior{0.0, 3.0, 2}.validate());
    CHECK_THROWS(SievePrior{1.0, 1.0, 2}.validate());
    CHECK_THROWS(SievePrior{1.0, 3.0, -1}.validate());
}

TEST_CASE("sieve_weights")
{
    const auto w = sieve_weights(SievePrior{1.0, 3.0, 2});
    REQUIRE(w.size() == 3);
    CHECK(w[0] == doctest::Approx(4.0 / 7.0).epsilon(1e-15));
    CHECK(w[1] == doctest::Approx(2.0 / 7.0).epsilon(1e-15));
    CHECK(w[2] == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
    CHECK(sieve_weights(SievePrior{60.0, 3.0, 5})[0] == doctest::Approx(1.0));
    for (double mu : {0.1, 1.0, 3.3})
        for (int m_max : {0, 1, 7, 20}) {
            const auto v = sieve_weights(SievePrior{mu, 2.0, m_max});
            double sum = 0.0;
            for (std::size_t m = 0; m < v.size(); ++m) {
                CHECK(v[m] > 0.0);
                if (m > 0)
                    CHECK(v[m] < v[m - 1]);
                sum += v[m];
            }
            CHECK(std::abs(sum - 1.0) < 1e-14);
        }
}

TEST_CASE("spike-and-slab sampling frequencies and moments")
{
    const SpikeSlabPrior prior{3.0, 0.5, 1.0, 1.0, 4};
    const int draws = 100000;
    // level 2: pi = 1/2, a^2 = 1/64, 4 coefficients per draw
    double nonzero = 0.0;
    double sum_sq_nonzero = 0.0;
    double second_moment = 0.0;
    for (int d = 0; d < draws; ++d) {
        const CoefficientTree t = sample_spike_slab(prior, derive_seed(21, d));
        for (double v : t.level(2)) {
            if (v != 0.0) {
                nonzero += 1.0;
                sum_sq_nonzero += v * v;
            }
            second_moment += v * v;
        }
    }
    const double trials = 4.0 * draws;
    const double pi = 0.5;
    CHECK(std::abs(nonzero / trials - pi) < 4.0 * std::sqrt(pi * (1.0 - pi) / trials));
    CHECK(sum_sq_nonzero / nonzero == doctest::Approx(1.0 / 64.0).epsilon(0.05));
    CHECK(second_moment / trials == doctest::Approx(pi / 64.0).epsilon(0.05));

    CHECK(sample_spike_slab(prior, 5) == sample_spike_slab(prior, 5));

    const SpikeSlabPrior sparse{3.0, 20.0, 1.0, 1.0, 10};
    double sparse_nonzero = 0.0;
    double sparse_total = 0.0;
    for (int d = 0; d < draws; ++d) {
        const CoefficientTree t = sample_spike_slab(sparse, derive_seed(22, d));
        for (int j = 1; j <= 10; ++j) {
            for (double v : t.level(j))
                sparse_nonzero += v != 0.0 ? 1.0 : 0.0;
            sparse_total += static_cast<double>(level_width(j));
        }
    }
    CHECK(sparse_nonzero / sparse_total < 1e-4);

    const SpikeSlabPrior dense{3.0, 0.0, 1.0, 1.0, 6};
    for (int d = 0; d < 100; ++d)
        for (double v : sample_spike_slab(dense, derive_seed(23, d)).flat())
            CHECK(v != 0.0);
}

TEST_CASE("sieve sampling")
{
    const SievePrior prior{1.0, 3.0, 3};
    const auto w = sieve_weights(prior);
    std::vector<double> freq(4, 0.0);
    const int draws = 100000;
    int nonzero_above_model = 0;
    for (int d = 0; d < draws; ++d) {
        const SieveDraw s = sample_sieve(prior, derive_seed(31, d));
        freq[static_cast<std::size_t>(s.model)] += 1.0;
        REQUIRE(s.tree.j_max() == 3);
        for (int j = s.model + 1; j <= 3; ++j)
            for (double v : s.tree.level(j))
                nonzero_above_model += v != 0.0 ? 1 : 0;
    }
    CHECK(nonzero_above_model == 0);
    for (int m = 0; m <= 3; ++m) {
        const double p = w[m];
        CHECK(std::abs(freq[m] / draws - p) < 3.0 * std::sqrt(p * (1.0 - p) / draws));
    }
    const SievePrior single{1.0, 3.0, 0};
    CHECK(sample_sieve(single, 4).model == 0);
}

TEST_CASE("prior_mass_probe closed forms")
{
    // truth 0, J = 0, pi_0 = 1: P(a0^2 chi2_1 <= eps) = erf(sqrt(eps / (2 a0^2)))
    const SpikeSlabPrior prior{3.0, 0.5, 2.0, 1.0, 0};
    const CoefficientTree zero(0);
    for (double eps : {0.05, 0.5, 2.0}) {
        const PriorMassEstimate e = prior_mass_probe(prior, zero, eps, 0, 40000, 77);
        const double exact = std::log(std::erf(std::sqrt(eps / (2.0 * 2.0))));
        CHECK(std::abs(e.log_mass - exact) < 4.0 * e.log_mass_se + 1e-12);
        CHECK(e.reliable);
    }

    // eps far beyond the prior's spread: mass ~ 1
    SpikeSlabPrior wide{3.0, 0.5, 1.0, 1.0, 4};
    CoefficientTree truth(4);
    truth.level(1)[0] = 0.5;
    const PriorMassEstimate huge = prior_mass_probe(wide, truth, 1000.0, 4, 20000, 3);
    CHECK(huge.hits == huge.samples);
    CHECK(std::abs(huge.log_mass) < 4.0 * huge.log_mass_se);
}

TEST_CASE("prior_mass_probe agrees with plain prior sampling")
{
    const SpikeSlabPrior prior{2.0, 0.5, 1.0, 1.0, 2};
    CoefficientTree truth(2);
    truth.level(0)[0] = 0.4;
    truth.level(1)[1] = -0.2;
    truth.level(2)[3] = 0.1;
    const double eps = 0.15;

    const int draws = 400000;
    int hits = 0;
    for (int d = 0; d < draws; ++d) {
        const CoefficientTree b = sample_spike_slab(prior, derive_seed(41, d));
        hits += l2_distance_sq(b, truth) - std::pow(b.alpha00() - truth.alpha00(), 2) <= eps ? 1 : 0;
    }
    const double p = static_cast<double>(hits) / draws;
    const double log_se_plain = std::sqrt((1.0 - p) / (p * draws));

    const PriorMassEstimate e = prior_mass_probe(prior, truth, eps, 2, 50000, 9);
    CHECK(std::abs(e.log_mass - std::log(p)) < 4.0 * std::hypot(e.log_mass_se, log_se_plain));

    const SievePrior sieve{1.0, 2.0, 2};
    hits = 0;
    for (int d = 0; d < draws; ++d) {
        const SieveDraw s = sample_sieve(sieve, derive_seed(42, d));
        hits += l2_distance_sq(s.tree, truth) - std::pow(truth.alpha00(), 2) <= eps ? 1 : 0;
    }
    const double ps = static_cast<double>(hits) / draws;
    const double log_se_sieve = std::sqrt((1.0 - ps) / (ps * draws));
    const PriorMassEstimate es = prior_mass_probe(sieve, truth, eps, 2, 50000, 10);
    CHECK(std::abs(es.log_mass - std::log(ps)) < 4.0 * std::hypot(es.log_mass_se, log_se_sieve));
}

TEST_CASE("prior_mass_probe is monotone in eps and deterministic")
{
    const SpikeSlabPrior prior{3.0, 0.5, 1.0, 1.0, 4};
    CoefficientTree truth(4);
    for (int j = 0; j <= 4; ++j)
        truth.level(j)[0] = 0.3 * std::exp2(-1.5 * j);
    double prev = -std::numeric_limits<double>::infinity();
    for (double eps : {0.001, 0.003, 0.01, 0.03, 0.1, 0.3}) {
        const double lm = prior_mass_probe(prior, truth, eps, 3, 5000, 12).log_mass;
        CHECK(lm >= prev);
        prev = lm;
    }
    const auto a = prior_mass_probe(prior, truth, 0.01, 3, 3000, 12);
    const auto b = prior_mass_probe(prior, truth, 0.01, 3, 3000, 12);
    CHECK(a.log_mass == b.log_mass);
    CHECK(a.ess == b.ess);

    CHECK_THROWS(prior_mass_probe(prior, truth, 0.0, 3, 10, 1));
    CHECK_THROWS(prior_mass_probe(prior, truth, 0.1, -1, 10, 1));
    CHECK_FALSE(prior_mass_probe(prior, truth, 1e-6, 4, 200, 1).reliable);
}

TEST_CASE("prior tail expectation")
{
    // gamma = 0, c_pi = c_a = 1: sum_{j>J} 2^{j(1-alpha)}
    for (double alpha : {1.5, 2.0, 3.0})
        for (int J : {0, 2, 5}) {
            const SpikeSlabPrior prior{alpha, 0.0, 1.0, 1.0, 10};
            const double r = 1.0 - alpha;
            const double exact = std::exp2((J + 1) * r) / (1.0 - std::exp2(r));
            CHECK(prior_tail_expectation(prior, J) == doctest::Approx(exact).epsilon(1e-13));
        }
    // against a long direct sum with gamma > 0
    const SpikeSlabPrior prior{2.5, 0.7, 0.8, 0.6, 10};
    double direct = 0.0;
    for (int j = 4; j < 400; ++j)
        direct += std::exp2(j) * std::min(1.0, 0.6 * std::exp2(-0.7 * j)) * 0.8 * std::exp2(-2.5 * j);
    CHECK(prior_tail_expectation(prior, 3) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("prior tail Markov report")
{
    const SpikeSlabPrior prior{3.0, 0.5, 1.0, 1.0, 30};
    const BesovIndex idx(1.0, 2.0, 2.0);
    std::vector<std::int64_t> grid;
    for (int k = 3; k <= 9; ++k)
        grid.push_back(std::int64_t{1} << (3 * k));
    TruthSpec spec;
    spec.j_max = 12;
    const CoefficientTree truth = make_truth(spec, 1);
    const auto rows = tail_markov_report(prior, idx, grid, &truth);
    REQUIRE(rows.size() == grid.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].J == static_cast<int>(i) + 3);
        CHECK(rows[i].markov_ratio == doctest::Approx(8.0 * rows[i].prior_tail / rows[i].eps_sq));
        CHECK(rows[i].truth_tail == doctest::Approx(tail_energy(truth, rows[i].J)));
        if (i > 0)
            CHECK(rows[i].markov_ratio < rows[i - 1].markov_ratio);
    }
    CHECK(rows.back().markov_ratio < 0.1 * rows.front().markov_ratio);
    CHECK_THROWS_AS(tail_markov_report(SpikeSlabPrior{1.0, 0.5, 1.0, 1.0, 5}, idx, grid), std::invalid_argument);
}
