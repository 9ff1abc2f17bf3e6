#ifndef BWSHRINK_CHECKS_HPP
#define BWSHRINK_CHECKS_HPP

#include "bwshrink/rng.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace bwshrink {

struct CheckRow {
    std::string name;
    std::string measured;   // the statistic that was compared
    std::string threshold;
    bool pass = false;
};

/// Numeric probes behind the rate results: gamma-function inequality and
/// closed forms, prior tail bookkeeping, level-norm embeddings, the median
/// bound and rate-formula sanity. Deterministic given the seed.
std::vector<CheckRow> run_checks(Seed seed, int random_trees = 1000, int random_posteriors = 10000);

void print_check_table(std::ostream& os, const std::vector<CheckRow>& rows);

bool all_passed(const std::vector<CheckRow>& rows);

/// Grid behind the gamma inequality: a in {0.5, 1, 2, 5, 10, 50, 100}, 400
/// values of b spaced logarithmically over [0.1, 50].
std::vector<double> gamma_check_a_values();
std::vector<double> gamma_check_b_values();

/// Smallest gamma_tail_bound_ratio over the grid.
double min_gamma_tail_ratio();

struct EmbeddingViolations {
    int homogeneity = 0;
    int triangle = 0;
    int projection = 0;
    int level_l2 = 0;       // ||b_j||_p <= ||b_j||_2, p >= 2
    int level_scaled = 0;   // ||b_j||_p <= 2^{j(1/p-1/2)} ||b_j||_2, p < 2
    int chain = 0;
    int trees = 0;

    int total() const { return homogeneity + triangle + projection + level_l2 + level_scaled + chain; }
};

/// Norm properties on random trees with random (s, p, q); slack is relative.
EmbeddingViolations besov_property_sweep(Seed seed, int trees, double slack = 1e-10);

/// Count of random posteriors with |median| > 2 sqrt(omega (m^2 + v)).
int median_bound_violations(Seed seed, int count);

} // namespace bwshrink

#endif // BWSHRINK_CHECKS_HPP
