#ifndef BWSHRINK_PROBES_HPP
#define BWSHRINK_PROBES_HPP

#include "bwshrink/besov.hpp"
#include "bwshrink/coefficient_tree.hpp"
#include "bwshrink/priors.hpp"

#include <cstdint>
#include <vector>

namespace bwshrink {

/// Regularized lower incomplete gamma
///   F(b; a) = (1 / Gamma(a)) int_0^b x^{a-1} e^{-x} dx,
/// from the power series when b < a + 1 and from the Lentz continued
/// fraction of the complement otherwise.
double lower_incomplete_gamma_regularized(double b, double a);

/// log F(b; a); stays finite where F itself underflows.
double log_lower_incomplete_gamma_regularized(double b, double a);

/// F(b; a) / (e^a e^{-b} b^a a^{-a} a^{-1/2}), formed in log space.
/// Requires b > 0 and a >= 1/2.
double gamma_tail_bound_ratio(double b, double a);

/// E[ sum_{j > J} sum_k beta_jk^2 ] = sum_{j > J} 2^j pi_j a_j^2 under the
/// spike-and-slab prior, summed in closed form.
double prior_tail_expectation(const SpikeSlabPrior& prior, int J);

struct TailReportRow {
    std::int64_t n = 0;
    int J = 0;                         // floor(log2(n) / alpha)
    double eps_sq = 0.0;
    double prior_tail = 0.0;           // E[sum_{j>J,k} beta_jk^2]
    double markov_ratio = 0.0;         // 8 prior_tail / eps_sq
    double truth_tail = 0.0;           // sum_{j>J,k} (beta0_jk)^2, 0 without truth
    bool truth_tail_within = true;     // truth_tail <= eps_sq / 8
};

/// Tail bookkeeping at J = floor(log2 n / alpha) for every n. Throws
/// std::invalid_argument when prior.alpha <= 1.
std::vector<TailReportRow> tail_markov_report(const SpikeSlabPrior& prior, const BesovIndex& idx,
                                              const std::vector<std::int64_t>& n_grid,
                                              const CoefficientTree* truth = nullptr);

} // namespace bwshrink

#endif // BWSHRINK_PROBES_HPP
