#ifndef BWSHRINK_PRIORS_HPP
#define BWSHRINK_PRIORS_HPP

#include "bwshrink/coefficient_tree.hpp"
#include "bwshrink/rng.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace bwshrink {

/// Slab-variance exponent matched to B^s_{p,q}: 2s + 1 for p >= 2 and
/// 2s + 2 - 2/p for 1 <= p < 2.
double choose_alpha(double s, double p);

struct LevelParams {
    double pi = 1.0;    // inclusion probability
    double a_sq = 1.0;  // slab variance
};

/// Independent per-coefficient prior
///   beta_jk ~ pi_j N(0, a_j^2) + (1 - pi_j) delta_0,
/// with a_j^2 = c_a 2^{-alpha j} and pi_j = min(1, c_pi 2^{-gamma j}).
struct SpikeSlabPrior {
    double alpha = 3.0;
    double gamma = 0.5;
    double c_a = 1.0;
    double c_pi = 1.0;
    int j_max = 10;

    /// Throws std::invalid_argument on alpha <= 1, gamma < 0, c_a <= 0 or
    /// c_pi outside (0, 1].
    void validate() const;

    /// Hyperparameters at level j, following the formula for any j >= 0.
    LevelParams level(int j) const;
};

/// (pi_j, a_j^2); throws std::out_of_range unless 0 <= j <= prior.j_max.
LevelParams level_params(const SpikeSlabPrior& prior, int j);

/// Mixture over resolution models m = 0..m_max with weights
/// lambda_m ~ 2^{-mu m}; model m draws beta_jk ~ N(0, 2^{-alpha j}) for
/// j <= m and sets finer levels to zero.
struct SievePrior {
    double mu = 1.0;
    double alpha = 3.0;
    int m_max = 10;

    void validate() const;
    double level_variance(int j) const;
};

/// Normalized lambda_0..lambda_{m_max}.
std::vector<double> sieve_weights(const SievePrior& prior);

/// Prior draw with levels 0..prior.j_max; alpha00 = 0.
CoefficientTree sample_spike_slab(const SpikeSlabPrior& prior, Seed seed);

struct SieveDraw {
    int model = 0;
    CoefficientTree tree;
};

/// Draws m from the sieve weights, then Gaussian levels 0..m. The tree has
/// levels 0..m_max; levels above m are zero.
SieveDraw sample_sieve(const SievePrior& prior, Seed seed);

using Prior = std::variant<SpikeSlabPrior, SievePrior>;

struct PriorMassEstimate {
    double log_mass = 0.0;
    double log_mass_se = 0.0;  // delta-method standard error of log_mass
    double ess = 0.0;          // effective sample size of the weighted hits
    std::int64_t hits = 0;
    std::int64_t samples = 0;
    bool reliable = false;     // ess >= kMinEffectiveSampleSize
};

inline constexpr double kMinEffectiveSampleSize = 100.0;

/// Importance-sampling estimate of log Pi( sum_{j<=J,k} (beta_jk - beta0_jk)^2 <= eps_sq ).
/// Slab proposals are N(beta0_jk, a_j^2); spikes are drawn from the prior.
/// For the sieve prior each model is estimated separately and the results
/// are combined with the model weights. `reliable` is false when the
/// effective sample size falls below 100.
PriorMassEstimate prior_mass_probe(const Prior& prior, const CoefficientTree& truth, double eps_sq, int J,
                                   std::int64_t n_mc, Seed seed);

} // namespace bwshrink

#endif // BWSHRINK_PRIORS_HPP
