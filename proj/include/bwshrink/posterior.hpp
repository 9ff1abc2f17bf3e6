#ifndef BWSHRINK_POSTERIOR_HPP
#define BWSHRINK_POSTERIOR_HPP

#include "bwshrink/coefficient_tree.hpp"
#include "bwshrink/priors.hpp"
#include "bwshrink/rng.hpp"
#include "bwshrink/sequence_model.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace bwshrink {

/// omega N(m, v) + (1 - omega) delta_0.
struct CoefficientPosterior {
    double omega = 0.0;
    double m = 0.0;
    double v = 1.0;
};

/// Conjugate update of pi N(0, a^2) + (1 - pi) delta_0 against X ~ N(beta, sigma^2):
///   omega = pi N(X; 0, a^2 + sigma^2) / [pi N(X; 0, a^2 + sigma^2) + (1 - pi) N(X; 0, sigma^2)]
///   m = a^2 X / (a^2 + sigma^2),  v = a^2 sigma^2 / (a^2 + sigma^2).
/// omega is formed from log densities and does not underflow for |X| >> sigma.
CoefficientPosterior coefficient_posterior(double X, double sigma_sq, double pi, double a_sq);

double posterior_mean(const CoefficientPosterior& cp);

/// Median of the mixture. Zero whenever the atom straddles the half-mass
/// point (always when omega <= 1/2); otherwise the Gaussian quantile after
/// removing the atom's mass.
double posterior_median(const CoefficientPosterior& cp);

/// Same quantity by bisection on the mixture CDF (residual <= 1e-12).
double posterior_median_bisection(const CoefficientPosterior& cp);

/// Mixture CDF P(beta <= t).
double posterior_cdf(const CoefficientPosterior& cp, double t);

/// One draw: N(m, v) with probability omega, otherwise exactly 0.
double sample_coefficient(const CoefficientPosterior& cp, Seed seed);
double sample_coefficient(const CoefficientPosterior& cp, SplitMix64& rng);

/// Factorized spike-and-slab posterior over the observed levels. alpha00 is
/// carried as known. Coefficients above j_max are not represented.
class PosteriorTree {
public:
    PosteriorTree(int j_max, double alpha00, std::vector<CoefficientPosterior> coeffs);

    int j_max() const noexcept { return j_max_; }
    double alpha00() const noexcept { return alpha00_; }
    std::span<const CoefficientPosterior> level(int j) const;
    std::span<const CoefficientPosterior> flat() const noexcept { return coeffs_; }

    CoefficientTree mean_tree() const;
    CoefficientTree median_tree() const;

    /// One joint posterior draw.
    CoefficientTree sample(Seed seed) const;

    /// sum_{j,k} Var(beta_jk | X).
    double total_variance() const;

private:
    int j_max_;
    double alpha00_;
    std::vector<CoefficientPosterior> coeffs_;
};

PosteriorTree posterior_tree(const SequenceObservation& obs, const SpikeSlabPrior& prior);

/// Posterior under the sieve prior: model weights over m = 0..m_max and the
/// conjugate Gaussian posterior of every coefficient within a model.
class SievePosterior {
public:
    SievePosterior(std::vector<double> model_weights, CoefficientTree slab_mean, std::vector<double> slab_variance);

    std::span<const double> model_weights() const noexcept { return model_weights_; }
    int m_max() const noexcept { return static_cast<int>(model_weights_.size()) - 1; }
    int j_max() const noexcept { return slab_mean_.j_max(); }
    double alpha00() const noexcept { return slab_mean_.alpha00(); }

    /// Posterior probability that level j is active, sum_{m >= j} weight_m.
    double level_inclusion(int j) const;

    /// Marginal posterior of beta_jk as a spike-and-slab mixture.
    CoefficientPosterior marginal(int j, std::size_t k) const;

    /// Posterior mean under model m alone.
    CoefficientTree model_mean_tree(int m) const;

    /// sum_m weight_m * model_mean_tree(m).
    CoefficientTree mean_tree() const;

    /// Coordinatewise median of the marginals.
    CoefficientTree median_tree() const;

    /// Draws m from the model weights, then Gaussians on levels <= m.
    CoefficientTree sample(Seed seed) const;

    /// Expected squared distance minus squared distance of the mean, i.e. the
    /// trace of the posterior covariance.
    double total_variance() const;

private:
    std::vector<double> model_weights_;
    std::vector<double> inclusion_;
    CoefficientTree slab_mean_;
    std::vector<double> slab_variance_;
};

SievePosterior sieve_posterior(const SequenceObservation& obs, const SievePrior& prior);

/// Squared l2 distances ||beta_s - center||^2 of n_samples posterior draws.
/// Each draw uses a stream keyed by (seed, s).
std::vector<double> posterior_sample_distances(const PosteriorTree& post, const CoefficientTree& center,
                                               std::int64_t n_samples, Seed seed);
std::vector<double> posterior_sample_distances(const SievePosterior& post, const CoefficientTree& center,
                                               std::int64_t n_samples, Seed seed);

struct MassEstimate {
    double estimate = 0.0;
    double se = 0.0;  // binomial standard error
};

/// Fraction of distances strictly above radius_sq.
MassEstimate complement_fraction(std::span<const double> distances, double radius_sq);

MassEstimate posterior_ball_complement_mass(const PosteriorTree& post, const CoefficientTree& center,
                                            double radius_sq, std::int64_t n_samples, Seed seed);
MassEstimate posterior_ball_complement_mass(const SievePosterior& post, const CoefficientTree& center,
                                            double radius_sq, std::int64_t n_samples, Seed seed);

} // namespace bwshrink

#endif // BWSHRINK_POSTERIOR_HPP
