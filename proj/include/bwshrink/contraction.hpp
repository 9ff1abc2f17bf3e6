#ifndef BWSHRINK_CONTRACTION_HPP
#define BWSHRINK_CONTRACTION_HPP

#include "bwshrink/besov.hpp"
#include "bwshrink/priors.hpp"
#include "bwshrink/rng.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace bwshrink {

/// Target rate quantities for B^s_{p,q} at sample size n.
struct RateQuantities {
    double eps_n_sq = 0.0;  // (ln n)^2 n^{-exponent}
    double tau_n = 0.0;
    int J = 0;              // floor(log2(n) / alpha)
    double exponent = 0.0;  // n-exponent of eps_n_sq
    double alpha = 0.0;     // choose_alpha(s, p)
};

/// Throws std::invalid_argument for n < 2.
RateQuantities theoretical_rate(const BesovIndex& idx, std::int64_t n);

/// floor(log2(n) / alpha), computed without rounding surprises at exact powers.
int projection_level(std::int64_t n, double alpha);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // root-mean-square residual in log space
};

/// Ordinary least squares of log(loss) on log(n). Requires >= 3 points and
/// positive losses.
SlopeFit fit_rate_slope(std::span<const std::int64_t> ns, std::span<const double> losses);

enum class PriorKind { spike_slab, sieve };

struct ExperimentConfig {
    BesovIndex besov{1.0, 2.0, 2.0, 1.0};
    TruthSpec truth{.j_max = 20};
    std::vector<std::int64_t> n_grid{256, 512, 1024, 2048, 4096, 8192, 16384, 32768, 65536, 131072, 262144};
    int replicates = 20;
    double M = 1.0;
    std::vector<double> M_sweep{0.5, 1.0, 2.0, 4.0};
    std::int64_t posterior_samples = 50;
    PriorKind prior_kind = PriorKind::spike_slab;
    std::optional<double> alpha;  // choose_alpha(s, p) when unset
    double gamma = 0.5;
    double c_a = 1.0;
    double c_pi = 1.0;
    double mu = 1.0;
    std::optional<int> m_max;     // observation resolution of each n when unset
    bool noisy_alpha00 = false;
    double slope_tolerance = 0.12;
    Seed seed = 0;
    unsigned workers = 1;

    /// Throws std::invalid_argument on an empty or non-increasing grid,
    /// replicates < 1 and similar violations.
    void validate() const;
    double resolved_alpha() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct ComplementEstimate {
    double M = 0.0;
    double mass = 0.0;
    double se = 0.0;
};

struct RateRecord {
    std::int64_t n = 0;
    double eps_sq = 0.0;
    int J = 0;
    int J_data = 0;
    double loss_mean = 0.0;
    double loss_mean_se = 0.0;
    double loss_median = 0.0;
    double loss_median_se = 0.0;
    double complement_mass = 0.0;  // at radius M eps_sq
    double complement_mass_se = 0.0;
    std::vector<ComplementEstimate> sweep;
    double sample_loss = 0.0;      // mean posterior expected loss, from draws
    double sample_loss_se = 0.0;
    int variance_check_failures = 0;  // replicates where the mean beat the draws by > 4 SE
    double truncation_bias = 0.0;     // tail_energy(truth, J_data)
    bool truncation_flag = false;     // truncation_bias > eps_sq / 10
};

struct RateExperimentResult {
    std::vector<RateRecord> records;
    SlopeFit fit_mean;
    SlopeFit fit_median;
    double exponent_theoretical = 0.0;
    double alpha = 0.0;
    bool pass = false;  // |fit_mean.slope + exponent| <= slope_tolerance
};

RateExperimentResult run_contraction_experiment(const ExperimentConfig& cfg);

struct ContractionCheck {
    bool nonincreasing = false;    // complement mass at M never rises by more than 2 SE
    double final_min_mass = 1.0;   // smallest sweep mass at the largest n
    double final_best_M = 0.0;
    bool pass = false;             // nonincreasing and final_min_mass < threshold
};

ContractionCheck check_contraction(const RateExperimentResult& result, double threshold = 0.05);

struct PriorMassRow {
    std::int64_t n = 0;
    double eps_sq = 0.0;
    int J = 0;
    PriorMassEstimate estimate;
    double ratio = 0.0;  // -log_mass / (n eps_sq)
};

/// Prior mass of eps-balls around the truth along cfg.n_grid with eps_sq = eps_n^2 and
/// J = floor(log2 n / alpha).
std::vector<PriorMassRow> run_prior_mass_experiment(const ExperimentConfig& cfg, std::int64_t n_mc);

struct PriorMassSummary {
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    double spread = 0.0;   // max_ratio / min_ratio
    double min_ess = 0.0;
    bool pass = false;     // spread < max_spread, every ess >= 100, every ratio finite and positive
};

PriorMassSummary summarize_prior_mass(const std::vector<PriorMassRow>& rows, double max_spread = 10.0);

/// Truth built from cfg.truth with the experiment's Besov index and seed.
CoefficientTree experiment_truth(const ExperimentConfig& cfg);

} // namespace bwshrink

#endif // BWSHRINK_CONTRACTION_HPP
