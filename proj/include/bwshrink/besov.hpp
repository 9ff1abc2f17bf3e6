#ifndef BWSHRINK_BESOV_HPP
#define BWSHRINK_BESOV_HPP

#include "bwshrink/coefficient_tree.hpp"
#include "bwshrink/rng.hpp"

#include <limits>
#include <span>
#include <string>

namespace bwshrink {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Besov ball B^s_{p,q}(B). p and q may be +infinity.
class BesovIndex {
public:
    /// Throws std::invalid_argument unless p >= 1, q >= 1, B > 0 and
    /// s > max(0, 1/p - 1/2).
    BesovIndex(double s, double p, double q, double radius = 1.0);

    double s() const noexcept { return s_; }
    double p() const noexcept { return p_; }
    double q() const noexcept { return q_; }
    double radius() const noexcept { return radius_; }

    /// s + 1/2 - 1/p, the per-level exponent of the sequence norm.
    double level_exponent() const noexcept;

    /// Empty string when valid, otherwise the violated constraint.
    static std::string validate(double s, double p, double q, double radius);

    friend bool operator==(const BesovIndex&, const BesovIndex&) = default;

private:
    double s_;
    double p_;
    double q_;
    double radius_;
};

/// ||x||_p for p in [1, inf], evaluated with max-scaling.
double lp_norm(std::span<const double> x, double p);

/// |alpha00| + { sum_j (2^{j(s+1/2-1/p)} ||beta_j.||_p)^q }^{1/q}, with the
/// sup over j when q = inf.
double besov_norm(const CoefficientTree& t, const BesovIndex& idx);

/// Strict membership: besov_norm(t) < B.
bool in_ball(const CoefficientTree& t, const BesovIndex& idx);

/// sum_{j > J} sum_k beta_jk^2.
double tail_energy(const CoefficientTree& t, int J);

/// Smallest C with tail_energy(t, J) <= C 2^{-2 J s'} for every J in
/// [0, j_max], with s' = s for p >= 2 and s + 1/2 - 1/p otherwise.
double fitted_tail_constant(const CoefficientTree& t, const BesovIndex& idx);

/// Upper bound on the detail part of ||P_J t||_{B^s_{p,q}} obtained from the
/// level-norm embeddings:
///   p >= 2: 2^{J(s+1/2-1/p)} (J+1)^{max(1/q-1/2,0)} ||P_J t||_2
///   p <  2: 2^{Js}           (J+1)^{max(1/q-1/2,0)} ||P_J t||_2
/// alpha00 is excluded from both sides.
double embedding_chain_bound(const CoefficientTree& t, const BesovIndex& idx, int J);

/// Detail part of besov_norm restricted to levels 0..J.
double besov_detail_norm(const CoefficientTree& t, const BesovIndex& idx, int J);

enum class TruthKind { level_uniform, level_sparse, dwt_of_signal };

TruthKind parse_truth_kind(const std::string& name);
std::string to_string(TruthKind kind);

struct TruthSpec {
    TruthKind kind = TruthKind::level_uniform;
    BesovIndex besov{1.0, 2.0, 2.0, 1.0};
    double margin = 0.1;   // target norm is (1 - margin) B
    int j_max = 10;
    double decay = 0.01;   // extra per-level decay 2^{-j decay}
    double alpha00 = 0.0;  // fixed scaling coefficient (not rescaled)
    std::string signal = "doppler";
    std::string wavelet = "haar";

    friend bool operator==(const TruthSpec&, const TruthSpec&) = default;
};

/// Builds a truth with besov_norm = (1 - margin) B to within 1e-9 B. The
/// detail scale is found by bisection. Throws std::invalid_argument when the
/// target is unreachable (|alpha00| >= (1 - margin) B, or a signal with no
/// detail energy).
CoefficientTree make_truth(const TruthSpec& spec, Seed seed);

} // namespace bwshrink

#endif // BWSHRINK_BESOV_HPP
