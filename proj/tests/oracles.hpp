// Reference computations used by the unit and acceptance tests. They avoid
// the library's own numerics: quadrature, brute-force sums and bisection on
// independently coded densities.
#ifndef BWSHRINK_TESTS_ORACLES_HPP
#define BWSHRINK_TESTS_ORACLES_HPP

#include "bwshrink/coefficient_tree.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

inline double normal_pdf(double x, double mean, double var)
{
    const double d = x - mean;
    return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

template <typename F>
double integrate(F f, double lo, double hi)
{
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-12);
}

// Sum of integrals over the pieces between sorted breakpoints.
template <typename F>
double integrate_pieces(F f, std::vector<double> cuts)
{
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i)
        if (cuts[i] > cuts[i - 1])
            total += integrate(f, cuts[i - 1], cuts[i]);
    return total;
}

struct Posterior {
    double omega;
    double m;
    double v;
};

// Normalizes prior x likelihood numerically for
//   beta ~ pi N(0, a_sq) + (1 - pi) delta_0,  X | beta ~ N(beta, sigma_sq).
inline Posterior conjugate_by_quadrature(double X, double sigma_sq, double pi, double a_sq)
{
    // Integrate over the peak of prior x likelihood +- 40 sd; outside it the
    // integrand is below e^-800 of its maximum.
    const double centre = X * a_sq / (a_sq + sigma_sq);
    const double sd = std::sqrt(a_sq * sigma_sq / (a_sq + sigma_sq));
    const double lo = centre - 40.0 * sd;
    const double hi = centre + 40.0 * sd;

    auto slab = [&](double b) { return normal_pdf(b, 0.0, a_sq) * normal_pdf(X, b, sigma_sq); };
    const double z0 = integrate(slab, lo, hi);
    const double z1 = integrate([&](double b) { return b * slab(b); }, lo, hi);
    const double z2 = integrate([&](double b) { return b * b * slab(b); }, lo, hi);
    const double spike = (1.0 - pi) * normal_pdf(X, 0.0, sigma_sq);

    Posterior out;
    out.omega = pi * z0 / (pi * z0 + spike);
    out.m = z1 / z0;
    out.v = z2 / z0 - out.m * out.m;
    return out;
}

// F(b; a) by quadrature; for a < 1 the substitution x = u^{1/a} removes the
// endpoint singularity.
inline double incomplete_gamma_by_quadrature(double b, double a)
{
    if (b <= 0.0)
        return 0.0;
    const double lg = std::lgamma(a);
    if (a < 1.0) {
        auto f = [&](double u) { return std::exp(-std::pow(u, 1.0 / a) - lg) / a; };
        return integrate(f, 0.0, std::pow(b, a));
    }
    auto f = [&](double x) { return x <= 0.0 ? 0.0 : std::exp((a - 1.0) * std::log(x) - x - lg); };
    std::vector<double> cuts{0.0, b};
    if (a - 1.0 < b)
        cuts.push_back(a - 1.0);
    return integrate_pieces(f, cuts);
}

// Median of omega N(m, v) + (1 - omega) delta_0 by bisection on a directly
// coded mixture CDF.
inline double mixture_median(double omega, double m, double v)
{
    const double sd = std::sqrt(v);
    auto cdf = [&](double t) { return omega * normal_cdf((t - m) / sd) + (1.0 - omega) * (t >= 0.0 ? 1.0 : 0.0); };
    // the atom covers 1/2
    if (cdf(0.0) >= 0.5 && omega * normal_cdf(-m / sd) <= 0.5)
        return 0.0;
    double lo = std::min(0.0, m) - 60.0 * sd;
    double hi = std::max(0.0, m) + 60.0 * sd;
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < 0.5 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Sieve model posterior by direct product of Gaussian marginals.
inline std::vector<double> sieve_weights_brute_force(const bwshrink::CoefficientTree& X, double sigma_sq, double mu,
                                                     double alpha, int m_max)
{
    std::vector<double> w(m_max + 1);
    double total = 0.0;
    for (int m = 0; m <= m_max; ++m) {
        double like = std::pow(2.0, -mu * m);
        for (int j = 0; j <= X.j_max(); ++j) {
            const double var = (j <= m ? std::pow(2.0, -alpha * j) : 0.0) + sigma_sq;
            for (double x : X.level(j))
                like *= normal_pdf(x, 0.0, var);
        }
        w[m] = like;
        total += like;
    }
    for (double& x : w)
        x /= total;
    return w;
}

} // namespace oracle

#endif // BWSHRINK_TESTS_ORACLES_HPP
