#ifndef BWSHRINK_SPECIAL_FUNCTIONS_HPP
#define BWSHRINK_SPECIAL_FUNCTIONS_HPP

namespace bwshrink {

// log of the N(mean, var) density at x.
double log_normal_pdf(double x, double mean, double var);

// Standard normal CDF and its inverse.
double normal_cdf(double z);
double normal_quantile(double p);

} // namespace bwshrink

#endif // BWSHRINK_SPECIAL_FUNCTIONS_HPP
