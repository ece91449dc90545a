#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "newton/kernel.hpp"

namespace newton::stats {

double normal_cdf(double x);
double normal_quantile(double p);
double chi_squared_quantile(double p, double dof);
double beta_cdf(double x, double a, double b);
double beta_quantile(double p, double a, double b);

/// Neumaier-compensated sum; insensitive to summation order up to rounding of
/// the final result.
double compensated_sum(std::span<const double> v);
double compensated_mean(std::span<const double> v);
/// Unbiased sample variance (two-pass, compensated).
double sample_variance(std::span<const double> v);

/// sup_x |F_n(x) - F(x)| for a continuous reference F.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
/// Asymptotic Kolmogorov tail probability with Stephens' small-sample
/// correction lambda = (sqrt(n) + 0.12 + 0.11/sqrt(n)) D.
double ks_pvalue(double statistic, std::size_t n);

/// A^2 = -n - (1/n) sum (2i-1) [ln F(x_(i)) + ln(1 - F(x_(n+1-i)))] for a
/// fully specified continuous F.
double anderson_darling_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
/// Upper tail of the asymptotic A^2 distribution (Marsaglia & Marsaglia's
/// ADinf approximation).
double anderson_darling_pvalue(double statistic);

/// Number of interior local maxima of a sampled curve whose height exceeds
/// `relative_floor` times the global maximum. Plateaus count once.
std::size_t count_local_maxima(std::span<const double> values, double relative_floor = 0.01);

/// Seed for replica `replica` of stream `stream` under a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t replica);

}  // namespace newton::stats
