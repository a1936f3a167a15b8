#pragma once

#include <functional>
#include <vector>

namespace detlab {

/// Half the L¹ distance between two binned distributions (not renormalised).
double total_variation(const std::vector<double>& p, const std::vector<double>& q);

/// Upper tail of χ²_dof at `stat`.
double chi_square_pvalue(double stat, double dof);

struct ChiSquareResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};
/// Goodness of fit of integer-like counts against expected probabilities.
/// Bins with expected count < min_expected are pooled into their neighbour.
ChiSquareResult chi_square_test(const std::vector<double>& counts,
                                const std::vector<double>& probabilities,
                                double min_expected = 5.0);
/// Two-sample homogeneity test on binned counts.
ChiSquareResult chi_square_homogeneity(const std::vector<double>& a, const std::vector<double>& b,
                                       double min_expected = 5.0);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);
/// Asymptotic Kolmogorov p-value with Stephens' finite-n correction.
double ks_pvalue(double d, double n);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};
/// Least squares of log y on log x.
SlopeFit loglog_slope(const std::vector<double>& x, const std::vector<double>& y);
SlopeFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

double mean(const std::vector<double>& v);
double median(std::vector<double> v);
double quantile(std::vector<double> v, double q);

} // namespace detlab
