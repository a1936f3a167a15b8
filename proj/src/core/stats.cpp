#include "detlab/core/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Core>
#include <unsupported/Eigen/SpecialFunctions>

#include "detlab/core/errors.hpp"

namespace detlab {

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw ArgumentError("total_variation: size mismatch");
  double s = 0.0;
  for (size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double chi_square_pvalue(double stat, double dof) {
  if (dof <= 0) throw ArgumentError("chi_square_pvalue: dof must be positive");
  Eigen::ArrayXd a(1), x(1);
  a << 0.5 * dof;
  x << 0.5 * std::max(stat, 0.0);
  return Eigen::igammac(a, x)(0);
}

namespace {

/// Merge adjacent bins until every expected count reaches the floor.
void pool(std::vector<double>& obs, std::vector<double>& expct, double floor) {
  std::vector<double> o2, e2;
  double ao = 0, ae = 0;
  for (size_t i = 0; i < obs.size(); ++i) {
    ao += obs[i];
    ae += expct[i];
    if (ae >= floor) {
      o2.push_back(ao);
      e2.push_back(ae);
      ao = ae = 0;
    }
  }
  if (ae > 0 || ao > 0) {
    if (e2.empty()) {
      o2.push_back(ao);
      e2.push_back(ae);
    } else {
      o2.back() += ao;
      e2.back() += ae;
    }
  }
  obs.swap(o2);
  expct.swap(e2);
}

} // namespace

ChiSquareResult chi_square_test(const std::vector<double>& counts,
                                const std::vector<double>& probabilities, double min_expected) {
  if (counts.size() != probabilities.size()) throw ArgumentError("chi_square_test: size mismatch");
  const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
  const double psum = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
  std::vector<double> obs = counts, ex(probabilities.size());
  for (size_t i = 0; i < ex.size(); ++i) ex[i] = n * probabilities[i] / psum;
  pool(obs, ex, min_expected);
  ChiSquareResult r;
  for (size_t i = 0; i < obs.size(); ++i) r.statistic += (obs[i] - ex[i]) * (obs[i] - ex[i]) / ex[i];
  r.dof = static_cast<double>(obs.size()) - 1.0;
  r.p_value = r.dof > 0 ? chi_square_pvalue(r.statistic, r.dof) : 1.0;
  return r;
}

ChiSquareResult chi_square_homogeneity(const std::vector<double>& a, const std::vector<double>& b,
                                       double min_expected) {
  if (a.size() != b.size()) throw ArgumentError("chi_square_homogeneity: size mismatch");
  const double na = std::accumulate(a.begin(), a.end(), 0.0);
  const double nb = std::accumulate(b.begin(), b.end(), 0.0);
  std::vector<double> oa, ob;
  double ca = 0, cb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    ca += a[i];
    cb += b[i];
    const double tot = ca + cb;
    if (std::min(tot * na, tot * nb) / (na + nb) >= min_expected) {
      oa.push_back(ca);
      ob.push_back(cb);
      ca = cb = 0;
    }
  }
  if ((ca > 0 || cb > 0) && !oa.empty()) {
    oa.back() += ca;
    ob.back() += cb;
  }
  ChiSquareResult r;
  for (size_t i = 0; i < oa.size(); ++i) {
    const double tot = oa[i] + ob[i];
    const double ea = tot * na / (na + nb), eb = tot * nb / (na + nb);
    r.statistic += (oa[i] - ea) * (oa[i] - ea) / ea + (ob[i] - eb) * (ob[i] - eb) / eb;
  }
  r.dof = static_cast<double>(oa.size()) - 1.0;
  r.p_value = r.dof > 0 ? chi_square_pvalue(r.statistic, r.dof) : 1.0;
  return r;
}

double ks_pvalue(double d, double n) {
  const double sn = std::sqrt(n);
  const double lam = (sn + 0.12 + 0.11 / sn) * d;
  if (lam < 1e-3) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lam * lam);
    sum += (j % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw ArgumentError("ks_test: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return {d, ks_pvalue(d, n)};
}

SlopeFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("linear_fit: need >= 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = mean(x), my = mean(y);
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double rss = 0;
    for (size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    f.slope_stderr = std::sqrt(rss / (n - 2) / sxx);
  }
  return f;
}

SlopeFit loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw ArgumentError("loglog_slope: values must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return linear_fit(lx, ly);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw ArgumentError("quantile: empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * (static_cast<double>(v.size()) - 1.0);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

} // namespace detlab
