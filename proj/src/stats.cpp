#include "d2d/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace d2d::stats {

Summary summarize(const std::vector<double>& xs, double level) {
  Summary s;
  s.n = static_cast<int>(xs.size());
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  s.ci_low = s.ci_high = s.mean;
  if (xs.size() < 2) return s;
  double ss = 0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  boost::math::students_t t(static_cast<double>(xs.size() - 1));
  const double q = boost::math::quantile(boost::math::complement(t, (1.0 - level) / 2.0));
  const double half = q * sd / std::sqrt(static_cast<double>(xs.size()));
  s.ci_low = s.mean - half;
  s.ci_high = s.mean + half;
  s.has_ci = true;
  return s;
}

bool overlaps(const Summary& a, const Summary& b) { return a.ci_low <= b.ci_high && b.ci_low <= a.ci_high; }

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double sub_ks_distance(std::vector<double> samples, double n_total, const std::function<double(double)>& sub_cdf) {
  if (!(n_total > 0) || static_cast<double>(samples.size()) > n_total) throw std::invalid_argument("bad sample count");
  std::sort(samples.begin(), samples.end());
  double d = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = sub_cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n_total - f, f - static_cast<double>(i) / n_total});
  }
  return d;
}

Histogram make_histogram(double lo, double hi, double width) {
  if (!(width > 0) || !(hi > lo)) throw std::invalid_argument("bad histogram range");
  Histogram h;
  h.lo = lo;
  h.width = width;
  h.counts.assign(static_cast<std::size_t>(std::ceil((hi - lo) / width - 1e-9)), 0);
  return h;
}

void Histogram::add(double x) {
  ++total;
  if (x < lo) return;
  auto i = static_cast<std::size_t>((x - lo) / width);
  if (i < counts.size()) ++counts[i];
}

std::vector<PdfPoint> sample_pdf(const Histogram& h) {
  std::vector<PdfPoint> out;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double m = h.total > 0 ? static_cast<double>(h.counts[i]) / static_cast<double>(h.total) : 0.0;
    out.push_back({h.center(i), m, m / h.width});
  }
  return out;
}

}  // namespace d2d::stats
