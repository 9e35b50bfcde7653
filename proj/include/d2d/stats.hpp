#pragma once

#include <functional>
#include <vector>

namespace d2d::stats {

/// Mean with a two-sided Student-t confidence interval. With fewer than two samples the
/// interval is undefined and collapses to the mean.
struct Summary {
  double mean = 0;
  double ci_low = 0;
  double ci_high = 0;
  int n = 0;
  bool has_ci = false;
};
Summary summarize(const std::vector<double>& xs, double level = 0.95);

/// Intervals [lo, hi] overlap (inclusive).
bool overlaps(const Summary& a, const Summary& b);

/// sup |F_n - F| for samples against a continuous CDF. Samples need not be sorted.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);
/// Same for the continuous part of a mixed law: `samples` are the non-atom draws out of
/// `n_total`, compared against the unnormalized sub-CDF.
double sub_ks_distance(std::vector<double> samples, double n_total, const std::function<double(double)>& sub_cdf);

struct Histogram {
  double lo = 0;
  double width = 1;
  std::vector<long> counts;
  long total = 0;  // including out-of-range samples

  void add(double x);
  double center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * width; }
};
Histogram make_histogram(double lo, double hi, double width);

struct PdfPoint {
  double r;
  double mass;     // fraction of samples in the bin
  double density;  // mass / width
};
/// Normalized histogram; mass sums to the in-range fraction.
std::vector<PdfPoint> sample_pdf(const Histogram& h);

}  // namespace d2d::stats
