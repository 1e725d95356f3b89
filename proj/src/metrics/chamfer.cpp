#include "pforge/metrics/chamfer.h"

#include <algorithm>
#include <stdexcept>

#include <tbb/parallel_for.h>

#include "pforge/pointcloud/knn.h"

namespace pforge::metrics {

namespace {
void require_nonempty(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("metrics: empty point set");
}
}  // namespace

std::vector<double> directed_distances(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
  require_nonempty(from, to);
  const KnnIndex index(to);
  std::vector<double> d(from.size());
  tbb::parallel_for(std::size_t{0}, from.size(), [&](std::size_t i) { d[i] = index.nearest(from[i]).distance; });
  return d;
}

double chamfer(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  const std::vector<double> dab = directed_distances(a, b);
  const std::vector<double> dba = directed_distances(b, a);
  double sa = 0.0, sb = 0.0;
  for (double d : dab) sa += d;
  for (double d : dba) sb += d;
  return sa / (2.0 * a.size()) + sb / (2.0 * b.size());
}

FScore fscore(const std::vector<Vec3>& pred, const std::vector<Vec3>& gt, double threshold) {
  const std::vector<double> dp = directed_distances(pred, gt);
  const std::vector<double> dg = directed_distances(gt, pred);
  FScore out;
  out.precision = static_cast<double>(std::count_if(dp.begin(), dp.end(), [&](double d) { return d <= threshold; })) /
                  pred.size();
  out.recall = static_cast<double>(std::count_if(dg.begin(), dg.end(), [&](double d) { return d <= threshold; })) /
               gt.size();
  const double s = out.precision + out.recall;
  out.f = s > 0.0 ? 2.0 * out.precision * out.recall / s : 0.0;
  return out;
}

double hausdorff(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  const std::vector<double> dab = directed_distances(a, b);
  const std::vector<double> dba = directed_distances(b, a);
  return std::max(*std::max_element(dab.begin(), dab.end()), *std::max_element(dba.begin(), dba.end()));
}

}  // namespace pforge::metrics
