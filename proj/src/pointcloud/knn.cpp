#include "pforge/pointcloud/knn.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace pforge {

namespace {

constexpr std::uint32_t kLeafSize = 12;

// Orders candidates by squared distance then by index.
struct Candidate {
  double d2;
  std::uint32_t index;
  bool operator<(const Candidate& o) const { return d2 < o.d2 || (d2 == o.d2 && index < o.index); }
};

}  // namespace

KnnIndex::KnnIndex(std::vector<Vec3> points) : points_(std::move(points)) {
  if (points_.size() > std::numeric_limits<std::uint32_t>::max())
    throw std::invalid_argument("knn: too many points");
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    build(0, static_cast<std::uint32_t>(points_.size()), 0);
  }
}

std::int32_t KnnIndex::build(std::uint32_t begin, std::uint32_t end, int depth) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end, -1, -1, -1, 0.0});
  if (end - begin <= kLeafSize) return id;

  Vec3 lo = points_[order_[begin]], hi = lo;
  for (std::uint32_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] - lo[axis] <= 0.0) return id;  // all coincident: keep as leaf

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) { return points_[a][axis] < points_[b][axis]; });
  const double split = points_[order_[mid]][axis];
  (void)depth;

  const std::int32_t left = build(begin, mid, depth + 1);
  const std::int32_t right = build(mid, end, depth + 1);
  Node& n = nodes_[static_cast<std::size_t>(id)];
  n.axis = axis;
  n.split = split;
  n.left = left;
  n.right = right;
  return id;
}

// The visitor sees every point in leaves that may contain results and
// reports the current squared pruning bound.
template <typename Visitor>
void KnnIndex::search(std::int32_t node_id, const Vec3& q, Visitor& visit) const {
  const Node& n = nodes_[static_cast<std::size_t>(node_id)];
  if (n.axis < 0) {
    for (std::uint32_t i = n.begin; i < n.end; ++i) {
      const std::uint32_t idx = order_[i];
      visit.offer(idx, squared_distance(points_[idx], q));
    }
    return;
  }
  const double diff = q[n.axis] - n.split;
  const std::int32_t near = diff < 0.0 ? n.left : n.right;
  const std::int32_t far = diff < 0.0 ? n.right : n.left;
  search(near, q, visit);
  // Points equal to the split value may sit on either side, so the far
  // side is visited whenever the bound reaches the plane (inclusive).
  if (diff * diff <= visit.bound()) search(far, q, visit);
}

std::vector<Neighbor> KnnIndex::knn(const Vec3& query, std::size_t k) const {
  std::vector<Neighbor> out;
  if (points_.empty() || k == 0) return out;
  k = std::min(k, points_.size());

  struct Visitor {
    std::size_t k;
    std::priority_queue<Candidate> heap;  // max-heap on (d2, index)
    void offer(std::uint32_t idx, double d2) {
      const Candidate c{d2, idx};
      if (heap.size() < k) {
        heap.push(c);
      } else if (c < heap.top()) {
        heap.pop();
        heap.push(c);
      }
    }
    double bound() const { return heap.size() < k ? std::numeric_limits<double>::infinity() : heap.top().d2; }
  } visitor{k, {}};
  search(0, query, visitor);

  out.resize(visitor.heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    const Candidate c = visitor.heap.top();
    visitor.heap.pop();
    out[i] = Neighbor{c.index, std::sqrt(c.d2)};
  }
  return out;
}

Neighbor KnnIndex::nearest(const Vec3& query) const {
  if (points_.empty()) throw std::logic_error("knn: nearest on empty index");
  struct Visitor {
    Candidate best{std::numeric_limits<double>::infinity(), std::numeric_limits<std::uint32_t>::max()};
    void offer(std::uint32_t idx, double d2) {
      const Candidate c{d2, idx};
      if (c < best) best = c;
    }
    double bound() const { return best.d2; }
  } visitor;
  search(0, query, visitor);
  return Neighbor{visitor.best.index, std::sqrt(visitor.best.d2)};
}

std::vector<Neighbor> KnnIndex::radius(const Vec3& query, double radius) const {
  std::vector<Candidate> found;
  if (points_.empty() || radius < 0.0) return {};
  struct Visitor {
    double r2;
    std::vector<Candidate>* found;
    void offer(std::uint32_t idx, double d2) {
      if (d2 <= r2) found->push_back({d2, idx});
    }
    double bound() const { return r2; }
  } visitor{radius * radius, &found};
  search(0, query, visitor);
  std::sort(found.begin(), found.end());
  std::vector<Neighbor> out;
  out.reserve(found.size());
  for (const Candidate& c : found) out.push_back({c.index, std::sqrt(c.d2)});
  return out;
}

}  // namespace pforge
