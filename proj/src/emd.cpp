#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "wlr/compare.hpp"

namespace wlr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassEps = 1e-14;

struct PathStep {
  Eigen::Index prev = -1;
  bool forward = true;  // arc direction entering this node
};

}  // namespace

// Balanced transportation via successive shortest augmenting paths with node
// potentials (Dijkstra on reduced costs). Supplies and demands are the
// normalized signature weights; every augmentation exhausts a supply, a
// demand, or a backward arc, and the flow stays optimal for its value
// throughout, so the final flow is the exact optimum.
namespace {

// Deterministic ordering so emd(A, B) and emd(B, A) solve the same instance.
bool signature_precedes(const Signature& a, const Signature& b) {
  if (a.centers.cols() != b.centers.cols()) return a.centers.cols() < b.centers.cols();
  if (a.centers.rows() != b.centers.rows()) return a.centers.rows() < b.centers.rows();
  for (Eigen::Index i = 0; i < a.centers.size(); ++i)
    if (a.centers.data()[i] != b.centers.data()[i])
      return a.centers.data()[i] < b.centers.data()[i];
  for (Eigen::Index i = 0; i < a.weights.size(); ++i)
    if (a.weights[i] != b.weights[i]) return a.weights[i] < b.weights[i];
  return false;
}

}  // namespace

double emd(const Signature& sa, const Signature& sb) {
  if (signature_precedes(sb, sa)) return emd(sb, sa);
  const Eigen::Index n = sa.centers.cols(), m = sb.centers.cols();
  if (n < 1 || m < 1) throw ValidationError("emd: empty signature");
  if (sa.centers.rows() != sb.centers.rows())
    throw ValidationError("emd: signature dimensions differ");
  if (sa.weights.size() != n || sb.weights.size() != m)
    throw ValidationError("emd: weight count does not match center count");
  if ((sa.weights.array() <= 0.0).any() || (sb.weights.array() <= 0.0).any())
    throw ValidationError("emd: weights must be positive");

  Eigen::MatrixXd cost(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      cost(i, j) = (sa.centers.col(i) - sb.centers.col(j)).norm();

  Eigen::VectorXd supply = sa.weights / sa.weights.sum();
  Eigen::VectorXd demand = sb.weights / sb.weights.sum();
  Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(n, m);

  const Eigen::Index nodes = n + m;  // 0..n-1 supplies, n..n+m-1 demands
  Eigen::VectorXd potential = Eigen::VectorXd::Zero(nodes);
  std::vector<double> dist(static_cast<std::size_t>(nodes));
  std::vector<PathStep> step(static_cast<std::size_t>(nodes));

  const long maxIterations = 4 * nodes * nodes + 16;
  long iterations = 0;
  while ((supply.array() > kMassEps).any()) {
    if (++iterations > maxIterations)
      throw InternalError("emd: transportation solver failed to converge");

    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(step.begin(), step.end(), PathStep{});
    using QueueEntry = std::pair<double, Eigen::Index>;
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> queue;
    for (Eigen::Index i = 0; i < n; ++i)
      if (supply[i] > kMassEps) {
        dist[static_cast<std::size_t>(i)] = 0.0;
        queue.push({0.0, i});
      }

    while (!queue.empty()) {
      const auto [d, v] = queue.top();
      queue.pop();
      if (d > dist[static_cast<std::size_t>(v)]) continue;
      if (v < n) {
        for (Eigen::Index j = 0; j < m; ++j) {
          // forward arc, reduced cost clamped against rounding dust
          const double rc = std::max(0.0, cost(v, j) + potential[v] - potential[n + j]);
          if (d + rc < dist[static_cast<std::size_t>(n + j)]) {
            dist[static_cast<std::size_t>(n + j)] = d + rc;
            step[static_cast<std::size_t>(n + j)] = {v, true};
            queue.push({d + rc, n + j});
          }
        }
      } else {
        const Eigen::Index j = v - n;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (flow(i, j) <= 0.0) continue;
          const double rc = std::max(0.0, -cost(i, j) + potential[v] - potential[i]);
          if (d + rc < dist[static_cast<std::size_t>(i)]) {
            dist[static_cast<std::size_t>(i)] = d + rc;
            step[static_cast<std::size_t>(i)] = {v, false};
            queue.push({d + rc, i});
          }
        }
      }
    }

    Eigen::Index sink = -1;
    for (Eigen::Index j = 0; j < m; ++j)
      if (demand[j] > kMassEps && dist[static_cast<std::size_t>(n + j)] < kInf &&
          (sink < 0 || dist[static_cast<std::size_t>(n + j)] < dist[static_cast<std::size_t>(n + sink)]))
        sink = j;
    if (sink < 0) throw InternalError("emd: no augmenting path in a balanced problem");

    const double reach = dist[static_cast<std::size_t>(n + sink)];
    for (Eigen::Index v = 0; v < nodes; ++v)
      potential[v] += std::min(dist[static_cast<std::size_t>(v)], reach);

    // Bottleneck along the path back to a source.
    double delta = demand[sink];
    for (Eigen::Index v = n + sink; step[static_cast<std::size_t>(v)].prev >= 0;) {
      const PathStep s = step[static_cast<std::size_t>(v)];
      if (!s.forward) delta = std::min(delta, flow(v, s.prev - n));
      v = s.prev;
      if (step[static_cast<std::size_t>(v)].prev < 0) delta = std::min(delta, supply[v]);
    }

    Eigen::Index v = n + sink;
    while (step[static_cast<std::size_t>(v)].prev >= 0) {
      const PathStep s = step[static_cast<std::size_t>(v)];
      if (s.forward)
        flow(s.prev, v - n) += delta;
      else
        flow(v, s.prev - n) = std::max(0.0, flow(v, s.prev - n) - delta);
      v = s.prev;
    }
    supply[v] = std::max(0.0, supply[v] - delta);
    demand[sink] = std::max(0.0, demand[sink] - delta);
  }

  if ((demand.array() > 1e-9).any())
    throw InternalError("emd: residual demand after solving a balanced problem");

  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      if (flow(i, j) > 0.0) total += flow(i, j) * cost(i, j);
  return total;
}

}  // namespace wlr
