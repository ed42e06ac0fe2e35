// Shared deterministic generators for grid/label instances.
#pragma once

#include <random>
#include <vector>

#include "wlr/grid.hpp"

namespace testutil {

using wlr::LabelGrid;

inline LabelGrid grid_from(std::initializer_list<std::initializer_list<std::int32_t>> rows) {
  const auto h = static_cast<Eigen::Index>(rows.size());
  const auto w = static_cast<Eigen::Index>(rows.begin()->size());
  LabelGrid g(h, w);
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (std::int32_t v : row) g(r, c++) = v;
    ++r;
  }
  return g;
}

// Uniform per-pixel ids in [1, maxId].
inline LabelGrid random_partition(std::mt19937& rng, Eigen::Index h, Eigen::Index w,
                                  int maxId) {
  std::uniform_int_distribution<std::int32_t> id(1, maxId);
  LabelGrid g(h, w);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = id(rng);
  return g;
}

// Sparse labeling: each pixel unlabeled (0) with probability 1-density,
// otherwise a uniform id in [1, maxId].
inline LabelGrid random_labels(std::mt19937& rng, Eigen::Index h, Eigen::Index w,
                               int maxId, double density) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<std::int32_t> id(1, maxId);
  LabelGrid g = LabelGrid::Zero(h, w);
  for (Eigen::Index i = 0; i < g.size(); ++i)
    if (coin(rng) < density) g.data()[i] = id(rng);
  return g;
}

struct WeakInstance {
  wlr::SegmentMap seg;
  wlr::WeakLabels wl;
};

// A random scoreable instance within the oracle cap: dims in [4, maxDim].
inline WeakInstance random_weak_instance(std::mt19937& rng, Eigen::Index maxDim = 32,
                                         int maxK = 10, int maxL = 4, int maxU = 4) {
  std::uniform_int_distribution<Eigen::Index> dim(4, maxDim);
  const Eigen::Index h = dim(rng), w = dim(rng);
  for (;;) {
    WeakInstance inst{
        wlr::SegmentMap::from_grid(random_partition(rng, h, w, maxK)),
        wlr::WeakLabels::from_grids(random_labels(rng, h, w, maxL, 0.4),
                                    random_labels(rng, h, w, maxU, 0.4))};
    if (wlr::validate_pair(inst.seg, inst.wl).valid) return inst;
  }
}

}  // namespace testutil
