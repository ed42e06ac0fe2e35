#include "wlr/merge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

namespace wlr {

namespace {

FeatureBag pooled_bag(const FeatureMap& fm, const std::vector<Eigen::Index>& pixels,
                      std::int32_t segmentId) {
  FeatureBag bag;
  bag.segmentId = segmentId;
  bag.exemplars.resize(fm.channels(), static_cast<Eigen::Index>(pixels.size()));
  for (std::size_t i = 0; i < pixels.size(); ++i)
    bag.exemplars.col(static_cast<Eigen::Index>(i)) = fm.values.row(pixels[i]).transpose();
  return bag;
}

}  // namespace

MergeTrace greedy_merge(const SegmentMap& seg0, const FeatureMap& features,
                        MeasureKind measure, int connectivity,
                        const MeasureParams& params) {
  if (features.height != seg0.height() || features.width != seg0.width())
    throw ValidationError("greedy_merge: feature map and segment map dimensions differ");
  const int K0 = seg0.segment_count();
  if (K0 < 2) throw ValidationError("greedy_merge: need at least 2 initial segments");

  MergeTrace trace;
  trace.initial = seg0;
  trace.measure = measure;
  trace.connectivity = connectivity;

  const AdjacencyMatrix adj0 = build_adjacency(seg0, connectivity);
  std::vector<std::set<Eigen::Index>> neighbors(static_cast<std::size_t>(K0));
  for (Eigen::Index i = 0; i < adj0.size; ++i)
    neighbors[static_cast<std::size_t>(i)] =
        std::set<Eigen::Index>(adj0.neighbors[static_cast<std::size_t>(i)].begin(),
                               adj0.neighbors[static_cast<std::size_t>(i)].end());

  std::vector<std::vector<Eigen::Index>> pixels(static_cast<std::size_t>(K0));
  for (Eigen::Index i = 0; i < seg0.labels.size(); ++i)
    pixels[static_cast<std::size_t>(seg0.dense_index(seg0.labels.data()[i]))].push_back(i);

  const Eigen::MatrixXd histRange = feature_range(features);
  std::vector<SegmentRepr> reprs;
  reprs.reserve(static_cast<std::size_t>(K0));
  for (int k = 0; k < K0; ++k)
    reprs.push_back(prepare_repr(measure, pooled_bag(features, pixels[static_cast<std::size_t>(k)],
                                                     seg0.ids[static_cast<std::size_t>(k)]),
                                 params, histRange));

  const Polarity polarity = measure_polarity(measure);
  Eigen::MatrixXd psi =
      Eigen::MatrixXd::Constant(K0, K0, default_beta(polarity));
  for (Eigen::Index i = 0; i < K0; ++i)
    for (Eigen::Index j : neighbors[static_cast<std::size_t>(i)])
      if (j > i) {
        const double v = psi_value(measure, reprs[static_cast<std::size_t>(i)],
                                   reprs[static_cast<std::size_t>(j)], params);
        psi(i, j) = v;
        psi(j, i) = v;
      }

  std::vector<bool> alive(static_cast<std::size_t>(K0), true);
  const auto id_of = [&](Eigen::Index k) { return seg0.ids[static_cast<std::size_t>(k)]; };

  while (true) {
    // best adjacent pair; ties by smallest (minId, maxId)
    bool found = false;
    Eigen::Index bi = -1, bj = -1;
    double bestValue = 0.0;
    for (Eigen::Index i = 0; i < K0; ++i) {
      if (!alive[static_cast<std::size_t>(i)]) continue;
      for (Eigen::Index j : neighbors[static_cast<std::size_t>(i)]) {
        if (j <= i) continue;
        const double v = psi(i, j);
        bool better = !found;
        if (found) {
          if (polarity == Polarity::dissimilarity)
            better = v < bestValue;
          else
            better = v > bestValue;
          if (!better && v == bestValue) {
            const auto lo = std::min(id_of(i), id_of(j)), hi = std::max(id_of(i), id_of(j));
            const auto blo = std::min(id_of(bi), id_of(bj)), bhi = std::max(id_of(bi), id_of(bj));
            better = lo < blo || (lo == blo && hi < bhi);
          }
        }
        if (better) {
          found = true;
          bi = i;
          bj = j;
          bestValue = v;
        }
      }
    }
    if (!found) break;  // one segment per adjacency component remains

    const Eigen::Index survivor = id_of(bi) < id_of(bj) ? bi : bj;
    const Eigen::Index absorbed = survivor == bi ? bj : bi;
    trace.steps.push_back({id_of(survivor), id_of(absorbed), bestValue});

    auto& pv = pixels[static_cast<std::size_t>(survivor)];
    auto& pa = pixels[static_cast<std::size_t>(absorbed)];
    pv.insert(pv.end(), pa.begin(), pa.end());
    pa.clear();
    alive[static_cast<std::size_t>(absorbed)] = false;

    auto& nv = neighbors[static_cast<std::size_t>(survivor)];
    for (Eigen::Index nb : neighbors[static_cast<std::size_t>(absorbed)]) {
      neighbors[static_cast<std::size_t>(nb)].erase(absorbed);
      if (nb != survivor) {
        nv.insert(nb);
        neighbors[static_cast<std::size_t>(nb)].insert(survivor);
      }
    }
    neighbors[static_cast<std::size_t>(absorbed)].clear();
    nv.erase(absorbed);
    nv.erase(survivor);

    // pooled recompute for the merged segment, then refresh its neighborhood
    reprs[static_cast<std::size_t>(survivor)] =
        prepare_repr(measure, pooled_bag(features, pv, id_of(survivor)), params, histRange);
    for (Eigen::Index nb : nv) {
      const double v = psi_value(measure, reprs[static_cast<std::size_t>(survivor)],
                                 reprs[static_cast<std::size_t>(nb)], params);
      psi(survivor, nb) = v;
      psi(nb, survivor) = v;
    }
  }

  trace.finalSegments = static_cast<int>(std::count(alive.begin(), alive.end(), true));
  return trace;
}

SegmentMap reconstruct_level(const MergeTrace& trace, int k) {
  const int K0 = trace.initialSegments();
  if (k < trace.finalSegments || k > K0)
    throw ValidationError("reconstruct_level: level " + std::to_string(k) +
                          " outside [" + std::to_string(trace.finalSegments) + ", " +
                          std::to_string(K0) + "]");
  std::unordered_map<std::int32_t, std::int32_t> remap;
  for (int t = 0; t < K0 - k; ++t)
    remap[trace.steps[static_cast<std::size_t>(t)].absorbed] =
        trace.steps[static_cast<std::size_t>(t)].survivor;

  const auto resolve = [&](std::int32_t id) {
    std::int32_t cur = id;
    auto it = remap.find(cur);
    while (it != remap.end()) {
      cur = it->second;
      it = remap.find(cur);
    }
    if (cur != id) remap[id] = cur;  // path compression
    return cur;
  };

  LabelGrid grid = trace.initial.labels;
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    grid.data()[i] = resolve(grid.data()[i]);
  SegmentMap level = SegmentMap::from_grid(std::move(grid));
  if (level.segment_count() != k)
    throw InternalError("reconstruct_level: rebuilt partition has wrong segment count");
  return level;
}

const std::vector<std::string>& score_index_names() {
  static const std::vector<std::string> names = {"wl_rand", "rand", "adjusted_rand",
                                                 "hubert",  "iou",  "gce"};
  return names;
}

LevelScores score_trace(const MergeTrace& trace, const WeakLabels& wl,
                        const CrispLabels* crisp, CountMode mode) {
  if (trace.initial.height() != wl.height() || trace.initial.width() != wl.width())
    throw ValidationError("score_trace: weak labels do not match the trace dimensions");

  LevelScores scores;
  scores.mode = mode;

  // incremental rebuild: apply one id-rewrite per level
  LabelGrid working = trace.initial.labels;
  std::size_t applied = 0;
  for (int level = trace.initialSegments(); level >= trace.finalSegments; --level) {
    const SegmentMap seg = SegmentMap::from_grid(working);
    const WlRandResult wlScore = wl_rand(seg, wl, mode);
    LevelScore row;
    row.level = level;
    row.wlRand = wlScore.score;
    row.counts = wlScore.counts;
    if (crisp != nullptr) row.crisp = crisp_scores(seg, *crisp);
    scores.rows.push_back(row);

    if (level > trace.finalSegments) {
      const MergeStep& step = trace.steps[applied++];
      for (Eigen::Index i = 0; i < working.size(); ++i)
        if (working.data()[i] == step.absorbed) working.data()[i] = step.survivor;
    }
  }

  double sum = 0.0, sumSq = 0.0;
  for (const LevelScore& row : scores.rows) {
    sum += row.wlRand;
    sumSq += row.wlRand * row.wlRand;
  }
  const double count = static_cast<double>(scores.rows.size());
  scores.meanWlRand = sum / count;
  scores.sdWlRand = std::sqrt(std::max(0.0, sumSq / count - scores.meanWlRand * scores.meanWlRand));

  const auto value_of = [&](const LevelScore& row, const std::string& index) -> double {
    if (index == "wl_rand") return row.wlRand;
    if (!row.crisp) return std::numeric_limits<double>::quiet_NaN();
    if (index == "rand") return row.crisp->rand;
    if (index == "adjusted_rand") return row.crisp->adjustedRand;
    if (index == "hubert") return row.crisp->hubert;
    if (index == "iou") return row.crisp->iou;
    if (index == "gce") return row.crisp->gce;
    return std::numeric_limits<double>::quiet_NaN();
  };
  for (const std::string& index : score_index_names()) {
    if (index != "wl_rand" && crisp == nullptr) continue;
    const bool minimize = index == "gce";
    int bestLevel = -1;
    double best = 0.0;
    for (const LevelScore& row : scores.rows) {
      const double v = value_of(row, index);
      // ties go to the fewest segments; rows run coarser as level decreases
      const bool better = bestLevel < 0 || (minimize ? v < best : v > best) ||
                          (v == best && row.level < bestLevel);
      if (better) {
        best = v;
        bestLevel = row.level;
      }
    }
    scores.bestLevel[index] = bestLevel;
  }
  return scores;
}

std::pair<int, SegmentMap> best_candidate(const MergeTrace& trace, const LevelScores& scores,
                                          const std::string& index) {
  const auto it = scores.bestLevel.find(index);
  if (it == scores.bestLevel.end())
    throw ValidationError("best_candidate: unknown or unscored index '" + index + "'");
  return {it->second, reconstruct_level(trace, it->second)};
}

}  // namespace wlr
