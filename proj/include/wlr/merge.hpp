#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wlr/compare.hpp"
#include "wlr/crisp.hpp"
#include "wlr/features.hpp"
#include "wlr/grid.hpp"
#include "wlr/wl_index.hpp"

namespace wlr {

struct MergeStep {
  std::int32_t survivor = 0;  // smaller segment id, keeps the merged pixels
  std::int32_t absorbed = 0;
  double psi = 0.0;           // comparison value that selected the pair
};

// Full record of a greedy merge run: replaying the first K0-k steps of
// `initial` reconstructs the level-k candidate partition.
struct MergeTrace {
  SegmentMap initial;
  std::vector<MergeStep> steps;
  MeasureKind measure = MeasureKind::euclid_mean;
  int connectivity = 4;
  int finalSegments = 1;  // > 1 only if the adjacency graph was disconnected

  int initialSegments() const { return initial.segment_count(); }
};

// Repeatedly merges the best adjacent pair (argmin for dissimilarities,
// argmax for similarities; ties to the smallest (minId, maxId) pair) until one
// segment remains per adjacency component. The merged segment's
// representation is recomputed from the pooled pixels and only the surviving
// segment's neighborhood is re-evaluated.
MergeTrace greedy_merge(const SegmentMap& seg0, const FeatureMap& features,
                        MeasureKind measure, int connectivity,
                        const MeasureParams& params = {});

// Candidate partition with k segments, rebuilt by id-rewriting the first
// K0-k steps. k must lie in [finalSegments, K0].
SegmentMap reconstruct_level(const MergeTrace& trace, int k);

struct LevelScore {
  int level = 0;  // segment count of this candidate
  double wlRand = 0.0;
  PairCounts counts;
  std::optional<CrispScoreSet> crisp;
};

// Indices a level curve can be ranked by. GCE is an error, so its best level
// minimizes; every other index maximizes. Ties go to the fewest segments.
const std::vector<std::string>& score_index_names();

struct LevelScores {
  std::vector<LevelScore> rows;  // one per level, K0 down to finalSegments
  CountMode mode = CountMode::literal;
  double meanWlRand = 0.0;
  double sdWlRand = 0.0;  // population standard deviation over levels
  std::map<std::string, int> bestLevel;
};

LevelScores score_trace(const MergeTrace& trace, const WeakLabels& wl,
                        const CrispLabels* crisp, CountMode mode);

std::pair<int, SegmentMap> best_candidate(const MergeTrace& trace, const LevelScores& scores,
                                          const std::string& index);

}  // namespace wlr
