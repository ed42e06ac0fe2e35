#pragma once

#include "wlr/grid.hpp"

namespace wlr {

// Classical crisp-agreement baselines. All of them honor partial labelings by
// restricting every pair and pixel sum to gt-labeled pixels.
struct CrispScoreSet {
  double iou = 0.0;           // [0,1], per-class best-segment overlap, mean over classes
  double gce = 0.0;           // [0,1], symmetrized local refinement error (lower is better)
  double rand = 0.0;          // [0,1]
  double adjustedRand = 0.0;  // (-1,1]; 0 when the permutation-model denominator degenerates
  double hubert = 0.0;        // [-1,1]; agreements minus disagreements over total pairs
};

double rand_index(const SegmentMap& seg, const CrispLabels& gt);
double adjusted_rand(const SegmentMap& seg, const CrispLabels& gt);

// Agreement-minus-disagreement over all pairs, which is 2*rand - 1 by
// definition; computed through that identity so it holds exactly.
double hubert(const SegmentMap& seg, const CrispLabels& gt);

// Per ground-truth class, the best-matching segment's intersection over
// union (many-to-one matching allowed); mean over classes.
double iou(const SegmentMap& seg, const CrispLabels& gt);

double gce(const SegmentMap& seg, const CrispLabels& gt);

// All five from one contingency table.
CrispScoreSet crisp_scores(const SegmentMap& seg, const CrispLabels& gt);

}  // namespace wlr
