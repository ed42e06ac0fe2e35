#include "wlr/crisp.hpp"

#include <algorithm>
#include <cmath>

namespace wlr {

namespace {

struct PairSums {
  std::int64_t total = 0;  // C(n, 2) over labeled pixels
  std::int64_t cells = 0;  // sum of C(n_kj, 2)
  std::int64_t rows = 0;   // sum of C(n_k., 2)
  std::int64_t cols = 0;   // sum of C(n_.j, 2)

  std::int64_t agreements() const {
    // same-same + different-different pairs
    return checked_add(total, checked_mul(2, cells)) - rows - cols;
  }
};

PairSums pair_sums(const ContingencyTable& ct) {
  PairSums s;
  s.total = pairs2(ct.total);
  for (Eigen::Index k = 0; k < ct.counts.rows(); ++k)
    for (Eigen::Index j = 0; j < ct.counts.cols(); ++j)
      s.cells = checked_add(s.cells, pairs2(ct.counts(k, j)));
  for (Eigen::Index k = 0; k < ct.rowSums.size(); ++k)
    s.rows = checked_add(s.rows, pairs2(ct.rowSums[k]));
  for (Eigen::Index j = 0; j < ct.colSums.size(); ++j)
    s.cols = checked_add(s.cols, pairs2(ct.colSums[j]));
  return s;
}

ContingencyTable crisp_table(const SegmentMap& seg, const CrispLabels& gt) {
  ContingencyTable ct = build_contingency(seg, gt.classes);
  if (ct.total < 2)
    throw ValidationError("crisp index: fewer than 2 labeled pixels");
  return ct;
}

double rand_from(const PairSums& s) {
  return static_cast<double>(s.agreements()) / static_cast<double>(s.total);
}

double adjusted_rand_from(const PairSums& s) {
  const double expected = static_cast<double>(s.rows) * static_cast<double>(s.cols) /
                          static_cast<double>(s.total);
  const double maxIndex = 0.5 * (static_cast<double>(s.rows) + static_cast<double>(s.cols));
  const double denom = maxIndex - expected;
  if (denom == 0.0) return 0.0;  // both all-singletons or both single-block
  return (static_cast<double>(s.cells) - expected) / denom;
}

// Id permutations reorder contingency rows and columns; summing float terms in
// sorted order keeps the scores exactly invariant under relabeling.
double sorted_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += t;
  return sum;
}

double iou_from(const ContingencyTable& ct) {
  std::vector<double> perClass;
  perClass.reserve(static_cast<std::size_t>(ct.counts.cols()));
  for (Eigen::Index j = 0; j < ct.counts.cols(); ++j) {
    double best = 0.0;
    for (Eigen::Index k = 0; k < ct.counts.rows(); ++k) {
      const std::int64_t inter = ct.counts(k, j);
      if (inter == 0) continue;
      const std::int64_t uni = ct.rowSums[k] + ct.colSums[j] - inter;
      best = std::max(best, static_cast<double>(inter) / static_cast<double>(uni));
    }
    perClass.push_back(best);
  }
  return sorted_sum(perClass) / static_cast<double>(ct.counts.cols());
}

double gce_from(const ContingencyTable& ct) {
  // Directional refinement errors, summed per contingency cell: every pixel in
  // cell (k, j) has |R(A,p)\R(B,p)| = rowSum_k - n_kj when A is the partition.
  std::vector<double> segToGt, gtToSeg;
  for (Eigen::Index k = 0; k < ct.counts.rows(); ++k)
    for (Eigen::Index j = 0; j < ct.counts.cols(); ++j) {
      const double inter = static_cast<double>(ct.counts(k, j));
      if (inter == 0.0) continue;
      segToGt.push_back(inter * (static_cast<double>(ct.rowSums[k]) - inter) /
                        static_cast<double>(ct.rowSums[k]));
      gtToSeg.push_back(inter * (static_cast<double>(ct.colSums[j]) - inter) /
                        static_cast<double>(ct.colSums[j]));
    }
  return std::min(sorted_sum(segToGt), sorted_sum(gtToSeg)) /
         static_cast<double>(ct.total);
}

}  // namespace

double rand_index(const SegmentMap& seg, const CrispLabels& gt) {
  return rand_from(pair_sums(crisp_table(seg, gt)));
}

double adjusted_rand(const SegmentMap& seg, const CrispLabels& gt) {
  return adjusted_rand_from(pair_sums(crisp_table(seg, gt)));
}

double hubert(const SegmentMap& seg, const CrispLabels& gt) {
  return 2.0 * rand_index(seg, gt) - 1.0;
}

double iou(const SegmentMap& seg, const CrispLabels& gt) {
  return iou_from(crisp_table(seg, gt));
}

double gce(const SegmentMap& seg, const CrispLabels& gt) {
  return gce_from(crisp_table(seg, gt));
}

CrispScoreSet crisp_scores(const SegmentMap& seg, const CrispLabels& gt) {
  const ContingencyTable ct = crisp_table(seg, gt);
  const PairSums s = pair_sums(ct);
  CrispScoreSet scores;
  scores.rand = rand_from(s);
  scores.adjustedRand = adjusted_rand_from(s);
  scores.hubert = 2.0 * scores.rand - 1.0;
  scores.iou = iou_from(ct);
  scores.gce = gce_from(ct);
  return scores;
}

}  // namespace wlr
