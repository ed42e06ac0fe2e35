#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wlr/core.hpp"

namespace wlr {

// A candidate partition: every pixel carries exactly one segment id. Segment
// ids are arbitrary non-negative integers and are kept verbatim; a sorted id
// table provides the dense indexing used by the counting fast paths.
// Immutable after construction.
struct SegmentMap {
  LabelGrid labels;
  std::vector<std::int32_t> ids;  // sorted distinct ids; dense index = position

  Eigen::Index height() const { return labels.rows(); }
  Eigen::Index width() const { return labels.cols(); }
  int segment_count() const { return static_cast<int>(ids.size()); }

  // Dense index of an id, or -1 when absent.
  int dense_index(std::int32_t id) const;

  // Pixels per segment, in dense-index order. Sums to height*width.
  CountVector segment_sizes() const;

  static SegmentMap from_grid(LabelGrid grid);
};

// Must-link / cannot-link label maps. Id 0 means unlabeled; the two grids are
// independent (a pixel may carry both, either, or neither label).
struct WeakLabels {
  LabelGrid mustLink;
  LabelGrid cannotLink;
  int L = 0;  // distinct nonzero must-link ids present
  int U = 0;  // distinct nonzero cannot-link ids present

  Eigen::Index height() const { return mustLink.rows(); }
  Eigen::Index width() const { return mustLink.cols(); }

  static WeakLabels from_grids(LabelGrid mustLink, LabelGrid cannotLink);
};

// Crisp (possibly partial) ground-truth classes. Id 0 means unlabeled.
struct CrispLabels {
  LabelGrid classes;
  int J = 0;  // distinct nonzero class ids present

  static CrispLabels from_grid(LabelGrid grid);
};

// Intersection counts between a partition and a reference labeling, restricted
// to reference-labeled pixels. Row/column order follows the sorted id tables.
struct ContingencyTable {
  CountMatrix counts;               // K x R, entry = |S_k ∩ R_r|
  CountVector rowSums;              // labeled pixels per segment
  CountVector colSums;              // |R_r|
  std::vector<std::int32_t> segIds; // row -> segment id
  std::vector<std::int32_t> refIds; // col -> reference id (nonzero)
  std::int64_t total = 0;           // pixels labeled by the reference
};

// Single pass over the grids; unlabeled reference pixels (id 0) contribute to
// no entry. Throws ValidationError on dimension mismatch.
ContingencyTable build_contingency(const SegmentMap& seg, const LabelGrid& ref);

struct ValidationReport {
  bool valid = true;
  int K = 0, L = 0, U = 0;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
};

// Report-style check that (seg, wl) can be scored: matching dimensions and a
// weak labeling with at least one scoreable pair. Never throws.
ValidationReport validate_pair(const SegmentMap& seg, const WeakLabels& wl);

// Trivial initial segmenter: blockRows x blockCols axis-aligned blocks with
// ids 1..blockRows*blockCols, remainders spread evenly.
LabelGrid block_segmentation(Eigen::Index height, Eigen::Index width,
                             int blockRows, int blockCols);

}  // namespace wlr
