#include "wlr/grid.hpp"

#include <algorithm>
#include <unordered_map>

namespace wlr {

namespace {

std::vector<std::int32_t> distinct_ids(const LabelGrid& grid, bool skipZero) {
  std::vector<std::int32_t> ids(grid.data(), grid.data() + grid.size());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (skipZero && !ids.empty() && ids.front() == 0) ids.erase(ids.begin());
  return ids;
}

void require_non_negative(const LabelGrid& grid, const char* what) {
  if (grid.size() > 0 && grid.minCoeff() < 0)
    throw ValidationError(std::string(what) + ": negative label id");
}

// "3" when ids {1,3} are present: ids need not be contiguous, but a gap in a
// hand-edited file usually means a lost region, so it is worth a warning.
bool has_id_gaps(const std::vector<std::int32_t>& ids) {
  if (ids.empty()) return false;
  return ids.back() != static_cast<std::int32_t>(ids.size());
}

}  // namespace

int SegmentMap::dense_index(std::int32_t id) const {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) return -1;
  return static_cast<int>(it - ids.begin());
}

CountVector SegmentMap::segment_sizes() const {
  CountVector n = CountVector::Zero(segment_count());
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    n[dense_index(labels.data()[i])] += 1;
  return n;
}

SegmentMap SegmentMap::from_grid(LabelGrid grid) {
  if (grid.size() == 0) throw ValidationError("segment map: empty grid");
  require_non_negative(grid, "segment map");
  SegmentMap seg;
  seg.ids = distinct_ids(grid, /*skipZero=*/false);
  seg.labels = std::move(grid);
  return seg;
}

WeakLabels WeakLabels::from_grids(LabelGrid mustLink, LabelGrid cannotLink) {
  if (mustLink.rows() != cannotLink.rows() || mustLink.cols() != cannotLink.cols())
    throw ValidationError("weak labels: must-link and cannot-link dimensions differ");
  if (mustLink.size() == 0) throw ValidationError("weak labels: empty grids");
  require_non_negative(mustLink, "must-link labels");
  require_non_negative(cannotLink, "cannot-link labels");
  WeakLabels wl;
  wl.L = static_cast<int>(distinct_ids(mustLink, /*skipZero=*/true).size());
  wl.U = static_cast<int>(distinct_ids(cannotLink, /*skipZero=*/true).size());
  wl.mustLink = std::move(mustLink);
  wl.cannotLink = std::move(cannotLink);
  return wl;
}

CrispLabels CrispLabels::from_grid(LabelGrid grid) {
  if (grid.size() == 0) throw ValidationError("crisp labels: empty grid");
  require_non_negative(grid, "crisp labels");
  CrispLabels gt;
  gt.J = static_cast<int>(distinct_ids(grid, /*skipZero=*/true).size());
  if (gt.J == 0) throw ValidationError("crisp labels: no labeled pixels");
  gt.classes = std::move(grid);
  return gt;
}

ContingencyTable build_contingency(const SegmentMap& seg, const LabelGrid& ref) {
  if (seg.labels.rows() != ref.rows() || seg.labels.cols() != ref.cols())
    throw ValidationError("contingency: segment map and reference dimensions differ");

  ContingencyTable ct;
  ct.segIds = seg.ids;
  ct.refIds = distinct_ids(ref, /*skipZero=*/true);

  std::unordered_map<std::int32_t, int> refIndex;
  refIndex.reserve(ct.refIds.size());
  for (std::size_t r = 0; r < ct.refIds.size(); ++r)
    refIndex.emplace(ct.refIds[r], static_cast<int>(r));
  std::unordered_map<std::int32_t, int> segIndex;
  segIndex.reserve(ct.segIds.size());
  for (std::size_t k = 0; k < ct.segIds.size(); ++k)
    segIndex.emplace(ct.segIds[k], static_cast<int>(k));

  const auto K = static_cast<Eigen::Index>(ct.segIds.size());
  const auto R = static_cast<Eigen::Index>(ct.refIds.size());
  ct.counts = CountMatrix::Zero(K, R);
  for (Eigen::Index i = 0; i < ref.size(); ++i) {
    const std::int32_t r = ref.data()[i];
    if (r == 0) continue;
    if (r < 0) throw ValidationError("contingency: negative reference id");
    ct.counts(segIndex.at(seg.labels.data()[i]), refIndex.at(r)) += 1;
  }
  ct.rowSums = ct.counts.rowwise().sum();
  ct.colSums = ct.counts.colwise().sum().transpose();
  ct.total = ct.counts.sum();
  return ct;
}

ValidationReport validate_pair(const SegmentMap& seg, const WeakLabels& wl) {
  ValidationReport rep;
  rep.K = seg.segment_count();
  rep.L = wl.L;
  rep.U = wl.U;

  if (seg.height() != wl.height() || seg.width() != wl.width()) {
    rep.valid = false;
    rep.errors.push_back("dimension mismatch: segment map is " +
                         std::to_string(seg.height()) + "x" + std::to_string(seg.width()) +
                         ", weak labels are " + std::to_string(wl.height()) + "x" +
                         std::to_string(wl.width()));
    return rep;
  }

  if (has_id_gaps(distinct_ids(wl.mustLink, true)))
    rep.warnings.push_back("must-link region ids are non-contiguous");
  if (has_id_gaps(distinct_ids(wl.cannotLink, true)))
    rep.warnings.push_back("cannot-link region ids are non-contiguous");

  // Scoreable iff some pair count can be nonzero. Both properties depend on
  // the label maps alone: a + c/2 equals the fixed sum of per-region must-link
  // pairs, and literal b is the fixed cross-region cannot-link pair count.
  std::unordered_map<std::int32_t, std::int64_t> mSizes, cSizes;
  for (Eigen::Index i = 0; i < wl.mustLink.size(); ++i) {
    if (wl.mustLink.data()[i] != 0) ++mSizes[wl.mustLink.data()[i]];
    if (wl.cannotLink.data()[i] != 0) ++cSizes[wl.cannotLink.data()[i]];
  }
  std::int64_t mustPairs = 0;
  for (const auto& [id, n] : mSizes) mustPairs = checked_add(mustPairs, pairs2(n));
  std::int64_t cTotal = 0;
  for (const auto& [id, n] : cSizes) cTotal = checked_add(cTotal, n);
  std::int64_t crossPairs = 0;
  for (const auto& [id, n] : cSizes)
    crossPairs = checked_add(crossPairs, checked_mul(n, cTotal - n));

  if (mustPairs == 0 && crossPairs == 0) {
    rep.valid = false;
    rep.errors.push_back(
        "degenerate weak labels: every pair count is structurally zero "
        "(no must-link region has 2+ pixels and fewer than 2 cannot-link regions)");
  }
  return rep;
}

LabelGrid block_segmentation(Eigen::Index height, Eigen::Index width,
                             int blockRows, int blockCols) {
  if (height < 1 || width < 1 || blockRows < 1 || blockCols < 1 ||
      blockRows > height || blockCols > width)
    throw ValidationError("block segmentation: invalid dimensions");
  LabelGrid grid(height, width);
  for (Eigen::Index r = 0; r < height; ++r) {
    const auto br = static_cast<std::int32_t>(r * blockRows / height);
    for (Eigen::Index c = 0; c < width; ++c) {
      const auto bc = static_cast<std::int32_t>(c * blockCols / width);
      grid(r, c) = br * blockCols + bc + 1;
    }
  }
  return grid;
}

}  // namespace wlr
