#include "wlr/wl_index.hpp"

#include <vector>

namespace wlr {

CountMode count_mode_from_name(const std::string& name) {
  if (name == "literal") return CountMode::literal;
  if (name == "separation") return CountMode::separation;
  throw ValidationError("unknown count mode '" + name + "' (expected literal or separation)");
}

std::string count_mode_name(CountMode mode) {
  return mode == CountMode::literal ? "literal" : "separation";
}

std::int64_t PairCounts::denominator() const {
  return checked_add(checked_add(a, b), checked_add(c, d));
}

std::int64_t count_a(const ContingencyTable& ct) {
  std::int64_t a = 0;
  for (Eigen::Index k = 0; k < ct.counts.rows(); ++k)
    for (Eigen::Index l = 0; l < ct.counts.cols(); ++l)
      a = checked_add(a, pairs2(ct.counts(k, l)));
  return a;
}

std::int64_t count_c(const ContingencyTable& ct) {
  std::int64_t c = 0;
  for (Eigen::Index k = 0; k < ct.counts.rows(); ++k)
    for (Eigen::Index l = 0; l < ct.counts.cols(); ++l) {
      const std::int64_t inter = ct.counts(k, l);
      c = checked_add(c, checked_mul(ct.colSums[l] - inter, inter));
    }
  return c;
}

std::int64_t count_b(const ContingencyTable& ct, CountMode mode) {
  // Literal term: for each segment piece of C_u, every pixel of every other
  // region counts as a preserved pair. The inner sum over u' is |C| - |C_u|.
  std::int64_t literal = 0;
  for (Eigen::Index k = 0; k < ct.counts.rows(); ++k)
    for (Eigen::Index u = 0; u < ct.counts.cols(); ++u)
      literal = checked_add(literal, checked_mul(ct.counts(k, u), ct.total - ct.colSums[u]));
  if (mode == CountMode::literal) return literal;
  return literal - count_d(ct);
}

std::int64_t count_d(const ContingencyTable& ct) {
  std::int64_t d = 0;
  for (Eigen::Index k = 0; k < ct.counts.rows(); ++k)
    for (Eigen::Index u = 0; u < ct.counts.cols(); ++u)
      d = checked_add(d, checked_mul(ct.counts(k, u), ct.rowSums[k] - ct.counts(k, u)));
  return d;
}

WlRandResult wl_rand(const SegmentMap& seg, const WeakLabels& wl, CountMode mode) {
  if (seg.height() != wl.height() || seg.width() != wl.width())
    throw ValidationError("wl_rand: segment map and weak labels dimensions differ");

  const ContingencyTable mTable = build_contingency(seg, wl.mustLink);
  const ContingencyTable cTable = build_contingency(seg, wl.cannotLink);

  WlRandResult result;
  result.mode = mode;
  result.counts.a = count_a(mTable);
  result.counts.c = count_c(mTable);
  result.counts.b = count_b(cTable, mode);
  result.counts.d = count_d(cTable);

  const std::int64_t denom = result.counts.denominator();
  if (denom == 0)
    throw ValidationError(
        "wl_rand: degenerate weak labels, a+b+c+d = 0 "
        "(no must-link region has 2+ pixels and fewer than 2 cannot-link regions)");
  result.score = static_cast<double>(checked_add(result.counts.a, result.counts.b)) /
                 static_cast<double>(denom);
  return result;
}

NaiveCounts naive_pair_counts(const SegmentMap& seg, const WeakLabels& wl,
                              std::int64_t labeledPixelCap) {
  if (seg.height() != wl.height() || seg.width() != wl.width())
    throw ValidationError("naive_pair_counts: dimensions differ");

  struct LabeledPixel {
    std::int32_t segId;
    std::int32_t refId;
  };
  std::vector<LabeledPixel> mPixels, cPixels;
  std::int64_t labeled = 0;
  for (Eigen::Index i = 0; i < seg.labels.size(); ++i) {
    const std::int32_t m = wl.mustLink.data()[i];
    const std::int32_t c = wl.cannotLink.data()[i];
    if (m != 0) mPixels.push_back({seg.labels.data()[i], m});
    if (c != 0) cPixels.push_back({seg.labels.data()[i], c});
    if (m != 0 || c != 0) ++labeled;
  }
  if (labeled > labeledPixelCap)
    throw ResourceCapError("naive_pair_counts: " + std::to_string(labeled) +
                           " labeled pixels exceed the cap of " +
                           std::to_string(labeledPixelCap));

  NaiveCounts n;
  // Unordered must-link pairs; the incorrect term's convention is ordered, so
  // a split pair contributes 2.
  for (std::size_t i = 0; i < mPixels.size(); ++i)
    for (std::size_t j = i + 1; j < mPixels.size(); ++j) {
      if (mPixels[i].refId != mPixels[j].refId) continue;
      if (mPixels[i].segId == mPixels[j].segId)
        n.a = checked_add(n.a, 1);
      else
        n.c = checked_add(n.c, 2);
    }
  // Cross-region cannot-link pairs, ordered in every convention.
  for (std::size_t i = 0; i < cPixels.size(); ++i)
    for (std::size_t j = i + 1; j < cPixels.size(); ++j) {
      if (cPixels[i].refId == cPixels[j].refId) continue;
      n.bLiteral = checked_add(n.bLiteral, 2);
      if (cPixels[i].segId == cPixels[j].segId)
        n.d = checked_add(n.d, 2);
      else
        n.bSeparation = checked_add(n.bSeparation, 2);
    }
  return n;
}

}  // namespace wlr
