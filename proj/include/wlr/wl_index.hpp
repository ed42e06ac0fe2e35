#pragma once

#include <cstdint>
#include <string>

#include "wlr/grid.hpp"

namespace wlr {

// How the correct cannot-link term b is counted.
//
// literal:    b sums, over every segment and ordered region pair (u, u'),
//             |C_u'| * |S_k ∩ C_u|. Collapsing the segment sum shows this
//             equals the cross-region pair count of the label set alone, so it
//             is the same for every partition of the grid.
// separation: b counts only the cross-region pairs the partition actually
//             separates, i.e. literal minus d. This variant rises and falls
//             with boundary adherence.
enum class CountMode { literal, separation };

CountMode count_mode_from_name(const std::string& name);
std::string count_mode_name(CountMode mode);

struct PairCounts {
  std::int64_t a = 0;  // correct must-link pairs (unordered, choose-2)
  std::int64_t b = 0;  // correct cannot-link pairs (ordered products)
  std::int64_t c = 0;  // incorrect must-link pairs (ordered products)
  std::int64_t d = 0;  // incorrect cannot-link pairs (ordered products)

  std::int64_t denominator() const;
};

// Fast paths over contingency tables. count_a/count_c expect a table built
// against the must-link map, count_b/count_d one built against cannot-link.
// All arithmetic is 64-bit and overflow-checked.
std::int64_t count_a(const ContingencyTable& ct);
std::int64_t count_c(const ContingencyTable& ct);
std::int64_t count_b(const ContingencyTable& ct, CountMode mode);
std::int64_t count_d(const ContingencyTable& ct);

struct WlRandResult {
  double score = 0.0;  // (a+b)/(a+b+c+d), in [0,1]
  PairCounts counts;
  CountMode mode = CountMode::literal;
};

// Scores a partition against weak labels. Throws ValidationError on dimension
// mismatch or when every pair count is structurally zero.
WlRandResult wl_rand(const SegmentMap& seg, const WeakLabels& wl,
                     CountMode mode = CountMode::literal);

// O(N^2) verification oracle: enumerates labeled pixel pairs and applies each
// term's counting convention directly, independent of the contingency path.
// Refuses instances whose weakly-labeled pixel count exceeds the cap.
struct NaiveCounts {
  std::int64_t a = 0;
  std::int64_t bLiteral = 0;
  std::int64_t bSeparation = 0;
  std::int64_t c = 0;
  std::int64_t d = 0;
};

NaiveCounts naive_pair_counts(const SegmentMap& seg, const WeakLabels& wl,
                              std::int64_t labeledPixelCap = 4096);

}  // namespace wlr
