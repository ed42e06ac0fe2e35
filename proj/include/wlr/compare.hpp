#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wlr/features.hpp"
#include "wlr/grid.hpp"

namespace wlr {

// Region adjacency of a partition: nodes are dense segment indices, edges join
// segments with touching pixels. Symmetric, no self-adjacency.
struct AdjacencyMatrix {
  Eigen::Index size = 0;
  std::vector<std::vector<Eigen::Index>> neighbors;  // sorted, per dense index

  bool adjacent(Eigen::Index i, Eigen::Index j) const;
};

AdjacencyMatrix build_adjacency(const SegmentMap& seg, int connectivity);

enum class Polarity { similarity, dissimilarity };

// Pairwise comparison matrix: psi values where segments are adjacent, the
// bound beta elsewhere (diagonal included). Beta defaults to the sentinel that
// excludes non-neighbors from the merge argmin/argmax: +inf for
// dissimilarities, -inf for similarities.
struct ComparisonMatrix {
  Eigen::MatrixXd entries;
  Polarity polarity = Polarity::dissimilarity;
  double beta = 0.0;
};

// ---- comparison functions ---------------------------------------------

// Euclidean distance between bag means.
double euclidean_mean(const FeatureBag& a, const FeatureBag& b);

// Weighted two-sample energy distance
//   (n*m/(n+m)) * (2*mean||x-y|| - mean||x-x'|| - mean||y-y'||)
// with Euclidean ground distance. Bags larger than `cap` are subsampled with
// a deterministic stride; the n, m weights stay the full bag sizes.
double energy_distance(const FeatureBag& a, const FeatureBag& b, Eigen::Index cap = 2048);

// Earth Mover's Distance between signatures: both weight vectors are
// normalized to total mass 1, then the balanced transportation problem over
// the Euclidean center-distance matrix is solved exactly.
double emd(const Signature& a, const Signature& b);

// Jensen-Shannon divergence (natural log), averaged over channels; requires
// identical binning. Per channel the value lies in [0, ln 2].
double js_divergence(const Histogram& a, const Histogram& b);

// Mutual information between the binned feature value and bag membership,
// plug-in estimate from the pooled per-channel histogram, averaged over
// channels. High MI means distinguishable bags, so as a merge measure it is
// negated into a similarity. Subsampling as for energy_distance.
double mutual_information(const FeatureBag& a, const FeatureBag& b, int bins = 32,
                          Eigen::Index cap = 2048);

// ---- measure plumbing --------------------------------------------------

enum class MeasureKind { jsdiv, euclid_mean, edist, emd, mi };

MeasureKind measure_from_name(const std::string& name);
std::string measure_name(MeasureKind kind);
Polarity measure_polarity(MeasureKind kind);
const std::vector<std::string>& measure_names();

struct MeasureParams {
  int histogramBins = 32;
  int signatureClusters = 8;
  int miBins = 32;
  Eigen::Index exemplarCap = 2048;
};

// Per-segment input to a measure; signature/histogram are filled only when the
// measure needs them.
struct SegmentRepr {
  FeatureBag bag;
  std::optional<Signature> signature;
  std::optional<Histogram> histogram;
};

SegmentRepr prepare_repr(MeasureKind kind, FeatureBag bag, const MeasureParams& params,
                         const Eigen::MatrixXd& histRange);

// psi(a, b) for the given measure; for `mi` this is -MI (similarity polarity).
double psi_value(MeasureKind kind, const SegmentRepr& a, const SegmentRepr& b,
                 const MeasureParams& params);

double default_beta(Polarity polarity);

// Fills adjacent entries with psi values and everything else with beta;
// symmetric by construction. `reprs` is indexed like the adjacency.
ComparisonMatrix build_psi(const std::vector<SegmentRepr>& reprs, const AdjacencyMatrix& adj,
                           MeasureKind kind, const MeasureParams& params);
ComparisonMatrix build_psi(const std::vector<SegmentRepr>& reprs, const AdjacencyMatrix& adj,
                           MeasureKind kind, const MeasureParams& params, double beta);

}  // namespace wlr
