#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wlr/core.hpp"
#include "wlr/grid.hpp"

namespace wlr {

// Per-pixel feature vectors, stored pixel-major to mirror the hwc file
// layout: row (r*width + c) of `values` is the feature vector of pixel (r, c).
// Values are kept in double; the file format quantizes to f32 on save.
struct FeatureMap {
  Eigen::Index height = 0;
  Eigen::Index width = 0;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> values;  // (H*W) x D

  Eigen::Index channels() const { return values.cols(); }
  auto pixel(Eigen::Index r, Eigen::Index c) const { return values.row(r * width + c); }
};

// The exemplar set of one segment, one D-dimensional column per pixel.
struct FeatureBag {
  std::int32_t segmentId = 0;
  Eigen::MatrixXd exemplars;  // D x n_s

  Eigen::Index size() const { return exemplars.cols(); }
  Eigen::Index dim() const { return exemplars.rows(); }
};

// Weighted point set for transport distances: m centers with positive weights
// summing to the exemplar count they represent.
struct Signature {
  Eigen::MatrixXd centers;  // D x m
  Eigen::VectorXd weights;  // m, positive
};

// Per-channel normalized histograms over a fixed range.
struct Histogram {
  Eigen::MatrixXd probs;  // bins x channels, each column sums to 1
  Eigen::MatrixXd range;  // 2 x channels: row 0 = min, row 1 = max
};

// Non-overlapping factor x factor box means; trailing remainder rows/columns
// are dropped. factor = 1 is the identity.
GrayImage downsample(const GrayImage& image, int factor);

// 3x3 Sobel gradient magnitude with replicate padding. Requires a 3x3 image.
GrayImage sobel_magnitude(const GrayImage& image);

// Gliding-box lacunarity E[m^2]/E[m]^2, one channel per scale. At scale s the
// box masses m are taken from the (s+1)^2 positions of an s x s box gliding
// over the 2s x 2s window anchored at the pixel, with replicate padding.
// Windows of zero mass map to 1 (the homogeneous value). Requires a
// non-negative image and scales within min(H, W).
FeatureMap lacunarity(const GrayImage& image, const std::vector<int>& scales);

// Hand-crafted feature stack: lacunarity channels at the given scales followed
// by Sobel magnitude, z-scored per channel over the image. Constant channels
// are left unchanged.
FeatureMap hc_features(const GrayImage& image, const std::vector<int>& scales);

// Feature file pair: JSON sidecar header
//   {"height":H,"width":W,"channels":D,"dtype":"f32","layout":"hwc"}
// plus a raw little-endian f32 payload of length H*W*D. Loads are bit-exact
// and reject non-finite values.
FeatureMap load_feature_map(const std::string& headerPath, const std::string& payloadPath);
void save_feature_map(const std::string& headerPath, const std::string& payloadPath,
                      const FeatureMap& fm);

// One bag per segment, in the segment map's dense-id order. Exemplar counts
// sum to H*W.
std::vector<FeatureBag> bag_features(const FeatureMap& fm, const SegmentMap& seg);

// Deterministic k-means signature: farthest-point seeding from the
// lexicographically smallest exemplar, 25 Lloyd iterations, weights = cluster
// sizes. Bags of at most m exemplars pass through as singletons. Identical
// centers are merged.
Signature make_signature(const FeatureBag& bag, int clusters);

// Per-channel histogram of the bag over `range` (2 x D, min/max rows); values
// are clamped into range. Requires bins >= 2 and a nonempty bag.
Histogram histogram(const FeatureBag& bag, int bins, const Eigen::MatrixXd& range);

// Per-channel [min, max] over the whole map, as a 2 x D matrix.
Eigen::MatrixXd feature_range(const FeatureMap& fm);

}  // namespace wlr
