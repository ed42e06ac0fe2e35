#include "wlr/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "feature payload I/O assumes a little-endian host");

namespace wlr {

namespace {

using PixelMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Integral image with a leading zero row/column: S(r, c) = sum over [0,r)x[0,c).
Eigen::MatrixXd integral(const Eigen::MatrixXd& img) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(img.rows() + 1, img.cols() + 1);
  for (Eigen::Index r = 0; r < img.rows(); ++r)
    for (Eigen::Index c = 0; c < img.cols(); ++c)
      s(r + 1, c + 1) = img(r, c) + s(r, c + 1) + s(r + 1, c) - s(r, c);
  return s;
}

double box_sum(const Eigen::MatrixXd& s, Eigen::Index r0, Eigen::Index c0,
               Eigen::Index r1, Eigen::Index c1) {  // [r0,r1) x [c0,c1)
  return s(r1, c1) - s(r0, c1) - s(r1, c0) + s(r0, c0);
}

Eigen::MatrixXd replicate_pad(const GrayImage& image, Eigen::Index pad) {
  const Eigen::Index h = image.rows(), w = image.cols();
  Eigen::MatrixXd out(h + 2 * pad, w + 2 * pad);
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const Eigen::Index sr = std::clamp<Eigen::Index>(r - pad, 0, h - 1);
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      const Eigen::Index sc = std::clamp<Eigen::Index>(c - pad, 0, w - 1);
      out(r, c) = image(sr, sc);
    }
  }
  return out;
}

}  // namespace

GrayImage downsample(const GrayImage& image, int factor) {
  if (factor < 1) throw ValidationError("downsample: factor must be >= 1");
  if (factor == 1) return image;
  const Eigen::Index oh = image.rows() / factor, ow = image.cols() / factor;
  if (oh < 1 || ow < 1) throw ValidationError("downsample: factor exceeds image size");
  GrayImage out(oh, ow);
  for (Eigen::Index r = 0; r < oh; ++r)
    for (Eigen::Index c = 0; c < ow; ++c) {
      double sum = 0.0;
      for (Eigen::Index i = 0; i < factor; ++i)
        for (Eigen::Index j = 0; j < factor; ++j)
          sum += image(r * factor + i, c * factor + j);
      out(r, c) = static_cast<float>(sum / (factor * factor));
    }
  return out;
}

GrayImage sobel_magnitude(const GrayImage& image) {
  if (image.rows() < 3 || image.cols() < 3)
    throw ValidationError("sobel: image must be at least 3x3");
  const Eigen::MatrixXd p = replicate_pad(image, 1);
  GrayImage out(image.rows(), image.cols());
  for (Eigen::Index r = 0; r < image.rows(); ++r)
    for (Eigen::Index c = 0; c < image.cols(); ++c) {
      const Eigen::Index pr = r + 1, pc = c + 1;
      const double gx = (p(pr - 1, pc + 1) + 2.0 * p(pr, pc + 1) + p(pr + 1, pc + 1)) -
                        (p(pr - 1, pc - 1) + 2.0 * p(pr, pc - 1) + p(pr + 1, pc - 1));
      const double gy = (p(pr + 1, pc - 1) + 2.0 * p(pr + 1, pc) + p(pr + 1, pc + 1)) -
                        (p(pr - 1, pc - 1) + 2.0 * p(pr - 1, pc) + p(pr - 1, pc + 1));
      out(r, c) = static_cast<float>(std::sqrt(gx * gx + gy * gy));
    }
  return out;
}

FeatureMap lacunarity(const GrayImage& image, const std::vector<int>& scales) {
  if (image.size() == 0) throw ValidationError("lacunarity: empty image");
  if (image.minCoeff() < 0.0f)
    throw ValidationError("lacunarity: image values must be non-negative");
  if (scales.empty()) throw ValidationError("lacunarity: no scales given");
  const Eigen::Index h = image.rows(), w = image.cols();
  for (int s : scales)
    if (s < 1 || s > std::min(h, w))
      throw ValidationError("lacunarity: scale " + std::to_string(s) +
                            " outside [1, min(H,W)]");

  FeatureMap fm;
  fm.height = h;
  fm.width = w;
  fm.values.resize(h * w, static_cast<Eigen::Index>(scales.size()));

  for (std::size_t si = 0; si < scales.size(); ++si) {
    const Eigen::Index s = scales[si];
    // Pixel (r, c) owns the 2s-window rows [r-s+1, r+s], so padding by s
    // covers every box the window contains.
    const Eigen::MatrixXd padded = replicate_pad(image, s);
    const Eigen::MatrixXd ii = integral(padded);

    // Box masses indexed by top-left corner in padded coordinates.
    const Eigen::Index mh = padded.rows() - s + 1, mw = padded.cols() - s + 1;
    Eigen::MatrixXd mass(mh, mw), mass2(mh, mw);
    for (Eigen::Index r = 0; r < mh; ++r)
      for (Eigen::Index c = 0; c < mw; ++c) {
        const double m = box_sum(ii, r, c, r + s, c + s);
        mass(r, c) = m;
        mass2(r, c) = m * m;
      }
    const Eigen::MatrixXd massI = integral(mass);
    const Eigen::MatrixXd mass2I = integral(mass2);

    const double positions = static_cast<double>((s + 1) * (s + 1));
    for (Eigen::Index r = 0; r < h; ++r)
      for (Eigen::Index c = 0; c < w; ++c) {
        // Boxes in the window have top-left corners [r-s+1, r+1] in image
        // coordinates, i.e. [r+1, r+s+2) after the +s pad shift.
        const Eigen::Index r0 = r + 1, c0 = c + 1;
        const double em = box_sum(massI, r0, c0, r0 + s + 1, c0 + s + 1) / positions;
        const double em2 = box_sum(mass2I, r0, c0, r0 + s + 1, c0 + s + 1) / positions;
        fm.values(r * w + c, static_cast<Eigen::Index>(si)) =
            em > 0.0 ? em2 / (em * em) : 1.0;
      }
  }
  return fm;
}

FeatureMap hc_features(const GrayImage& image, const std::vector<int>& scales) {
  FeatureMap lac = lacunarity(image, scales);
  const GrayImage sob = sobel_magnitude(image);

  FeatureMap fm;
  fm.height = lac.height;
  fm.width = lac.width;
  fm.values.resize(lac.values.rows(), lac.values.cols() + 1);
  fm.values.leftCols(lac.values.cols()) = lac.values;
  fm.values.col(lac.values.cols()) =
      Eigen::Map<const Eigen::VectorXf>(sob.data(), sob.size()).cast<double>();

  for (Eigen::Index ch = 0; ch < fm.values.cols(); ++ch) {
    const Eigen::VectorXd col = fm.values.col(ch);
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().mean());
    if (sd == 0.0) continue;  // constant channel, keep raw values
    fm.values.col(ch) = (col.array() - mean) / sd;
  }
  return fm;
}

FeatureMap load_feature_map(const std::string& headerPath, const std::string& payloadPath) {
  std::ifstream hin(headerPath);
  if (!hin) throw ValidationError("cannot open feature header: " + headerPath);
  nlohmann::json header;
  try {
    hin >> header;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed feature header " + headerPath + ": " + e.what());
  }
  for (const char* key : {"height", "width", "channels", "dtype", "layout"})
    if (!header.contains(key))
      throw ValidationError("feature header missing key '" + std::string(key) + "'");
  if (header["dtype"] != "f32")
    throw ValidationError("feature header: unknown dtype '" +
                          header["dtype"].dump() + "' (expected \"f32\")");
  if (header["layout"] != "hwc")
    throw ValidationError("feature header: unknown layout '" +
                          header["layout"].dump() + "' (expected \"hwc\")");
  const auto h = header["height"].get<std::int64_t>();
  const auto w = header["width"].get<std::int64_t>();
  const auto d = header["channels"].get<std::int64_t>();
  if (h < 1 || w < 1 || d < 1)
    throw ValidationError("feature header: non-positive dimensions");

  std::ifstream pin(payloadPath, std::ios::binary);
  if (!pin) throw ValidationError("cannot open feature payload: " + payloadPath);
  std::ostringstream buf;
  buf << pin.rdbuf();
  const std::string bytes = buf.str();
  const std::size_t expected = static_cast<std::size_t>(h) * w * d * sizeof(float);
  if (bytes.size() != expected)
    throw ValidationError("feature payload " + payloadPath + ": length " +
                          std::to_string(bytes.size()) + " does not match header (" +
                          std::to_string(expected) + " bytes)");

  FeatureMap fm;
  fm.height = h;
  fm.width = w;
  fm.values = Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic,
                                             Eigen::RowMajor>>(
                  reinterpret_cast<const float*>(bytes.data()), h * w, d)
                  .cast<double>();
  if (!fm.values.allFinite())
    throw ValidationError("feature payload " + payloadPath + ": non-finite values");
  return fm;
}

void save_feature_map(const std::string& headerPath, const std::string& payloadPath,
                      const FeatureMap& fm) {
  if (fm.values.rows() != fm.height * fm.width || fm.channels() < 1)
    throw ValidationError("save_feature_map: inconsistent feature map shape");
  nlohmann::json header = {{"height", fm.height},
                           {"width", fm.width},
                           {"channels", fm.channels()},
                           {"dtype", "f32"},
                           {"layout", "hwc"}};
  std::ofstream hout(headerPath, std::ios::trunc);
  if (!hout) throw ValidationError("cannot open feature header for writing: " + headerPath);
  hout << header.dump() << '\n';
  if (!hout) throw ValidationError("write failed: " + headerPath);

  const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> quantized =
      fm.values.cast<float>();
  std::ofstream pout(payloadPath, std::ios::binary | std::ios::trunc);
  if (!pout) throw ValidationError("cannot open feature payload for writing: " + payloadPath);
  pout.write(reinterpret_cast<const char*>(quantized.data()),
             static_cast<std::streamsize>(quantized.size() * sizeof(float)));
  if (!pout) throw ValidationError("write failed: " + payloadPath);
}

std::vector<FeatureBag> bag_features(const FeatureMap& fm, const SegmentMap& seg) {
  if (fm.height != seg.height() || fm.width != seg.width())
    throw ValidationError("bag_features: feature map and segment map dimensions differ");

  const int K = seg.segment_count();
  const CountVector sizes = seg.segment_sizes();
  std::vector<FeatureBag> bags(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    bags[k].segmentId = seg.ids[static_cast<std::size_t>(k)];
    bags[k].exemplars.resize(fm.channels(), sizes[k]);
  }
  std::vector<Eigen::Index> cursor(static_cast<std::size_t>(K), 0);
  for (Eigen::Index i = 0; i < seg.labels.size(); ++i) {
    const int k = seg.dense_index(seg.labels.data()[i]);
    bags[k].exemplars.col(cursor[k]++) = fm.values.row(i).transpose();
  }
  return bags;
}

namespace {

bool lex_less(const Eigen::MatrixXd& x, Eigen::Index a, Eigen::Index b) {
  for (Eigen::Index d = 0; d < x.rows(); ++d) {
    if (x(d, a) < x(d, b)) return true;
    if (x(d, a) > x(d, b)) return false;
  }
  return false;
}

Signature merge_identical_centers(const Eigen::MatrixXd& centers,
                                  const Eigen::VectorXd& weights) {
  const Eigen::Index m = centers.cols();
  std::vector<Eigen::Index> keep;
  Eigen::VectorXd merged = weights;
  for (Eigen::Index i = 0; i < m; ++i) {
    bool duplicate = false;
    for (Eigen::Index j : keep)
      if ((centers.col(i).array() == centers.col(j).array()).all()) {
        merged[j] += weights[i];
        duplicate = true;
        break;
      }
    if (!duplicate) keep.push_back(i);
  }
  Signature sig;
  sig.centers.resize(centers.rows(), static_cast<Eigen::Index>(keep.size()));
  sig.weights.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    sig.centers.col(static_cast<Eigen::Index>(i)) = centers.col(keep[i]);
    sig.weights[static_cast<Eigen::Index>(i)] = merged[keep[i]];
  }
  return sig;
}

}  // namespace

Signature make_signature(const FeatureBag& bag, int clusters) {
  if (clusters < 1) throw ValidationError("make_signature: cluster count must be >= 1");
  if (bag.size() < 1) throw ValidationError("make_signature: empty bag");
  const Eigen::MatrixXd& x = bag.exemplars;
  const Eigen::Index n = x.cols();
  const auto m = static_cast<Eigen::Index>(clusters);

  if (n <= m)
    return merge_identical_centers(x, Eigen::VectorXd::Ones(n));

  // Farthest-point seeding from the lexicographically smallest exemplar.
  std::vector<Eigen::Index> seeds;
  Eigen::Index first = 0;
  for (Eigen::Index i = 1; i < n; ++i)
    if (lex_less(x, i, first)) first = i;
  seeds.push_back(first);
  Eigen::VectorXd minDist =
      (x.colwise() - x.col(first)).colwise().squaredNorm().transpose();
  while (static_cast<Eigen::Index>(seeds.size()) < m) {
    Eigen::Index far = 0;
    minDist.maxCoeff(&far);  // ties resolve to the smallest index
    seeds.push_back(far);
    minDist = minDist.cwiseMin(
        (x.colwise() - x.col(far)).colwise().squaredNorm().transpose());
  }
  Eigen::MatrixXd centers(x.rows(), m);
  for (Eigen::Index i = 0; i < m; ++i) centers.col(i) = x.col(seeds[static_cast<std::size_t>(i)]);

  Eigen::VectorXi assign(n);
  for (int iter = 0; iter < 25; ++iter) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      (centers.colwise() - x.col(i)).colwise().squaredNorm().minCoeff(&best);
      assign[i] = static_cast<int>(best);
    }
    for (Eigen::Index k = 0; k < m; ++k) {
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(x.rows());
      Eigen::Index count = 0;
      for (Eigen::Index i = 0; i < n; ++i)
        if (assign[i] == k) {
          sum += x.col(i);
          ++count;
        }
      if (count > 0) centers.col(k) = sum / static_cast<double>(count);
      // empty clusters keep their previous center
    }
  }

  Eigen::VectorXd weights = Eigen::VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < n; ++i) weights[assign[i]] += 1.0;
  std::vector<Eigen::Index> nonEmpty;
  for (Eigen::Index k = 0; k < m; ++k)
    if (weights[k] > 0.0) nonEmpty.push_back(k);
  Eigen::MatrixXd liveCenters(x.rows(), static_cast<Eigen::Index>(nonEmpty.size()));
  Eigen::VectorXd liveWeights(static_cast<Eigen::Index>(nonEmpty.size()));
  for (std::size_t i = 0; i < nonEmpty.size(); ++i) {
    liveCenters.col(static_cast<Eigen::Index>(i)) = centers.col(nonEmpty[i]);
    liveWeights[static_cast<Eigen::Index>(i)] = weights[nonEmpty[i]];
  }
  return merge_identical_centers(liveCenters, liveWeights);
}

Histogram histogram(const FeatureBag& bag, int bins, const Eigen::MatrixXd& range) {
  if (bins < 2) throw ValidationError("histogram: need at least 2 bins");
  if (bag.size() < 1) throw ValidationError("histogram: empty bag");
  if (range.rows() != 2 || range.cols() != bag.dim())
    throw ValidationError("histogram: range must be 2 x D");
  for (Eigen::Index d = 0; d < range.cols(); ++d)
    if (!(range(0, d) <= range(1, d)))
      throw ValidationError("histogram: invalid range for channel " + std::to_string(d));

  Histogram h;
  h.range = range;
  h.probs = Eigen::MatrixXd::Zero(bins, bag.dim());
  for (Eigen::Index d = 0; d < bag.dim(); ++d) {
    const double lo = range(0, d), hi = range(1, d);
    for (Eigen::Index i = 0; i < bag.size(); ++i) {
      const double v = std::clamp(bag.exemplars(d, i), lo, hi);
      Eigen::Index bin = 0;
      if (hi > lo)
        bin = std::min<Eigen::Index>(bins - 1,
                                     static_cast<Eigen::Index>((v - lo) / (hi - lo) * bins));
      h.probs(bin, d) += 1.0;
    }
  }
  h.probs /= static_cast<double>(bag.size());
  return h;
}

Eigen::MatrixXd feature_range(const FeatureMap& fm) {
  Eigen::MatrixXd range(2, fm.channels());
  range.row(0) = fm.values.colwise().minCoeff();
  range.row(1) = fm.values.colwise().maxCoeff();
  return range;
}

}  // namespace wlr
