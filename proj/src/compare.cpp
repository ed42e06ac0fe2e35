#include "wlr/compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wlr {

bool AdjacencyMatrix::adjacent(Eigen::Index i, Eigen::Index j) const {
  if (i == j) return false;
  const auto& n = neighbors[static_cast<std::size_t>(i)];
  return std::binary_search(n.begin(), n.end(), j);
}

AdjacencyMatrix build_adjacency(const SegmentMap& seg, int connectivity) {
  if (connectivity != 4 && connectivity != 8)
    throw ValidationError("adjacency: connectivity must be 4 or 8");

  AdjacencyMatrix adj;
  adj.size = seg.segment_count();
  adj.neighbors.assign(static_cast<std::size_t>(adj.size), {});

  const auto touch = [&](std::int32_t a, std::int32_t b) {
    if (a == b) return;
    const auto i = static_cast<std::size_t>(seg.dense_index(a));
    const auto j = static_cast<std::size_t>(seg.dense_index(b));
    adj.neighbors[i].push_back(static_cast<Eigen::Index>(j));
    adj.neighbors[j].push_back(static_cast<Eigen::Index>(i));
  };

  const LabelGrid& g = seg.labels;
  for (Eigen::Index r = 0; r < g.rows(); ++r)
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
      if (c + 1 < g.cols()) touch(g(r, c), g(r, c + 1));
      if (r + 1 < g.rows()) {
        touch(g(r, c), g(r + 1, c));
        if (connectivity == 8) {
          if (c + 1 < g.cols()) touch(g(r, c), g(r + 1, c + 1));
          if (c > 0) touch(g(r, c), g(r + 1, c - 1));
        }
      }
    }

  for (auto& n : adj.neighbors) {
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
  }
  return adj;
}

namespace {

void require_same_dim(const FeatureBag& a, const FeatureBag& b, const char* what) {
  if (a.size() < 1 || b.size() < 1)
    throw ValidationError(std::string(what) + ": empty bag");
  if (a.dim() != b.dim())
    throw ValidationError(std::string(what) + ": feature dimensions differ");
}

// Keeps at most `cap` columns with a fixed stride, so the same bag always
// yields the same subsample.
Eigen::MatrixXd stride_subsample(const Eigen::MatrixXd& x, Eigen::Index cap) {
  const Eigen::Index n = x.cols();
  if (n <= cap) return x;
  const Eigen::Index stride = (n + cap - 1) / cap;
  const Eigen::Index kept = (n - 1) / stride + 1;
  Eigen::MatrixXd out(x.rows(), kept);
  for (Eigen::Index i = 0; i < kept; ++i) out.col(i) = x.col(i * stride);
  return out;
}

double mean_cross_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      sum += (a.col(i) - b.col(j)).norm();
  return sum / (static_cast<double>(a.cols()) * static_cast<double>(b.cols()));
}

// Deterministic argument ordering: running psi(A, B) and psi(B, A) through the
// same float program keeps symmetry bit-exact.
bool data_precedes(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) return a.cols() < b.cols();
  if (a.rows() != b.rows()) return a.rows() < b.rows();
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a.data()[i] != b.data()[i]) return a.data()[i] < b.data()[i];
  return false;
}

double entropy2(double p, double q) {  // -(p ln p + q ln q) with 0 ln 0 = 0
  const double hp = p > 0.0 ? p * std::log(p) : 0.0;
  const double hq = q > 0.0 ? q * std::log(q) : 0.0;
  return -(hp + hq);
}

}  // namespace

double euclidean_mean(const FeatureBag& a, const FeatureBag& b) {
  require_same_dim(a, b, "euclidean_mean");
  return (a.exemplars.rowwise().mean() - b.exemplars.rowwise().mean()).norm();
}

double energy_distance(const FeatureBag& a, const FeatureBag& b, Eigen::Index cap) {
  require_same_dim(a, b, "energy_distance");
  if (data_precedes(b.exemplars, a.exemplars)) return energy_distance(b, a, cap);
  const Eigen::MatrixXd xs = stride_subsample(a.exemplars, cap);
  const Eigen::MatrixXd ys = stride_subsample(b.exemplars, cap);
  const double cross = mean_cross_distance(xs, ys);
  const double withinX = mean_cross_distance(xs, xs);
  const double withinY = mean_cross_distance(ys, ys);
  const double n = static_cast<double>(a.size()), m = static_cast<double>(b.size());
  return n * m / (n + m) * (2.0 * cross - withinX - withinY);
}

double js_divergence(const Histogram& a, const Histogram& b) {
  if (a.probs.rows() != b.probs.rows() || a.probs.cols() != b.probs.cols() ||
      a.range != b.range)
    throw ValidationError("js_divergence: mismatched histogram binning");
  double total = 0.0;
  for (Eigen::Index ch = 0; ch < a.probs.cols(); ++ch) {
    double js = 0.0;
    for (Eigen::Index i = 0; i < a.probs.rows(); ++i) {
      const double p = a.probs(i, ch), q = b.probs(i, ch);
      const double m = 0.5 * (p + q);
      const double fromP = p > 0.0 ? 0.5 * p * std::log(p / m) : 0.0;
      const double fromQ = q > 0.0 ? 0.5 * q * std::log(q / m) : 0.0;
      js += fromP + fromQ;  // commutative, so swapping p and q cannot move bits
    }
    total += js;
  }
  return total / static_cast<double>(a.probs.cols());
}

double mutual_information(const FeatureBag& a, const FeatureBag& b, int bins,
                          Eigen::Index cap) {
  require_same_dim(a, b, "mutual_information");
  if (bins < 2) throw ValidationError("mutual_information: need at least 2 bins");
  const Eigen::MatrixXd xs = stride_subsample(a.exemplars, cap);
  const Eigen::MatrixXd ys = stride_subsample(b.exemplars, cap);
  const double na = static_cast<double>(xs.cols()), nb = static_cast<double>(ys.cols());
  const double n = na + nb;

  double total = 0.0;
  for (Eigen::Index d = 0; d < xs.rows(); ++d) {
    const double lo = std::min(xs.row(d).minCoeff(), ys.row(d).minCoeff());
    const double hi = std::max(xs.row(d).maxCoeff(), ys.row(d).maxCoeff());
    Eigen::VectorXd countA = Eigen::VectorXd::Zero(bins);
    Eigen::VectorXd countB = Eigen::VectorXd::Zero(bins);
    const auto bin_of = [&](double v) -> Eigen::Index {
      if (hi <= lo) return 0;
      return std::min<Eigen::Index>(bins - 1,
                                    static_cast<Eigen::Index>((v - lo) / (hi - lo) * bins));
    };
    for (Eigen::Index i = 0; i < xs.cols(); ++i) countA[bin_of(xs(d, i))] += 1.0;
    for (Eigen::Index i = 0; i < ys.cols(); ++i) countB[bin_of(ys(d, i))] += 1.0;

    // I(F;Z) = H(Z) - H(Z|F); the conditional term is a mean of non-negative
    // entropies, so the estimate never exceeds H(Z) <= ln 2.
    const double hz = entropy2(na / n, nb / n);
    double hzf = 0.0;
    for (Eigen::Index i = 0; i < bins; ++i) {
      const double nf = countA[i] + countB[i];
      if (nf == 0.0) continue;
      hzf += nf / n * entropy2(countA[i] / nf, countB[i] / nf);
    }
    total += std::max(0.0, hz - hzf);
  }
  return total / static_cast<double>(xs.rows());
}

MeasureKind measure_from_name(const std::string& name) {
  if (name == "jsdiv") return MeasureKind::jsdiv;
  if (name == "euclid-mean") return MeasureKind::euclid_mean;
  if (name == "edist") return MeasureKind::edist;
  if (name == "emd") return MeasureKind::emd;
  if (name == "mi") return MeasureKind::mi;
  throw ValidationError("unknown measure '" + name +
                        "' (expected jsdiv | euclid-mean | edist | emd | mi)");
}

std::string measure_name(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::jsdiv: return "jsdiv";
    case MeasureKind::euclid_mean: return "euclid-mean";
    case MeasureKind::edist: return "edist";
    case MeasureKind::emd: return "emd";
    case MeasureKind::mi: return "mi";
  }
  throw InternalError("unreachable measure kind");
}

Polarity measure_polarity(MeasureKind kind) {
  return kind == MeasureKind::mi ? Polarity::similarity : Polarity::dissimilarity;
}

const std::vector<std::string>& measure_names() {
  static const std::vector<std::string> names = {"jsdiv", "euclid-mean", "edist", "emd", "mi"};
  return names;
}

SegmentRepr prepare_repr(MeasureKind kind, FeatureBag bag, const MeasureParams& params,
                         const Eigen::MatrixXd& histRange) {
  SegmentRepr repr;
  repr.bag = std::move(bag);
  if (kind == MeasureKind::emd)
    repr.signature = make_signature(repr.bag, params.signatureClusters);
  if (kind == MeasureKind::jsdiv)
    repr.histogram = histogram(repr.bag, params.histogramBins, histRange);
  return repr;
}

double psi_value(MeasureKind kind, const SegmentRepr& a, const SegmentRepr& b,
                 const MeasureParams& params) {
  switch (kind) {
    case MeasureKind::jsdiv:
      return js_divergence(*a.histogram, *b.histogram);
    case MeasureKind::euclid_mean:
      return euclidean_mean(a.bag, b.bag);
    case MeasureKind::edist:
      return energy_distance(a.bag, b.bag, params.exemplarCap);
    case MeasureKind::emd:
      return emd(*a.signature, *b.signature);
    case MeasureKind::mi:
      return -mutual_information(a.bag, b.bag, params.miBins, params.exemplarCap);
  }
  throw InternalError("unreachable measure kind");
}

double default_beta(Polarity polarity) {
  return polarity == Polarity::dissimilarity ? std::numeric_limits<double>::infinity()
                                             : -std::numeric_limits<double>::infinity();
}

ComparisonMatrix build_psi(const std::vector<SegmentRepr>& reprs, const AdjacencyMatrix& adj,
                           MeasureKind kind, const MeasureParams& params) {
  return build_psi(reprs, adj, kind, params, default_beta(measure_polarity(kind)));
}

ComparisonMatrix build_psi(const std::vector<SegmentRepr>& reprs, const AdjacencyMatrix& adj,
                           MeasureKind kind, const MeasureParams& params, double beta) {
  if (static_cast<Eigen::Index>(reprs.size()) != adj.size)
    throw ValidationError("build_psi: representation count does not match adjacency size");
  ComparisonMatrix psi;
  psi.polarity = measure_polarity(kind);
  psi.beta = beta;
  psi.entries = Eigen::MatrixXd::Constant(adj.size, adj.size, beta);
  for (Eigen::Index i = 0; i < adj.size; ++i)
    for (Eigen::Index j : adj.neighbors[static_cast<std::size_t>(i)])
      if (j > i) {
        const double v = psi_value(kind, reprs[static_cast<std::size_t>(i)],
                                   reprs[static_cast<std::size_t>(j)], params);
        psi.entries(i, j) = v;
        psi.entries(j, i) = v;
      }
  return psi;
}

}  // namespace wlr
