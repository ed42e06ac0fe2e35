// wlrand: batch scoring and merging front end.
//
// Subcommands: score, merge, sweep, features, oracle. Every report embeds the
// effective config and content digests of its inputs, and reruns on identical
// inputs are byte-identical. Exit codes: 0 success, 2 validation failure,
// 3 resource cap exceeded, 4 internal invariant violation.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "wlr/compare.hpp"
#include "wlr/crisp.hpp"
#include "wlr/features.hpp"
#include "wlr/grid_io.hpp"
#include "wlr/merge.hpp"
#include "wlr/wl_index.hpp"

namespace {

using nlohmann::json;

// ---- report plumbing ----------------------------------------------------

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char ch : bytes) {
    hash ^= ch;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw wlr::ValidationError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(fnv1a64(buf.str())));
  return std::string("fnv1a64:") + hex;
}

json input_entry(const std::string& path) {
  return json{{"path", path}, {"digest", file_digest(path)}};
}

void emit_report(const std::string& outPath, const json& report) {
  const std::string text = report.dump(2) + "\n";
  if (outPath.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(outPath, std::ios::binary | std::ios::trunc);
  if (!out) throw wlr::ValidationError("cannot open report for writing: " + outPath);
  out << text;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

json counts_json(const wlr::PairCounts& counts) {
  return json{{"a", counts.a}, {"b", counts.b}, {"c", counts.c}, {"d", counts.d}};
}

json crisp_json(const wlr::CrispScoreSet& s) {
  return json{{"iou", s.iou},
              {"gce", s.gce},
              {"rand", s.rand},
              {"adjusted_rand", s.adjustedRand},
              {"hubert", s.hubert}};
}

// ---- input loading -------------------------------------------------------

wlr::GridFormat resolve_format(const std::string& path, const std::string& format) {
  if (format == "auto") return wlr::grid_format_from_path(path);
  return wlr::grid_format_from_name(format);
}

wlr::LabelGrid load_grid(const std::string& path, const std::string& format) {
  return wlr::load_label_grid(path, resolve_format(path, format));
}

wlr::GrayImage load_gray(const std::string& path, const std::string& format) {
  const wlr::LabelGrid grid = load_grid(path, format);
  return grid.cast<float>();
}

// ---- subcommand options --------------------------------------------------

struct ScoreOptions {
  std::string seg, must, cannot, crisp, out;
  std::string mode = "literal";
  std::string format = "auto";
};

struct MergeOptions {
  std::string seg, featuresHeader, featuresData, out;
  std::string measure = "euclid-mean";
  std::string format = "auto";
  int connectivity = 4;
  int signatureClusters = 8;
  int histogramBins = 32;
  int miBins = 32;
  std::int64_t exemplarCap = 2048;
};

struct SweepOptions {
  MergeOptions merge;
  std::string must, cannot, crisp, curvePrefix;
  std::string mode = "literal";
  std::vector<std::string> measures;
};

struct FeatureOptions {
  std::string image, outHeader, outData;
  std::string format = "auto";
  int downsampleFactor = 1;
  std::vector<int> scales = {2, 4, 8};
};

struct OracleOptions {
  std::string seg, must, cannot, out;
  std::string format = "auto";
  std::int64_t cap = 4096;
};

wlr::MeasureParams measure_params(const MergeOptions& opt) {
  wlr::MeasureParams params;
  params.signatureClusters = opt.signatureClusters;
  params.histogramBins = opt.histogramBins;
  params.miBins = opt.miBins;
  params.exemplarCap = opt.exemplarCap;
  return params;
}

json merge_config_json(const MergeOptions& opt) {
  return json{{"seg", opt.seg},
              {"features_header", opt.featuresHeader},
              {"features_data", opt.featuresData},
              {"measure", opt.measure},
              {"format", opt.format},
              {"connectivity", opt.connectivity},
              {"signature_clusters", opt.signatureClusters},
              {"histogram_bins", opt.histogramBins},
              {"mi_bins", opt.miBins},
              {"exemplar_cap", opt.exemplarCap}};
}

// ---- subcommands -----------------------------------------------------------

int run_score(const ScoreOptions& opt) {
  const wlr::SegmentMap seg = wlr::SegmentMap::from_grid(load_grid(opt.seg, opt.format));
  const wlr::WeakLabels wl = wlr::WeakLabels::from_grids(load_grid(opt.must, opt.format),
                                                         load_grid(opt.cannot, opt.format));
  const wlr::ValidationReport rep = wlr::validate_pair(seg, wl);
  if (!rep.valid) {
    json error = {{"error", {{"kind", "validation"}, {"details", rep.errors}}}};
    std::cout << error.dump(2) << "\n";
    return 2;
  }

  json report;
  report["command"] = "score";
  report["config"] = {{"seg", opt.seg},
                      {"must", opt.must},
                      {"cannot", opt.cannot},
                      {"crisp", opt.crisp},
                      {"mode", opt.mode},
                      {"format", opt.format}};
  report["inputs"] = {{"seg", input_entry(opt.seg)},
                      {"must", input_entry(opt.must)},
                      {"cannot", input_entry(opt.cannot)}};
  report["validation"] = {{"valid", true}, {"K", rep.K},   {"L", rep.L},
                          {"U", rep.U},    {"warnings", rep.warnings}};

  const wlr::WlRandResult wlScore =
      wlr::wl_rand(seg, wl, wlr::count_mode_from_name(opt.mode));
  report["wl_rand"] = {{"mode", wlr::count_mode_name(wlScore.mode)},
                       {"score", wlScore.score},
                       {"counts", counts_json(wlScore.counts)}};

  if (!opt.crisp.empty()) {
    report["inputs"]["crisp"] = input_entry(opt.crisp);
    const wlr::CrispLabels gt =
        wlr::CrispLabels::from_grid(load_grid(opt.crisp, opt.format));
    report["crisp"] = crisp_json(wlr::crisp_scores(seg, gt));
  }
  emit_report(opt.out, report);
  return 0;
}

json trace_json(const wlr::MergeTrace& trace, const MergeOptions& opt) {
  json steps = json::array();
  for (const wlr::MergeStep& s : trace.steps)
    steps.push_back({{"survivor", s.survivor}, {"absorbed", s.absorbed}, {"psi", s.psi}});
  return json{{"initial_map", opt.seg},
              {"measure", wlr::measure_name(trace.measure)},
              {"connectivity", trace.connectivity},
              {"initial_segments", trace.initialSegments()},
              {"final_segments", trace.finalSegments},
              {"steps", steps}};
}

int run_merge(const MergeOptions& opt) {
  const wlr::SegmentMap seg0 = wlr::SegmentMap::from_grid(load_grid(opt.seg, opt.format));
  const wlr::FeatureMap features =
      wlr::load_feature_map(opt.featuresHeader, opt.featuresData);
  const wlr::MergeTrace trace = wlr::greedy_merge(
      seg0, features, wlr::measure_from_name(opt.measure), opt.connectivity,
      measure_params(opt));

  json report;
  report["command"] = "merge";
  report["config"] = merge_config_json(opt);
  report["inputs"] = {{"seg", input_entry(opt.seg)},
                      {"features_header", input_entry(opt.featuresHeader)},
                      {"features_data", input_entry(opt.featuresData)}};
  report["trace"] = trace_json(trace, opt);
  emit_report(opt.out, report);
  return 0;
}

void write_curve(const std::string& path, const wlr::LevelScores& scores, bool withCrisp) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw wlr::ValidationError("cannot open curve for writing: " + path);
  out << "level,wl_rand";
  if (withCrisp) out << ",rand,adjusted_rand,hubert,iou,gce";
  out << "\n";
  for (const wlr::LevelScore& row : scores.rows) {
    out << row.level << "," << format_double(row.wlRand);
    if (withCrisp) {
      const wlr::CrispScoreSet& s = *row.crisp;
      out << "," << format_double(s.rand) << "," << format_double(s.adjustedRand) << ","
          << format_double(s.hubert) << "," << format_double(s.iou) << ","
          << format_double(s.gce);
    }
    out << "\n";
  }
}

int run_sweep(const SweepOptions& opt) {
  const wlr::SegmentMap seg0 =
      wlr::SegmentMap::from_grid(load_grid(opt.merge.seg, opt.merge.format));
  const wlr::WeakLabels wl =
      wlr::WeakLabels::from_grids(load_grid(opt.must, opt.merge.format),
                                  load_grid(opt.cannot, opt.merge.format));
  const wlr::ValidationReport rep = wlr::validate_pair(seg0, wl);
  if (!rep.valid) {
    json error = {{"error", {{"kind", "validation"}, {"details", rep.errors}}}};
    std::cout << error.dump(2) << "\n";
    return 2;
  }
  const wlr::FeatureMap features =
      wlr::load_feature_map(opt.merge.featuresHeader, opt.merge.featuresData);

  std::optional<wlr::CrispLabels> crisp;
  if (!opt.crisp.empty())
    crisp = wlr::CrispLabels::from_grid(load_grid(opt.crisp, opt.merge.format));

  const std::vector<std::string> measures =
      opt.measures.empty() ? wlr::measure_names() : opt.measures;
  const wlr::CountMode mode = wlr::count_mode_from_name(opt.mode);

  std::string curvePrefix = opt.curvePrefix;
  if (curvePrefix.empty()) {
    curvePrefix = opt.merge.out.empty() ? "sweep" : opt.merge.out;
    if (curvePrefix.size() > 5 && curvePrefix.substr(curvePrefix.size() - 5) == ".json")
      curvePrefix = curvePrefix.substr(0, curvePrefix.size() - 5);
  }

  json leaderboard = json::array();
  json curves;
  for (const std::string& name : measures) {
    const wlr::MergeTrace trace =
        wlr::greedy_merge(seg0, features, wlr::measure_from_name(name),
                          opt.merge.connectivity, measure_params(opt.merge));
    const wlr::LevelScores scores =
        wlr::score_trace(trace, wl, crisp ? &*crisp : nullptr, mode);

    json best;
    for (const auto& [index, level] : scores.bestLevel) {
      double score = 0.0;
      for (const wlr::LevelScore& row : scores.rows)
        if (row.level == level) {
          if (index == "wl_rand")
            score = row.wlRand;
          else if (index == "rand")
            score = row.crisp->rand;
          else if (index == "adjusted_rand")
            score = row.crisp->adjustedRand;
          else if (index == "hubert")
            score = row.crisp->hubert;
          else if (index == "iou")
            score = row.crisp->iou;
          else if (index == "gce")
            score = row.crisp->gce;
        }
      best[index] = {{"level", level}, {"score", score}};
    }
    leaderboard.push_back({{"measure", name},
                           {"mean_wl_rand", scores.meanWlRand},
                           {"sd_wl_rand", scores.sdWlRand},
                           {"levels", static_cast<int>(scores.rows.size())},
                           {"best", best}});

    const std::string curvePath = curvePrefix + "." + name + ".csv";
    write_curve(curvePath, scores, crisp.has_value());
    curves[name] = curvePath;
  }

  json report;
  report["command"] = "sweep";
  report["config"] = merge_config_json(opt.merge);
  report["config"]["must"] = opt.must;
  report["config"]["cannot"] = opt.cannot;
  report["config"]["crisp"] = opt.crisp;
  report["config"]["mode"] = opt.mode;
  report["config"]["measures"] = measures;
  report["config"]["curve_prefix"] = curvePrefix;
  report["inputs"] = {{"seg", input_entry(opt.merge.seg)},
                      {"must", input_entry(opt.must)},
                      {"cannot", input_entry(opt.cannot)},
                      {"features_header", input_entry(opt.merge.featuresHeader)},
                      {"features_data", input_entry(opt.merge.featuresData)}};
  if (!opt.crisp.empty()) report["inputs"]["crisp"] = input_entry(opt.crisp);
  report["validation"] = {{"valid", true}, {"K", rep.K},   {"L", rep.L},
                          {"U", rep.U},    {"warnings", rep.warnings}};
  report["leaderboard"] = leaderboard;
  report["curves"] = curves;
  emit_report(opt.merge.out, report);
  return 0;
}

int run_features(const FeatureOptions& opt) {
  wlr::GrayImage image = load_gray(opt.image, opt.format);
  if (opt.downsampleFactor > 1) image = wlr::downsample(image, opt.downsampleFactor);
  const wlr::FeatureMap fm = wlr::hc_features(image, opt.scales);
  wlr::save_feature_map(opt.outHeader, opt.outData, fm);
  return 0;
}

int run_oracle(const OracleOptions& opt) {
  const wlr::SegmentMap seg = wlr::SegmentMap::from_grid(load_grid(opt.seg, opt.format));
  const wlr::WeakLabels wl = wlr::WeakLabels::from_grids(load_grid(opt.must, opt.format),
                                                         load_grid(opt.cannot, opt.format));
  if (seg.height() != wl.height() || seg.width() != wl.width()) {
    json error = {{"error",
                   {{"kind", "validation"},
                    {"details", json::array({"dimension mismatch between seg and labels"})}}}};
    std::cout << error.dump(2) << "\n";
    return 2;
  }

  const wlr::NaiveCounts naive = wlr::naive_pair_counts(seg, wl, opt.cap);
  const wlr::ContingencyTable mTable = wlr::build_contingency(seg, wl.mustLink);
  const wlr::ContingencyTable cTable = wlr::build_contingency(seg, wl.cannotLink);
  const std::int64_t a = wlr::count_a(mTable);
  const std::int64_t c = wlr::count_c(mTable);
  const std::int64_t bLit = wlr::count_b(cTable, wlr::CountMode::literal);
  const std::int64_t bSep = wlr::count_b(cTable, wlr::CountMode::separation);
  const std::int64_t d = wlr::count_d(cTable);
  const bool match = a == naive.a && c == naive.c && bLit == naive.bLiteral &&
                     bSep == naive.bSeparation && d == naive.d;

  json report;
  report["command"] = "oracle";
  report["config"] = {{"seg", opt.seg},
                      {"must", opt.must},
                      {"cannot", opt.cannot},
                      {"cap", opt.cap},
                      {"format", opt.format}};
  report["inputs"] = {{"seg", input_entry(opt.seg)},
                      {"must", input_entry(opt.must)},
                      {"cannot", input_entry(opt.cannot)}};
  report["fast"] = {{"a", a}, {"b_literal", bLit}, {"b_separation", bSep}, {"c", c}, {"d", d}};
  report["naive"] = {{"a", naive.a},
                     {"b_literal", naive.bLiteral},
                     {"b_separation", naive.bSeparation},
                     {"c", naive.c},
                     {"d", naive.d}};
  report["match"] = match;
  emit_report(opt.out, report);
  return match ? 0 : 4;
}

void add_format_option(CLI::App* cmd, std::string& format) {
  cmd->add_option("--format", format,
                  "Label grid format: auto (by extension), pgm16, or csv")
      ->check(CLI::IsMember({"auto", "pgm16", "csv"}))
      ->capture_default_str();
}

void add_merge_options(CLI::App* cmd, MergeOptions& opt) {
  cmd->add_option("--seg", opt.seg, "Initial superpixel map (.pgm or .csv)")->required();
  cmd->add_option("--features-header", opt.featuresHeader, "Feature file JSON header")
      ->required();
  cmd->add_option("--features-data", opt.featuresData, "Feature file f32 payload")
      ->required();
  cmd->add_option("--measure", opt.measure,
                  "Comparison measure: jsdiv | euclid-mean | edist | emd | mi")
      ->check(CLI::IsMember(wlr::measure_names()))
      ->capture_default_str();
  cmd->add_option("--connectivity", opt.connectivity, "Pixel adjacency: 4 or 8")
      ->check(CLI::IsMember({4, 8}))
      ->capture_default_str();
  cmd->add_option("--signature-clusters", opt.signatureClusters,
                  "Signature size for the emd measure")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--histogram-bins", opt.histogramBins, "Bins for the jsdiv measure")
      ->check(CLI::Range(2, 1 << 20))
      ->capture_default_str();
  cmd->add_option("--mi-bins", opt.miBins, "Bins for the mi measure")
      ->check(CLI::Range(2, 1 << 20))
      ->capture_default_str();
  cmd->add_option("--exemplar-cap", opt.exemplarCap,
                  "Deterministic subsampling cap for edist and mi")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_format_option(cmd, opt.format);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weakly-labeled segmentation scoring and hierarchical merging"};
  app.require_subcommand(1);

  ScoreOptions scoreOpt;
  CLI::App* score = app.add_subcommand(
      "score", "Score one segmentation against weak (and optionally crisp) labels");
  score->add_option("--seg", scoreOpt.seg, "Segment map (.pgm or .csv)")->required();
  score->add_option("--must", scoreOpt.must, "Must-link label map, 0 = unlabeled")->required();
  score->add_option("--cannot", scoreOpt.cannot, "Cannot-link label map, 0 = unlabeled")
      ->required();
  score->add_option("--crisp", scoreOpt.crisp, "Optional crisp class map, 0 = unlabeled");
  score->add_option("--mode", scoreOpt.mode, "Cannot-link counting: literal or separation")
      ->check(CLI::IsMember({"literal", "separation"}))
      ->capture_default_str();
  score->add_option("--out", scoreOpt.out, "Report path (stdout when omitted)");
  add_format_option(score, scoreOpt.format);

  MergeOptions mergeOpt;
  CLI::App* merge =
      app.add_subcommand("merge", "Greedily merge superpixels and record the trace");
  add_merge_options(merge, mergeOpt);
  merge->add_option("--out", mergeOpt.out, "Trace path (stdout when omitted)");

  SweepOptions sweepOpt;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Merge under one or more measures and score every candidate level");
  add_merge_options(sweep, sweepOpt.merge);
  sweep->add_option("--must", sweepOpt.must, "Must-link label map")->required();
  sweep->add_option("--cannot", sweepOpt.cannot, "Cannot-link label map")->required();
  sweep->add_option("--crisp", sweepOpt.crisp, "Optional crisp class map");
  sweep->add_option("--mode", sweepOpt.mode, "Cannot-link counting: literal or separation")
      ->check(CLI::IsMember({"literal", "separation"}))
      ->capture_default_str();
  sweep->add_option("--measures", sweepOpt.measures, "Measures to sweep (default: all)")
      ->delimiter(',');
  sweep->add_option("--curve-prefix", sweepOpt.curvePrefix,
                    "Prefix for per-measure CSV curves (default: report path stem)");
  sweep->add_option("--out", sweepOpt.merge.out, "Report path (stdout when omitted)");

  FeatureOptions featOpt;
  CLI::App* features = app.add_subcommand(
      "features", "Compute lacunarity+Sobel features from a grayscale image");
  features->add_option("--image", featOpt.image, "Grayscale image (.pgm or .csv)")->required();
  features->add_option("--downsample", featOpt.downsampleFactor, "Box-mean downsample factor")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  features->add_option("--scales", featOpt.scales, "Lacunarity box sizes")
      ->delimiter(',')
      ->capture_default_str();
  features->add_option("--out-header", featOpt.outHeader, "Output JSON header path")
      ->required();
  features->add_option("--out-data", featOpt.outData, "Output f32 payload path")->required();
  add_format_option(features, featOpt.format);

  OracleOptions oracleOpt;
  CLI::App* oracle = app.add_subcommand(
      "oracle", "Cross-check the contingency fast path against pair enumeration");
  oracle->add_option("--seg", oracleOpt.seg, "Segment map")->required();
  oracle->add_option("--must", oracleOpt.must, "Must-link label map")->required();
  oracle->add_option("--cannot", oracleOpt.cannot, "Cannot-link label map")->required();
  oracle->add_option("--cap", oracleOpt.cap, "Labeled-pixel cap for the O(N^2) oracle")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  oracle->add_option("--out", oracleOpt.out, "Report path (stdout when omitted)");
  add_format_option(oracle, oracleOpt.format);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*score) return run_score(scoreOpt);
    if (*merge) return run_merge(mergeOpt);
    if (*sweep) return run_sweep(sweepOpt);
    if (*features) return run_features(featOpt);
    if (*oracle) return run_oracle(oracleOpt);
  } catch (const wlr::ResourceCapError& e) {
    json error = {{"error", {{"kind", "resource-cap"}, {"details", json::array({e.what()})}}}};
    std::cout << error.dump(2) << "\n";
    return 3;
  } catch (const wlr::InternalError& e) {
    json error = {{"error", {{"kind", "internal"}, {"details", json::array({e.what()})}}}};
    std::cout << error.dump(2) << "\n";
    return 4;
  } catch (const wlr::ValidationError& e) {
    json error = {{"error", {{"kind", "validation"}, {"details", json::array({e.what()})}}}};
    std::cout << error.dump(2) << "\n";
    return 2;
  }
  return 0;
}
