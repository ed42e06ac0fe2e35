#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "test_util.hpp"
#include "wlr/grid.hpp"
#include "wlr/grid_io.hpp"

using namespace wlr;
using testutil::grid_from;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Independent tally for contingency checks.
std::int64_t naive_intersection(const LabelGrid& seg, const LabelGrid& ref,
                                std::int32_t k, std::int32_t r) {
  std::int64_t n = 0;
  for (Eigen::Index i = 0; i < seg.size(); ++i)
    if (seg.data()[i] == k && ref.data()[i] == r) ++n;
  return n;
}

}  // namespace

TEST_CASE("csv load: 2x2 grid with two segments") {
  const std::string path = temp_path("wlr_grid.csv");
  write_bytes(path, "1,1\n2,2\n");
  const SegmentMap seg = load_segment_map(path, GridFormat::csv);
  CHECK(seg.segment_count() == 2);
  CHECK(seg.height() == 2);
  CHECK(seg.width() == 2);
  const CountVector sizes = seg.segment_sizes();
  CHECK(sizes[0] == 2);
  CHECK(sizes[1] == 2);
}

TEST_CASE("pgm load: constant map has one segment") {
  const std::string path = temp_path("wlr_const.pgm");
  LabelGrid g = LabelGrid::Constant(3, 4, 7);
  save_label_grid(path, g, GridFormat::pgm16);
  const SegmentMap seg = load_segment_map(path, GridFormat::pgm16);
  CHECK(seg.segment_count() == 1);
  CHECK(seg.ids[0] == 7);
  CHECK(seg.labels == g);
}

TEST_CASE("grid io round trips are exact") {
  std::mt19937 rng(7);
  const LabelGrid g = testutil::random_partition(rng, 16, 16, 40000);
  for (GridFormat fmt : {GridFormat::pgm16, GridFormat::csv}) {
    const std::string path = temp_path(fmt == GridFormat::csv ? "wlr_rt.csv" : "wlr_rt.pgm");
    save_label_grid(path, g, fmt);
    CHECK(load_label_grid(path, fmt) == g);
    // files we wrote are canonical: load-then-save reproduces the bytes
    const std::string bytes = read_bytes(path);
    save_label_grid(path, load_label_grid(path, fmt), fmt);
    CHECK(read_bytes(path) == bytes);
  }
}

TEST_CASE("grid io rejects malformed input") {
  const std::string path = temp_path("wlr_bad");
  SUBCASE("csv non-integer cell") {
    write_bytes(path, "1,x\n");
    CHECK_THROWS_AS(load_label_grid(path, GridFormat::csv), ValidationError);
  }
  SUBCASE("csv ragged rows") {
    write_bytes(path, "1,2\n3\n");
    CHECK_THROWS_AS(load_label_grid(path, GridFormat::csv), ValidationError);
  }
  SUBCASE("csv negative id") {
    write_bytes(path, "1,-2\n");
    CHECK_THROWS_AS(load_label_grid(path, GridFormat::csv), ValidationError);
  }
  SUBCASE("pgm bad magic") {
    write_bytes(path, "P2\n2 2\n255\n0 0 0 0\n");
    CHECK_THROWS_AS(load_label_grid(path, GridFormat::pgm16), ValidationError);
  }
  SUBCASE("pgm payload shorter than header promises") {
    write_bytes(path, std::string("P5\n2 2\n65535\n") + std::string(7, '\0'));
    CHECK_THROWS_AS(load_label_grid(path, GridFormat::pgm16), ValidationError);
  }
  SUBCASE("pgm maxval out of range") {
    write_bytes(path, "P5\n1 1\n70000\n\0\0");
    CHECK_THROWS_AS(load_label_grid(path, GridFormat::pgm16), ValidationError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_label_grid(temp_path("wlr_nonexistent.csv"), GridFormat::csv),
                    ValidationError);
  }
}

TEST_CASE("pgm reads 8-bit samples and header comments") {
  const std::string path = temp_path("wlr_8bit.pgm");
  write_bytes(path, "P5\n# a comment\n2 1\n255\n\x05\x09");
  const LabelGrid g = load_label_grid(path, GridFormat::pgm16);
  CHECK(g(0, 0) == 5);
  CHECK(g(0, 1) == 9);
}

TEST_CASE("pgm save rejects ids beyond 16 bits") {
  LabelGrid g = LabelGrid::Constant(2, 2, 70000);
  CHECK_THROWS_AS(save_label_grid(temp_path("wlr_wide.pgm"), g, GridFormat::pgm16),
                  ValidationError);
}

TEST_CASE("contingency: constant grids") {
  const SegmentMap seg = SegmentMap::from_grid(LabelGrid::Constant(3, 3, 1));
  const ContingencyTable ct = build_contingency(seg, LabelGrid::Constant(3, 3, 1));
  REQUIRE(ct.counts.rows() == 1);
  REQUIRE(ct.counts.cols() == 1);
  CHECK(ct.counts(0, 0) == 9);
  CHECK(ct.total == 9);
}

TEST_CASE("contingency: 1x2 split segments share one reference region") {
  const SegmentMap seg = SegmentMap::from_grid(grid_from({{1, 2}}));
  const ContingencyTable ct = build_contingency(seg, grid_from({{1, 1}}));
  REQUIRE(ct.counts.rows() == 2);
  REQUIRE(ct.counts.cols() == 1);
  CHECK(ct.counts(0, 0) == 1);
  CHECK(ct.counts(1, 0) == 1);
}

TEST_CASE("contingency matches the naive per-pixel tally") {
  std::mt19937 rng(11);
  const LabelGrid segGrid = testutil::random_partition(rng, 32, 32, 6);
  const LabelGrid ref = testutil::random_labels(rng, 32, 32, 5, 0.7);
  const SegmentMap seg = SegmentMap::from_grid(segGrid);
  const ContingencyTable ct = build_contingency(seg, ref);
  for (std::size_t k = 0; k < ct.segIds.size(); ++k)
    for (std::size_t r = 0; r < ct.refIds.size(); ++r)
      CHECK(ct.counts(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(r)) ==
            naive_intersection(segGrid, ref, ct.segIds[k], ct.refIds[r]));
}

TEST_CASE("contingency marginals and the partition property") {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = testutil::random_weak_instance(rng, 16);
    CHECK(inst.seg.segment_sizes().sum() == inst.seg.height() * inst.seg.width());
    const ContingencyTable ct = build_contingency(inst.seg, inst.wl.mustLink);
    CHECK(ct.rowSums == ct.counts.rowwise().sum());
    CHECK(ct.colSums == ct.counts.colwise().sum().transpose());
    std::int64_t labeled = 0;
    for (Eigen::Index i = 0; i < inst.wl.mustLink.size(); ++i)
      if (inst.wl.mustLink.data()[i] != 0) ++labeled;
    CHECK(ct.total == labeled);
  }
}

TEST_CASE("contingency rejects mismatched dimensions") {
  const SegmentMap seg = SegmentMap::from_grid(LabelGrid::Constant(4, 4, 1));
  CHECK_THROWS_AS(build_contingency(seg, LabelGrid::Constant(3, 4, 1)), ValidationError);
}

TEST_CASE("segment id 0 is an ordinary segment, reference id 0 is unlabeled") {
  const SegmentMap seg = SegmentMap::from_grid(grid_from({{0, 0, 1, 1}}));
  CHECK(seg.segment_count() == 2);
  const ContingencyTable ct = build_contingency(seg, grid_from({{2, 0, 2, 0}}));
  REQUIRE(ct.counts.rows() == 2);
  REQUIRE(ct.counts.cols() == 1);
  CHECK(ct.counts(0, 0) == 1);  // segment 0 contributes its labeled pixel
  CHECK(ct.counts(1, 0) == 1);
  CHECK(ct.total == 2);
}

TEST_CASE("validate_pair") {
  SUBCASE("matching inputs with two regions per map") {
    LabelGrid must = LabelGrid::Zero(8, 8), cannot = LabelGrid::Zero(8, 8);
    must.block(0, 0, 2, 2).setConstant(1);
    must.block(4, 4, 2, 2).setConstant(2);
    cannot.block(0, 6, 2, 2).setConstant(1);
    cannot.block(6, 0, 2, 2).setConstant(2);
    const auto rep = validate_pair(SegmentMap::from_grid(LabelGrid::Constant(8, 8, 1)),
                                   WeakLabels::from_grids(must, cannot));
    CHECK(rep.valid);
    CHECK(rep.L == 2);
    CHECK(rep.U == 2);
    CHECK(rep.K == 1);
    CHECK(rep.warnings.empty());
  }
  SUBCASE("dimension mismatch is an error") {
    const auto rep = validate_pair(
        SegmentMap::from_grid(LabelGrid::Constant(8, 8, 1)),
        WeakLabels::from_grids(LabelGrid::Constant(4, 4, 1), LabelGrid::Constant(4, 4, 2)));
    CHECK_FALSE(rep.valid);
    REQUIRE(rep.errors.size() == 1);
    CHECK(rep.errors[0].find("dimension mismatch") != std::string::npos);
  }
  SUBCASE("non-contiguous region ids warn but stay valid") {
    LabelGrid must = LabelGrid::Zero(4, 4), cannot = LabelGrid::Zero(4, 4);
    must.block(0, 0, 2, 2).setConstant(1);
    must.block(2, 2, 2, 2).setConstant(3);  // id 2 missing
    const auto rep = validate_pair(SegmentMap::from_grid(LabelGrid::Constant(4, 4, 1)),
                                   WeakLabels::from_grids(must, cannot));
    CHECK(rep.valid);
    REQUIRE(rep.warnings.size() == 1);
    CHECK(rep.warnings[0].find("non-contiguous") != std::string::npos);
  }
  SUBCASE("degenerate labels are not scoreable") {
    LabelGrid must = LabelGrid::Zero(4, 4), cannot = LabelGrid::Zero(4, 4);
    must(0, 0) = 1;    // singleton must-link region
    cannot(1, 1) = 1;  // single cannot-link region
    const auto rep = validate_pair(SegmentMap::from_grid(LabelGrid::Constant(4, 4, 1)),
                                   WeakLabels::from_grids(must, cannot));
    CHECK_FALSE(rep.valid);
  }
}

TEST_CASE("block segmentation covers the grid with the requested block count") {
  const LabelGrid g = block_segmentation(96, 96, 5, 6);
  const SegmentMap seg = SegmentMap::from_grid(g);
  CHECK(seg.segment_count() == 30);
  CHECK(seg.segment_sizes().minCoeff() >= 16 * 19);
  CHECK(g(0, 0) == 1);
  CHECK(g(95, 95) == 30);
}
