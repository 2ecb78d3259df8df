#include "vsd/postprocess.hpp"

#include <gtest/gtest.h>

#include "vsd/maskgen.hpp"
#include "vsd/simulate.hpp"

namespace {

using namespace vsd;

DensityMap blank(int w, int h) {
  DensityMap m;
  m.grid = GridSpec::image(w, h);
  m.space = Space::plane();
  m.cells = Raster<double>(w, h, 0.0);
  return m;
}

// square blob of uniform cells summing to `mass`
void add_blob(DensityMap& m, int x0, int y0, int side, double mass) {
  const double v = mass / (side * side);
  for (int y = y0; y < y0 + side; ++y)
    for (int x = x0; x < x0 + side; ++x) m.cells.at(x, y) += v;
}

TEST(ExtractRegions, ZeroMapGivesEmptyList) {
  const auto regions =
      extract_regions(blank(32, 32), postprocess_presets::citystreet);
  EXPECT_TRUE(regions.empty());
}

TEST(ExtractRegions, CityStreetMinCountFiltersLowMassBlob) {
  DensityMap m = blank(32, 32);
  add_blob(m, 10, 10, 3, 0.4);
  const auto dropped =
      extract_regions(m, postprocess_presets::citystreet);  // min_count 0.5
  EXPECT_TRUE(dropped.empty());

  PostprocessConfig relaxed = postprocess_presets::citystreet;
  relaxed.min_count = 0.3;
  const auto kept = extract_regions(m, relaxed);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_NEAR(kept[0].count, 0.4, 1e-12);
  EXPECT_EQ(kept[0].risk, RiskLabel::Warning);
}

TEST(ExtractRegions, RiskLabelsFromCounts) {
  DensityMap m = blank(64, 32);
  add_blob(m, 4, 4, 4, 3.1);
  add_blob(m, 40, 20, 4, 7.2);
  const auto regions =
      extract_regions(m, postprocess_presets::citystreet);  // danger at 5
  ASSERT_EQ(regions.size(), 2u);
  EXPECT_NEAR(regions[0].count, 3.1, 1e-12);
  EXPECT_EQ(regions[0].risk, RiskLabel::Warning);
  EXPECT_NEAR(regions[1].count, 7.2, 1e-12);
  EXPECT_EQ(regions[1].risk, RiskLabel::Danger);
}

TEST(ExtractRegions, CanonicalRegionOrderAndBbox) {
  DensityMap m = blank(48, 48);
  add_blob(m, 30, 2, 3, 2.0);   // first in row-major order (y = 2)
  add_blob(m, 2, 20, 3, 2.0);   // second (y = 20)
  const auto regions = extract_regions(m, postprocess_presets::citystreet);
  ASSERT_EQ(regions.size(), 2u);
  EXPECT_EQ(regions[0].id, 1);
  EXPECT_EQ(regions[0].bbox_x0, 30);
  EXPECT_EQ(regions[0].bbox_y0, 2);
  EXPECT_EQ(regions[0].bbox_x1, 32);
  EXPECT_EQ(regions[1].id, 2);
  EXPECT_EQ(regions[1].bbox_y0, 20);
  EXPECT_EQ(regions[1].cells.size(), 9u);
}

TEST(ExtractRegions, EightConnectivityJoinsDiagonals) {
  DensityMap m = blank(16, 16);
  m.cells.at(4, 4) = 1.0;
  m.cells.at(5, 5) = 1.0;  // diagonal neighbor
  PostprocessConfig cfg = postprocess_presets::citystreet;
  cfg.min_count = 0.0;
  const auto regions = extract_regions(m, cfg);
  ASSERT_EQ(regions.size(), 1u);
  EXPECT_EQ(regions[0].cells.size(), 2u);
}

TEST(ExtractRegions, RegionCountsBoundedByTotalMass) {
  SplitMix64 rng(6);
  DensityMap m = blank(64, 64);
  for (double& v : m.cells.data())
    v = rng.next_double() < 0.2 ? rng.uniform(0.0, 0.3) : 0.0;
  PostprocessConfig cfg = postprocess_presets::citystreet;
  cfg.min_count = 0.0;
  const auto regions = extract_regions(m, cfg);
  double total = 0.0;
  for (const auto& r : regions) total += r.count;
  EXPECT_LE(total, m.mass() + 1e-12);
}

TEST(ExtractRegions, RaisingMinCountNeverAddsRegions) {
  SplitMix64 rng(16);
  DensityMap m = blank(64, 64);
  for (int b = 0; b < 8; ++b)
    add_blob(m, 2 + 7 * b, 3 + 6 * b, 3, rng.uniform(0.1, 4.0));
  PostprocessConfig cfg = postprocess_presets::citystreet;
  size_t prev = std::numeric_limits<size_t>::max();
  for (double mc : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    cfg.min_count = mc;
    const size_t n = extract_regions(m, cfg).size();
    EXPECT_LE(n, prev);
    prev = n;
  }
}

TEST(ExtractRegions, ScaleInvariantWithFilteringDisabled) {
  SplitMix64 rng(26);
  DensityMap m = blank(40, 40);
  add_blob(m, 5, 5, 4, 1.7);
  add_blob(m, 25, 30, 5, 0.9);
  PostprocessConfig cfg = postprocess_presets::citystreet;
  cfg.min_count = 0.0;
  const auto base = extract_regions(m, cfg);
  for (double scale : {0.25, 3.0, 41.5}) {
    DensityMap scaled = m;
    for (double& v : scaled.cells.data()) v *= scale;
    const auto got = extract_regions(scaled, cfg);
    ASSERT_EQ(got.size(), base.size());
    for (size_t i = 0; i < got.size(); ++i)
      EXPECT_EQ(got[i].cells, base[i].cells);
  }
}

TEST(ThresholdSoftMask, CityStreetThresholdSplitsAroundPoint3) {
  DensityMap soft = blank(2, 1);
  soft.cells.at(0, 0) = 0.29;
  soft.cells.at(1, 0) = 0.31;
  const auto mask = threshold_soft_mask(soft, 0.3);
  EXPECT_EQ(mask.cells.at(0, 0), 0);
  EXPECT_EQ(mask.cells.at(1, 0), 1);
}

TEST(ThresholdSoftMask, ZeroThresholdGivesSupport) {
  SplitMix64 rng(3);
  DensityMap soft = blank(8, 8);
  for (double& v : soft.cells.data())
    v = rng.next_double() < 0.5 ? rng.next_double() : 0.0;
  const auto mask = threshold_soft_mask(soft, 0.0);
  for (size_t i = 0; i < soft.cells.data().size(); ++i)
    EXPECT_EQ(mask.cells.data()[i], soft.cells.data()[i] > 0.0 ? 1 : 0);
}

TEST(ThresholdSoftMask, AgreesWithBinarizeBitExact) {
  SplitMix64 rng(13);
  DensityMap soft = blank(16, 16);
  for (double& v : soft.cells.data()) v = rng.next_double();
  for (double t : {0.0, 0.3, 0.6, 0.9}) {
    const auto a = threshold_soft_mask(soft, t);
    const auto b = binarize(soft, t);
    EXPECT_EQ(a.cells, b.cells);
  }
}

TEST(ThresholdSoftMask, RejectsOutOfRangeValues) {
  DensityMap soft = blank(2, 1);
  soft.cells.at(0, 0) = 1.2;
  EXPECT_THROW(threshold_soft_mask(soft, 0.3), OutOfRange);
  soft.cells.at(0, 0) = -0.1;
  EXPECT_THROW(threshold_soft_mask(soft, 0.3), OutOfRange);
}

TEST(LabelRisk, BoundaryIsDanger) {
  EXPECT_EQ(label_risk(5.0, postprocess_presets::citystreet),
            RiskLabel::Danger);
  EXPECT_EQ(label_risk(2.4, postprocess_presets::citystreet),
            RiskLabel::Warning);
}

TEST(LabelRisk, MatchesComparatorOracle) {
  SplitMix64 rng(9);
  const PostprocessConfig cfg = postprocess_presets::citystreet;
  for (int i = 0; i < 200; ++i) {
    const double c = rng.uniform(0.51, 20.0);
    const RiskLabel expect =
        c >= cfg.danger_count ? RiskLabel::Danger : RiskLabel::Warning;
    EXPECT_EQ(label_risk(c, cfg), expect);
  }
}

TEST(LabelRisk, BelowMinimumThrows) {
  EXPECT_THROW(label_risk(0.4, postprocess_presets::citystreet), BelowMinimum);
}

TEST(RegionOverlay, WarningAndDangerLevels) {
  DensityMap m = blank(32, 32);
  add_blob(m, 2, 2, 3, 1.0);
  add_blob(m, 20, 20, 3, 9.0);
  const auto regions = extract_regions(m, postprocess_presets::citystreet);
  const auto overlay = region_overlay(regions, 32, 32);
  EXPECT_EQ(overlay.at(3, 3), 128);
  EXPECT_EQ(overlay.at(21, 21), 255);
  EXPECT_EQ(overlay.at(10, 10), 0);
}

}  // namespace
