// End-to-end tests against the built CLI binary.
#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "oracles.hpp"
#include "vsd/config.hpp"
#include "vsd/io.hpp"

namespace {

namespace fs = std::filesystem;
using namespace vsd;

#ifndef VSD_CLI_PATH
#error "VSD_CLI_PATH must be defined"
#endif

struct RunResult {
  int exit_code = -1;
  std::string stderr_text;
};

RunResult run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path err_file = scratch / "stderr.txt";
  const std::string cmd =
      std::string(VSD_CLI_PATH) + " " + args + " 2>" + err_file.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(status);
  std::ifstream in(err_file);
  r.stderr_text.assign(std::istreambuf_iterator<char>(in), {});
  return r;
}

void write_text(const fs::path& path, const std::string& text) {
  write_file_atomic(path, text);
}

std::string default_scene_json() {
  return R"({
  "seed": 5,
  "area": {"width": 20, "height": 20},
  "n_isolated": 4,
  "clusters": [
    {"center": [5, 5], "n": 4, "spread": 0.8},
    {"center": [14, 13], "n": 3, "spread": 0.8}
  ],
  "min_isolated_spacing": 2.5,
  "occlusion_dropout": 0.0
})";
}

std::string default_config_json() {
  return R"({
  "preset": "citystreet",
  "plane": {"h_h": 1.75, "origin_x": -2, "origin_y": -2,
            "cell_size": 0.1, "cells_x": 240, "cells_y": 240},
  "d_t": 2.0
})";
}

// Recursive byte comparison of two directory trees.
void expect_trees_equal(const fs::path& a, const fs::path& b) {
  std::vector<std::string> rel_a, rel_b;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file())
      rel_a.push_back(fs::relative(e.path(), a).string());
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file())
      rel_b.push_back(fs::relative(e.path(), b).string());
  std::sort(rel_a.begin(), rel_a.end());
  std::sort(rel_b.begin(), rel_b.end());
  ASSERT_EQ(rel_a, rel_b);
  for (const auto& rel : rel_a)
    EXPECT_EQ(read_file(a / rel), read_file(b / rel)) << rel;
}

TEST(CliSimulate, ProducesDeterministicArtifacts) {
  oracle::TempDir tmp("vsd_cli_sim");
  write_text(tmp.path() / "scene.json", default_scene_json());
  const auto out1 = tmp.path() / "o1";
  const auto out2 = tmp.path() / "o2";
  ASSERT_EQ(run_cli("simulate --scene " + (tmp.path() / "scene.json").string() +
                        " --out-dir " + out1.string(),
                    tmp.path())
                .exit_code,
            0);
  ASSERT_EQ(run_cli("simulate --scene " + (tmp.path() / "scene.json").string() +
                        " --out-dir " + out2.string(),
                    tmp.path())
                .exit_code,
            0);
  EXPECT_TRUE(fs::exists(out1 / "annotations.csv"));
  EXPECT_TRUE(fs::exists(out1 / "calibration.json"));
  EXPECT_TRUE(fs::exists(out1 / "truth.json"));
  expect_trees_equal(out1, out2);

  // 4 isolated + 4 + 3 cluster members, visible in all 3 cameras
  const auto annotations = read_annotations_csv(out1 / "annotations.csv");
  EXPECT_EQ(annotations.size(), 11u * 3u);
}

TEST(CliGenGt, EmptyAnnotationFileYieldsZeroArtifacts) {
  oracle::TempDir tmp("vsd_cli_empty");
  write_text(tmp.path() / "scene.json", default_scene_json());
  const auto sim = tmp.path() / "sim";
  ASSERT_EQ(run_cli("simulate --scene " + (tmp.path() / "scene.json").string() +
                        " --out-dir " + sim.string(),
                    tmp.path())
                .exit_code,
            0);
  write_text(tmp.path() / "empty.csv",
             "frame_id,space,camera_id,x,y,person_id\n");
  write_text(tmp.path() / "config.json", default_config_json());
  const auto out = tmp.path() / "gt";
  const auto r = run_cli(
      "gen-gt --annotations " + (tmp.path() / "empty.csv").string() +
          " --config " + (tmp.path() / "config.json").string() +
          " --calibration " + (sim / "calibration.json").string() +
          " --out-dir " + out.string(),
      tmp.path());
  ASSERT_EQ(r.exit_code, 0) << r.stderr_text;

  const auto d_n = read_density(out / "frame_000000" / "d_n_plane.vsdm");
  EXPECT_EQ(d_n.mass(), 0.0);
  const auto mask =
      read_mask_pgm(out / "frame_000000" / "mask_plane.pgm");
  EXPECT_EQ(mask.foreground_count(), 0u);
  const std::string compliance = read_file(out / "compliance.csv");
  EXPECT_EQ(compliance, "frame_id,person,x,y,min_distance,label\n");
}

TEST(CliGenGt, MalformedCsvExitsTwoWithLine) {
  oracle::TempDir tmp("vsd_cli_badcsv");
  write_text(tmp.path() / "bad.csv",
             "frame_id,space,camera_id,x,y,person_id\n0,plane,,oops,2,\n");
  write_text(tmp.path() / "config.json", default_config_json());
  const auto r = run_cli(
      "gen-gt --annotations " + (tmp.path() / "bad.csv").string() +
          " --config " + (tmp.path() / "config.json").string() +
          " --calibration nowhere.json --out-dir " +
          (tmp.path() / "o").string(),
      tmp.path());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.stderr_text.find("bad.csv:2"), std::string::npos)
      << r.stderr_text;
}

TEST(CliGenGt, UnknownCameraExitsFour) {
  oracle::TempDir tmp("vsd_cli_unkcam");
  write_text(tmp.path() / "scene.json", default_scene_json());
  const auto sim = tmp.path() / "sim";
  ASSERT_EQ(run_cli("simulate --scene " + (tmp.path() / "scene.json").string() +
                        " --out-dir " + sim.string(),
                    tmp.path())
                .exit_code,
            0);
  write_text(tmp.path() / "a.csv",
             "frame_id,space,camera_id,x,y,person_id\n0,image,ghost,5,5,\n");
  write_text(tmp.path() / "config.json", default_config_json());
  const auto r = run_cli(
      "gen-gt --annotations " + (tmp.path() / "a.csv").string() +
          " --config " + (tmp.path() / "config.json").string() +
          " --calibration " + (sim / "calibration.json").string() +
          " --out-dir " + (tmp.path() / "o").string(),
      tmp.path());
  EXPECT_EQ(r.exit_code, 4);
  EXPECT_NE(r.stderr_text.find("ghost"), std::string::npos);
}

TEST(CliGenGt, OutOfBoundsAnnotationExitsFour) {
  oracle::TempDir tmp("vsd_cli_oob");
  write_text(tmp.path() / "scene.json", default_scene_json());
  const auto sim = tmp.path() / "sim";
  ASSERT_EQ(run_cli("simulate --scene " + (tmp.path() / "scene.json").string() +
                        " --out-dir " + sim.string(),
                    tmp.path())
                .exit_code,
            0);
  write_text(tmp.path() / "a.csv",
             "frame_id,space,camera_id,x,y,person_id\n"
             "0,image,cam1,5000,5,\n");
  write_text(tmp.path() / "config.json", default_config_json());
  const auto r = run_cli(
      "gen-gt --annotations " + (tmp.path() / "a.csv").string() +
          " --config " + (tmp.path() / "config.json").string() +
          " --calibration " + (sim / "calibration.json").string() +
          " --out-dir " + (tmp.path() / "o").string(),
      tmp.path());
  EXPECT_EQ(r.exit_code, 4);
}

TEST(CliPipeline, GenGtMassesMatchSimulatorTruth) {
  oracle::TempDir tmp("vsd_cli_mass");
  write_text(tmp.path() / "scene.json", default_scene_json());
  write_text(tmp.path() / "config.json", default_config_json());
  const auto sim = tmp.path() / "sim";
  const auto gt = tmp.path() / "gt";
  ASSERT_EQ(run_cli("simulate --scene " + (tmp.path() / "scene.json").string() +
                        " --out-dir " + sim.string(),
                    tmp.path())
                .exit_code,
            0);
  ASSERT_EQ(run_cli("gen-gt --annotations " +
                        (sim / "annotations.csv").string() + " --config " +
                        (tmp.path() / "config.json").string() +
                        " --calibration " + (sim / "calibration.json").string() +
                        " --out-dir " + gt.string(),
                    tmp.path())
                .exit_code,
            0);

  const TruthSidecar truth = read_truth(sim / "truth.json");
  const auto d_n = read_density(gt / "frame_000000" / "d_n_plane.vsdm");
  const auto d_c = read_density(gt / "frame_000000" / "d_c_plane.vsdm");
  // float32 storage keeps ~7 significant digits
  EXPECT_NEAR(d_n.mass(), truth.frames[0].nsdc_count(), 1e-4);
  EXPECT_NEAR(d_c.mass(), truth.frames[0].sdc_count(), 1e-4);
}

TEST(CliPipeline, EvaluateGroundTruthAgainstItselfIsPerfect) {
  oracle::TempDir tmp("vsd_cli_eval");
  write_text(tmp.path() / "scene.json", default_scene_json());
  write_text(tmp.path() / "config.json", default_config_json());
  const auto sim = tmp.path() / "sim";
  const auto gt = tmp.path() / "gt";
  ASSERT_EQ(run_cli("simulate --scene " + (tmp.path() / "scene.json").string() +
                        " --out-dir " + sim.string(),
                    tmp.path())
                .exit_code,
            0);
  ASSERT_EQ(run_cli("gen-gt --annotations " +
                        (sim / "annotations.csv").string() + " --config " +
                        (tmp.path() / "config.json").string() +
                        " --calibration " + (sim / "calibration.json").string() +
                        " --out-dir " + gt.string(),
                    tmp.path())
                .exit_code,
            0);

  const auto frame = gt / "frame_000000";
  const auto eval_dir = tmp.path() / "eval";
  ASSERT_EQ(run_cli("evaluate --pred " + (frame / "mask_plane.pgm").string() +
                        " --dn " + (frame / "d_n_plane.vsdm").string() +
                        " --dc " + (frame / "d_c_plane.vsdm").string() +
                        " --gt-mask " + (frame / "mask_plane.pgm").string() +
                        " --config " + (tmp.path() / "config.json").string() +
                        " --out-dir " + eval_dir.string(),
                    tmp.path())
                .exit_code,
            0);
  const EvalReport report = read_eval_report(eval_dir / "eval.json");
  EXPECT_EQ(report.scores.f1, 1.0);
  EXPECT_EQ(report.scores.precision, 1.0);
  EXPECT_EQ(report.scores.recall, 1.0);
  EXPECT_EQ(report.confusion.fp, 0.0);
  EXPECT_EQ(report.confusion.fn, 0.0);
  ASSERT_TRUE(report.has_dice);
  EXPECT_EQ(report.dice, 1.0);

  // swapped densities: the mask captures none of the conforming mass
  const auto swap_dir = tmp.path() / "eval_swapped";
  ASSERT_EQ(run_cli("evaluate --pred " + (frame / "mask_plane.pgm").string() +
                        " --dn " + (frame / "d_c_plane.vsdm").string() +
                        " --dc " + (frame / "d_n_plane.vsdm").string() +
                        " --config " + (tmp.path() / "config.json").string() +
                        " --out-dir " + swap_dir.string(),
                    tmp.path())
                .exit_code,
            0);
  const EvalReport swapped = read_eval_report(swap_dir / "eval.json");
  EXPECT_LE(swapped.scores.recall, 0.05);
}

TEST(CliGenGt, ThreadCountDoesNotChangeBytes) {
  oracle::TempDir tmp("vsd_cli_threads");
  std::string scene = default_scene_json();
  write_text(tmp.path() / "scene.json", scene);
  write_text(tmp.path() / "config.json", default_config_json());
  const auto sim = tmp.path() / "sim";
  ASSERT_EQ(run_cli("simulate --scene " + (tmp.path() / "scene.json").string() +
                        " --frames 4 --out-dir " + sim.string(),
                    tmp.path())
                .exit_code,
            0);
  const auto gt1 = tmp.path() / "gt1";
  const auto gt4 = tmp.path() / "gt4";
  const std::string base_args =
      "gen-gt --annotations " + (sim / "annotations.csv").string() +
      " --config " + (tmp.path() / "config.json").string() +
      " --calibration " + (sim / "calibration.json").string();

  ::setenv("VSD_THREADS", "1", 1);
  ASSERT_EQ(run_cli(base_args + " --out-dir " + gt1.string(), tmp.path())
                .exit_code,
            0);
  ::setenv("VSD_THREADS", "4", 1);
  ASSERT_EQ(run_cli(base_args + " --out-dir " + gt4.string(), tmp.path())
                .exit_code,
            0);
  ::unsetenv("VSD_THREADS");
  expect_trees_equal(gt1, gt4);
}

TEST(CliDensify, UtilityProducesUnitMassPerHead) {
  oracle::TempDir tmp("vsd_cli_densify");
  write_text(tmp.path() / "config.json", default_config_json());
  write_text(tmp.path() / "a.csv",
             "frame_id,space,camera_id,x,y,person_id\n"
             "0,plane,,5.0,5.0,\n0,plane,,12.0,9.0,\n");
  const auto out = tmp.path() / "d.vsdm";
  const auto r = run_cli(
      "densify --annotations " + (tmp.path() / "a.csv").string() +
          " --space plane --config " + (tmp.path() / "config.json").string() +
          " --out " + out.string(),
      tmp.path());
  ASSERT_EQ(r.exit_code, 0) << r.stderr_text;
  const auto map = read_density(out);
  EXPECT_NEAR(map.mass(), 2.0, 1e-5);
  EXPECT_EQ(map.kind, MapKind::Predicted);
}

TEST(CliSegGt, MatchesGenGtMasks) {
  oracle::TempDir tmp("vsd_cli_seggt");
  write_text(tmp.path() / "scene.json", default_scene_json());
  write_text(tmp.path() / "config.json", default_config_json());
  const auto sim = tmp.path() / "sim";
  const auto gt = tmp.path() / "gt";
  ASSERT_EQ(run_cli("simulate --scene " + (tmp.path() / "scene.json").string() +
                        " --out-dir " + sim.string(),
                    tmp.path())
                .exit_code,
            0);
  ASSERT_EQ(run_cli("gen-gt --annotations " +
                        (sim / "annotations.csv").string() + " --config " +
                        (tmp.path() / "config.json").string() +
                        " --calibration " + (sim / "calibration.json").string() +
                        " --out-dir " + gt.string(),
                    tmp.path())
                .exit_code,
            0);
  const auto seg = tmp.path() / "seg";
  ASSERT_EQ(
      run_cli("seg-gt --dn " +
                  (gt / "frame_000000" / "d_n_plane.vsdm").string() +
                  " --config " + (tmp.path() / "config.json").string() +
                  " --calibration " + (sim / "calibration.json").string() +
                  " --out-dir " + seg.string(),
              tmp.path())
          .exit_code,
      0);
  EXPECT_EQ(read_file(seg / "mask_plane.pgm"),
            read_file(gt / "frame_000000" / "mask_plane.pgm"));
  EXPECT_EQ(read_file(seg / "mask_image_cam1.pgm"),
            read_file(gt / "frame_000000" / "mask_image_cam1.pgm"));
}

TEST(CliPostprocess, ZeroRasterGivesEmptyReport) {
  oracle::TempDir tmp("vsd_cli_post0");
  DensityMap zero;
  zero.grid = GridSpec::image(32, 32);
  zero.space = Space::plane();
  zero.cells = Raster<double>(32, 32, 0.0);
  write_density(tmp.path() / "zero.vsdm", zero);
  write_text(tmp.path() / "config.json", default_config_json());
  const auto out = tmp.path() / "post";
  const auto r = run_cli(
      "postprocess --pred " + (tmp.path() / "zero.vsdm").string() +
          " --config " + (tmp.path() / "config.json").string() +
          " --out-dir " + out.string(),
      tmp.path());
  ASSERT_EQ(r.exit_code, 0) << r.stderr_text;
  EXPECT_EQ(read_region_report(out / "regions.json").size(), 0u);
}

TEST(CliPostprocess, TwoBlobFixtureCountsAndLabels) {
  oracle::TempDir tmp("vsd_cli_post2");
  DensityMap m;
  m.grid = GridSpec::image(64, 32);
  m.space = Space::plane();
  m.cells = Raster<double>(64, 32, 0.0);
  for (int y = 4; y < 8; ++y)
    for (int x = 4; x < 8; ++x) m.cells.at(x, y) = 3.1 / 16.0;
  for (int y = 20; y < 24; ++y)
    for (int x = 40; x < 44; ++x) m.cells.at(x, y) = 7.2 / 16.0;
  write_density(tmp.path() / "two.vsdm", m);
  write_text(tmp.path() / "config.json", default_config_json());
  const auto out = tmp.path() / "post";
  const auto r = run_cli(
      "postprocess --pred " + (tmp.path() / "two.vsdm").string() +
          " --config " + (tmp.path() / "config.json").string() +
          " --out-dir " + out.string(),
      tmp.path());
  ASSERT_EQ(r.exit_code, 0) << r.stderr_text;
  const auto entries = read_region_report(out / "regions.json");
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_NEAR(entries[0].region.count, 3.1, 1e-5);
  EXPECT_EQ(entries[0].region.risk, RiskLabel::Warning);
  EXPECT_NEAR(entries[1].region.count, 7.2, 1e-5);
  EXPECT_EQ(entries[1].region.risk, RiskLabel::Danger);
}

TEST(CliGenGt, CameraOnPlaneExitsThree) {
  oracle::TempDir tmp("vsd_cli_geom");
  CameraModel cam;
  cam.id = "flat";
  cam.image_width = 640;
  cam.image_height = 480;
  cam.intrinsics = {400.0, 400.0, 320.0, 240.0, 0.0};
  cam.extrinsics.rotation.m = {1, 0, 0, 0, -1, 0, 0, 0, -1};
  cam.extrinsics.translation = {0.0, 0.0, 1.75};  // center on the head plane
  write_calibration(tmp.path() / "calib.json", {cam});
  write_text(tmp.path() / "a.csv",
             "frame_id,space,camera_id,x,y,person_id\n0,plane,,5,5,\n");
  write_text(tmp.path() / "config.json", default_config_json());
  const auto r = run_cli(
      "gen-gt --annotations " + (tmp.path() / "a.csv").string() +
          " --config " + (tmp.path() / "config.json").string() +
          " --calibration " + (tmp.path() / "calib.json").string() +
          " --out-dir " + (tmp.path() / "o").string(),
      tmp.path());
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.stderr_text.find("head plane"), std::string::npos);
}

TEST(CliEvaluate, PredictedRasterGoesThroughRegionExtraction) {
  oracle::TempDir tmp("vsd_cli_evalraster");
  write_text(tmp.path() / "scene.json", default_scene_json());
  write_text(tmp.path() / "config.json", default_config_json());
  const auto sim = tmp.path() / "sim";
  const auto gt = tmp.path() / "gt";
  ASSERT_EQ(run_cli("simulate --scene " + (tmp.path() / "scene.json").string() +
                        " --out-dir " + sim.string(),
                    tmp.path())
                .exit_code,
            0);
  ASSERT_EQ(run_cli("gen-gt --annotations " +
                        (sim / "annotations.csv").string() + " --config " +
                        (tmp.path() / "config.json").string() +
                        " --calibration " + (sim / "calibration.json").string() +
                        " --out-dir " + gt.string(),
                    tmp.path())
                .exit_code,
            0);
  // the ground-truth density itself plays the predicted raster: every kept
  // region lies on D_n support and captures all of its mass
  const auto frame = gt / "frame_000000";
  const auto out = tmp.path() / "eval";
  const auto r = run_cli(
      "evaluate --pred " + (frame / "d_n_plane.vsdm").string() + " --dn " +
          (frame / "d_n_plane.vsdm").string() + " --dc " +
          (frame / "d_c_plane.vsdm").string() + " --config " +
          (tmp.path() / "config.json").string() + " --out-dir " + out.string(),
      tmp.path());
  ASSERT_EQ(r.exit_code, 0) << r.stderr_text;
  const EvalReport report = read_eval_report(out / "eval.json");
  EXPECT_EQ(report.scores.f1, 1.0);
  ASSERT_TRUE(report.has_counts);
  // predicted count is the raster mass (NSDC heads only), ground truth adds
  // the conforming people
  const TruthSidecar truth = read_truth(sim / "truth.json");
  EXPECT_NEAR(report.mae, truth.frames[0].sdc_count(), 1e-3);
}

TEST(CliPostprocess, BadMagicExitsTwo) {
  oracle::TempDir tmp("vsd_cli_badmagic");
  write_text(tmp.path() / "junk.vsdm", "not a raster at all");
  write_text(tmp.path() / "config.json", default_config_json());
  const auto r = run_cli(
      "postprocess --pred " + (tmp.path() / "junk.vsdm").string() +
          " --config " + (tmp.path() / "config.json").string() +
          " --out-dir " + (tmp.path() / "o").string(),
      tmp.path());
  EXPECT_EQ(r.exit_code, 2);
}

}  // namespace
