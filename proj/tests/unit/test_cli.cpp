// Copyright 2026 The glomnet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "glomnet/harness/evaluate.h"
#include "test_util.h"

namespace glomnet {
namespace {

namespace fs = std::filesystem;

int run(const std::string& args) {
  const std::string cmd = std::string(GLOMNET_CLI_PATH) + " -q " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kTinyConfig =
    "synth.n_patients = 6\n"
    "synth.roi_px = 48\n"
    "synth.max_blobs = 10\n"
    "synth.blob_radius_min = 2\n"
    "synth.blob_radius_max = 4\n"
    "chip.window_px = 32\n"
    "chip.overlap_frac = 0.5\n"
    "chip.downsample_factor = 2\n"
    "aug.load_downsample = 2\n"
    "aug.crop_px = 8\n"
    "net.input_side = 8\n"
    "net.conv_groups = 2x1\n"
    "net.dense_widths = 4\n"
    "opt.epochs = 1\n"
    "opt.batch_size = 8\n";

TEST(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("synth"), 1);
  testing::TempDir dir;
  testing::write_file(dir / "bad.cfg", "opt.nonsense = 1\n");
  EXPECT_EQ(run("synth --config " + (dir / "bad.cfg").string() + " --out " + (dir / "o").string()), 1);
}

TEST(CliTest, DataErrorsExitTwo) {
  testing::TempDir dir;
  testing::write_file(dir / "preds.csv", "patient_id,truth,prediction,baseline\nA,40,50,50\n");
  EXPECT_EQ(run("eval --predictions " + (dir / "preds.csv").string() + " --out " +
                (dir / "e").string()),
            2);
  testing::write_file(dir / "slide.png", "not a png");
  EXPECT_EQ(run("segment --slide " + (dir / "slide.png").string() + " --out " +
                (dir / "s").string()),
            2);
}

TEST(CliTest, EvalWritesReport) {
  testing::TempDir dir;
  testing::write_file(dir / "preds.csv",
                      "patient_id,truth,prediction,baseline\nA,40,50,50\nB,70,60,60\n");
  ASSERT_EQ(run("eval --predictions " + (dir / "preds.csv").string() + " --out " +
                (dir / "e").string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "e" / "predictions.svg"));
  EXPECT_NE(testing::read_file(dir / "e" / "summary.txt").find("mae = 10"), std::string::npos);
}

TEST(CliTest, EndToEndPipeline) {
  testing::TempDir dir;
  const std::string cfg = (dir / "tiny.cfg").string();
  testing::write_file(dir / "tiny.cfg", kTinyConfig);
  const std::string data = (dir / "data").string();
  const std::string chips = (dir / "chips").string();

  ASSERT_EQ(run("synth --config " + cfg + " --out " + data), 0);
  ASSERT_TRUE(fs::exists(dir / "data" / "patients.csv"));
  ASSERT_EQ(run("chip --rois " + data + "/rois.csv --patients " + data + "/patients.csv --config " +
                cfg + " --out " + chips),
            0);
  ASSERT_TRUE(fs::exists(dir / "chips" / "manifest.csv"));

  const std::string manifest = chips + "/manifest.csv";
  ASSERT_EQ(run("train --manifest " + manifest + " --fold 0 --k 3 --seed 4 --config " + cfg +
                " --out " + (dir / "train").string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "train" / "params.glom"));
  EXPECT_TRUE(fs::exists(dir / "train" / "train_log.csv"));

  for (const char* run_name : {"cv_a", "cv_b"}) {
    ASSERT_EQ(run("cv --manifest " + manifest + " --k 3 --seed 4 --config " + cfg +
                  " --aux off --out " + (dir / run_name).string()),
              0);
  }
  const auto pooled = testing::read_file(dir / "cv_a" / "predictions.csv");
  EXPECT_EQ(pooled, testing::read_file(dir / "cv_b" / "predictions.csv"));
  EXPECT_EQ(read_predictions(dir / "cv_a" / "predictions.csv").size(), 6u);
  EXPECT_TRUE(fs::exists(dir / "cv_a" / "fold0" / "predictions.csv"));

  ASSERT_EQ(run("eval --predictions " + (dir / "cv_a" / "predictions.csv").string() + " --out " +
                (dir / "ev").string()),
            0);

  ASSERT_EQ(run("cv --manifest " + manifest + " --k 9 --seed 4 --config " + cfg + " --out " +
                (dir / "cv_bad").string()),
            2);
}

}  // namespace
}  // namespace glomnet
