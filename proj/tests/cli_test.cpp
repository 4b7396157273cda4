// Copyright 2026 The prnn Authors.
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

// Runs the prnn binary and checks exit codes and artifacts.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("prnn_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) const {
    const std::string cmd = std::string("\"") + PRNN_CLI_PATH + "\" " + args +
                            " > \"" + (dir_ / "stdout.txt").string() +
                            "\" 2> \"" + (dir_ / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const fs::path& p) const {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }
  std::string stdout_text() const { return read(dir_ / "stdout.txt"); }
  std::string stderr_text() const { return read(dir_ / "stderr.txt"); }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }
  std::string path(const std::string& name) const {
    return "\"" + (dir_ / name).string() + "\"";
  }

  static constexpr const char* kSmall =
      "epochs = 4\niters_per_epoch = 50\n"
      "[task]\nseq_len = 6\nbatch_size = 4\nval_size = 16\n"
      "[model]\nhidden = 8\n"
      "[prune]\nhard_prune_epoch = 2\n"
      "[prune.recurrent]\nstart_itr = 50\nramp_itr = 80\nend_itr = 120\nfreq = 10\n"
      "[prune.linear]\nstart_itr = 50\nramp_itr = 80\nend_itr = 120\nfreq = 10\n";

  fs::path dir_;
};

TEST_F(Cli, HelpSucceeds) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_NE(stdout_text().find("train"), std::string::npos);
}

TEST_F(Cli, UnknownSubcommandOrFlagIsUsageError) {
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("train --no-such-flag"), 2);
}

TEST_F(Cli, ConfigErrorsExitTwo) {
  write("bad.toml", "[model]\nhiden = 3\n");
  EXPECT_EQ(run("train --config " + path("bad.toml")), 2);
  EXPECT_NE(stderr_text().find("model.hiden"), std::string::npos);
  write("ramp.toml", "[prune]\nramp_factor = 3.0\n");
  EXPECT_EQ(run("calibrate --config " + path("ramp.toml")), 2);
  EXPECT_EQ(run("train --set prune.mode=\\\"sideways\\\""), 2);
}

TEST_F(Cli, MissingConfigFileIsIoError) {
  EXPECT_EQ(run("train --config " + path("absent.toml")), 4);
}

TEST_F(Cli, CompressErrorsExitFour) {
  EXPECT_EQ(run("compress " + path("absent.sprn")), 4);
  write("junk.sprn", "SPRN garbage");
  EXPECT_EQ(run("compress " + path("junk.sprn")), 4);
  EXPECT_NE(stderr_text().find("offset"), std::string::npos);
}

TEST_F(Cli, TrainCompressAndCurves) {
  write("small.toml", kSmall);
  ASSERT_EQ(run("train --config " + path("small.toml") + " --out " + path("run") +
                " --set prune.mode=\\\"gradual\\\" --seed 5"),
            0)
      << stderr_text();
  EXPECT_NE(stdout_text().find("sparsity"), std::string::npos);
  for (const char* f : {"metrics.csv", "schedule.csv", "model.sprn",
                        "config.toml", "calibration.toml"}) {
    EXPECT_TRUE(fs::exists(dir_ / "run" / f)) << f;
  }
  EXPECT_NE(read(dir_ / "run" / "config.toml").find("seed = 5"), std::string::npos);

  EXPECT_EQ(run("compress " + path("run/model.sprn")), 0);
  EXPECT_NE(stdout_text().find("ratio"), std::string::npos);

  EXPECT_EQ(run("curves " + path("run/metrics.csv") + " --out " + path("plots")), 0);
  EXPECT_TRUE(fs::exists(dir_ / "plots" / "loss.svg"));
  EXPECT_TRUE(fs::exists(dir_ / "plots" / "pruned.svg"));
}

TEST_F(Cli, CalibrateThenTrainFromFile) {
  write("small.toml", kSmall);
  ASSERT_EQ(run("calibrate --config " + path("small.toml") + " --out " + path("cal")),
            0)
      << stderr_text();
  ASSERT_TRUE(fs::exists(dir_ / "cal" / "calibration.toml"));
  EXPECT_EQ(run("train --config " + path("small.toml") + " --out " + path("run") +
                " --set prune.mode=\\\"gradual\\\" --set prune.calibration_file=\\\"" +
                (dir_ / "cal" / "calibration.toml").string() + "\\\""),
            0)
      << stderr_text();
}

TEST_F(Cli, HardPruneAndCompare) {
  write("small.toml", kSmall);
  EXPECT_EQ(run("hard-prune --config " + path("small.toml") + " --out " +
                path("hard") + " --set prune.hard_sparsity=0.8"),
            0)
      << stderr_text();
  EXPECT_EQ(run("hard-prune --config " + path("small.toml") + " --out " +
                path("hard2")),
            2);
  EXPECT_EQ(run("train --compare --config " + path("small.toml") + " --out " +
                path("cmp")),
            0)
      << stderr_text();
  EXPECT_TRUE(fs::exists(dir_ / "cmp" / "comparison.csv"));
  EXPECT_NE(stdout_text().find("gap"), std::string::npos);
}

TEST_F(Cli, DivergenceExitsThree) {
  write("small.toml", kSmall);
  EXPECT_EQ(run("train --config " + path("small.toml") +
                " --set optim.learning_rate=1e30 --set optim.clip_norm=0.0"
                " --set model.activation=\\\"identity\\\""),
            3);
  EXPECT_NE(stderr_text().find("iteration"), std::string::npos);
}

TEST_F(Cli, BenchWritesTable) {
  write("bench.toml", "[bench]\nsizes = [32]\nsparsities = [0.0, 0.9]\n");
  EXPECT_EQ(run("bench --config " + path("bench.toml") + " --out " + path("b")), 0)
      << stderr_text();
  EXPECT_TRUE(fs::exists(dir_ / "b" / "bench.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "b" / "bench.svg"));
}

}  // namespace
