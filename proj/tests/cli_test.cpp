// Copyright 2026 The rigtok Authors
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

// Drives the rigtok executable through a shell and checks exit codes and output.

#include <sys/wait.h>

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"

namespace {

namespace fs = std::filesystem;

const fs::path& WorkDir() {
  static const fs::path dir = [] {
    fs::path d(RIGTOK_TEST_WORKDIR);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void Spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

// Runs the CLI with args (already shell-quoted) inside the work directory.
RunResult Run(const std::string& args) {
  const fs::path out = WorkDir() / "stdout.txt";
  const fs::path err = WorkDir() / "stderr.txt";
  const std::string cmd = "cd '" + WorkDir().string() + "' && '" RIGTOK_CLI_PATH "' " + args +
                          " > '" + out.string() + "' 2> '" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = Slurp(out);
  r.err = Slurp(err);
  return r;
}

const char kBoxObj[] =
    "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
    "v 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1\n"
    "f 1 3 2\nf 1 4 3\nf 5 6 7\nf 5 7 8\n"
    "f 1 2 6\nf 1 6 5\nf 4 8 7\nf 4 7 3\n"
    "f 1 5 8\nf 1 8 4\nf 2 3 7\nf 2 7 6\n";

const char kChainRig[] = R"({"format_version":1,"joints":[
{"name":"hip","parent":-1,"position":[0.5,0.2,0.5],"chain_type":"generic"},
{"name":"spine","parent":0,"position":[0.5,0.5,0.5],"chain_type":"generic"},
{"name":"neck","parent":1,"position":[0.5,0.8,0.5],"chain_type":"generic"},
{"name":"arm","parent":1,"position":[0.8,0.5,0.5],"chain_type":"arm"}],
"skin":{"vertex_count":8,"entries":[
[0,0,1],[1,0,0.5],[1,3,0.5],[2,2,0.5],[2,3,0.5],[3,1,0.5],[3,2,0.5],
[4,0,1],[5,0,0.5],[5,3,0.5],[6,2,0.5],[6,3,0.5],[7,1,0.5],[7,2,0.5]]}})";

void WriteFixtures() {
  Spit(WorkDir() / "box.obj", kBoxObj);
  Spit(WorkDir() / "rig.json", kChainRig);
}

struct FixtureGuard {
  FixtureGuard() { WriteFixtures(); }
};

}  // namespace

TEST_CASE_FIXTURE(FixtureGuard, "fsq size prints the codebook size") {
  auto r = Run("fsq --levels 8,8,8,5,6 --size");
  CHECK(r.code == 0);
  CHECK(r.out == "15360\n");
  r = Run("--format json fsq --levels 8,8,8,8,8");
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["codebook_size"] == 32768);
}

TEST_CASE_FIXTURE(FixtureGuard, "fsq compression ratio and round trip") {
  auto r = Run("--format json fsq --levels 8,8,8,5,5,5 --vertices 6247 --td 32");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["codebook_size"] == 64000);
  CHECK(std::abs(j["compression_ratio"].get<double>() - 195.22) <= 0.01);

  Spit(WorkDir() / "latents.txt", "0 0 0 0 0\n");
  r = Run("fsq --levels 8,8,8,5,6 --roundtrip latents.txt");
  CHECK(r.code == 0);
  CHECK_FALSE(r.out.empty());
}

TEST_CASE_FIXTURE(FixtureGuard, "fsq rejects a bad level as a domain error") {
  const auto r = Run("fsq --levels 8,1");
  CHECK(r.code == 1);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE_FIXTURE(FixtureGuard, "usage errors exit 2 with usage text") {
  auto r = Run("nonsense");
  CHECK(r.code == 2);
  CHECK(r.err.find("Usage") != std::string::npos);
  r = Run("");
  CHECK(r.code == 2);
  r = Run("fsq");
  CHECK(r.code == 2);
  r = Run("fsq --levels 8,8 --unknown-flag");
  CHECK(r.code == 2);
  r = Run("reward --mesh box.obj");
  CHECK(r.code == 2);
  r = Run("--format yaml fsq --levels 8,8");
  CHECK(r.code == 2);
  r = Run("grpo-demo --task bogus");
  CHECK(r.code == 2);
}

TEST_CASE_FIXTURE(FixtureGuard, "every subcommand documents itself") {
  for (const char* sub : {"tokenize", "detokenize", "validate", "reward", "metrics", "stats",
                          "augment", "fsq", "grpo-demo"}) {
    CAPTURE(sub);
    const auto r = Run(std::string(sub) + " --help");
    CHECK(r.code == 0);
    CHECK(r.out.find("Usage") != std::string::npos);
    CHECK(r.out.find("--help") != std::string::npos);
  }
  const auto r = Run("--help");
  CHECK(r.code == 0);
  CHECK(r.out.find("grpo-demo") != std::string::npos);
}

TEST_CASE_FIXTURE(FixtureGuard, "runs echo their resolved configuration") {
  const auto r = Run("fsq --levels 8,8");
  CHECK(r.code == 0);
  CHECK(r.err.find("resolved configuration") != std::string::npos);
  CHECK(r.err.find("levels=") != std::string::npos);
}

TEST_CASE_FIXTURE(FixtureGuard, "tokenize then detokenize round trips the skeleton") {
  auto r = Run("tokenize --rig rig.json --td 2 --out seq.txt");
  REQUIRE(r.code == 0);
  const std::string stream = Slurp(WorkDir() / "seq.txt");
  CHECK(stream.rfind("RIGTOK v1 ", 0) == 0);

  r = Run("--format json detokenize --in seq.txt --out decoded.json");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["joints"] == 4);
  CHECK(j["t_d"] == 2);
  CHECK(j["skin_tokens"].size() == 4);
  for (const auto& block : j["skin_tokens"]) CHECK(block.size() == 2);

  const auto original = nlohmann::json::parse(kChainRig);
  const auto decoded = nlohmann::json::parse(Slurp(WorkDir() / "decoded.json"));
  REQUIRE(decoded["joints"].size() == 4);
  for (size_t i = 0; i < 4; ++i) {
    CAPTURE(i);
    CHECK(decoded["joints"][i]["parent"] == original["joints"][i]["parent"]);
    CHECK(decoded["joints"][i]["chain_type"] == original["joints"][i]["chain_type"]);
    for (size_t k = 0; k < 3; ++k) {
      const double a = original["joints"][i]["position"][k];
      const double b = decoded["joints"][i]["position"][k];
      CHECK(std::abs(a - b) <= 1.0 / 255.0 + 1e-9);
    }
  }
  CHECK(decoded["skin"]["entries"].empty());

  // Stdin input and the stdout rig match the file outputs.
  r = Run("detokenize < seq.txt");
  CHECK(r.code == 0);
  CHECK(r.out == Slurp(WorkDir() / "decoded.json"));
}

TEST_CASE_FIXTURE(FixtureGuard, "truncated stream fails to decode with exit 1") {
  Spit(WorkDir() / "bad.txt", "RIGTOK v1 B=256 levels=8,8,8,5,5,5 TD=0\n0 4 20 1\n");
  auto r = Run("detokenize --in bad.txt");
  CHECK(r.code == 1);
  CHECK(r.err.find("truncated triple") != std::string::npos);
  r = Run("validate --seq bad.txt");
  CHECK(r.code == 1);
  CHECK(r.out.find("valid 0") != std::string::npos);
  CHECK(r.out.find("truncated triple") != std::string::npos);
}

TEST_CASE_FIXTURE(FixtureGuard, "validate reports rig violations") {
  auto r = Run("--format json validate --rig rig.json --mesh box.obj");
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["valid"] == true);

  auto broken = nlohmann::json::parse(kChainRig);
  broken["skin"]["entries"].push_back({0, 1, 0.5});  // vertex 0 now sums to 1.5
  Spit(WorkDir() / "broken.json", broken.dump());
  r = Run("validate --rig broken.json");
  CHECK(r.code == 1);
  CHECK(r.out.find("valid 0") != std::string::npos);

  r = Run("validate --rig missing.json");
  CHECK(r.code == 1);
  r = Run("validate");
  CHECK(r.code == 2);
}

TEST_CASE_FIXTURE(FixtureGuard, "reward output is bounded and structured") {
  const auto r = Run("--format json reward --mesh box.obj --rig rig.json --res 16");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  for (const char* key : {"r_vj", "r_vk", "r_sc", "r_mo"}) {
    CAPTURE(key);
    const double v = j[key];
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(j["composite"].get<double>() > 0.0);
  const auto text = Run("reward --mesh box.obj --rig rig.json --res 16");
  CHECK(text.out.find("composite ") != std::string::npos);
  CHECK(Run("reward --mesh nope.obj --rig rig.json").code == 1);
  CHECK(Run("reward --mesh box.obj --rig rig.json --res 2").code == 2);
}

TEST_CASE_FIXTURE(FixtureGuard, "metrics of a rig against itself are perfect") {
  const auto r = Run("--format json metrics --pred rig.json --gt rig.json --mesh box.obj");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["j2j"] == 0.0);
  CHECK(j["j2b"] == 0.0);
  CHECK(j["b2b"] == 0.0);
  CHECK(j["skin_l1"] == 0.0);
  CHECK(j["iou"] == 1.0);
  CHECK(j["motion_loss"] == 0.0);
}

TEST_CASE_FIXTURE(FixtureGuard, "stats summarizes a directory") {
  fs::create_directories(WorkDir() / "rigs");
  Spit(WorkDir() / "rigs" / "a.json", kChainRig);
  Spit(WorkDir() / "rigs" / "b.json", kChainRig);
  const auto r = Run("--format json stats --dir rigs");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["rigs"] == 2);
  CHECK(j["avg_n"] == 8.0);
  CHECK(j["avg_j"] == 4.0);
  CHECK(j["avg_nnz"] == 14.0);
  CHECK(std::abs(j["avg_sparsity"].get<double>() - 14.0 / 32.0) <= 1e-9);
  CHECK(Run("stats --dir no_such_dir").code == 1);
}

TEST_CASE_FIXTURE(FixtureGuard, "augment writes valid seeded copies") {
  auto r = Run(
      "augment --rig rig.json --mesh box.obj --always --count 3 --seed 5 --out-prefix aug_");
  REQUIRE(r.code == 0);
  for (int i = 0; i < 3; ++i) {
    const std::string base = "aug_" + std::to_string(i);
    CAPTURE(base);
    REQUIRE(fs::exists(WorkDir() / (base + "_rig.json")));
    REQUIRE(fs::exists(WorkDir() / (base + "_mesh.obj")));
    const auto v = Run("validate --rig " + base + "_rig.json --mesh " + base + "_mesh.obj");
    CHECK(v.code == 0);
  }
  const std::string first = Slurp(WorkDir() / "aug_0_rig.json");
  r = Run("augment --rig rig.json --mesh box.obj --always --count 3 --seed 5 --out-prefix aug_");
  CHECK(r.code == 0);
  CHECK(Slurp(WorkDir() / "aug_0_rig.json") == first);
  CHECK(Run("augment --rig rig.json --mesh box.obj --ops scale,bogus").code != 0);
}

TEST_CASE_FIXTURE(FixtureGuard, "grpo demo prints its trace") {
  auto r = Run("grpo-demo --task match --steps 10 --seed 7");
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "step,mean_reward,success_rate,kl,objective");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 10);

  r = Run("--format json grpo-demo --task valid --steps 4");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j.size() == 4);
  CHECK(j[3]["step"] == 3);
}

TEST_CASE_FIXTURE(FixtureGuard, "identical invocations give byte-identical output") {
  const std::vector<std::string> commands = {
      "tokenize --rig rig.json --td 3 --seed 11",
      "--format json reward --mesh box.obj --rig rig.json --res 16 --seed 3",
      "metrics --pred rig.json --gt rig.json --mesh box.obj --seed 3",
      "grpo-demo --task match --steps 20 --seed 9",
      "fsq --levels 8,8,8,5,5,5 --vertices 100 --td 4",
  };
  for (const auto& cmd : commands) {
    CAPTURE(cmd);
    const auto a = Run(cmd);
    const auto b = Run(cmd);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK_FALSE(a.out.empty());
  }
  // Thread count does not change the output.
  const auto serial = Run("reward --mesh box.obj --rig rig.json --res 32");
  setenv("RIGTOK_THREADS", "3", 1);
  const auto parallel = Run("reward --mesh box.obj --rig rig.json --res 32");
  unsetenv("RIGTOK_THREADS");
  CHECK(serial.out == parallel.out);
}

TEST_CASE_FIXTURE(FixtureGuard, "numeric output uses nine significant digits") {
  const auto r = Run("reward --mesh box.obj --rig rig.json --res 16");
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string key, value;
  while (lines >> key >> value) {
    CAPTURE(key);
    CAPTURE(value);
    size_t digits = 0;
    for (char c : value.substr(0, value.find_first_of("eE"))) digits += std::isdigit(static_cast<unsigned char>(c)) ? 1 : 0;
    CHECK(digits <= 10);  // "0." prefixes add a non-significant digit
  }
}
