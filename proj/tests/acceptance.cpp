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

// Acceptance checks. Prints one PASS or FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rigtok/augment.hpp"
#include "rigtok/fsq.hpp"
#include "rigtok/geom.hpp"
#include "rigtok/grpo.hpp"
#include "rigtok/losses.hpp"
#include "rigtok/metrics.hpp"
#include "rigtok/random.hpp"
#include "rigtok/rewards.hpp"
#include "rigtok/rigcore.hpp"
#include "rigtok/seqcodec.hpp"
#include "test_util.hpp"

namespace rigtok {
namespace {

using namespace testing;

// Pinned tolerances and budgets.
constexpr double kCodebookBudgetSeconds = 1e-3;
constexpr double kCompressionTarget = 195.22;
constexpr double kCompressionTolerance = 0.01;
constexpr double kDiceGradientTolerance = 1e-12;
constexpr double kLossFdTolerance = 1e-6;
constexpr double kLossFdStep = 1e-6;
constexpr double kLossBudgetSeconds = 5.0;
constexpr double kCodecBudgetSeconds = 30.0;
constexpr double kSegmentTolerance = 1e-4;
constexpr double kLbsRigidTolerance = 1e-9;
constexpr double kRewardTolerance = 1e-12;
constexpr double kGrpoFdTolerance = 1e-4;
constexpr double kGrpoFdStep = 1e-5;
constexpr double kGrpoKinkMargin = 1e-3;
constexpr double kGrpoZeroTolerance = 1e-12;
constexpr double kGrpoRewardTarget = 0.9;
constexpr int kGrpoMatchSteps = 500;
constexpr std::uint64_t kGrpoSeed = 7;
constexpr double kGrpoBudgetSeconds = 60.0;
constexpr double kMassTolerance = 1e-9;
constexpr int kAugmentRuns = 1000;

// Records the first failed expectation of a criterion.
class Verdict {
 public:
  void Expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && failure_.empty()) failure_ = what;
  }
  void Note(const std::string& note) { notes_ += (notes_.empty() ? "" : ", ") + note; }
  bool passed() const { return failure_.empty(); }
  std::string Summary() const {
    std::ostringstream out;
    out << checks_ << " checks";
    if (!notes_.empty()) out << ", " << notes_;
    if (!failure_.empty()) out << "; first failure: " << failure_;
    return out.str();
  }

 private:
  int checks_ = 0;
  std::string failure_;
  std::string notes_;
};

std::string Fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---- 1. Codebook arithmetic ----------------------------------------------

void CodebookArithmetic(Verdict& v) {
  struct Case {
    std::vector<int> levels;
    std::int64_t size;
  };
  const std::vector<Case> cases = {
      {{8, 8, 8, 5, 6}, 15360}, {{8, 8, 8, 8, 8}, 32768}, {{8, 8, 8, 5, 5, 5}, 64000}};
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::int64_t> got;
  for (const auto& c : cases) got.push_back(CodebookSize(FsqLevels(c.levels)));
  const double seconds = SecondsSince(start);
  for (size_t i = 0; i < cases.size(); ++i) {
    v.Expect(got[i] == cases[i].size,
             "codebook size " + std::to_string(got[i]) + " != " + std::to_string(cases[i].size));
  }
  v.Expect(seconds < kCodebookBudgetSeconds, "took " + Fmt(seconds) + " s");
  v.Note("took " + Fmt(seconds) + " s");
}

// ---- 2. Compression accounting -------------------------------------------

void CompressionAccounting(Verdict& v) {
  const double ratio =
      CompressionRatio(6247, 32, FsqLevels({8, 8, 8, 5, 5, 5}), CompressionMode::kFp16Storage);
  v.Expect(std::abs(ratio - kCompressionTarget) <= kCompressionTolerance, "ratio " + Fmt(ratio));
  v.Note("ratio " + Fmt(ratio));
}

// ---- 3. Loss correctness --------------------------------------------------

using Loss = std::function<LossValue(std::span<const double>, std::span<const double>)>;

double LossFdError(const Loss& loss, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = IntIn(rng, 1, 16);
    std::vector<double> p(n), w(n);
    for (auto& x : p) x = UniformIn(rng, 0.05, 0.95);
    for (auto& x : w) x = UniformIn(rng, 0.05, 0.95);
    const auto analytic = loss(p, w).gradient;
    std::vector<double> numeric(n);
    for (int i = 0; i < n; ++i) {
      const double keep = p[i];
      p[i] = keep + kLossFdStep;
      const double up = loss(p, w).value;
      p[i] = keep - kLossFdStep;
      const double down = loss(p, w).value;
      p[i] = keep;
      numeric[i] = (up - down) / (2.0 * kLossFdStep);
    }
    worst = std::max(worst, GradientRelativeError(analytic, numeric));
  }
  return worst;
}

void LossCorrectness(Verdict& v) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(17);
  double worst_grad = 0.0;
  bool all_zero = true;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> w(IntIn(rng, 1, 64));
    for (auto& x : w) x = UniformIn(rng, 0.0, 1.0) < 0.3 ? 0.0 : UniformIn(rng, 0.0, 1.0);
    const auto d = Dice(w, w);
    all_zero = all_zero && d.value == 0.0;
    for (double g : d.gradient) worst_grad = std::max(worst_grad, std::abs(g));
  }
  v.Expect(all_zero, "dice(p=w) is not exactly 0");
  v.Expect(worst_grad <= kDiceGradientTolerance, "max |grad dice| at p=w is " + Fmt(worst_grad));

  const std::vector<std::pair<const char*, Loss>> losses = {
      {"bce", [](auto p, auto w) { return Bce(p, w); }},
      {"mse", [](auto p, auto w) { return Mse(p, w); }},
      {"dice", [](auto p, auto w) { return Dice(p, w); }},
  };
  std::uint64_t seed = 1;
  double worst_fd = 0.0;
  for (const auto& [name, loss] : losses) {
    const double err = LossFdError(loss, seed++);
    worst_fd = std::max(worst_fd, err);
    v.Expect(err <= kLossFdTolerance, std::string(name) + " gradient error " + Fmt(err));
  }

  const std::vector<double> zero = {0.0};
  for (int k = 1; k <= 9; ++k) {
    const std::vector<double> p = {k / 10.0};
    v.Expect(std::abs(Dice(p, zero).gradient[0]) < std::abs(Bce(p, zero).gradient[0]),
             "zero target at p=" + Fmt(p[0]) + ": |dDice| >= |dBCE|");
  }
  const double seconds = SecondsSince(start);
  v.Expect(seconds < kLossBudgetSeconds, "took " + Fmt(seconds) + " s");
  v.Note("worst fd error " + Fmt(worst_fd) + ", took " + Fmt(seconds) + " s");
}

// ---- 4. Codec round trips -------------------------------------------------

void CodecRoundTrips(Verdict& v) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<std::vector<int>> configs = {{8, 8}, {2, 3, 4}, {8, 8, 8, 5, 6}, {8, 8, 8, 8, 8},
                                                 {16, 16, 16, 16}, {2}};
  for (const auto& cfg : configs) {
    const FsqLevels levels(cfg);
    v.Expect(levels.codebook_size() <= (1 << 16), "codebook above 2^16");
    std::vector<char> seen(levels.codebook_size(), 0);
    bool ok = true;
    for (std::int64_t t = 0; t < levels.codebook_size(); ++t) {
      const TokenId back = CodeToToken(levels, TokenToCode(levels, TokenId{t}));
      ok = ok && back.value == t;
      if (back.value >= 0 && back.value < levels.codebook_size()) seen[back.value] = 1;
    }
    ok = ok && std::all_of(seen.begin(), seen.end(), [](char c) { return c == 1; });
    v.Expect(ok, "fsq bijection fails for a codebook of size " + std::to_string(levels.codebook_size()));
  }

  const int bins = 256;
  const Vocab vocab(bins, FsqLevels({8, 8, 8, 5, 5, 5}));
  const double bound = 1.0 / (bins - 1);
  Rng rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = IntIn(rng, 1, 60);
    const auto s = RandomSkeleton(rng, n, 0.1);
    const int t_d = IntIn(rng, 0, 6);
    std::vector<std::vector<TokenId>> skin(n);
    for (auto& list : skin) {
      for (int k = 0; k < t_d; ++k) {
        list.push_back(TokenId{std::uniform_int_distribution<std::int64_t>(
            0, vocab.levels().codebook_size() - 1)(rng)});
      }
    }
    const auto decoded = DecodeRig(EncodeRig(s, skin, vocab, t_d), vocab);
    if (!decoded.ok() || decoded.skeleton.size() != n) {
      v.Expect(false, "tree " + std::to_string(trial) + " failed to decode");
      continue;
    }
    const auto order = EmissionOrder(s);
    std::vector<int> rank(n);
    for (int k = 0; k < n; ++k) rank[order[k]] = k;
    bool topology = true;
    for (int k = 0; k < n; ++k) {
      const auto& orig = s.joints[order[k]];
      const auto& got = decoded.skeleton.joints[k];
      topology = topology && orig.parent.has_value() == got.parent.has_value() &&
                 (!orig.parent || *got.parent == rank[*orig.parent]);
      for (int a = 0; a < 3; ++a) worst = std::max(worst, std::abs(got.position[a] - orig.position[a]));
      if (t_d > 0) topology = topology && decoded.skin_tokens[k] == skin[order[k]];
    }
    v.Expect(topology, "tree " + std::to_string(trial) + " topology or skin tokens differ");
  }
  v.Expect(worst <= bound, "position error " + Fmt(worst) + " > 1/(B-1)");
  const double seconds = SecondsSince(start);
  v.Expect(seconds < kCodecBudgetSeconds, "took " + Fmt(seconds) + " s");
  v.Note("worst position error " + Fmt(worst) + ", took " + Fmt(seconds) + " s");
}

// ---- 5. Geometry oracles --------------------------------------------------

void GeometryOracles(Verdict& v) {
  Rng rng(500);
  double worst_segment = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const Vec3 p0 = RandomPoint(rng), p1 = RandomPoint(rng), q0 = RandomPoint(rng), q1 = RandomPoint(rng);
    worst_segment = std::max(worst_segment, std::abs(SegmentSegmentDistance(p0, p1, q0, q1) -
                                                     BruteForceSegmentDistance(p0, p1, q0, q1)));
  }
  v.Expect(worst_segment <= kSegmentTolerance, "segment error " + Fmt(worst_segment));

  Rng chamfer_rng(50);
  bool chamfer_exact = true;
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = RandomSkeleton(chamfer_rng, IntIn(chamfer_rng, 1, 60), 0.1);
    const auto b = RandomSkeleton(chamfer_rng, IntIn(chamfer_rng, 1, 60), 0.1);
    const auto m = ChamferSkeleton(a, b, kDefaultBoneSamples);
    chamfer_exact = chamfer_exact && m.j2j == OracleChamfer(a.positions(), b.positions()) &&
                    m.j2b == 0.5 * (OracleJointToBone(a, b) + OracleJointToBone(b, a)) &&
                    m.b2b == OracleChamfer(OracleBoneSamples(a, kDefaultBoneSamples),
                                           OracleBoneSamples(b, kDefaultBoneSamples));
  }
  v.Expect(chamfer_exact, "chamfer skeleton differs from the oracle");

  Rng lbs_rng(31);
  bool identity_exact = true;
  double worst_edge = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Mesh mesh = GridBox(3);
    Rig rig;
    rig.skeleton = RandomSkeleton(lbs_rng, IntIn(lbs_rng, 1, 12), 0.2);
    rig.skin = RandomSkin(lbs_rng, mesh.vertex_count(), rig.skeleton.size(), 4, trial % 2 == 0);
    identity_exact = identity_exact && LbsDeform(mesh, rig, Pose::Identity(rig.skeleton.size())) == mesh.vertices;

    // One tree with full-weight skin, so rotating the root moves the whole
    // mesh rigidly.
    rig.skeleton = RandomSkeleton(lbs_rng, IntIn(lbs_rng, 2, 15));
    rig.skin = RandomSkin(lbs_rng, mesh.vertex_count(), rig.skeleton.size(), 4, true);
    SparseSkin full{mesh.vertex_count(), rig.skeleton.size(), {}};
    std::vector<double> sum(mesh.vertex_count(), 0.0);
    for (const auto& e : rig.skin.entries) sum[e.vertex] += e.weight;
    for (const auto& e : rig.skin.entries) full.entries.push_back({e.vertex, e.joint, e.weight / sum[e.vertex]});
    for (int i = 0; i < mesh.vertex_count(); ++i) {
      if (sum[i] == 0.0) full.entries.push_back({i, 0, 1.0});
    }
    full.canonicalize();
    rig.skin = full;
    Pose pose = Pose::Identity(rig.skeleton.size());
    pose.rotations[0] = {RandomPoint(lbs_rng).normalized(), UniformIn(lbs_rng, -3, 3)};
    const auto out = LbsDeform(mesh, rig, pose);
    for (const auto& [a, b] : MeshEdges(mesh)) {
      worst_edge = std::max(worst_edge, std::abs((out[a] - out[b]).norm() -
                                                 (mesh.vertices[a] - mesh.vertices[b]).norm()));
    }
  }
  v.Expect(identity_exact, "identity pose moved a vertex");
  v.Expect(worst_edge <= kLbsRigidTolerance, "rigid edge change " + Fmt(worst_edge));
  v.Note("segment error " + Fmt(worst_segment) + ", rigid edge change " + Fmt(worst_edge));
}

// ---- 6. Reward sanity -----------------------------------------------------

void RewardSanity(Verdict& v) {
  RewardConfig config;
  config.resolution = 24;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto f = RandomRigFixture(seed, 1, 12);
    const auto report = EvaluateRig(f.mesh, f.rig, config);
    v.Expect(report.valid, "fixture " + std::to_string(seed) + " invalid");
    for (double x : {report.r_vj, report.r_vk, report.r_sc, report.r_mo}) {
      v.Expect(x >= 0.0 && x <= 1.0, "sub-reward " + Fmt(x) + " out of range");
    }
  }

  VoxelGrid grid(32, Vec3::Zero(), 0.5);
  grid.set({1, 1, 1}, true);
  const std::vector<Vec3> far = {grid.Center({1, 1, 1}) + Vec3(20 * 0.5, 0, 0)};
  const double r_vj = JointCoverageReward(grid, far, 0.05);
  v.Expect(std::abs(r_vj - std::exp(-1.0)) <= kRewardTolerance, "r_vj " + Fmt(r_vj));

  DenseSkin crowded = DenseSkin::Zero(2, 6);
  for (int j = 0; j < 5; ++j) crowded(0, j) = 0.2;
  crowded(1, 5) = 1.0;
  const double r_sc = SkinCoverageReward(crowded, 0.1, 1.0, 1.0).r_sc;
  v.Expect(std::abs(r_sc - 0.75) <= kRewardTolerance, "r_sc " + Fmt(r_sc));

  const Mesh mesh = GridBox(3);
  Rig rigid;
  rigid.skeleton.joints = {Joint{"j", Vec3(0.1, 0.2, 0.3), std::nullopt, "generic"}};
  rigid.skin = {mesh.vertex_count(), 1, {}};
  for (int i = 0; i < mesh.vertex_count(); ++i) rigid.skin.entries.push_back({i, 0, 1.0});
  RewardConfig motion;
  motion.motion_scale = 1.0;
  const double r_mo = DeformationReward(mesh, rigid, motion);
  v.Expect(std::abs(r_mo - 0.5) <= kRewardTolerance, "r_mo " + Fmt(r_mo));

  const Vocab vocab(64, FsqLevels({4, 4}));
  const Mesh box = BoxMesh(Vec3(-1, -1, -1), Vec3(1, 1, 1));
  const SkinDecoder decoder = [](const Skeleton& s, const std::vector<std::vector<TokenId>>&, const Mesh& m) {
    SparseSkin skin{m.vertex_count(), s.size(), {}};
    for (int i = 0; i < m.vertex_count(); ++i) skin.entries.push_back({i, 0, 1.0});
    return skin;
  };
  Rng rng(77);
  int invalid = 0;
  bool zero = true;
  for (int i = 0; i < 1000; ++i) {
    std::vector<int> tokens(IntIn(rng, 0, 30));
    for (auto& t : tokens) t = IntIn(rng, 0, vocab.size() - 1);
    const RigSequence seq{tokens, IntIn(rng, 0, 2)};
    if (ValidateSequence(seq, vocab).valid) continue;
    ++invalid;
    zero = zero && EvaluateSequence(seq, vocab, box, decoder, config).composite == 0.0;
  }
  v.Expect(invalid > 0, "no invalid sequences drawn");
  v.Expect(zero, "an invalid sequence scored above 0");
  v.Note(std::to_string(invalid) + " invalid sequences scored 0");
}

// ---- 7. GRPO --------------------------------------------------------------

void GrpoCorrectness(Verdict& v) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(4);
  double worst_fd = 0.0, worst_zero = 0.0;
  int skipped = 0;
  for (int trial = 0; trial < 200;) {
    const ToyPolicy old = RandomPolicy(rng, 3, 4);
    Eigen::MatrixXd logits = old.logits();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 4; ++j) logits(i, j) += UniformIn(rng, -0.4, 0.4);
    }
    const ToyPolicy policy(logits);
    const ToyPolicy ref = RandomPolicy(rng, 3, 4);
    const auto rollouts = RandomRollouts(rng, old, 6);
    std::vector<double> rewards(6);
    for (auto& r : rewards) r = UniformIn(rng, 0, 1);
    const auto adv = Advantages(rewards);
    GrpoConfig c;
    c.mode = trial % 2 ? ObjectiveMode::kPpoStandard : ObjectiveMode::kAsWritten;
    const auto own = RandomRollouts(rng, old, 6);
    worst_zero = std::max(worst_zero, std::abs(GrpoObjective(old, old, own, adv, c).objective));
    // Central differences are undefined across a clip kink; redraw there.
    if (ClipKinkMargin(logits, rollouts, c.clip_epsilon) < kGrpoKinkMargin) {
      ++skipped;
      continue;
    }
    ++trial;
    const auto obj = GrpoObjective(policy, ref, rollouts, adv, c);
    std::vector<double> analytic, numeric;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 4; ++j) {
        Eigen::MatrixXd up = logits, down = logits;
        up(i, j) += kGrpoFdStep;
        down(i, j) -= kGrpoFdStep;
        numeric.push_back((NaiveObjective(up, ref, rollouts, adv, c) -
                           NaiveObjective(down, ref, rollouts, adv, c)) /
                          (2 * kGrpoFdStep));
        analytic.push_back(obj.gradient(i, j));
      }
    }
    worst_fd = std::max(worst_fd, GradientRelativeError(analytic, numeric));
  }
  v.Expect(skipped < 20, std::to_string(skipped) + " draws near a clip kink");
  v.Expect(worst_fd <= kGrpoFdTolerance, "objective gradient error " + Fmt(worst_fd));
  v.Expect(worst_zero <= kGrpoZeroTolerance, "objective at theta=old=ref " + Fmt(worst_zero));

  const auto match = MatchTargetTask();
  GrpoConfig c;
  v.Expect(match.initial.positions() == 6 && match.initial.vocab_size() == 8, "match task is not T=6, V=8");
  v.Expect(c.group_size == 24 && c.clip_epsilon == 0.2 && c.kl_beta == 0.1, "defaults are not G=24, eps=0.2, beta=0.1");
  const auto trained = TrainLoop(match.initial, match.reward, kGrpoMatchSteps, c, kGrpoSeed, match.success);
  // success_rate is the group mean of the exact-match 0/1 reward; mean_reward
  // is the group mean of the partial-credit training reward. Both must reach
  // the target.
  int first = -1, first_exact = -1;
  double best = 0.0, best_exact = 0.0;
  for (const auto& row : trained.trace) {
    best = std::max(best, row.mean_reward);
    best_exact = std::max(best_exact, row.success_rate);
    if (first < 0 && row.mean_reward >= kGrpoRewardTarget) first = row.step;
    if (first_exact < 0 && row.success_rate >= kGrpoRewardTarget) first_exact = row.step;
  }
  v.Expect(first >= 0, "best mean training reward " + Fmt(best) + " within 500 steps");
  v.Expect(first_exact >= 0, "best exact-match rate " + Fmt(best_exact) + " within 500 steps");

  const auto valid = ValiditySequenceTask();
  const auto run = TrainLoop(valid.initial, valid.reward, 501, c, kGrpoSeed, valid.success);
  const double before = run.trace.front().success_rate, after = run.trace.back().success_rate;
  v.Expect(run.trace.size() == 501 && after > before,
           "valid fraction " + Fmt(before) + " -> " + Fmt(after));

  const double seconds = SecondsSince(start);
  v.Expect(seconds < kGrpoBudgetSeconds, "took " + Fmt(seconds) + " s");
  v.Note("fd error " + Fmt(worst_fd) + " (" + std::to_string(skipped) + " kink redraws), match reward >= 0.9 at step " + std::to_string(first) +
         ", exact match >= 0.9 at step " + std::to_string(first_exact) +
         ", valid fraction " + Fmt(before) + " -> " + Fmt(after) + ", took " + Fmt(seconds) + " s");
}

// ---- 8. Augmentation safety -----------------------------------------------

std::vector<double> VertexSums(const SparseSkin& skin) {
  std::vector<double> sums(skin.vertex_count, 0.0);
  for (const auto& e : skin.entries) sums[e.vertex] += e.weight;
  return sums;
}

double TotalMass(const SparseSkin& skin) {
  double total = 0.0;
  for (const auto& e : skin.entries) total += e.weight;
  return total;
}

void AugmentationSafety(Verdict& v) {
  AugmentConfig always;
  always.p_delete = always.p_subtree = always.p_reconnect = 1.0;
  always.p_scale = always.p_rotate = always.p_pose = always.p_noise = 1.0;
  int runs = 0;
  for (const auto& op : AugmentOpNames()) {
    const std::vector<std::string> ops = {op};
    int bad = 0;
    for (std::uint64_t seed = 0; seed < kAugmentRuns; ++seed) {
      const auto f = RandomRigFixture(seed * 7 + 1, 1, 24);
      const auto out = Augment(f.rig, f.mesh, always, ops, seed);
      bad += ValidateRig(out.rig, &out.mesh).empty() ? 0 : 1;
      ++runs;
    }
    v.Expect(bad == 0, op + ": " + std::to_string(bad) + " invalid outputs");
  }

  double worst_mass = 0.0;
  for (std::uint64_t seed = 0; seed < kAugmentRuns; ++seed) {
    const auto f = RandomRigFixture(seed + 1, 1, 24);
    Rng rng(seed);
    const auto del = DeleteJoints(f.rig, f.mesh, UniformIn(rng, 0.0, 0.5), seed);
    const auto before = VertexSums(f.rig.skin), after = VertexSums(del.rig.skin);
    for (size_t i = 0; i < before.size(); ++i) worst_mass = std::max(worst_mass, std::abs(before[i] - after[i]));
    const auto rec = ReconnectJoints(f.rig, UniformIn(rng, 0.0, 0.3), seed);
    worst_mass = std::max(worst_mass, std::abs(TotalMass(rec.skin) - TotalMass(f.rig.skin)));
    v.Expect(ValidateRig(del.rig, &del.mesh).empty() && ValidateRig(rec, &f.mesh).empty(),
             "direct operation produced an invalid rig at seed " + std::to_string(seed));
  }
  v.Expect(worst_mass <= kMassTolerance, "weight mass change " + Fmt(worst_mass));
  v.Note(std::to_string(runs) + " augmentations, mass change " + Fmt(worst_mass));
}

// ---- 9. Metric oracle equivalence -----------------------------------------

void MetricOracles(Verdict& v) {
  Rng rng(20);
  bool exact = true;
  for (int trial = 0; trial < 500; ++trial) {
    const DenseSkin pred = RandomTable(rng, 20, 5), gt = RandomTable(rng, 20, 5);
    const auto m = SkinReport(pred, gt);
    const auto o = NaiveSkinReport(pred, gt, kSkinActiveEps);
    exact = exact && m.l1 == o.l1 && m.l1_var == o.l1_var && m.precision == o.precision &&
            m.recall == o.recall && m.iou == o.iou && m.mask_accuracy == o.mask;
  }
  v.Expect(exact, "skin report differs from the naive oracle");

  Rng sym(21);
  bool symmetric = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = IntIn(sym, 1, 20), j = IntIn(sym, 1, 6);
    const DenseSkin a = RandomTable(sym, n, j), b = RandomTable(sym, n, j);
    const auto ab = SkinReport(a, b), ba = SkinReport(b, a);
    symmetric = symmetric && ab.iou == ba.iou && ab.precision == ba.recall && ab.recall == ba.precision;
  }
  v.Expect(symmetric, "iou or precision/recall symmetry broken");
}

struct Criterion {
  const char* name;
  void (*run)(Verdict&);
};

}  // namespace
}  // namespace rigtok

int main() {
  using namespace rigtok;
  const Criterion criteria[] = {
      {"codebook arithmetic", CodebookArithmetic},
      {"compression accounting", CompressionAccounting},
      {"loss correctness", LossCorrectness},
      {"codec round trips", CodecRoundTrips},
      {"geometry oracles", GeometryOracles},
      {"reward sanity", RewardSanity},
      {"grpo correctness and improvement", GrpoCorrectness},
      {"augmentation safety", AugmentationSafety},
      {"metric oracle equivalence", MetricOracles},
  };
  int failed = 0;
  int index = 1;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.Expect(false, std::string("exception: ") + e.what());
    }
    failed += v.passed() ? 0 : 1;
    std::printf("%s %d %s (%s)\n", v.passed() ? "PASS" : "FAIL", index++, c.name, v.Summary().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
