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

#ifndef RIGTOK_GRPO_HPP_
#define RIGTOK_GRPO_HPP_

// Group Relative Policy Optimization on a position-wise categorical policy:
// each of T positions draws its token independently from softmax(logits[t]).

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace rigtok {

class ToyPolicy {
 public:
  ToyPolicy(int positions, int vocab_size);
  explicit ToyPolicy(Eigen::MatrixXd logits);

  int positions() const { return static_cast<int>(logits_.rows()); }
  int vocab_size() const { return static_cast<int>(logits_.cols()); }
  const Eigen::MatrixXd& logits() const { return logits_; }
  Eigen::MatrixXd& mutable_logits() { return logits_; }

  // Row t holds log softmax(logits[t]).
  Eigen::MatrixXd LogProbabilities() const;
  Eigen::MatrixXd Probabilities() const;

 private:
  Eigen::MatrixXd logits_;
};

struct Rollout {
  std::vector<int> tokens;
  double reward = 0.0;
  std::vector<double> logprob_old;
  std::vector<double> logprob_ref;
};

enum class ObjectiveMode {
  // min(r, clip(r, 1-eps, 1+eps)) * A, the advantage outside the min.
  kAsWritten,
  // min(r A, clip(r, 1-eps, 1+eps) A), standard PPO clipping.
  kPpoStandard,
};

struct GrpoConfig {
  int group_size = 24;
  double clip_epsilon = 0.2;
  double kl_beta = 0.1;
  double learning_rate = 1.0;
  double advantage_eps = 1e-8;
  int inner_steps = 1;
  ObjectiveMode mode = ObjectiveMode::kAsWritten;

  void Check() const;
};

inline constexpr double kPaperLearningRate = 1e-6;

// (R_i - mean) / (population std + eps); all zeros for a single reward or a
// constant group.
std::vector<double> Advantages(std::span<const double> rewards, double eps = 1e-8);

// sum p log(p / q) with q floored at 1e-12; zero-probability p terms vanish.
double KlCategorical(std::span<const double> p, std::span<const double> q);

// Exact KL(policy || reference) averaged over positions.
double PolicyKl(const ToyPolicy& policy, const ToyPolicy& reference);

struct ObjectiveResult {
  double objective = 0.0;   // surrogate - beta * kl, to be maximized
  double surrogate = 0.0;
  double kl = 0.0;
  Eigen::MatrixXd gradient; // d objective / d logits, T x V
};

// (1/G) sum_i (1/|o_i|) sum_t clipped-ratio term - beta KL(policy || reference)
// with r_{i,t} = exp(log pi(o_{i,t}) - logprob_old_{i,t}).
ObjectiveResult GrpoObjective(const ToyPolicy& policy, const ToyPolicy& reference,
                              std::span<const Rollout> rollouts, std::span<const double> advantages,
                              const GrpoConfig& config);

struct SampledSequence {
  std::vector<int> tokens;
  std::vector<double> logprobs;
};

std::vector<SampledSequence> SampleGroup(const ToyPolicy& policy, int group_size,
                                         std::uint64_t seed);

struct TraceRow {
  int step = 0;
  double mean_reward = 0.0;
  double kl = 0.0;        // KL(pi_old || pi_ref) when the group was drawn
  double objective = 0.0; // objective at the first inner step
  double success_rate = 0.0; // fraction of the group meeting the success test
};

using SequenceReward = std::function<double(std::span<const int> tokens)>;
using SequenceSuccess = std::function<bool(std::span<const int> tokens)>;

struct TrainResult {
  ToyPolicy policy;
  std::vector<TraceRow> trace;
};

// sample -> reward -> advantages -> objective -> gradient ascent, `steps`
// times. pi_old is refreshed every step and pi_ref stays at `initial`.
// Row k describes the group drawn from the policy after k updates. Throws
// kNumeric when the objective goes non-finite.
TrainResult TrainLoop(const ToyPolicy& initial, const SequenceReward& reward, int steps,
                      const GrpoConfig& config, std::uint64_t seed,
                      const SequenceSuccess& success = {},
                      const std::function<void(const TraceRow&)>& on_step = {});

// ---------------------------------------------------------------------------
// Demo tasks

struct DemoTask {
  ToyPolicy initial;
  SequenceReward reward;
  // Task success measure reported next to the reward (exact-match rate or
  // valid-sequence rate).
  SequenceSuccess success;
};

// T = 6, V = 8 target-matching task from a uniform policy. The reward is
// the fraction of positions equal to the target, 1 iff the sequence matches.
DemoTask MatchTargetTask();
const std::vector<int>& MatchTarget();

// Six-token sequences over a 9-id rig vocabulary (2 coordinate bins, one
// chain type, a 2-entry skin codebook, t_d = 0), rewarded 1 when they decode
// to a valid rig. Starts from a weak grammar prior standing in for a
// supervised model.
DemoTask ValiditySequenceTask();

}  // namespace rigtok

#endif  // RIGTOK_GRPO_HPP_
