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

#include "rigtok/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rigtok/error.hpp"
#include "rigtok/random.hpp"
#include "rigtok/seqcodec.hpp"

namespace rigtok {

ToyPolicy::ToyPolicy(int positions, int vocab_size) {
  if (positions < 1 || vocab_size < 1) {
    throw Error(ErrorCode::kInvalidArgument, "policy needs at least one position and one token");
  }
  logits_ = Eigen::MatrixXd::Zero(positions, vocab_size);
}

ToyPolicy::ToyPolicy(Eigen::MatrixXd logits) : logits_(std::move(logits)) {
  if (logits_.rows() < 1 || logits_.cols() < 1) {
    throw Error(ErrorCode::kInvalidArgument, "policy needs at least one position and one token");
  }
  if (!logits_.allFinite()) throw Error(ErrorCode::kNumeric, "policy logits must be finite");
}

Eigen::MatrixXd ToyPolicy::LogProbabilities() const {
  Eigen::MatrixXd out(logits_.rows(), logits_.cols());
  for (Eigen::Index t = 0; t < logits_.rows(); ++t) {
    const double top = logits_.row(t).maxCoeff();
    const double lse = top + std::log((logits_.row(t).array() - top).exp().sum());
    out.row(t) = logits_.row(t).array() - lse;
  }
  return out;
}

Eigen::MatrixXd ToyPolicy::Probabilities() const { return LogProbabilities().array().exp(); }

void GrpoConfig::Check() const {
  if (group_size < 2) throw Error(ErrorCode::kInvalidArgument, "grpo: group size must be >= 2");
  if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "grpo: clip epsilon must lie in (0,1)");
  }
  if (!(kl_beta >= 0.0) || !(learning_rate >= 0.0) || !(advantage_eps >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "grpo: beta, learning rate and eps must be non-negative");
  }
  if (inner_steps < 1) throw Error(ErrorCode::kInvalidArgument, "grpo: inner_steps must be >= 1");
}

std::vector<double> Advantages(std::span<const double> rewards, double eps) {
  std::vector<double> out(rewards.size(), 0.0);
  if (rewards.size() < 2) return out;
  const auto [lo, hi] = std::minmax_element(rewards.begin(), rewards.end());
  if (*lo == *hi) return out;
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(rewards.size());
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= static_cast<double>(rewards.size());
  const double scale = 1.0 / (std::sqrt(var) + eps);
  for (size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mean) * scale;
  return out;
}

double KlCategorical(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorCode::kInvalidArgument, "kl: length mismatch");
  double kl = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    kl += p[i] * (std::log(p[i]) - std::log(std::max(q[i], 1e-12)));
  }
  return kl;
}

namespace {

void CheckCompatible(const ToyPolicy& a, const ToyPolicy& b) {
  if (a.positions() != b.positions() || a.vocab_size() != b.vocab_size()) {
    throw Error(ErrorCode::kInvalidArgument, "grpo: policy shapes differ");
  }
}

}  // namespace

double PolicyKl(const ToyPolicy& policy, const ToyPolicy& reference) {
  CheckCompatible(policy, reference);
  const Eigen::MatrixXd p = policy.Probabilities();
  const Eigen::MatrixXd q = reference.Probabilities();
  double total = 0.0;
  std::vector<double> prow(p.cols()), qrow(q.cols());
  for (Eigen::Index t = 0; t < p.rows(); ++t) {
    for (Eigen::Index v = 0; v < p.cols(); ++v) {
      prow[v] = p(t, v);
      qrow[v] = q(t, v);
    }
    total += KlCategorical(prow, qrow);
  }
  return total / static_cast<double>(p.rows());
}

ObjectiveResult GrpoObjective(const ToyPolicy& policy, const ToyPolicy& reference,
                              std::span<const Rollout> rollouts, std::span<const double> advantages,
                              const GrpoConfig& config) {
  config.Check();
  CheckCompatible(policy, reference);
  if (rollouts.empty()) throw Error(ErrorCode::kInvalidArgument, "grpo: empty rollout list");
  if (advantages.size() != rollouts.size()) {
    throw Error(ErrorCode::kInvalidArgument, "grpo: one advantage per rollout required");
  }
  const int positions = policy.positions();
  const int vocab = policy.vocab_size();
  const Eigen::MatrixXd logp = policy.LogProbabilities();
  const Eigen::MatrixXd prob = logp.array().exp();
  const double lo = 1.0 - config.clip_epsilon;
  const double hi = 1.0 + config.clip_epsilon;
  const double group = static_cast<double>(rollouts.size());

  ObjectiveResult out;
  out.gradient = Eigen::MatrixXd::Zero(positions, vocab);
  for (size_t i = 0; i < rollouts.size(); ++i) {
    const auto& ro = rollouts[i];
    const int len = static_cast<int>(ro.tokens.size());
    if (len < 1 || len > positions || static_cast<int>(ro.logprob_old.size()) != len) {
      throw Error(ErrorCode::kInvalidArgument, "grpo: rollout length does not fit the policy");
    }
    const double a = advantages[i];
    const double weight = 1.0 / (group * len);
    for (int t = 0; t < len; ++t) {
      const int token = ro.tokens[t];
      if (token < 0 || token >= vocab) throw Error(ErrorCode::kInvalidArgument, "grpo: token id out of range");
      const double ratio = std::exp(logp(t, token) - ro.logprob_old[t]);
      const double clipped = std::clamp(ratio, lo, hi);
      double term = 0.0;
      bool active = false;
      if (config.mode == ObjectiveMode::kAsWritten || a >= 0.0) {
        // min(r, clip(r)) * A; for A >= 0 this equals min(rA, clip(r)A).
        term = std::min(ratio, clipped) * a;
        active = !(clipped < ratio);
      } else {
        // A < 0: min(rA, clip(r)A) = max(r, clip(r)) * A.
        term = std::max(ratio, clipped) * a;
        active = !(clipped > ratio);
      }
      out.surrogate += weight * term;
      if (active && a != 0.0) {
        // d r / d logit[t][v] = r (1[v = token] - p[t][v]).
        const double scale = weight * a * ratio;
        out.gradient.row(t) -= scale * prob.row(t);
        out.gradient(t, token) += scale;
      }
    }
  }

  const Eigen::MatrixXd ref_logp = reference.LogProbabilities();
  for (int t = 0; t < positions; ++t) {
    double kl_t = 0.0;
    Eigen::VectorXd log_ratio(vocab);
    for (int v = 0; v < vocab; ++v) {
      log_ratio[v] = logp(t, v) - std::max(ref_logp(t, v), std::log(1e-12));
      if (prob(t, v) > 0.0) kl_t += prob(t, v) * log_ratio[v];
    }
    out.kl += kl_t;
    // d KL_t / d logit[t][k] = p_k (log(p_k / q_k) - KL_t).
    for (int v = 0; v < vocab; ++v) {
      out.gradient(t, v) -= config.kl_beta / positions * prob(t, v) * (log_ratio[v] - kl_t);
    }
  }
  out.kl /= positions;
  out.objective = out.surrogate - config.kl_beta * out.kl;
  return out;
}

std::vector<SampledSequence> SampleGroup(const ToyPolicy& policy, int group_size,
                                         std::uint64_t seed) {
  if (group_size < 1) throw Error(ErrorCode::kInvalidArgument, "grpo: group size must be >= 1");
  const Eigen::MatrixXd logp = policy.LogProbabilities();
  const Eigen::MatrixXd prob = logp.array().exp();
  Rng rng(seed);
  std::vector<SampledSequence> out(group_size);
  for (auto& seq : out) {
    seq.tokens.resize(policy.positions());
    seq.logprobs.resize(policy.positions());
    for (int t = 0; t < policy.positions(); ++t) {
      // Inverse CDF; the last token absorbs rounding slack.
      const double u = Uniform01(rng);
      double acc = 0.0;
      int token = policy.vocab_size() - 1;
      for (int v = 0; v < policy.vocab_size(); ++v) {
        acc += prob(t, v);
        if (u < acc) {
          token = v;
          break;
        }
      }
      seq.tokens[t] = token;
      seq.logprobs[t] = logp(t, token);
    }
  }
  return out;
}

TrainResult TrainLoop(const ToyPolicy& initial, const SequenceReward& reward, int steps,
                      const GrpoConfig& config, std::uint64_t seed,
                      const SequenceSuccess& success,
                      const std::function<void(const TraceRow&)>& on_step) {
  config.Check();
  if (steps < 1) throw Error(ErrorCode::kInvalidArgument, "grpo: steps must be >= 1");
  const ToyPolicy& reference = initial;
  const Eigen::MatrixXd ref_logp = reference.LogProbabilities();
  TrainResult result{initial, {}};
  result.trace.reserve(steps);
  ToyPolicy& policy = result.policy;

  for (int step = 0; step < steps; ++step) {
    const auto group = SampleGroup(policy, config.group_size, DeriveSeed(seed, step));
    std::vector<double> rewards;
    rewards.reserve(group.size());
    std::vector<Rollout> rollouts;
    rollouts.reserve(group.size());
    for (const auto& s : group) {
      Rollout ro;
      ro.tokens = s.tokens;
      ro.reward = reward(s.tokens);
      ro.logprob_old = s.logprobs;
      ro.logprob_ref.resize(s.tokens.size());
      for (size_t t = 0; t < s.tokens.size(); ++t) ro.logprob_ref[t] = ref_logp(t, s.tokens[t]);
      rewards.push_back(ro.reward);
      rollouts.push_back(std::move(ro));
    }
    const auto adv = Advantages(rewards, config.advantage_eps);

    TraceRow row;
    row.step = step;
    for (double r : rewards) row.mean_reward += r;
    row.mean_reward /= static_cast<double>(rewards.size());
    if (success) {
      for (const auto& s : group) row.success_rate += success(s.tokens) ? 1.0 : 0.0;
      row.success_rate /= static_cast<double>(group.size());
    }
    for (int inner = 0; inner < config.inner_steps; ++inner) {
      const auto obj = GrpoObjective(policy, reference, rollouts, adv, config);
      if (!std::isfinite(obj.objective) || !obj.gradient.allFinite()) {
        throw Error(ErrorCode::kNumeric, "grpo: non-finite objective at step " + std::to_string(step));
      }
      if (inner == 0) {
        row.objective = obj.objective;
        row.kl = obj.kl;
      }
      policy.mutable_logits() += config.learning_rate * obj.gradient;
    }
    result.trace.push_back(row);
    if (on_step) on_step(row);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Demo tasks

const std::vector<int>& MatchTarget() {
  static const std::vector<int> target = {1, 5, 2, 7, 0, 3};
  return target;
}

DemoTask MatchTargetTask() {
  DemoTask task{ToyPolicy(6, 8), {}, {}};
  task.reward = [](std::span<const int> tokens) {
    const auto& target = MatchTarget();
    int hits = 0;
    for (size_t t = 0; t < target.size() && t < tokens.size(); ++t) hits += tokens[t] == target[t];
    return static_cast<double>(hits) / static_cast<double>(target.size());
  };
  task.success = [](std::span<const int> tokens) {
    return std::equal(tokens.begin(), tokens.end(), MatchTarget().begin(), MatchTarget().end());
  };
  return task;
}

DemoTask ValiditySequenceTask() {
  const Vocab vocab(2, FsqLevels({2}), {"generic"});
  constexpr int kPositions = 6;
  constexpr double kPrior = 2.0;
  Eigen::MatrixXd logits = Eigen::MatrixXd::Zero(kPositions, vocab.size());
  // Grammar template <bos> <type> x y z <eos>.
  logits(0, Vocab::kBos) = kPrior;
  logits(1, vocab.TypeToken(0)) = kPrior;
  for (int t = 2; t < 5; ++t) {
    for (int b = 0; b < vocab.bins(); ++b) logits(t, vocab.CoordToken(b)) = kPrior;
  }
  logits(5, Vocab::kEos) = kPrior;

  auto valid = [vocab](std::span<const int> tokens) {
    RigSequence seq{{tokens.begin(), tokens.end()}, 0};
    return ValidateSequence(seq, vocab).valid;
  };
  DemoTask task{ToyPolicy(std::move(logits)), {}, valid};
  task.reward = [valid](std::span<const int> tokens) { return valid(tokens) ? 1.0 : 0.0; };
  return task;
}

}  // namespace rigtok
