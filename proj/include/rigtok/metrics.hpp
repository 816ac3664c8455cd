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

#ifndef RIGTOK_METRICS_HPP_
#define RIGTOK_METRICS_HPP_

// Evaluation metrics for predicted rigs against ground truth.

#include <cstdint>
#include <span>
#include <vector>

#include "rigtok/geom.hpp"
#include "rigtok/rigcore.hpp"

namespace rigtok {

// ---------------------------------------------------------------------------
// Skeleton Chamfer distances

struct SkeletonMetrics {
  double j2j = 0.0;
  double j2b = 0.0;
  double b2b = 0.0;
};

inline constexpr int kDefaultBoneSamples = 10;

// Points t = k / (s - 1), k = 0..s-1 on every bone. A skeleton without bones
// contributes its joint positions instead.
std::vector<Vec3> SampleBones(const Skeleton& skeleton, int samples_per_bone);

// Symmetric Chamfer distance 0.5 * (mean_a min_b |a - b| + mean_b min_a |a - b|).
// Nearest neighbours come from a kd-tree; the sums run in input order.
double ChamferPoints(std::span<const Vec3> a, std::span<const Vec3> b);

// J2J over joint sets, J2B between joints and the other side's bone
// segments (joints when it has none), B2B over bone samples. Throws
// kInvalidArgument when either skeleton is empty or samples < 2.
SkeletonMetrics ChamferSkeleton(const Skeleton& pred, const Skeleton& gt,
                                int bone_samples = kDefaultBoneSamples);

// ---------------------------------------------------------------------------
// Skinning metrics

inline constexpr double kSkinActiveEps = 1e-2;

struct SkinMetrics {
  double l1 = 0.0;            // (1/N) sum_i sum_j |pred - gt|
  double l1_var = 0.0;        // population variance of the per-vertex L1
  double precision = 1.0;     // TP / (TP + FP), 1 when nothing is predicted active
  double recall = 1.0;        // TP / (TP + FN), 1 when nothing is active in gt
  double iou = 1.0;           // |pred and gt| / |pred or gt|, 1 when both empty
  double mask_accuracy = 1.0; // 1 iff the gt active set lies inside pred's
  double motion_loss = 0.0;
};

// Entry (i, j) is active when its weight exceeds eps. Throws kInvalidArgument
// on a shape mismatch. motion_loss is left at 0.
SkinMetrics SkinReport(const DenseSkin& pred, const DenseSkin& gt, double eps = kSkinActiveEps);

// Field-wise mean over samples; mask_accuracy becomes the fraction of samples
// with full coverage.
SkinMetrics AverageSkinMetrics(std::span<const SkinMetrics> samples);

// Mean over poses of the mean per-vertex distance between the meshes
// deformed by `gt` and by `pred`. Throws kInvalidArgument on count mismatch.
double MotionLoss(const Mesh& mesh, const Skeleton& skeleton, const SparseSkin& gt,
                  const SparseSkin& pred, std::span<const Pose> poses);

// Pose p is SamplePose(skeleton, max_angle, DeriveSeed(seed, p)).
double MotionLoss(const Mesh& mesh, const Skeleton& skeleton, const SparseSkin& gt,
                  const SparseSkin& pred, int n_poses, double max_angle, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Dataset statistics

struct SparsityReport {
  int rig_count = 0;
  double avg_n = 0.0;
  double avg_j = 0.0;
  double avg_nnz = 0.0;       // entries with weight > 0
  double avg_sparsity = 0.0;  // nnz / (N * J), 0 for an empty table
};

// Throws kInvalidArgument on an empty collection.
SparsityReport ComputeSparsity(std::span<const Rig> rigs);

}  // namespace rigtok

#endif  // RIGTOK_METRICS_HPP_
