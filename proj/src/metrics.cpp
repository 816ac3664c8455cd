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

#include "rigtok/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "parallel.hpp"
#include "rigtok/error.hpp"
#include "rigtok/random.hpp"

namespace rigtok {
namespace {

// Static kd-tree over a point set; answers exact nearest squared distances.
class KdTree {
 public:
  explicit KdTree(std::span<const Vec3> points) : points_(points), order_(points.size()) {
    std::iota(order_.begin(), order_.end(), 0);
    Build(0, order_.size(), 0);
  }

  double NearestSquared(const Vec3& q) const {
    double best = std::numeric_limits<double>::infinity();
    Search(q, 0, order_.size(), 0, best);
    return best;
  }

 private:
  static constexpr size_t kLeaf = 8;

  void Build(size_t begin, size_t end, int depth) {
    if (end - begin <= kLeaf) return;
    const int axis = depth % 3;
    const size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) { return points_[a][axis] < points_[b][axis]; });
    Build(begin, mid, depth + 1);
    Build(mid + 1, end, depth + 1);
  }

  void Search(const Vec3& q, size_t begin, size_t end, int depth, double& best) const {
    if (end - begin <= kLeaf) {
      for (size_t i = begin; i < end; ++i) best = std::min(best, (q - points_[order_[i]]).squaredNorm());
      return;
    }
    const int axis = depth % 3;
    const size_t mid = begin + (end - begin) / 2;
    const Vec3& split = points_[order_[mid]];
    best = std::min(best, (q - split).squaredNorm());
    const double diff = q[axis] - split[axis];
    const bool left_first = diff < 0.0;
    if (left_first) {
      Search(q, begin, mid, depth + 1, best);
      if (diff * diff <= best) Search(q, mid + 1, end, depth + 1, best);
    } else {
      Search(q, mid + 1, end, depth + 1, best);
      if (diff * diff <= best) Search(q, begin, mid, depth + 1, best);
    }
  }

  std::span<const Vec3> points_;
  std::vector<int> order_;
};

double MeanNearest(std::span<const Vec3> from, std::span<const Vec3> to) {
  const KdTree tree(to);
  std::vector<double> dist(from.size());
  internal::ParallelFor(from.size(), 256, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) dist[i] = std::sqrt(tree.NearestSquared(from[i]));
  });
  double sum = 0.0;
  for (double d : dist) sum += d;
  return sum / static_cast<double>(from.size());
}

// Mean over `joints` of the distance to the nearest segment of `other`, or
// to its nearest joint when it has no bones.
double MeanJointToBone(const Skeleton& from, const Skeleton& other) {
  const auto bones = other.bones();
  if (bones.empty()) {
    const auto a = from.positions();
    const auto b = other.positions();
    return MeanNearest(a, b);
  }
  double sum = 0.0;
  for (const auto& joint : from.joints) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& bone : bones) best = std::min(best, PointSegmentDistance(joint.position, bone.head, bone.tail));
    sum += best;
  }
  return sum / static_cast<double>(from.size());
}

}  // namespace

std::vector<Vec3> SampleBones(const Skeleton& skeleton, int samples_per_bone) {
  if (samples_per_bone < 2) throw Error(ErrorCode::kInvalidArgument, "bone samples must be >= 2");
  const auto bones = skeleton.bones();
  if (bones.empty()) return skeleton.positions();
  std::vector<Vec3> out;
  out.reserve(bones.size() * samples_per_bone);
  for (const auto& bone : bones) {
    for (int k = 0; k < samples_per_bone; ++k) {
      const double t = static_cast<double>(k) / (samples_per_bone - 1);
      out.push_back(bone.head + t * (bone.tail - bone.head));
    }
  }
  return out;
}

double ChamferPoints(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::kInvalidArgument, "chamfer: empty point set");
  return 0.5 * (MeanNearest(a, b) + MeanNearest(b, a));
}

SkeletonMetrics ChamferSkeleton(const Skeleton& pred, const Skeleton& gt, int bone_samples) {
  if (pred.size() == 0 || gt.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "chamfer: both skeletons need at least one joint");
  }
  SkeletonMetrics out;
  const auto pj = pred.positions();
  const auto gj = gt.positions();
  out.j2j = ChamferPoints(pj, gj);
  out.j2b = 0.5 * (MeanJointToBone(pred, gt) + MeanJointToBone(gt, pred));
  const auto ps = SampleBones(pred, bone_samples);
  const auto gs = SampleBones(gt, bone_samples);
  out.b2b = ChamferPoints(ps, gs);
  return out;
}

SkinMetrics SkinReport(const DenseSkin& pred, const DenseSkin& gt, double eps) {
  if (pred.rows() != gt.rows() || pred.cols() != gt.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "skin report: shape mismatch");
  }
  SkinMetrics out;
  const Eigen::Index n = gt.rows();
  std::vector<double> per_vertex(n, 0.0);
  std::int64_t tp = 0, fp = 0, fn = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < gt.cols(); ++j) {
      per_vertex[i] += std::abs(pred(i, j) - gt(i, j));
      const bool p = pred(i, j) > eps;
      const bool g = gt(i, j) > eps;
      tp += p && g;
      fp += p && !g;
      fn += !p && g;
    }
  }
  if (n > 0) {
    double sum = 0.0;
    for (double v : per_vertex) sum += v;
    out.l1 = sum / static_cast<double>(n);
    double var = 0.0;
    for (double v : per_vertex) var += (v - out.l1) * (v - out.l1);
    out.l1_var = var / static_cast<double>(n);
  }
  out.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  out.recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  out.iou = tp + fp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp + fn);
  out.mask_accuracy = fn == 0 ? 1.0 : 0.0;
  return out;
}

SkinMetrics AverageSkinMetrics(std::span<const SkinMetrics> samples) {
  if (samples.empty()) throw Error(ErrorCode::kInvalidArgument, "skin report: empty batch");
  SkinMetrics out{0, 0, 0, 0, 0, 0, 0};
  for (const auto& s : samples) {
    out.l1 += s.l1;
    out.l1_var += s.l1_var;
    out.precision += s.precision;
    out.recall += s.recall;
    out.iou += s.iou;
    out.mask_accuracy += s.mask_accuracy;
    out.motion_loss += s.motion_loss;
  }
  const double n = static_cast<double>(samples.size());
  out.l1 /= n;
  out.l1_var /= n;
  out.precision /= n;
  out.recall /= n;
  out.iou /= n;
  out.mask_accuracy /= n;
  out.motion_loss /= n;
  return out;
}

double MotionLoss(const Mesh& mesh, const Skeleton& skeleton, const SparseSkin& gt,
                  const SparseSkin& pred, std::span<const Pose> poses) {
  const int n = mesh.vertex_count();
  if (gt.vertex_count != n || pred.vertex_count != n) {
    throw Error(ErrorCode::kInvalidArgument, "motion loss: skin vertex count differs from the mesh");
  }
  if (gt.joint_count != skeleton.size() || pred.joint_count != skeleton.size()) {
    throw Error(ErrorCode::kInvalidArgument, "motion loss: skin joint count differs from the skeleton");
  }
  if (poses.empty() || n == 0) return 0.0;
  const Rig gt_rig{skeleton, gt};
  const Rig pred_rig{skeleton, pred};
  double total = 0.0;
  for (const auto& pose : poses) {
    const auto a = LbsDeform(mesh, gt_rig, pose);
    const auto b = LbsDeform(mesh, pred_rig, pose);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += (a[i] - b[i]).norm();
    total += sum / n;
  }
  return total / static_cast<double>(poses.size());
}

double MotionLoss(const Mesh& mesh, const Skeleton& skeleton, const SparseSkin& gt,
                  const SparseSkin& pred, int n_poses, double max_angle, std::uint64_t seed) {
  if (n_poses < 0) throw Error(ErrorCode::kInvalidArgument, "motion loss: negative pose count");
  std::vector<Pose> poses;
  poses.reserve(n_poses);
  for (int p = 0; p < n_poses; ++p) poses.push_back(SamplePose(skeleton, max_angle, DeriveSeed(seed, p)));
  return MotionLoss(mesh, skeleton, gt, pred, poses);
}

SparsityReport ComputeSparsity(std::span<const Rig> rigs) {
  if (rigs.empty()) throw Error(ErrorCode::kInvalidArgument, "sparsity: empty rig collection");
  SparsityReport out;
  out.rig_count = static_cast<int>(rigs.size());
  for (const auto& rig : rigs) {
    const double n = rig.skin.vertex_count;
    const double j = rig.skin.joint_count;
    double nnz = 0.0;
    for (const auto& e : rig.skin.entries) nnz += e.weight > 0.0;
    out.avg_n += n;
    out.avg_j += j;
    out.avg_nnz += nnz;
    out.avg_sparsity += n * j > 0.0 ? nnz / (n * j) : 0.0;
  }
  const double count = static_cast<double>(rigs.size());
  out.avg_n /= count;
  out.avg_j /= count;
  out.avg_nnz /= count;
  out.avg_sparsity /= count;
  return out;
}

}  // namespace rigtok
