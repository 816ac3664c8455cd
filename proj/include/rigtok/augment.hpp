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

#ifndef RIGTOK_AUGMENT_HPP_
#define RIGTOK_AUGMENT_HPP_

// Seeded rig augmentations: topology edits (joint deletion, subtree removal,
// reconnection), geometric perturbation, random posing, plus importance
// sampling of surface points for one joint's influence region.

#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "rigtok/geom.hpp"
#include "rigtok/rigcore.hpp"

namespace rigtok {

struct AugmentConfig {
  double p_delete = 0.5;
  double max_delete_frac = 0.5;
  double p_subtree = 0.5;
  double p_reconnect = 0.5;
  double max_reconnect_frac = 0.3;
  double p_scale = 0.5;
  double min_scale = 0.75;
  double max_scale = 1.25;
  double p_rotate = 0.2;
  double max_rotate = 15.0 * std::numbers::pi / 180.0;
  double p_pose = 0.5;
  double max_pose = 30.0 * std::numbers::pi / 180.0;
  double p_noise = 1.0;
  double sigma_joint = 1e-2;
  double sigma_vertex = 1e-3;
  // Deletion also drops the vertices whose dominant joint was deleted.
  bool delete_vertices = false;

  // Throws kInvalidArgument on a probability or fraction outside [0,1].
  void Check() const;
};

struct RigMesh {
  Rig rig;
  Mesh mesh;
};

// Removes the given non-root joints. Children of a removed joint attach to
// its nearest surviving ancestor, which also receives its weights (summed,
// clamped at 1). Survivors keep their relative order. Throws
// kInvalidArgument for a root or an out-of-range index.
RigMesh DeleteJointSet(const Rig& rig, const Mesh& mesh, std::span<const int> joints,
                       bool with_vertices = false);

// Deletes floor(frac * J) uniformly chosen non-root joints (at most all of
// them). Throws kInvalidArgument when frac is outside [0, 1).
RigMesh DeleteJoints(const Rig& rig, const Mesh& mesh, double frac, std::uint64_t seed,
                     bool with_vertices = false);

// Removes a uniformly chosen non-root joint with all its descendants and
// their weights. A skeleton of roots only is returned unchanged.
RigMesh DropSubtree(const Rig& rig, const Mesh& mesh, std::uint64_t seed);

// Re-parents `joint` to `new_parent` and moves its weights onto the new
// parent (summed, clamped at 1). Throws kCycle when new_parent lies in the
// joint's subtree.
Rig ReconnectJoint(const Rig& rig, int joint, int new_parent);

// Reconnects floor(frac * J) uniformly chosen non-root joints, one after the
// other, each to a uniformly chosen joint outside its current subtree.
Rig ReconnectJoints(const Rig& rig, double frac, std::uint64_t seed);

// Per-axis scaling and a rotation about a random coordinate axis, both about
// the mesh bounding-box center, then Gaussian noise on joints and vertices.
// Each step runs with its configured probability.
RigMesh PerturbGeometry(const Rig& rig, const Mesh& mesh, const AugmentConfig& config,
                        std::uint64_t seed);

// Deforms the mesh with a SamplePose draw and moves the joints to their
// posed positions.
RigMesh PerturbPose(const Mesh& mesh, const Rig& rig, double max_angle, std::uint64_t seed);

struct ImportanceSamples {
  std::vector<SurfaceSample> uniform;
  std::vector<SurfaceSample> dense;
};

// Dense points come from faces with at least one vertex carrying a positive
// weight on `joint`. Throws kInvalidArgument when n_dense > 0 and the joint
// has no positive weight.
ImportanceSamples ImportanceSample(const Mesh& mesh, const SparseSkin& skin, int joint,
                                   int n_uniform, int n_dense, std::uint64_t seed);

// Operation names understood by Augment, in application order.
const std::vector<std::string>& AugmentOpNames();

// Applies each named operation with its configured probability in the fixed
// order of AugmentOpNames(). Deletion and reconnection fractions are drawn
// uniformly up to their maxima. Throws kInvalidArgument on an unknown name.
RigMesh Augment(const Rig& rig, const Mesh& mesh, const AugmentConfig& config,
                std::span<const std::string> ops, std::uint64_t seed);

}  // namespace rigtok

#endif  // RIGTOK_AUGMENT_HPP_
