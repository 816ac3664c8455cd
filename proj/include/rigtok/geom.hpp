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

#ifndef RIGTOK_GEOM_HPP_
#define RIGTOK_GEOM_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "rigtok/rigcore.hpp"

namespace rigtok {

// ---------------------------------------------------------------------------
// Voxel grid

enum class FillMode { kSurface, kSolid };

using VoxelIndex = std::array<int, 3>;

// Cubic r x r x r occupancy grid with voxel (i,j,k) covering
// origin + [i,i+1) x [j,j+1) x [k,k+1) * voxel_size.
class VoxelGrid {
 public:
  VoxelGrid(int resolution, const Vec3& origin, double voxel_size);

  int resolution() const { return resolution_; }
  const Vec3& origin() const { return origin_; }
  double voxel_size() const { return voxel_size_; }

  bool InBounds(const VoxelIndex& v) const;
  bool occupied(const VoxelIndex& v) const { return occupancy_[Flat(v)] != 0; }
  void set(const VoxelIndex& v, bool value) { occupancy_[Flat(v)] = value ? 1 : 0; }
  std::int64_t occupied_count() const;
  std::vector<VoxelIndex> OccupiedVoxels() const;

  // World <-> continuous index coordinates (voxel centers at i + 1/2).
  Vec3 ToIndexSpace(const Vec3& world) const { return (world - origin_) / voxel_size_; }
  Vec3 FromIndexSpace(const Vec3& index) const { return origin_ + index * voxel_size_; }
  Vec3 Center(const VoxelIndex& v) const;

  std::optional<VoxelIndex> Locate(const Vec3& world) const;
  // True iff `world` falls inside an occupied voxel.
  bool ContainsPoint(const Vec3& world) const;

  // Set when a solid fill found no enclosed interior and returned the
  // surface shell instead.
  bool fell_back_to_surface() const { return fell_back_; }
  void set_fell_back_to_surface(bool value) { fell_back_ = value; }

  std::size_t Flat(const VoxelIndex& v) const {
    return static_cast<std::size_t>(v[0]) +
           static_cast<std::size_t>(resolution_) *
               (static_cast<std::size_t>(v[1]) +
                static_cast<std::size_t>(resolution_) * static_cast<std::size_t>(v[2]));
  }

 private:
  int resolution_;
  Vec3 origin_;
  double voxel_size_;
  std::vector<std::uint8_t> occupancy_;
  bool fell_back_ = false;
};

struct VoxelizeOptions {
  int max_resolution = 512;
};

// Surface mode marks every voxel a triangle touches. Solid mode adds the
// voxels not 6-connected to the grid boundary; when the exterior flood
// reaches >= 99% of the non-surface voxels the mesh is treated as open and
// the surface shell is returned with fell_back_to_surface() set.
// The grid is the mesh bounding box padded by one voxel on each side.
VoxelGrid Voxelize(const Mesh& mesh, int resolution, FillMode mode,
                   const VoxelizeOptions& options = {});

// Conservative triangle / axis-aligned box overlap (separating axis test).
bool TriangleBoxOverlap(const Vec3& box_center, const Vec3& half_size, const Vec3& a,
                        const Vec3& b, const Vec3& c);

// One "x y z" line per occupied voxel, in flat index order.
void WriteVoxels(const VoxelGrid& grid, std::ostream& out);

// ---------------------------------------------------------------------------
// Distances

double PointSegmentDistance(const Vec3& p, const Vec3& a, const Vec3& b);
double SegmentSegmentDistance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1);

// ---------------------------------------------------------------------------
// Surface sampling

struct SurfaceSample {
  Vec3 point;
  int face;
};

// Area-weighted face choice and uniform barycentric placement. When `faces`
// is non-empty only those face indices are eligible. Throws kDegenerate when
// the eligible area is zero.
std::vector<SurfaceSample> SampleSurfaceFaces(const Mesh& mesh, int count, std::uint64_t seed,
                                              std::span<const int> faces = {});
std::vector<Vec3> SampleSurface(const Mesh& mesh, int count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Linear blend skinning

Mat3 RotationMatrix(const AxisAngle& rotation);

// Posed global frame of each joint. Joint j maps a rest-space point v to
//   rotation[j] * (v - rest_j) + rest_j + displacement[j],
// so the identity pose yields exactly zero displacement.
struct BoneTransforms {
  std::vector<Mat3> rotation;
  std::vector<Vec3> displacement;

  Vec3 Apply(int joint, const Vec3& rest_joint, const Vec3& v) const {
    return rotation[joint] * (v - rest_joint) + rest_joint + displacement[joint];
  }
};

BoneTransforms PosedTransforms(const Skeleton& skeleton, const Pose& pose);

struct LbsOptions {
  // Rescale each vertex's weights to sum to 1 before blending.
  bool renormalize = false;
};

// v' = v + sum_j w_ij (M_j(v) - v). Weight mass missing from a vertex stays
// bound to its rest position; zero-weight vertices do not move.
std::vector<Vec3> LbsDeform(const Mesh& mesh, const Rig& rig, const Pose& pose,
                            const LbsOptions& options = {});

// Per joint: axis uniform on the sphere, angle uniform in [-max, max].
Pose SamplePose(const Skeleton& skeleton, double max_angle, std::uint64_t seed);

// Posed joint positions under `pose`.
std::vector<Vec3> PosedJointPositions(const Skeleton& skeleton, const Pose& pose);

// Unique undirected edges of the triangle faces, (lo, hi) sorted.
std::vector<std::array<int, 2>> MeshEdges(const Mesh& mesh);

}  // namespace rigtok

#endif  // RIGTOK_GEOM_HPP_
