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

#include "rigtok/geom.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <string>

#include <Eigen/Geometry>

#include "parallel.hpp"
#include "rigtok/error.hpp"
#include "rigtok/random.hpp"

namespace rigtok {

// ---------------------------------------------------------------------------
// VoxelGrid

VoxelGrid::VoxelGrid(int resolution, const Vec3& origin, double voxel_size)
    : resolution_(resolution), origin_(origin), voxel_size_(voxel_size) {
  if (resolution < 1) throw Error(ErrorCode::kInvalidArgument, "voxel grid resolution must be positive");
  if (!(voxel_size > 0.0)) throw Error(ErrorCode::kInvalidArgument, "voxel size must be positive");
  const auto r = static_cast<std::size_t>(resolution);
  occupancy_.assign(r * r * r, 0);
}

bool VoxelGrid::InBounds(const VoxelIndex& v) const {
  return v[0] >= 0 && v[1] >= 0 && v[2] >= 0 && v[0] < resolution_ && v[1] < resolution_ &&
         v[2] < resolution_;
}

std::int64_t VoxelGrid::occupied_count() const {
  return std::count(occupancy_.begin(), occupancy_.end(), std::uint8_t{1});
}

std::vector<VoxelIndex> VoxelGrid::OccupiedVoxels() const {
  std::vector<VoxelIndex> out;
  for (int k = 0; k < resolution_; ++k) {
    for (int j = 0; j < resolution_; ++j) {
      for (int i = 0; i < resolution_; ++i) {
        if (occupied({i, j, k})) out.push_back({i, j, k});
      }
    }
  }
  return out;
}

Vec3 VoxelGrid::Center(const VoxelIndex& v) const {
  return FromIndexSpace(Vec3(v[0] + 0.5, v[1] + 0.5, v[2] + 0.5));
}

std::optional<VoxelIndex> VoxelGrid::Locate(const Vec3& world) const {
  const Vec3 idx = ToIndexSpace(world);
  if (!idx.allFinite()) return std::nullopt;
  VoxelIndex v;
  for (int k = 0; k < 3; ++k) {
    const double f = std::floor(idx[k]);
    if (f < 0.0 || f >= resolution_) return std::nullopt;
    v[k] = static_cast<int>(f);
  }
  return v;
}

bool VoxelGrid::ContainsPoint(const Vec3& world) const {
  const auto v = Locate(world);
  return v && occupied(*v);
}

// ---------------------------------------------------------------------------
// Triangle / box overlap

bool TriangleBoxOverlap(const Vec3& box_center, const Vec3& half_size, const Vec3& a,
                        const Vec3& b, const Vec3& c) {
  const Vec3 v0 = a - box_center;
  const Vec3 v1 = b - box_center;
  const Vec3 v2 = c - box_center;

  auto separated = [&](const Vec3& axis) {
    const double p0 = axis.dot(v0);
    const double p1 = axis.dot(v1);
    const double p2 = axis.dot(v2);
    const double lo = std::min({p0, p1, p2});
    const double hi = std::max({p0, p1, p2});
    const double radius = half_size.dot(axis.cwiseAbs());
    return lo > radius || hi < -radius;
  };

  // Box face normals.
  for (int k = 0; k < 3; ++k) {
    const double lo = std::min({v0[k], v1[k], v2[k]});
    const double hi = std::max({v0[k], v1[k], v2[k]});
    if (lo > half_size[k] || hi < -half_size[k]) return false;
  }
  // Edge cross box-axis.
  const Vec3 edges[3] = {v1 - v0, v2 - v1, v0 - v2};
  for (const auto& e : edges) {
    for (int k = 0; k < 3; ++k) {
      if (separated(e.cross(Vec3::Unit(k)))) return false;
    }
  }
  // Triangle plane; skipped for degenerate triangles, where the edge axes
  // already form a complete test.
  const Vec3 normal = edges[0].cross(edges[1]);
  if (normal.squaredNorm() > 0.0 && separated(normal)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Voxelize

VoxelGrid Voxelize(const Mesh& mesh, int resolution, FillMode mode, const VoxelizeOptions& options) {
  if (resolution < 2) throw Error(ErrorCode::kInvalidArgument, "voxel resolution must be >= 2");
  if (resolution > options.max_resolution) {
    throw Error(ErrorCode::kCapacity, "voxel resolution " + std::to_string(resolution) +
                                          " exceeds the cap of " +
                                          std::to_string(options.max_resolution));
  }
  if (mesh.vertices.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot voxelize an empty mesh");

  Vec3 lo = mesh.vertices.front();
  Vec3 hi = lo;
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double extent = (hi - lo).maxCoeff();
  if (!(extent > 0.0)) throw Error(ErrorCode::kDegenerate, "mesh bounding box is degenerate");

  // The slight enlargement keeps bounding-box faces off voxel boundaries, so
  // the padding layer stays empty.
  const int inner = resolution > 2 ? resolution - 2 : resolution;
  const double h = extent * (1.0 + 1e-6) / inner;
  const Vec3 origin = (lo + hi) * 0.5 - Vec3::Constant(0.5 * resolution * h);
  VoxelGrid grid(resolution, origin, h);
  const int r = resolution;

  struct TriBox {
    std::array<int, 3> lo, hi;
  };
  std::vector<TriBox> boxes(mesh.faces.size());
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    Vec3 tlo = mesh.vertices[face[0]];
    Vec3 thi = tlo;
    for (int k = 1; k < 3; ++k) {
      tlo = tlo.cwiseMin(mesh.vertices[face[k]]);
      thi = thi.cwiseMax(mesh.vertices[face[k]]);
    }
    const Vec3 ilo = grid.ToIndexSpace(tlo);
    const Vec3 ihi = grid.ToIndexSpace(thi);
    for (int k = 0; k < 3; ++k) {
      boxes[f].lo[k] = std::clamp(static_cast<int>(std::floor(ilo[k])) - 1, 0, r - 1);
      boxes[f].hi[k] = std::clamp(static_cast<int>(std::floor(ihi[k])) + 1, 0, r - 1);
    }
  }

  const Vec3 half = Vec3::Constant(0.5 * h * (1.0 + 1e-9));
  std::vector<std::uint8_t> surface(static_cast<size_t>(r) * r * r, 0);
  internal::ParallelFor(r, 1, [&](size_t k_begin, size_t k_end) {
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
      const auto& box = boxes[f];
      const int k0 = std::max<int>(box.lo[2], static_cast<int>(k_begin));
      const int k1 = std::min<int>(box.hi[2], static_cast<int>(k_end) - 1);
      const auto& face = mesh.faces[f];
      const Vec3& a = mesh.vertices[face[0]];
      const Vec3& b = mesh.vertices[face[1]];
      const Vec3& c = mesh.vertices[face[2]];
      for (int k = k0; k <= k1; ++k) {
        for (int j = box.lo[1]; j <= box.hi[1]; ++j) {
          for (int i = box.lo[0]; i <= box.hi[0]; ++i) {
            const VoxelIndex v{i, j, k};
            const size_t flat = grid.Flat(v);
            if (surface[flat]) continue;
            if (TriangleBoxOverlap(grid.Center(v), half, a, b, c)) surface[flat] = 1;
          }
        }
      }
    }
  });

  for (int k = 0; k < r; ++k) {
    for (int j = 0; j < r; ++j) {
      for (int i = 0; i < r; ++i) {
        if (surface[grid.Flat({i, j, k})]) grid.set({i, j, k}, true);
      }
    }
  }
  if (mode == FillMode::kSurface) return grid;

  // Exterior flood fill from every non-surface boundary voxel.
  std::vector<std::uint8_t> outside(surface.size(), 0);
  std::deque<VoxelIndex> queue;
  auto seed = [&](const VoxelIndex& v) {
    const size_t flat = grid.Flat(v);
    if (!surface[flat] && !outside[flat]) {
      outside[flat] = 1;
      queue.push_back(v);
    }
  };
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) {
      seed({0, a, b});
      seed({r - 1, a, b});
      seed({a, 0, b});
      seed({a, r - 1, b});
      seed({a, b, 0});
      seed({a, b, r - 1});
    }
  }
  static constexpr int kNeighbors[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                                           {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  std::int64_t reached = 0;
  while (!queue.empty()) {
    const VoxelIndex v = queue.front();
    queue.pop_front();
    ++reached;
    for (const auto& d : kNeighbors) {
      const VoxelIndex n{v[0] + d[0], v[1] + d[1], v[2] + d[2]};
      if (grid.InBounds(n)) seed(n);
    }
  }
  const std::int64_t surface_count = std::count(surface.begin(), surface.end(), std::uint8_t{1});
  const std::int64_t non_surface = static_cast<std::int64_t>(surface.size()) - surface_count;
  if (non_surface > 0 && reached >= 0.99 * static_cast<double>(non_surface)) {
    grid.set_fell_back_to_surface(true);
    return grid;
  }
  for (int k = 0; k < r; ++k) {
    for (int j = 0; j < r; ++j) {
      for (int i = 0; i < r; ++i) {
        if (!outside[grid.Flat({i, j, k})]) grid.set({i, j, k}, true);
      }
    }
  }
  return grid;
}

void WriteVoxels(const VoxelGrid& grid, std::ostream& out) {
  for (const auto& v : grid.OccupiedVoxels()) out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
}

// ---------------------------------------------------------------------------
// Distances

double PointSegmentDistance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len_sq = ab.squaredNorm();
  if (len_sq == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len_sq, 0.0, 1.0);
  // The endpoint terms keep a point lying on an endpoint at exactly zero.
  return std::min({(p - (a + t * ab)).norm(), (p - a).norm(), (p - b).norm()});
}

double SegmentSegmentDistance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
  // Closest points of two segments; see Ericson, Real-Time Collision
  // Detection, 5.1.9. Degenerate and parallel cases fall back to clamped
  // point projections.
  const Vec3 d1 = p1 - p0;
  const Vec3 d2 = q1 - q0;
  const Vec3 r = p0 - q0;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0;
  double t = 0.0;
  if (a == 0.0 && e == 0.0) return r.norm();
  if (a == 0.0) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e == 0.0) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  const double best = ((p0 + s * d1) - (q0 + t * d2)).norm();
  // Endpoint checks guard against cancellation in near-parallel cases.
  return std::min({best, PointSegmentDistance(p0, q0, q1), PointSegmentDistance(p1, q0, q1),
                   PointSegmentDistance(q0, p0, p1), PointSegmentDistance(q1, p0, p1)});
}

// ---------------------------------------------------------------------------
// Surface sampling

std::vector<SurfaceSample> SampleSurfaceFaces(const Mesh& mesh, int count, std::uint64_t seed,
                                              std::span<const int> faces) {
  if (count < 0) throw Error(ErrorCode::kInvalidArgument, "sample count must be non-negative");
  std::vector<int> eligible;
  if (faces.empty()) {
    eligible.resize(mesh.faces.size());
    std::iota(eligible.begin(), eligible.end(), 0);
  } else {
    eligible.assign(faces.begin(), faces.end());
  }
  std::vector<double> cumulative;
  cumulative.reserve(eligible.size());
  double total = 0.0;
  for (int f : eligible) {
    if (f < 0 || f >= static_cast<int>(mesh.faces.size())) {
      throw Error(ErrorCode::kInvalidArgument, "face index out of range");
    }
    const auto& face = mesh.faces[f];
    const Vec3& a = mesh.vertices[face[0]];
    total += 0.5 * (mesh.vertices[face[1]] - a).cross(mesh.vertices[face[2]] - a).norm();
    cumulative.push_back(total);
  }
  if (count == 0) return {};
  if (!(total > 0.0)) throw Error(ErrorCode::kDegenerate, "mesh surface has zero area");

  Rng rng(seed);
  std::vector<SurfaceSample> out;
  out.reserve(count);
  for (int n = 0; n < count; ++n) {
    const double pick = Uniform01(rng) * total;
    size_t slot = std::upper_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin();
    slot = std::min(slot, cumulative.size() - 1);
    double u = Uniform01(rng);
    double v = Uniform01(rng);
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    const auto& face = mesh.faces[eligible[slot]];
    const Vec3& a = mesh.vertices[face[0]];
    const Vec3 p = a + u * (mesh.vertices[face[1]] - a) + v * (mesh.vertices[face[2]] - a);
    out.push_back({p, eligible[slot]});
  }
  return out;
}

std::vector<Vec3> SampleSurface(const Mesh& mesh, int count, std::uint64_t seed) {
  std::vector<Vec3> out;
  for (const auto& s : SampleSurfaceFaces(mesh, count, seed)) out.push_back(s.point);
  return out;
}

// ---------------------------------------------------------------------------
// LBS

Mat3 RotationMatrix(const AxisAngle& rotation) {
  // Rodrigues: I + sin(t) K + (1 - cos(t)) K^2, exactly I at t = 0.
  const Vec3& k = rotation.axis;
  Mat3 cross;
  cross << 0.0, -k.z(), k.y(),
           k.z(), 0.0, -k.x(),
           -k.y(), k.x(), 0.0;
  return Mat3::Identity() + std::sin(rotation.angle) * cross +
         (1.0 - std::cos(rotation.angle)) * (cross * cross);
}

namespace {

// Parents before children.
std::vector<int> TopologicalOrder(const Skeleton& skeleton) {
  const auto children = skeleton.children();
  std::vector<int> order;
  order.reserve(skeleton.joints.size());
  for (int r = 0; r < skeleton.size(); ++r) {
    if (skeleton.joints[r].parent) continue;
    std::vector<int> stack{r};
    while (!stack.empty()) {
      const int j = stack.back();
      stack.pop_back();
      order.push_back(j);
      for (auto it = children[j].rbegin(); it != children[j].rend(); ++it) stack.push_back(*it);
    }
  }
  return order;
}

}  // namespace

BoneTransforms PosedTransforms(const Skeleton& skeleton, const Pose& pose) {
  const int n = skeleton.size();
  if (static_cast<int>(pose.rotations.size()) != n) {
    throw Error(ErrorCode::kInvalidArgument, "pose has " + std::to_string(pose.rotations.size()) +
                                                 " rotations for " + std::to_string(n) + " joints");
  }
  const auto order = TopologicalOrder(skeleton);
  if (static_cast<int>(order.size()) != n) {
    throw Error(ErrorCode::kStructure, "skeleton parent links do not form a forest");
  }
  BoneTransforms out;
  out.rotation.assign(n, Mat3::Identity());
  out.displacement.assign(n, Vec3::Zero());
  for (int j : order) {
    const Mat3 local = RotationMatrix(pose.rotations[j]);
    const auto& parent = skeleton.joints[j].parent;
    if (!parent) {
      out.rotation[j] = local;
      continue;
    }
    const Mat3& parent_rot = out.rotation[*parent];
    out.rotation[j] = parent_rot * local;
    const Vec3 offset = skeleton.joints[j].position - skeleton.joints[*parent].position;
    out.displacement[j] =
        out.displacement[*parent] + (parent_rot - Mat3::Identity()) * offset;
  }
  return out;
}

std::vector<Vec3> LbsDeform(const Mesh& mesh, const Rig& rig, const Pose& pose,
                            const LbsOptions& options) {
  if (rig.skin.vertex_count != mesh.vertex_count()) {
    throw Error(ErrorCode::kInvalidArgument,
                "skin has " + std::to_string(rig.skin.vertex_count) + " vertices, mesh " +
                    std::to_string(mesh.vertex_count()));
  }
  const auto transforms = PosedTransforms(rig.skeleton, pose);
  const int n_joints = rig.skeleton.size();
  std::vector<Mat3> delta_rot(n_joints);
  for (int j = 0; j < n_joints; ++j) delta_rot[j] = transforms.rotation[j] - Mat3::Identity();

  // CSR view of the skin by vertex.
  SparseSkin skin = rig.skin;
  skin.canonicalize();
  std::vector<size_t> row_start(mesh.vertices.size() + 1, 0);
  for (const auto& e : skin.entries) {
    if (e.joint < 0 || e.joint >= n_joints) throw Error(ErrorCode::kStructure, "skin joint out of range");
    ++row_start[e.vertex + 1];
  }
  std::partial_sum(row_start.begin(), row_start.end(), row_start.begin());

  std::vector<Vec3> out(mesh.vertices.size());
  internal::ParallelFor(mesh.vertices.size(), 1024, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      const Vec3& v = mesh.vertices[i];
      double total = 1.0;
      if (options.renormalize) {
        total = 0.0;
        for (size_t k = row_start[i]; k < row_start[i + 1]; ++k) total += skin.entries[k].weight;
        if (total <= 0.0) total = 1.0;
      }
      Vec3 offset = Vec3::Zero();
      for (size_t k = row_start[i]; k < row_start[i + 1]; ++k) {
        const auto& e = skin.entries[k];
        const Vec3& joint = rig.skeleton.joints[e.joint].position;
        offset += (e.weight / total) *
                  (delta_rot[e.joint] * (v - joint) + transforms.displacement[e.joint]);
      }
      out[i] = v + offset;
    }
  });
  return out;
}

Pose SamplePose(const Skeleton& skeleton, double max_angle, std::uint64_t seed) {
  if (!(max_angle >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "max_angle must be non-negative");
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Pose pose;
  pose.rotations.reserve(skeleton.joints.size());
  for (int j = 0; j < skeleton.size(); ++j) {
    Vec3 axis;
    do {
      axis = Vec3(gauss(rng), gauss(rng), gauss(rng));
    } while (axis.squaredNorm() < 1e-12);
    axis.normalize();
    const double u = Uniform01(rng);
    const double angle = max_angle > 0.0 ? (2.0 * u - 1.0) * max_angle : 0.0;
    pose.rotations.push_back({axis, angle});
  }
  return pose;
}

std::vector<Vec3> PosedJointPositions(const Skeleton& skeleton, const Pose& pose) {
  const auto transforms = PosedTransforms(skeleton, pose);
  std::vector<Vec3> out;
  out.reserve(skeleton.joints.size());
  for (int j = 0; j < skeleton.size(); ++j) {
    out.push_back(skeleton.joints[j].position + transforms.displacement[j]);
  }
  return out;
}

std::vector<std::array<int, 2>> MeshEdges(const Mesh& mesh) {
  std::set<std::array<int, 2>> edges;
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      int a = f[k];
      int b = f[(k + 1) % 3];
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      edges.insert({a, b});
    }
  }
  return {edges.begin(), edges.end()};
}

}  // namespace rigtok
