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

#ifndef RIGTOK_TESTS_TEST_UTIL_HPP_
#define RIGTOK_TESTS_TEST_UTIL_HPP_

// Seeded fixtures shared by the test binaries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rigtok/random.hpp"
#include "rigtok/rigcore.hpp"
#include "rigtok/seqcodec.hpp"

namespace rigtok::testing {

inline double UniformIn(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int IntIn(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Vec3 RandomPoint(Rng& rng, double extent = 1.0) {
  return Vec3(UniformIn(rng, -extent, extent), UniformIn(rng, -extent, extent),
              UniformIn(rng, -extent, extent));
}

// Random forest: joint j > 0 attaches to a uniform earlier joint, or starts a
// new tree with probability `root_prob`. Positions lie in [-0.95, 0.95]^3.
inline Skeleton RandomSkeleton(Rng& rng, int joints, double root_prob = 0.0) {
  Skeleton s;
  const auto& types = Vocab::DefaultTypeNames();
  for (int j = 0; j < joints; ++j) {
    Joint joint;
    joint.name = "j" + std::to_string(j);
    joint.position = RandomPoint(rng, 0.95);
    if (j > 0 && UniformIn(rng, 0.0, 1.0) >= root_prob) joint.parent = IntIn(rng, 0, j - 1);
    joint.chain_type = types[IntIn(rng, 0, static_cast<int>(types.size()) - 1)];
    s.joints.push_back(joint);
  }
  return s;
}

// Every vertex gets up to `max_influences` distinct joints with weights
// summing to at most 1.
inline SparseSkin RandomSkin(Rng& rng, int vertices, int joints, int max_influences = 4,
                             bool normalized = true) {
  SparseSkin skin{vertices, joints, {}};
  for (int v = 0; v < vertices; ++v) {
    const int k = IntIn(rng, 0, std::min(max_influences, joints));
    std::vector<int> pool(joints);
    for (int j = 0; j < joints; ++j) pool[j] = j;
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<double> w(k);
    double sum = 0.0;
    for (auto& x : w) {
      x = UniformIn(rng, 0.05, 1.0);
      sum += x;
    }
    const double scale = normalized ? 1.0 / sum : UniformIn(rng, 0.2, 1.0) / sum;
    for (int i = 0; i < k; ++i) skin.entries.push_back({v, pool[i], w[i] * scale});
  }
  skin.canonicalize();
  return skin;
}

// Axis-aligned box with 8 vertices and 12 outward-facing triangles.
inline Mesh BoxMesh(const Vec3& lo, const Vec3& hi) {
  Mesh m;
  for (int k = 0; k < 8; ++k) {
    m.vertices.emplace_back((k & 1) ? hi.x() : lo.x(), (k & 2) ? hi.y() : lo.y(),
                            (k & 4) ? hi.z() : lo.z());
  }
  m.faces = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
             {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return m;
}

// Latitude / longitude sphere.
inline Mesh SphereMesh(double radius, int stacks, int slices) {
  Mesh m;
  const double pi = 3.14159265358979323846;
  m.vertices.emplace_back(0.0, 0.0, radius);
  for (int i = 1; i < stacks; ++i) {
    const double theta = pi * i / stacks;
    for (int j = 0; j < slices; ++j) {
      const double phi = 2.0 * pi * j / slices;
      m.vertices.emplace_back(radius * std::sin(theta) * std::cos(phi),
                              radius * std::sin(theta) * std::sin(phi), radius * std::cos(theta));
    }
  }
  m.vertices.emplace_back(0.0, 0.0, -radius);
  const int south = static_cast<int>(m.vertices.size()) - 1;
  auto ring = [&](int i, int j) { return 1 + (i - 1) * slices + (j % slices); };
  for (int j = 0; j < slices; ++j) m.faces.push_back({0, ring(1, j), ring(1, j + 1)});
  for (int i = 1; i + 1 < stacks; ++i) {
    for (int j = 0; j < slices; ++j) {
      m.faces.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
      m.faces.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
    }
  }
  for (int j = 0; j < slices; ++j) m.faces.push_back({south, ring(stacks - 1, j + 1), ring(stacks - 1, j)});
  return m;
}

// Random rig over a subdivided box mesh, valid against that mesh.
struct RigFixture {
  Rig rig;
  Mesh mesh;
};

inline Mesh GridBox(int n) {
  // n x n grid on each of the six faces of [-1,1]^3, shared corners duplicated.
  Mesh m;
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = 0; side < 2; ++side) {
      const int base = static_cast<int>(m.vertices.size());
      for (int a = 0; a <= n; ++a) {
        for (int b = 0; b <= n; ++b) {
          Vec3 p;
          p[axis] = side ? 1.0 : -1.0;
          p[(axis + 1) % 3] = -1.0 + 2.0 * a / n;
          p[(axis + 2) % 3] = -1.0 + 2.0 * b / n;
          m.vertices.push_back(p);
        }
      }
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          const int i00 = base + a * (n + 1) + b;
          const int i10 = i00 + (n + 1);
          if (side) {
            m.faces.push_back({i00, i10, i10 + 1});
            m.faces.push_back({i00, i10 + 1, i00 + 1});
          } else {
            m.faces.push_back({i00, i10 + 1, i10});
            m.faces.push_back({i00, i00 + 1, i10 + 1});
          }
        }
      }
    }
  }
  return m;
}

inline RigFixture RandomRigFixture(std::uint64_t seed, int min_joints = 2, int max_joints = 24) {
  Rng rng(seed);
  RigFixture f;
  f.mesh = GridBox(IntIn(rng, 1, 4));
  const int joints = IntIn(rng, min_joints, max_joints);
  f.rig.skeleton = RandomSkeleton(rng, joints, 0.1);
  f.rig.skin = RandomSkin(rng, f.mesh.vertex_count(), joints);
  return f;
}

// max_i |a_i - b_i| / max_i |a_i|, the error relative to the gradient scale.
inline double GradientRelativeError(const std::vector<double>& analytic,
                                    const std::vector<double>& numeric) {
  double diff = 0.0, scale = 0.0;
  for (size_t i = 0; i < analytic.size(); ++i) {
    diff = std::max(diff, std::abs(analytic[i] - numeric[i]));
    scale = std::max(scale, std::abs(analytic[i]));
  }
  return scale > 0.0 ? diff / scale : diff;
}

}  // namespace rigtok::testing

#endif  // RIGTOK_TESTS_TEST_UTIL_HPP_
