#include "sketchanim/arap.hpp"

#include "sketchanim/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace sketchanim {

namespace {

using Triplet = Eigen::Triplet<double>;

// Counter-clockwise quarter turn in the coordinate frame.
Eigen::Vector2d perp(const Eigen::Vector2d& v) { return {-v.y(), v.x()}; }

constexpr int kRotations[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};

}  // namespace

HandleSet bind_handles(const CharacterMesh& mesh, const Skeleton& skeleton,
                       const BindOptions& options) {
  if (mesh.vertices.empty()) throw Error(ErrorKind::unbindable_joint, "mesh has no vertices");
  Point2 lo = mesh.vertices[0], hi = mesh.vertices[0];
  for (const Point2& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double radius = options.max_distance > 0 ? options.max_distance : 0.1 * (hi - lo).norm();

  HandleSet out;
  std::vector<char> used(mesh.vertices.size(), 0);
  std::vector<int> order(mesh.vertices.size());
  for (int j = 0; j < kSkelJointCount; ++j) {
    const auto joint = static_cast<SkelJoint>(j);
    if (std::find(options.excluded.begin(), options.excluded.end(), joint) != options.excluded.end())
      continue;
    const Point2& p = skeleton.joints[j];
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return (mesh.vertices[a] - p).squaredNorm() < (mesh.vertices[b] - p).squaredNorm();
    });
    const double nearest = (mesh.vertices[order[0]] - p).norm();
    if (nearest > radius) {
      const std::string msg = "joint '" + std::string(to_string(joint)) + "' is " +
                              std::to_string(nearest) + " px from the mesh (limit " +
                              std::to_string(radius) + ")";
      if (!options.exclude_unbindable) throw Error(ErrorKind::unbindable_joint, msg);
      out.warnings.push_back(msg + "; excluded");
      continue;
    }
    const auto free = std::find_if(order.begin(), order.end(), [&](int v) { return !used[v]; });
    if (free == order.end())
      throw Error(ErrorKind::unbindable_joint, "more joints than mesh vertices");
    used[*free] = 1;
    out.joints.push_back(joint);
    out.vertices.push_back(*free);
  }
  return out;
}

ArapSolver::ArapSolver(const CharacterMesh& mesh, std::vector<int> handle_vertices,
                       double handle_weight)
    : rest_(mesh.vertices),
      triangles_(mesh.triangles),
      handles_(std::move(handle_vertices)),
      weight_(handle_weight) {
  const int n = static_cast<int>(rest_.size());
  if (handles_.size() < 2)
    throw Error(ErrorKind::validation, "deformation needs at least two handles");
  if (!(weight_ > 0)) throw Error(ErrorKind::validation, "handle weight must be positive");
  std::set<int> distinct;
  for (int h : handles_) {
    if (h < 0 || h >= n) throw Error(ErrorKind::validation, "handle index out of range");
    if (!distinct.insert(h).second)
      throw Error(ErrorKind::validation, "handle vertex " + std::to_string(h) + " used twice");
  }
  if (triangles_.empty() || connected_components(mesh) != 1)
    throw Error(ErrorKind::disconnected_mesh, "mesh must be a single connected piece");

  // Phase one: each vertex of each triangle expressed in the frame of the
  // opposite edge; the quadratic error is accumulated into a 2n x 2n system.
  std::vector<Triplet> sim;
  std::vector<Triplet> fit;
  sim.reserve(triangles_.size() * 3 * 36 + handles_.size() * 2);
  fit.reserve(triangles_.size() * 3 * 4 + handles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int r = 0; r < 3; ++r) {
      const int i = tri[kRotations[r][0]], j = tri[kRotations[r][1]], k = tri[kRotations[r][2]];
      const Eigen::Vector2d e = rest_[j] - rest_[i];
      const Eigen::Vector2d d = rest_[k] - rest_[i];
      const double len2 = e.squaredNorm();
      if (len2 == 0.0) throw Error(ErrorKind::factorization, "mesh has a zero-length edge");
      const double x = d.dot(e) / len2;
      const double y = d.dot(perp(e)) / len2;

      // Residual rows: r = A * [vi.x vi.y vj.x vj.y vk.x vk.y].
      const int cols[6] = {2 * i, 2 * i + 1, 2 * j, 2 * j + 1, 2 * k, 2 * k + 1};
      const double rows[2][6] = {{x - 1, -y, -x, y, 1, 0}, {y, x - 1, -y, -x, 0, 1}};
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) {
          const double v = rows[0][a] * rows[0][b] + rows[1][a] * rows[1][b];
          if (v != 0.0) sim.emplace_back(cols[a], cols[b], v);
        }
    }
    for (int r = 0; r < 3; ++r) {
      const int i = tri[r], j = tri[(r + 1) % 3];
      fit.emplace_back(i, i, 1.0);
      fit.emplace_back(j, j, 1.0);
      fit.emplace_back(i, j, -1.0);
      fit.emplace_back(j, i, -1.0);
    }
  }
  for (int h : handles_) {
    sim.emplace_back(2 * h, 2 * h, weight_);
    sim.emplace_back(2 * h + 1, 2 * h + 1, weight_);
    fit.emplace_back(h, h, weight_);
  }
  SparseMatrix a1(2 * n, 2 * n), a2(n, n);
  a1.setFromTriplets(sim.begin(), sim.end());
  a2.setFromTriplets(fit.begin(), fit.end());
  similarity_.compute(a1);
  if (similarity_.info() != Eigen::Success)
    throw Error(ErrorKind::factorization, "similarity system is singular");
  fitting_.compute(a2);
  if (fitting_.info() != Eigen::Success)
    throw Error(ErrorKind::factorization, "scale-adjustment system is singular");
}

ArapSolver::Result ArapSolver::solve_detailed(std::span<const Point2> targets) const {
  if (targets.size() != handles_.size())
    throw Error(ErrorKind::missing_handle, "expected " + std::to_string(handles_.size()) +
                                               " handle targets, got " +
                                               std::to_string(targets.size()));
  for (const Point2& t : targets)
    if (!t.allFinite()) throw Error(ErrorKind::validation, "handle target is not finite");
  const int n = static_cast<int>(rest_.size());

  Eigen::VectorXd b1 = Eigen::VectorXd::Zero(2 * n);
  for (std::size_t h = 0; h < handles_.size(); ++h) {
    b1[2 * handles_[h]] = weight_ * targets[h].x();
    b1[2 * handles_[h] + 1] = weight_ * targets[h].y();
  }
  const Eigen::VectorXd v1 = similarity_.solve(b1);

  Result out;
  out.similarity.resize(n);
  for (int v = 0; v < n; ++v) out.similarity[v] = {v1[2 * v], v1[2 * v + 1]};

  // Phase two: fit a rotation to each triangle's phase-one shape, then match
  // edges to the rotated rest edges.
  Eigen::VectorXd bx = Eigen::VectorXd::Zero(n), by = Eigen::VectorXd::Zero(n);
  for (const auto& tri : triangles_) {
    const Point2 pc = (rest_[tri[0]] + rest_[tri[1]] + rest_[tri[2]]) / 3.0;
    const Point2 qc = (out.similarity[tri[0]] + out.similarity[tri[1]] + out.similarity[tri[2]]) / 3.0;
    double dot = 0.0, crs = 0.0;
    for (int k = 0; k < 3; ++k) {
      const Point2 p = rest_[tri[k]] - pc;
      const Point2 q = out.similarity[tri[k]] - qc;
      dot += p.dot(q);
      crs += cross(p, q);
    }
    const double norm = std::hypot(dot, crs);
    const double c = norm > 0 ? dot / norm : 1.0;
    const double s = norm > 0 ? crs / norm : 0.0;
    for (int r = 0; r < 3; ++r) {
      const int i = tri[r], j = tri[(r + 1) % 3];
      const Point2 e = rest_[j] - rest_[i];
      const Point2 g(c * e.x() - s * e.y(), s * e.x() + c * e.y());
      bx[j] += g.x();
      by[j] += g.y();
      bx[i] -= g.x();
      by[i] -= g.y();
    }
  }
  for (std::size_t h = 0; h < handles_.size(); ++h) {
    bx[handles_[h]] += weight_ * targets[h].x();
    by[handles_[h]] += weight_ * targets[h].y();
  }
  const Eigen::VectorXd x = fitting_.solve(bx);
  const Eigen::VectorXd y = fitting_.solve(by);
  out.vertices.resize(n);
  for (int v = 0; v < n; ++v) out.vertices[v] = {x[v], y[v]};
  return out;
}

ArapSolver build_solver(const CharacterMesh& mesh, const HandleSet& handles, double handle_weight) {
  return ArapSolver(mesh, handles.vertices, handle_weight);
}

std::vector<Point2> handle_targets(const HandleSet& handles, const CharacterMesh& mesh,
                                   const Skeleton& skeleton, const SkeletonPose& pose) {
  // Turn of each joint's incoming bone; the root follows the spine.
  std::array<double, kSkelJointCount> turn{};
  for (const Bone& b : skeleton.bones) {
    const int p = static_cast<int>(b.parent), c = static_cast<int>(b.child);
    const Point2 rest = skeleton.joints[c] - skeleton.joints[p];
    const Point2 posed = pose[c] - pose[p];
    turn[c] = std::atan2(cross(rest, posed), rest.dot(posed));
  }
  turn[static_cast<int>(SkelJoint::root)] = turn[static_cast<int>(SkelJoint::chest)];
  std::vector<Point2> out;
  out.reserve(handles.size());
  for (std::size_t k = 0; k < handles.size(); ++k) {
    const int j = static_cast<int>(handles.joints[k]);
    const Point2 offset = mesh.vertices[handles.vertices[k]] - skeleton.joints[j];
    out.push_back(pose[j] + Eigen::Rotation2Dd(turn[j]) * offset);
  }
  return out;
}

std::vector<Point2> solve(const ArapSolver& solver, const HandleSet& handles,
                          const std::map<SkelJoint, Point2>& targets) {
  std::vector<Point2> ordered;
  ordered.reserve(handles.size());
  for (SkelJoint j : handles.joints) {
    const auto it = targets.find(j);
    if (it == targets.end())
      throw Error(ErrorKind::missing_handle,
                  "no target for handle joint '" + std::string(to_string(j)) + "'");
    ordered.push_back(it->second);
  }
  return solver.solve(ordered);
}

}  // namespace sketchanim
