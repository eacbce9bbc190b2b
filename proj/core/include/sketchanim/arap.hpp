#pragma once

#include "sketchanim/geometry.hpp"
#include "sketchanim/mesh.hpp"
#include "sketchanim/retarget.hpp"
#include "sketchanim/rig.hpp"

#include <Eigen/SparseCholesky>

#include <map>
#include <span>
#include <string>
#include <vector>

namespace sketchanim {

/// Skeleton joint -> mesh vertex used as a deformation handle.
struct HandleSet {
  std::vector<SkelJoint> joints;
  std::vector<int> vertices;
  std::vector<std::string> warnings;

  std::size_t size() const { return joints.size(); }
};

struct BindOptions {
  /// Farthest a joint may sit from its vertex; <= 0 means 10% of the mesh
  /// bounding-box diagonal.
  double max_distance = 0.0;
  /// Skip (with a warning) joints beyond max_distance instead of throwing.
  bool exclude_unbindable = false;
  /// Joints left out up front, e.g. dragged off the figure in the editor.
  std::vector<SkelJoint> excluded;
};

/// Each joint binds to its nearest vertex; a joint whose nearest vertex is
/// taken gets the next-nearest unused one. Throws unbindable_joint.
HandleSet bind_handles(const CharacterMesh& mesh, const Skeleton& skeleton,
                       const BindOptions& options = {});

/// Two-phase as-rigid-as-possible solver: a similarity-invariant fit followed
/// by a per-triangle scale adjustment, with soft handle constraints. Both
/// normal-equation systems are factorised once at construction; solve() only
/// back-substitutes, and is const and safe to call concurrently.
class ArapSolver {
 public:
  static constexpr double kHandleWeight = 1000.0;

  ArapSolver(const CharacterMesh& mesh, std::vector<int> handle_vertices,
             double handle_weight = kHandleWeight);

  struct Result {
    std::vector<Point2> similarity;  // phase-one positions
    std::vector<Point2> vertices;    // final positions
  };

  /// `targets` is index-aligned with the handle vertices.
  Result solve_detailed(std::span<const Point2> targets) const;
  std::vector<Point2> solve(std::span<const Point2> targets) const {
    return solve_detailed(targets).vertices;
  }

  std::size_t vertex_count() const { return rest_.size(); }
  const std::vector<int>& handles() const { return handles_; }
  double handle_weight() const { return weight_; }

 private:
  using SparseMatrix = Eigen::SparseMatrix<double>;

  std::vector<Point2> rest_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<int> handles_;
  double weight_;
  Eigen::SimplicialLDLT<SparseMatrix> similarity_;
  Eigen::SimplicialLDLT<SparseMatrix> fitting_;
};

ArapSolver build_solver(const CharacterMesh& mesh, const HandleSet& handles,
                        double handle_weight = ArapSolver::kHandleWeight);

/// Targets taken from a posed skeleton, in handle order. Each handle vertex
/// keeps its rest offset from the joint, turned with the joint's incoming bone,
/// so the rest pose maps every handle onto itself.
std::vector<Point2> handle_targets(const HandleSet& handles, const CharacterMesh& mesh,
                                   const Skeleton& skeleton, const SkeletonPose& pose);

/// Throws missing_handle when a bound joint has no target.
std::vector<Point2> solve(const ArapSolver& solver, const HandleSet& handles,
                          const std::map<SkelJoint, Point2>& targets);

}  // namespace sketchanim
