#include "sketchanim/mesh.hpp"

#include "sketchanim/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace sketchanim {

std::string_view to_string(BodyGroup g) {
  switch (g) {
    case BodyGroup::left_upper_arm: return "left_upper_arm";
    case BodyGroup::left_lower_arm: return "left_lower_arm";
    case BodyGroup::right_upper_arm: return "right_upper_arm";
    case BodyGroup::right_lower_arm: return "right_lower_arm";
    case BodyGroup::left_upper_leg: return "left_upper_leg";
    case BodyGroup::left_lower_leg: return "left_lower_leg";
    case BodyGroup::right_upper_leg: return "right_upper_leg";
    case BodyGroup::right_lower_leg: return "right_lower_leg";
    case BodyGroup::trunk: return "trunk";
  }
  return "trunk";
}

std::optional<BodyGroup> body_group_from_string(std::string_view name) {
  for (BodyGroup g : kAllBodyGroups)
    if (to_string(g) == name) return g;
  return std::nullopt;
}

namespace {

// Triangle with neighbour links; n[i] is the triangle across the edge
// opposite v[i], or -1 on the polygon boundary.
struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> n{-1, -1, -1};
};

class Triangulation {
 public:
  explicit Triangulation(std::vector<Point2> pts) : pts_(std::move(pts)) {}

  void ear_clip();
  void build_adjacency();
  void make_delaunay();
  void refine(double max_area, std::size_t max_vertices);

  const std::vector<Point2>& points() const { return pts_; }
  const std::vector<Tri>& tris() const { return tris_; }

 private:
  double area(int t) const {
    const Tri& tr = tris_[t];
    return 0.5 * orient2d(pts_[tr.v[0]], pts_[tr.v[1]], pts_[tr.v[2]]);
  }
  bool flip_if_illegal(int t, int i);
  void legalize(std::vector<std::pair<int, int>> stack);
  void insert_in_triangle(int t, const Point2& p);
  int local_index(int t, int neighbour) const {
    for (int k = 0; k < 3; ++k)
      if (tris_[t].n[k] == neighbour) return k;
    return -1;
  }

  std::vector<Point2> pts_;
  std::vector<Tri> tris_;
};

bool point_in_closed_triangle(const Point2& p, const Point2& a, const Point2& b, const Point2& c) {
  return orient2d(a, b, p) >= 0 && orient2d(b, c, p) >= 0 && orient2d(c, a, p) >= 0;
}

void Triangulation::ear_clip() {
  const int n = static_cast<int>(pts_.size());
  std::vector<int> prev(n), next(n);
  for (int i = 0; i < n; ++i) {
    prev[i] = (i + n - 1) % n;
    next[i] = (i + 1) % n;
  }
  int remaining = n;
  int cur = 0;
  auto is_ear = [&](int i) {
    const Point2& a = pts_[prev[i]];
    const Point2& b = pts_[i];
    const Point2& c = pts_[next[i]];
    if (orient2d(a, b, c) <= 0) return false;
    for (int j = next[next[i]]; j != prev[i]; j = next[j]) {
      const Point2& p = pts_[j];
      if (p == a || p == b || p == c) continue;
      if (point_in_closed_triangle(p, a, b, c)) return false;
    }
    return true;
  };
  auto unlink = [&](int i) {
    next[prev[i]] = next[i];
    prev[next[i]] = prev[i];
    --remaining;
    return prev[i];
  };
  while (remaining > 3) {
    bool clipped = false;
    for (int k = 0; k < remaining; ++k, cur = next[cur]) {
      if (is_ear(cur)) {
        tris_.push_back({{prev[cur], cur, next[cur]}});
        cur = unlink(cur);
        clipped = true;
        break;
      }
    }
    if (clipped) continue;
    // No ear: a straight vertex can leave the ring without a triangle.
    bool dropped = false;
    for (int k = 0; k < remaining; ++k, cur = next[cur]) {
      if (orient2d(pts_[prev[cur]], pts_[cur], pts_[next[cur]]) == 0.0) {
        cur = unlink(cur);
        dropped = true;
        break;
      }
    }
    if (!dropped)
      throw Error(ErrorKind::degenerate_polygon, "polygon could not be triangulated (not simple?)");
  }
  if (orient2d(pts_[prev[cur]], pts_[cur], pts_[next[cur]]) > 0)
    tris_.push_back({{prev[cur], cur, next[cur]}});
}

void Triangulation::build_adjacency() {
  std::map<std::pair<int, int>, std::pair<int, int>> edges;
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
    for (int i = 0; i < 3; ++i) {
      const int a = tris_[t].v[(i + 1) % 3];
      const int b = tris_[t].v[(i + 2) % 3];
      auto it = edges.find({b, a});
      if (it != edges.end()) {
        tris_[t].n[i] = it->second.first;
        tris_[it->second.first].n[it->second.second] = t;
      } else {
        edges[{a, b}] = {t, i};
      }
    }
  }
}

double incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const double adx = a.x() - d.x(), ady = a.y() - d.y();
  const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

bool Triangulation::flip_if_illegal(int t, int i) {
  const int u = tris_[t].n[i];
  if (u < 0) return false;
  const int j = local_index(u, t);
  const int p = tris_[t].v[i];
  const int q = tris_[t].v[(i + 1) % 3];
  const int r = tris_[t].v[(i + 2) % 3];
  const int d = tris_[u].v[j];
  const Point2 &P = pts_[p], &Q = pts_[q], &R = pts_[r], &D = pts_[d];
  const double scale = std::max({(Q - P).squaredNorm(), (R - P).squaredNorm(), (D - P).squaredNorm()});
  if (incircle(P, Q, R, D) <= 1e-12 * scale * scale) return false;
  // The flipped pair must stay positively oriented (quad strictly convex).
  if (orient2d(P, Q, D) <= 0 || orient2d(P, D, R) <= 0) return false;

  const int A = tris_[t].n[(i + 1) % 3];  // across r-p
  const int B = tris_[t].n[(i + 2) % 3];  // across p-q
  const int C = tris_[u].n[(j + 1) % 3];  // across q-d
  const int Dn = tris_[u].n[(j + 2) % 3]; // across d-r
  tris_[t].v = {p, q, d};
  tris_[t].n = {C, u, B};
  tris_[u].v = {p, d, r};
  tris_[u].n = {Dn, A, t};
  if (C >= 0) tris_[C].n[local_index(C, u)] = t;
  if (A >= 0) tris_[A].n[local_index(A, t)] = u;
  return true;
}

void Triangulation::legalize(std::vector<std::pair<int, int>> stack) {
  std::size_t guard = 0;
  const std::size_t limit = 64 * (tris_.size() + 16) * (tris_.size() + 16);
  while (!stack.empty() && guard++ < limit) {
    const auto [t, i] = stack.back();
    stack.pop_back();
    const int u = tris_[t].n[i];
    if (!flip_if_illegal(t, i)) continue;
    stack.emplace_back(t, 0);
    stack.emplace_back(t, 2);
    stack.emplace_back(u, 0);
    stack.emplace_back(u, 1);
  }
}

void Triangulation::make_delaunay() {
  std::vector<std::pair<int, int>> stack;
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
    for (int i = 0; i < 3; ++i)
      if (tris_[t].n[i] > t) stack.emplace_back(t, i);
  legalize(std::move(stack));
}

void Triangulation::insert_in_triangle(int t, const Point2& point) {
  const int P = static_cast<int>(pts_.size());
  pts_.push_back(point);
  const auto [a, b, c] = tris_[t].v;
  const auto [na, nb, nc] = tris_[t].n;
  const int t1 = static_cast<int>(tris_.size());
  const int t2 = t1 + 1;
  tris_[t].v = {P, b, c};
  tris_[t].n = {na, t1, t2};
  tris_.push_back({{P, c, a}, {nb, t2, t}});
  tris_.push_back({{P, a, b}, {nc, t, t1}});
  if (nb >= 0) tris_[nb].n[local_index(nb, t)] = t1;
  if (nc >= 0) tris_[nc].n[local_index(nc, t)] = t2;
  legalize({{t, 0}, {t1, 0}, {t2, 0}});
}

void Triangulation::refine(double max_area, std::size_t max_vertices) {
  if (!std::isfinite(max_area)) return;
  while (pts_.size() < max_vertices) {
    std::vector<std::pair<double, int>> big;
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
      if (area(t) > max_area) big.emplace_back(area(t), t);
    if (big.empty()) return;
    std::stable_sort(big.begin(), big.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    for (const auto& [a0, t] : big) {
      if (pts_.size() >= max_vertices) return;
      if (area(t) <= max_area) continue;
      const Tri& tr = tris_[t];
      insert_in_triangle(t, (pts_[tr.v[0]] + pts_[tr.v[1]] + pts_[tr.v[2]]) / 3.0);
    }
  }
}

}  // namespace

double triangle_area(const CharacterMesh& mesh, std::size_t tri) {
  const auto& t = mesh.triangles[tri];
  return 0.5 * std::abs(orient2d(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]));
}

double mesh_area(const CharacterMesh& mesh) {
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) total += triangle_area(mesh, t);
  return total;
}

namespace {

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

int connected_components(const CharacterMesh& mesh) {
  const int n = static_cast<int>(mesh.vertices.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  int components = n;
  for (const auto& t : mesh.triangles) {
    for (int k = 1; k < 3; ++k) {
      const int a = find_root(parent, t[0]);
      const int b = find_root(parent, t[k]);
      if (a != b) {
        parent[b] = a;
        --components;
      }
    }
  }
  return components;
}

CharacterMesh triangulate(const Polygon& poly, const BinaryMask& mask,
                          const TriangulateOptions& options) {
  if (poly.vertices.size() < 3)
    throw Error(ErrorKind::degenerate_polygon, "polygon needs at least 3 vertices");
  const double area = signed_area(poly);
  const double per = perimeter(poly);
  if (std::abs(area) <= 1e-9 * std::max(1.0, per * per))
    throw Error(ErrorKind::degenerate_polygon, "polygon has zero area");
  std::vector<Point2> ring = poly.vertices;
  if (area < 0) std::reverse(ring.begin(), ring.end());

  Triangulation tri(std::move(ring));
  tri.ear_clip();
  tri.build_adjacency();
  tri.make_delaunay();
  const double max_area = options.max_area > 0 ? options.max_area : std::abs(area) / 500.0;
  tri.refine(max_area, options.max_vertices);

  const auto& pts = tri.points();
  const auto& tris = tri.tris();
  std::vector<char> keep(tris.size(), 1);
  if (options.cull_outside_mask && mask.width() > 0) {
    for (std::size_t t = 0; t < tris.size(); ++t) {
      const Point2 c = (pts[tris[t].v[0]] + pts[tris[t].v[1]] + pts[tris[t].v[2]]) / 3.0;
      keep[t] = mask.get(static_cast<int>(std::floor(c.x())), static_cast<int>(std::floor(c.y())));
    }
    // Keep the largest edge-connected patch of survivors so the mesh stays
    // one piece for the deformation solver.
    std::vector<int> comp(tris.size(), -1);
    std::vector<double> comp_area;
    for (std::size_t s = 0; s < tris.size(); ++s) {
      if (!keep[s] || comp[s] >= 0) continue;
      const int id = static_cast<int>(comp_area.size());
      double acc = 0.0;
      std::vector<int> stack{static_cast<int>(s)};
      comp[s] = id;
      while (!stack.empty()) {
        const int t = stack.back();
        stack.pop_back();
        const Tri& tr = tris[t];
        acc += 0.5 * orient2d(pts[tr.v[0]], pts[tr.v[1]], pts[tr.v[2]]);
        for (int nb : tr.n)
          if (nb >= 0 && keep[nb] && comp[nb] < 0) {
            comp[nb] = id;
            stack.push_back(nb);
          }
      }
      comp_area.push_back(acc);
    }
    if (comp_area.empty())
      throw Error(ErrorKind::degenerate_polygon, "no triangle centroid falls inside the mask");
    const int best = static_cast<int>(std::max_element(comp_area.begin(), comp_area.end()) -
                                      comp_area.begin());
    for (std::size_t t = 0; t < tris.size(); ++t) keep[t] = comp[t] == best;
  }

  CharacterMesh mesh;
  std::vector<int> remap(pts.size(), -1);
  for (std::size_t t = 0; t < tris.size(); ++t) {
    if (!keep[t]) continue;
    std::array<int, 3> out{};
    for (int k = 0; k < 3; ++k) {
      int& r = remap[tris[t].v[k]];
      if (r < 0) {
        r = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(pts[tris[t].v[k]]);
      }
      out[k] = r;
    }
    mesh.triangles.push_back(out);
  }
  const double mw = mask.width() > 0 ? mask.width() : 1.0;
  const double mh = mask.height() > 0 ? mask.height() : 1.0;
  mesh.uvs.reserve(mesh.vertices.size());
  for (const Point2& v : mesh.vertices)
    mesh.uvs.emplace_back(std::clamp(v.x() / mw, 0.0, 1.0), std::clamp(v.y() / mh, 0.0, 1.0));
  mesh.groups.assign(mesh.triangles.size(), BodyGroup::trunk);
  return mesh;
}

}  // namespace sketchanim
