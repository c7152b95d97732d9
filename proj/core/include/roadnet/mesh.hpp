#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "roadnet/geometry.hpp"
#include "roadnet/pattern.hpp"

namespace roadnet {

// Mesh edge lying on the discretized pattern; a and b are ordered along the
// traversal direction and tangent is the parent chord's unit tangent, copied
// bitwise so that straight runs telescope exactly.
struct PatternMeshEdge {
  int a = -1;
  int b = -1;
  Vec2 tangent;
  int parent_arc = -1;
  double length = 0.0;
};

struct PeriodicMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<PatternMeshEdge> pattern_edges;
  std::vector<std::pair<int, int>> periodic_map;  // {slave on x=1 or y=1, master}
  std::vector<int> region_tag;  // per triangle, 0 bulk / 1 road; empty without delta
  double h = 0.0;
  std::optional<double> delta;

  int n_vertices() const { return (int)vertices.size(); }
  int n_triangles() const { return (int)triangles.size(); }
  double triangle_area(int t) const;
};

struct QualityReport {
  double min_angle_deg = 0.0;
  double max_aspect = 0.0;  // longest / shortest edge, worst triangle
  int n_vertices = 0;
  int n_triangles = 0;
  int n_pattern_edges = 0;
  double total_area = 0.0;
  double road_area = 0.0;
};

// Pattern-conforming periodic triangulation of the unit cell at target size
// h. With delta, one-sided road strips of width delta (left of the tangent)
// are resolved by constrained offset polylines at local size <= delta/2 and
// triangles are tagged bulk/road.
PeriodicMesh build_mesh(const UnfoldedPattern& unfolded, double h,
                        std::optional<double> delta = std::nullopt,
                        double quality_floor_deg = 20.0);

// Uniform 1 -> 4 midpoint refinement preserving constraints, tags, and the
// periodic boundary pairing.
PeriodicMesh refine(const PeriodicMesh& mesh);

QualityReport quality_report(const PeriodicMesh& mesh);

// Plain-text dump with sections VERTICES / TRIANGLES / PATTERN_EDGES /
// PERIODIC_MAP / TAGS plus one FIELD section per named vertex field; the
// format is documented in the repository README.
std::string dump_mesh(const PeriodicMesh& mesh,
                      const std::vector<std::pair<std::string, std::vector<double>>>& fields = {});

struct MeshDump {
  PeriodicMesh mesh;
  std::vector<std::pair<std::string, std::vector<double>>> fields;
};

MeshDump parse_mesh_dump(const std::string& text);
MeshDump load_mesh_dump(const std::string& path);

}  // namespace roadnet
