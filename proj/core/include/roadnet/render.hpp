#ifndef ROADNET_RENDER_HPP
#define ROADNET_RENDER_HPP

#include <string>
#include <vector>

#include "roadnet/mesh.hpp"
#include "roadnet/pattern.hpp"

namespace roadnet {

// All renderers return a standalone SVG document mapping the unit cell to a
// fixed 840x840 viewport with the y axis pointing up; output is
// byte-deterministic for identical inputs.

// Pattern arcs as strokes over the cell frame.
std::string render_pattern_svg(const TorusPattern& pattern);

// Mesh wireframe; road-tagged triangles are shaded and pattern edges drawn
// in a contrasting stroke.
std::string render_mesh_svg(const PeriodicMesh& mesh);

// Per-vertex scalar field averaged per triangle and filled with the
// colormap documented in the README.
std::string render_field_svg(const PeriodicMesh& mesh, const std::vector<double>& values);

}  // namespace roadnet

#endif
