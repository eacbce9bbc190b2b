#pragma once

#include "sketchanim/geometry.hpp"
#include "sketchanim/segment.hpp"

namespace sketchanim {

/// Outer boundary of the mask's first foreground component, traced along
/// pixel corners. Diagonal-only pixel contacts are bridged first so the walk
/// never pinches. `epsilon` > 0 simplifies with Douglas-Peucker; the tolerance
/// is halved until the result is simple. Orientation: positive signed area.
/// Throws empty_mask.
Polygon trace_contour(const BinaryMask& m, double epsilon = 1.0);

/// Douglas-Peucker on a closed ring.
Polygon simplify_closed(const Polygon& ring, double epsilon);

}  // namespace sketchanim
