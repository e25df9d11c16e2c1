#pragma once

#include <memory>
#include <vector>

#include "logsob/mesh.hpp"

namespace logsob {

enum class ShapeKind {
    Circle,        // S^1(r) in R^2, regular polygon
    Sphere2,       // S^2(r) in R^3, subdivided icosahedron
    Torus3,        // torus of revolution (R, a) in R^3
    CliffordTorus4, // S^1(r1) x S^1(r2) in R^4
    DisjointUnion, // two sub-shapes with disjoint bounding boxes
};

/// Parameters for generate_shape. Vertices of every generated shape lie
/// exactly on the analytic surface; resolution is a vertex-count target.
struct ShapeSpec {
    ShapeKind kind = ShapeKind::Circle;
    double radius = 1.0;       // r, or major radius R for Torus3
    double radius2 = 0.5;      // minor radius a (Torus3) or r2 (CliffordTorus4)
    int resolution = 0;        // 0 picks a per-kind default
    std::vector<double> center; // offset added to every vertex; empty = origin

    // DisjointUnion only: the two parts. The second part is translated along
    // the first axis until the bounding boxes are separated.
    std::vector<ShapeSpec> parts;
    double separation_gap = 1.0;
};

EmbeddedMesh generate_shape(const ShapeSpec& spec);

/// Same shape with roughly `factor` times more vertices (each level of the
/// refinement ladders doubles the linear resolution).
ShapeSpec refine_spec(const ShapeSpec& spec, double factor = 4.0);

/// Subdivision level for a vertex-count target (10 * 4^level + 2 >= target).
int icosphere_level_for(int resolution);

} // namespace logsob
