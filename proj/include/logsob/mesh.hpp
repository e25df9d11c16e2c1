#pragma once

#include <Eigen/Dense>
#include <vector>

#include "logsob/error.hpp"

namespace logsob {

/// Closed simplicial n-manifold (n = 1 curve, n = 2 surface) embedded in
/// R^N with N = n + m, m >= 1. Immutable after construction: all caches
/// key off the mesh object and stay coherent.
struct EmbeddedMesh {
    int intrinsic_dim = 0; // n
    int ambient_dim = 0;   // N = n + m

    Eigen::MatrixXd vertices; // V x N
    Eigen::MatrixXi cells;    // C x (n+1), edges or triangles

    std::vector<int> component_labels; // per vertex
    int num_components = 0;

    int codim() const { return ambient_dim - intrinsic_dim; }
    Eigen::Index num_vertices() const { return vertices.rows(); }
    Eigen::Index num_cells() const { return cells.rows(); }
};

/// Validates closedness (every (n-1)-face has exactly 2 cofaces), positive
/// cell measures and index ranges, then labels connected components by
/// flood fill over cell adjacency.
EmbeddedMesh build_mesh(const Eigen::MatrixXd& vertices, const Eigen::MatrixXi& cells,
                        int ambient_dim);

/// n-dimensional measure of one cell: edge length or triangle area.
double cell_measure(const EmbeddedMesh& mesh, Eigen::Index cell);

/// Sum of cell measures (length of a curve, area of a surface).
double total_measure(const EmbeddedMesh& mesh);

/// Longest and mean edge length; the mesh-size parameter h is max_edge.
struct MeshScale {
    double max_edge = 0.0;
    double mean_edge = 0.0;
};
MeshScale mesh_scale(const EmbeddedMesh& mesh);

/// Extracts one connected component as a standalone mesh, preserving
/// vertex order. vertex_map[i] gives the original index of new vertex i.
EmbeddedMesh extract_component(const EmbeddedMesh& mesh, int component,
                               std::vector<Eigen::Index>* vertex_map = nullptr);

/// Concatenates two meshes of matching dimensions into one (possibly
/// disconnected) mesh.
EmbeddedMesh disjoint_union(const EmbeddedMesh& a, const EmbeddedMesh& b);

} // namespace logsob
