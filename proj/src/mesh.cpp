#include "logsob/mesh.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace logsob {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::BoundaryDetected: return "BoundaryDetected";
        case ErrorCode::DegenerateCell: return "DegenerateCell";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::UnsupportedSpec: return "UnsupportedSpec";
        case ErrorCode::IllConditionedFit: return "IllConditionedFit";
        case ErrorCode::NonpositiveDensity: return "NonpositiveDensity";
        case ErrorCode::IncompatibleRhs: return "IncompatibleRhs";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::DisconnectedInput: return "DisconnectedInput";
        case ErrorCode::MixedForms: return "MixedForms";
        case ErrorCode::Overflow: return "Overflow";
        case ErrorCode::Diverged: return "Diverged";
        case ErrorCode::QuadratureUnderflow: return "QuadratureUnderflow";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

double cell_measure(const EmbeddedMesh& mesh, Eigen::Index cell) {
    if (mesh.intrinsic_dim == 1) {
        return (mesh.vertices.row(mesh.cells(cell, 1)) - mesh.vertices.row(mesh.cells(cell, 0)))
            .norm();
    }
    Eigen::VectorXd e1 = mesh.vertices.row(mesh.cells(cell, 1)) - mesh.vertices.row(mesh.cells(cell, 0));
    Eigen::VectorXd e2 = mesh.vertices.row(mesh.cells(cell, 2)) - mesh.vertices.row(mesh.cells(cell, 0));
    const double g11 = e1.squaredNorm();
    const double g22 = e2.squaredNorm();
    const double g12 = e1.dot(e2);
    const double gram = g11 * g22 - g12 * g12;
    return 0.5 * std::sqrt(std::max(gram, 0.0));
}

double total_measure(const EmbeddedMesh& mesh) {
    double total = 0.0;
    for (Eigen::Index c = 0; c < mesh.num_cells(); ++c) total += cell_measure(mesh, c);
    return total;
}

MeshScale mesh_scale(const EmbeddedMesh& mesh) {
    MeshScale s;
    const int k = mesh.intrinsic_dim + 1;
    double sum = 0.0;
    Eigen::Index count = 0;
    for (Eigen::Index c = 0; c < mesh.num_cells(); ++c) {
        for (int a = 0; a < k; ++a) {
            for (int b = a + 1; b < k; ++b) {
                const double len =
                    (mesh.vertices.row(mesh.cells(c, a)) - mesh.vertices.row(mesh.cells(c, b)))
                        .norm();
                s.max_edge = std::max(s.max_edge, len);
                sum += len;
                ++count;
            }
        }
    }
    if (count > 0) s.mean_edge = sum / static_cast<double>(count);
    return s;
}

namespace {

// Union-find over vertices, merged along cells.
struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(Eigen::Index n) : parent(static_cast<std::size_t>(n)) {
        for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    }
    int find(int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

void label_components(EmbeddedMesh& mesh) {
    UnionFind uf(mesh.num_vertices());
    const int k = mesh.intrinsic_dim + 1;
    for (Eigen::Index c = 0; c < mesh.num_cells(); ++c) {
        for (int a = 1; a < k; ++a) uf.unite(mesh.cells(c, 0), mesh.cells(c, a));
    }
    std::map<int, int> root_to_label;
    mesh.component_labels.assign(static_cast<std::size_t>(mesh.num_vertices()), -1);
    for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) {
        const int root = uf.find(static_cast<int>(i));
        auto [it, inserted] = root_to_label.try_emplace(root, static_cast<int>(root_to_label.size()));
        mesh.component_labels[static_cast<std::size_t>(i)] = it->second;
    }
    mesh.num_components = static_cast<int>(root_to_label.size());
}

} // namespace

EmbeddedMesh build_mesh(const Eigen::MatrixXd& vertices, const Eigen::MatrixXi& cells,
                        int ambient_dim) {
    if (vertices.rows() == 0 || cells.rows() == 0)
        throw Error(ErrorCode::InvalidConfig, "mesh needs at least one vertex and one cell");
    if (vertices.cols() != ambient_dim)
        throw Error(ErrorCode::InvalidConfig, "vertex coordinate count does not match ambient_dim");

    const int n = static_cast<int>(cells.cols()) - 1;
    if (n != 1 && n != 2)
        throw Error(ErrorCode::UnsupportedSpec, "cells must be edges or triangles");
    if (ambient_dim <= n || ambient_dim > 8)
        throw Error(ErrorCode::UnsupportedSpec, "ambient dimension must satisfy n < N <= 8");

    EmbeddedMesh mesh;
    mesh.intrinsic_dim = n;
    mesh.ambient_dim = ambient_dim;
    mesh.vertices = vertices;
    mesh.cells = cells;

    const Eigen::Index nv = vertices.rows();
    for (Eigen::Index c = 0; c < cells.rows(); ++c) {
        for (int a = 0; a <= n; ++a) {
            const int v = cells(c, a);
            if (v < 0 || v >= nv)
                throw Error(ErrorCode::IndexOutOfRange,
                            "cell " + std::to_string(c) + " references vertex " + std::to_string(v));
        }
        for (int a = 0; a <= n; ++a)
            for (int b = a + 1; b <= n; ++b)
                if (cells(c, a) == cells(c, b))
                    throw Error(ErrorCode::DegenerateCell,
                                "cell " + std::to_string(c) + " repeats a vertex");
    }

    // Positive n-measure for every cell, relative to its edge scale.
    for (Eigen::Index c = 0; c < cells.rows(); ++c) {
        double scale = 0.0;
        for (int a = 0; a <= n; ++a)
            for (int b = a + 1; b <= n; ++b)
                scale = std::max(scale,
                                 (vertices.row(cells(c, a)) - vertices.row(cells(c, b))).squaredNorm());
        const double measure = cell_measure(mesh, c);
        if (!(measure > 1e-12 * std::pow(std::sqrt(scale), n)) || scale == 0.0)
            throw Error(ErrorCode::DegenerateCell,
                        "cell " + std::to_string(c) + " has vanishing measure");
    }

    // Closedness: every (n-1)-face must appear in exactly two cells.
    if (n == 1) {
        std::vector<int> valence(static_cast<std::size_t>(nv), 0);
        for (Eigen::Index c = 0; c < cells.rows(); ++c) {
            ++valence[static_cast<std::size_t>(cells(c, 0))];
            ++valence[static_cast<std::size_t>(cells(c, 1))];
        }
        for (Eigen::Index i = 0; i < nv; ++i) {
            const int deg = valence[static_cast<std::size_t>(i)];
            if (deg != 2 && deg != 0)
                throw Error(ErrorCode::BoundaryDetected,
                            "vertex " + std::to_string(i) + " has " + std::to_string(deg) +
                                " incident edges (expected 2)");
            if (deg == 0)
                throw Error(ErrorCode::InvalidConfig,
                            "vertex " + std::to_string(i) + " is isolated");
        }
    } else {
        std::map<std::pair<int, int>, int> face_count;
        for (Eigen::Index c = 0; c < cells.rows(); ++c) {
            for (int a = 0; a < 3; ++a) {
                int u = cells(c, a), v = cells(c, (a + 1) % 3);
                if (u > v) std::swap(u, v);
                ++face_count[{u, v}];
            }
        }
        for (const auto& [edge, count] : face_count) {
            if (count != 2)
                throw Error(ErrorCode::BoundaryDetected,
                            "edge (" + std::to_string(edge.first) + "," + std::to_string(edge.second) +
                                ") has " + std::to_string(count) + " cofaces (expected 2)");
        }
        std::vector<int> valence(static_cast<std::size_t>(nv), 0);
        for (Eigen::Index c = 0; c < cells.rows(); ++c)
            for (int a = 0; a < 3; ++a) ++valence[static_cast<std::size_t>(cells(c, a))];
        for (Eigen::Index i = 0; i < nv; ++i)
            if (valence[static_cast<std::size_t>(i)] == 0)
                throw Error(ErrorCode::InvalidConfig, "vertex " + std::to_string(i) + " is isolated");
    }

    label_components(mesh);
    return mesh;
}

EmbeddedMesh extract_component(const EmbeddedMesh& mesh, int component,
                               std::vector<Eigen::Index>* vertex_map) {
    if (component < 0 || component >= mesh.num_components)
        throw Error(ErrorCode::IndexOutOfRange, "no such component");

    std::vector<Eigen::Index> old_to_new(static_cast<std::size_t>(mesh.num_vertices()), -1);
    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) {
        if (mesh.component_labels[static_cast<std::size_t>(i)] == component) {
            old_to_new[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(kept.size());
            kept.push_back(i);
        }
    }
    Eigen::MatrixXd verts(static_cast<Eigen::Index>(kept.size()), mesh.ambient_dim);
    for (std::size_t i = 0; i < kept.size(); ++i) verts.row(static_cast<Eigen::Index>(i)) = mesh.vertices.row(kept[i]);

    std::vector<Eigen::Index> cell_rows;
    for (Eigen::Index c = 0; c < mesh.num_cells(); ++c)
        if (mesh.component_labels[static_cast<std::size_t>(mesh.cells(c, 0))] == component)
            cell_rows.push_back(c);
    Eigen::MatrixXi cells(static_cast<Eigen::Index>(cell_rows.size()), mesh.intrinsic_dim + 1);
    for (std::size_t r = 0; r < cell_rows.size(); ++r)
        for (int a = 0; a <= mesh.intrinsic_dim; ++a)
            cells(static_cast<Eigen::Index>(r), a) =
                static_cast<int>(old_to_new[static_cast<std::size_t>(mesh.cells(cell_rows[r], a))]);

    if (vertex_map) *vertex_map = kept;
    return build_mesh(verts, cells, mesh.ambient_dim);
}

EmbeddedMesh disjoint_union(const EmbeddedMesh& a, const EmbeddedMesh& b) {
    if (a.intrinsic_dim != b.intrinsic_dim || a.ambient_dim != b.ambient_dim)
        throw Error(ErrorCode::InvalidConfig, "disjoint union requires matching dimensions");
    Eigen::MatrixXd verts(a.num_vertices() + b.num_vertices(), a.ambient_dim);
    verts.topRows(a.num_vertices()) = a.vertices;
    verts.bottomRows(b.num_vertices()) = b.vertices;
    Eigen::MatrixXi cells(a.num_cells() + b.num_cells(), a.intrinsic_dim + 1);
    cells.topRows(a.num_cells()) = a.cells;
    cells.bottomRows(b.num_cells()) = b.cells.array() + static_cast<int>(a.num_vertices());
    return build_mesh(verts, cells, a.ambient_dim);
}

} // namespace logsob
