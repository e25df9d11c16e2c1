#include "logsob/shapes.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace logsob {

namespace {

constexpr double kPi = std::numbers::pi;

void apply_center(Eigen::MatrixXd& verts, const std::vector<double>& center) {
    if (center.empty()) return;
    if (static_cast<Eigen::Index>(center.size()) != verts.cols())
        throw Error(ErrorCode::InvalidConfig, "center offset dimension mismatch");
    for (Eigen::Index j = 0; j < verts.cols(); ++j) verts.col(j).array() += center[static_cast<std::size_t>(j)];
}

EmbeddedMesh make_circle(double r, int resolution, const std::vector<double>& center) {
    const int k = resolution > 0 ? resolution : 1024;
    if (k < 16) throw Error(ErrorCode::UnsupportedSpec, "circle resolution must be >= 16");
    Eigen::MatrixXd verts(k, 2);
    for (int i = 0; i < k; ++i) {
        const double theta = 2.0 * kPi * i / k;
        verts(i, 0) = r * std::cos(theta);
        verts(i, 1) = r * std::sin(theta);
    }
    Eigen::MatrixXi cells(k, 2);
    for (int i = 0; i < k; ++i) {
        cells(i, 0) = i;
        cells(i, 1) = (i + 1) % k;
    }
    apply_center(verts, center);
    return build_mesh(verts, cells, 2);
}

struct IcoMesh {
    std::vector<Eigen::Vector3d> verts;
    std::vector<Eigen::Vector3i> faces;
};

IcoMesh icosahedron() {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    IcoMesh m;
    const double pts[12][3] = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
    for (const auto& p : pts) m.verts.emplace_back(Eigen::Vector3d(p[0], p[1], p[2]).normalized());
    const int fcs[20][3] = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    for (const auto& f : fcs) m.faces.emplace_back(f[0], f[1], f[2]);
    return m;
}

void subdivide_project(IcoMesh& m) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        auto key = std::minmax(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const Eigen::Vector3d p = (m.verts[static_cast<std::size_t>(a)] + m.verts[static_cast<std::size_t>(b)]).normalized();
        m.verts.push_back(p);
        const int idx = static_cast<int>(m.verts.size()) - 1;
        midpoint.emplace(key, idx);
        return idx;
    };
    std::vector<Eigen::Vector3i> faces;
    faces.reserve(m.faces.size() * 4);
    for (const auto& f : m.faces) {
        const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
        faces.emplace_back(f[0], ab, ca);
        faces.emplace_back(f[1], bc, ab);
        faces.emplace_back(f[2], ca, bc);
        faces.emplace_back(ab, bc, ca);
    }
    m.faces = std::move(faces);
}

EmbeddedMesh make_sphere2(double r, int resolution, const std::vector<double>& center) {
    const int target = resolution > 0 ? resolution : 2562;
    if (target < 162) throw Error(ErrorCode::UnsupportedSpec, "sphere resolution must be >= 162");
    IcoMesh m = icosahedron();
    for (int level = 0; level < icosphere_level_for(target); ++level) subdivide_project(m);
    Eigen::MatrixXd verts(static_cast<Eigen::Index>(m.verts.size()), 3);
    for (std::size_t i = 0; i < m.verts.size(); ++i) verts.row(static_cast<Eigen::Index>(i)) = r * m.verts[i].transpose();
    Eigen::MatrixXi cells(static_cast<Eigen::Index>(m.faces.size()), 3);
    for (std::size_t i = 0; i < m.faces.size(); ++i) cells.row(static_cast<Eigen::Index>(i)) = m.faces[i].transpose();
    apply_center(verts, center);
    return build_mesh(verts, cells, 3);
}

// Triangulated (nu x nv) periodic grid; position callback maps (a, b) grid
// indices to ambient coordinates.
template <typename Position>
EmbeddedMesh make_grid_torus(int nu, int nv, int ambient_dim, const std::vector<double>& center,
                             Position&& position) {
    Eigen::MatrixXd verts(static_cast<Eigen::Index>(nu) * nv, ambient_dim);
    for (int a = 0; a < nu; ++a)
        for (int b = 0; b < nv; ++b) verts.row(static_cast<Eigen::Index>(a) * nv + b) = position(a, b);
    Eigen::MatrixXi cells(2 * static_cast<Eigen::Index>(nu) * nv, 3);
    Eigen::Index row = 0;
    auto idx = [&](int a, int b) { return ((a + nu) % nu) * nv + ((b + nv) % nv); };
    for (int a = 0; a < nu; ++a) {
        for (int b = 0; b < nv; ++b) {
            cells.row(row++) << idx(a, b), idx(a + 1, b), idx(a + 1, b + 1);
            cells.row(row++) << idx(a, b), idx(a + 1, b + 1), idx(a, b + 1);
        }
    }
    apply_center(verts, center);
    return build_mesh(verts, cells, ambient_dim);
}

void grid_dims(int target, double aspect, int& nu, int& nv) {
    nu = std::max(8, static_cast<int>(std::lround(std::sqrt(target * aspect))));
    nv = std::max(8, static_cast<int>(std::lround(static_cast<double>(target) / nu)));
}

EmbeddedMesh make_torus3(double major, double minor, int resolution, const std::vector<double>& center) {
    if (minor <= 0 || major <= minor)
        throw Error(ErrorCode::UnsupportedSpec, "torus needs 0 < minor < major");
    int nu, nv;
    grid_dims(resolution > 0 ? resolution : 4096, major / minor, nu, nv);
    return make_grid_torus(nu, nv, 3, center, [&](int a, int b) {
        const double u = 2.0 * kPi * a / nu, v = 2.0 * kPi * b / nv;
        Eigen::RowVector3d p((major + minor * std::cos(v)) * std::cos(u),
                             (major + minor * std::cos(v)) * std::sin(u), minor * std::sin(v));
        return p;
    });
}

EmbeddedMesh make_clifford(double r1, double r2, int resolution, const std::vector<double>& center) {
    int nu, nv;
    grid_dims(resolution > 0 ? resolution : 4096, r1 / r2, nu, nv);
    return make_grid_torus(nu, nv, 4, center, [&](int a, int b) {
        const double u = 2.0 * kPi * a / nu, v = 2.0 * kPi * b / nv;
        Eigen::RowVector4d p(r1 * std::cos(u), r1 * std::sin(u), r2 * std::cos(v), r2 * std::sin(v));
        return p;
    });
}

} // namespace

int icosphere_level_for(int resolution) {
    int level = 0;
    while (10 * (1 << (2 * level)) + 2 < resolution && level < 8) ++level;
    return level;
}

EmbeddedMesh generate_shape(const ShapeSpec& spec) {
    if (spec.kind != ShapeKind::DisjointUnion && spec.radius <= 0)
        throw Error(ErrorCode::UnsupportedSpec, "radius must be positive");
    switch (spec.kind) {
        case ShapeKind::Circle:
            return make_circle(spec.radius, spec.resolution, spec.center);
        case ShapeKind::Sphere2:
            return make_sphere2(spec.radius, spec.resolution, spec.center);
        case ShapeKind::Torus3:
            return make_torus3(spec.radius, spec.radius2, spec.resolution, spec.center);
        case ShapeKind::CliffordTorus4:
            return make_clifford(spec.radius, spec.radius2, spec.resolution, spec.center);
        case ShapeKind::DisjointUnion: {
            if (spec.parts.size() != 2)
                throw Error(ErrorCode::UnsupportedSpec, "disjoint union needs exactly two parts");
            EmbeddedMesh a = generate_shape(spec.parts[0]);
            EmbeddedMesh b = generate_shape(spec.parts[1]);
            if (a.ambient_dim != b.ambient_dim || a.intrinsic_dim != b.intrinsic_dim)
                throw Error(ErrorCode::UnsupportedSpec, "disjoint union parts must share dimensions");
            // Slide the second part along axis 0 until the boxes clear.
            const double shift =
                a.vertices.col(0).maxCoeff() - b.vertices.col(0).minCoeff() + spec.separation_gap;
            EmbeddedMesh b_shifted = b;
            b_shifted.vertices.col(0).array() += shift;
            EmbeddedMesh u = disjoint_union(a, b_shifted);
            if (!spec.center.empty()) {
                apply_center(u.vertices, spec.center);
            }
            return u;
        }
    }
    throw Error(ErrorCode::UnsupportedSpec, "unknown shape kind");
}

ShapeSpec refine_spec(const ShapeSpec& spec, double factor) {
    ShapeSpec fine = spec;
    if (spec.kind == ShapeKind::DisjointUnion) {
        for (auto& part : fine.parts) part = refine_spec(part, factor);
        return fine;
    }
    int base = fine.resolution;
    if (base == 0) {
        switch (fine.kind) {
            case ShapeKind::Circle: base = 1024; break;
            case ShapeKind::Sphere2: base = 2562; break;
            default: base = 4096; break;
        }
    }
    // Circles grow linearly with resolution, everything else by vertex count;
    // a factor of 4 doubles the linear resolution in both cases.
    if (fine.kind == ShapeKind::Circle)
        fine.resolution = static_cast<int>(std::lround(base * std::sqrt(factor)));
    else
        fine.resolution = static_cast<int>(std::lround(base * factor));
    return fine;
}

} // namespace logsob
