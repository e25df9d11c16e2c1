#include <doctest.h>

#include "helpers.hpp"
#include "logsob/mesh_io.hpp"

using namespace logsob;
using namespace logsob::test;

namespace {

EmbeddedMesh triangle_loop() {
    Eigen::MatrixXd verts(3, 2);
    verts << 0, 0, 1, 0, 0.5, std::sqrt(3.0) / 2.0;
    Eigen::MatrixXi cells(3, 2);
    cells << 0, 1, 1, 2, 2, 0;
    return build_mesh(verts, cells, 2);
}

EmbeddedMesh octahedron() {
    Eigen::MatrixXd verts(6, 3);
    verts << 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1;
    Eigen::MatrixXi cells(8, 3);
    cells << 0, 2, 4, 2, 1, 4, 1, 3, 4, 3, 0, 4, 2, 0, 5, 1, 2, 5, 3, 1, 5, 0, 3, 5;
    return build_mesh(verts, cells, 3);
}

} // namespace

TEST_CASE("equilateral triangle loop is the smallest closed curve") {
    const EmbeddedMesh mesh = triangle_loop();
    CHECK(mesh.intrinsic_dim == 1);
    CHECK(mesh.num_components == 1);
    CHECK(total_measure(mesh) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("octahedron is a closed surface with one component") {
    const EmbeddedMesh mesh = octahedron();
    CHECK(mesh.intrinsic_dim == 2);
    CHECK(mesh.num_components == 1);
    // Euler characteristic of a sphere
    CHECK(mesh.num_vertices() - 12 + mesh.num_cells() == 2);
}

TEST_CASE("open curve raises BoundaryDetected") {
    Eigen::MatrixXd verts(4, 2);
    verts << 0, 0, 1, 0, 1, 1, 0, 1;
    Eigen::MatrixXi cells(3, 2); // one edge of the square loop removed
    cells << 0, 1, 1, 2, 2, 3;
    CHECK_THROWS_WITH_AS(build_mesh(verts, cells, 2), doctest::Contains("BoundaryDetected"),
                         Error);
}

TEST_CASE("validation errors: degenerate cell and bad index") {
    Eigen::MatrixXd verts(3, 2);
    verts << 0, 0, 1, 0, 1, 0; // vertex 2 duplicates vertex 1
    Eigen::MatrixXi cells(3, 2);
    cells << 0, 1, 1, 2, 2, 0;
    CHECK_THROWS_AS(build_mesh(verts, cells, 2), Error);

    Eigen::MatrixXd verts2(3, 2);
    verts2 << 0, 0, 1, 0, 0.5, 1;
    Eigen::MatrixXi cells2(3, 2);
    cells2 << 0, 1, 1, 7, 2, 0;
    CHECK_THROWS_WITH_AS(build_mesh(verts2, cells2, 2), doctest::Contains("IndexOutOfRange"),
                         Error);
}

TEST_CASE("rebuilding a valid mesh succeeds (idempotent closedness check)") {
    const EmbeddedMesh mesh = sphere_mesh(1.0, 162);
    const EmbeddedMesh again = build_mesh(mesh.vertices, mesh.cells, mesh.ambient_dim);
    CHECK(again.num_components == mesh.num_components);
    CHECK(total_measure(again) == doctest::Approx(total_measure(mesh)).epsilon(1e-15));
}

TEST_CASE("generated circle vertices lie exactly on the circle") {
    const double r = std::sqrt(2.0);
    const EmbeddedMesh mesh = circle_mesh(r, 1024);
    CHECK(mesh.num_vertices() == 1024);
    for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i)
        CHECK(std::abs(mesh.vertices.row(i).norm() - r) < 1e-12);
}

TEST_CASE("icosphere: vertices on the sphere, Euler characteristic 2") {
    const EmbeddedMesh mesh = sphere_mesh(2.0, 2562);
    CHECK(mesh.num_vertices() == 2562);
    for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i)
        CHECK(std::abs(mesh.vertices.row(i).norm() - 2.0) < 1e-12);
    const Eigen::Index edges = mesh.num_cells() * 3 / 2;
    CHECK(mesh.num_vertices() - edges + mesh.num_cells() == 2);
}

TEST_CASE("Clifford torus vertices satisfy |x|^2 = r1^2 + r2^2") {
    const double r = std::sqrt(2.0);
    const EmbeddedMesh mesh = clifford_mesh(r, r, 4096);
    CHECK(mesh.num_vertices() == 4096);
    for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i)
        CHECK(std::abs(mesh.vertices.row(i).squaredNorm() - 4.0) < 1e-12);
}

TEST_CASE("total measure converges to the analytic value") {
    CHECK(std::abs(total_measure(circle_mesh(1.0, 4096)) - 2.0 * kPi) / (2.0 * kPi) < 1e-5);
    // inscribed icosphere area deficit is 1.195e-3 at level 4 (2562 vertices)
    // and shrinks by 4 per level
    CHECK(std::abs(total_measure(sphere_mesh(2.0, 2562)) - 16.0 * kPi) / (16.0 * kPi) < 1.5e-3);
    CHECK(std::abs(total_measure(sphere_mesh(2.0, 10242)) - 16.0 * kPi) / (16.0 * kPi) < 4e-4);

    ShapeSpec spec;
    spec.kind = ShapeKind::DisjointUnion;
    ShapeSpec part;
    part.kind = ShapeKind::Circle;
    part.radius = 1.0;
    part.resolution = 2048;
    spec.parts = {part, part};
    const EmbeddedMesh two = generate_shape(spec);
    CHECK(two.num_components == 2);
    CHECK(std::abs(total_measure(two) - 4.0 * kPi) / (4.0 * kPi) < 1e-5);
}

TEST_CASE("refinement converges with order at least 1.8") {
    auto order = [](double coarse, double fine) { return std::log2(coarse / fine); };

    const double c1 = std::abs(total_measure(circle_mesh(1.0, 512)) - 2.0 * kPi);
    const double c2 = std::abs(total_measure(circle_mesh(1.0, 1024)) - 2.0 * kPi);
    CHECK(order(c1, c2) >= 1.8);

    // one subdivision level halves h
    const double s1 = std::abs(total_measure(sphere_mesh(1.0, 642)) - 4.0 * kPi);
    const double s2 = std::abs(total_measure(sphere_mesh(1.0, 2562)) - 4.0 * kPi);
    CHECK(order(s1, s2) >= 1.8);
}

TEST_CASE("component counts add under disjoint union") {
    const EmbeddedMesh a = circle_mesh(1.0, 64);
    EmbeddedMesh b = circle_mesh(2.0, 64);
    b.vertices.col(0).array() += 10.0;
    const EmbeddedMesh u = disjoint_union(a, b);
    CHECK(u.num_components == a.num_components + b.num_components);

    std::vector<Eigen::Index> vmap;
    const EmbeddedMesh first = extract_component(u, 0, &vmap);
    CHECK(first.num_vertices() == a.num_vertices());
    CHECK(vmap.front() == 0);
}

TEST_CASE("mesh JSON round trip") {
    const EmbeddedMesh mesh = clifford_mesh(1.0, 1.0, 256);
    const EmbeddedMesh back = read_mesh_json(mesh_to_json(mesh));
    CHECK(back.ambient_dim == 4);
    CHECK(back.num_vertices() == mesh.num_vertices());
    CHECK((back.vertices - mesh.vertices).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("OFF writer/reader round trip") {
    const EmbeddedMesh mesh = sphere_mesh(1.0, 162);
    const std::string path = "test_sphere_tmp.off";
    write_mesh(mesh, path);
    const EmbeddedMesh back = read_mesh(path);
    CHECK(back.num_vertices() == mesh.num_vertices());
    CHECK((back.vertices - mesh.vertices).cwiseAbs().maxCoeff() < 1e-15);
    std::remove(path.c_str());
}
