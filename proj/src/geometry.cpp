#include "logsob/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <map>
#include <set>

namespace logsob {

namespace {

int sym_index(int n, int a, int b) {
    if (a > b) std::swap(a, b);
    if (n == 1) return 0;
    // n == 2: [ (0,0), (0,1), (1,1) ]
    return a + b;
}

std::vector<std::vector<int>> one_ring(const EmbeddedMesh& mesh) {
    std::vector<std::set<int>> adj(static_cast<std::size_t>(mesh.num_vertices()));
    const int k = mesh.intrinsic_dim + 1;
    for (Eigen::Index c = 0; c < mesh.num_cells(); ++c) {
        for (int a = 0; a < k; ++a) {
            for (int b = 0; b < k; ++b) {
                if (a != b) adj[static_cast<std::size_t>(mesh.cells(c, a))].insert(mesh.cells(c, b));
            }
        }
    }
    std::vector<std::vector<int>> ring(adj.size());
    for (std::size_t i = 0; i < adj.size(); ++i) ring[i].assign(adj[i].begin(), adj[i].end());
    return ring;
}

std::vector<int> k_ring(const std::vector<std::vector<int>>& ring1, int center, int depth) {
    std::set<int> seen{center};
    std::vector<int> frontier{center};
    for (int d = 0; d < depth; ++d) {
        std::vector<int> next;
        for (int v : frontier) {
            for (int w : ring1[static_cast<std::size_t>(v)]) {
                if (seen.insert(w).second) next.push_back(w);
            }
        }
        frontier = std::move(next);
    }
    seen.erase(center);
    return {seen.begin(), seen.end()};
}

void build_cells(const EmbeddedMesh& mesh, GeometryCache& cache) {
    const int n = mesh.intrinsic_dim;
    const Eigen::Index nc = mesh.num_cells();
    cache.cell_measures.resize(nc);
    cache.cell_shape_gradients.resize(static_cast<std::size_t>(nc));
    cache.cell_vertex_share.resize(nc, n + 1);
    for (Eigen::Index c = 0; c < nc; ++c) {
        cache.cell_measures(c) = cell_measure(mesh, c);
        Eigen::MatrixXd grads(mesh.ambient_dim, n + 1);
        if (n == 1) {
            const Eigen::VectorXd e =
                mesh.vertices.row(mesh.cells(c, 1)) - mesh.vertices.row(mesh.cells(c, 0));
            grads.col(1) = e / e.squaredNorm();
            grads.col(0) = -grads.col(1);
            cache.cell_vertex_share.row(c).setConstant(0.5 * cache.cell_measures(c));
        } else {
            const Eigen::VectorXd e1 =
                mesh.vertices.row(mesh.cells(c, 1)) - mesh.vertices.row(mesh.cells(c, 0));
            const Eigen::VectorXd e2 =
                mesh.vertices.row(mesh.cells(c, 2)) - mesh.vertices.row(mesh.cells(c, 0));
            Eigen::Matrix2d gram;
            gram << e1.squaredNorm(), e1.dot(e2), e1.dot(e2), e2.squaredNorm();
            const Eigen::Matrix2d gram_inv = gram.inverse();
            Eigen::MatrixXd edges(mesh.ambient_dim, 2);
            edges.col(0) = e1;
            edges.col(1) = e2;
            const Eigen::MatrixXd duals = edges * gram_inv; // grad of barycentric coords 1, 2
            grads.col(1) = duals.col(0);
            grads.col(2) = duals.col(1);
            grads.col(0) = -duals.col(0) - duals.col(1);

            // mixed-Voronoi corner areas: circumcentric for non-obtuse
            // triangles, area/2 at an obtuse corner and area/4 elsewhere;
            // the three corner shares always sum to the triangle area
            const double area = cache.cell_measures(c);
            double cots[3], sq[3];
            int obtuse = -1;
            for (int corner = 0; corner < 3; ++corner) {
                const int a = mesh.cells(c, corner);
                const int b = mesh.cells(c, (corner + 1) % 3);
                const int d = mesh.cells(c, (corner + 2) % 3);
                const Eigen::VectorXd u = mesh.vertices.row(b) - mesh.vertices.row(a);
                const Eigen::VectorXd v = mesh.vertices.row(d) - mesh.vertices.row(a);
                cots[corner] = u.dot(v) / (2.0 * area);
                sq[corner] = (mesh.vertices.row(b) - mesh.vertices.row(d)).squaredNorm();
                if (cots[corner] < 0.0) obtuse = corner;
            }
            for (int corner = 0; corner < 3; ++corner) {
                if (obtuse >= 0) {
                    cache.cell_vertex_share(c, corner) = (corner == obtuse) ? 0.5 * area : 0.25 * area;
                } else {
                    // opposite edges of this corner are indexed corner+1, corner+2
                    cache.cell_vertex_share(c, corner) =
                        0.125 * (sq[(corner + 1) % 3] * cots[(corner + 1) % 3] +
                                 sq[(corner + 2) % 3] * cots[(corner + 2) % 3]);
                }
            }
        }
        cache.cell_shape_gradients[static_cast<std::size_t>(c)] = std::move(grads);
    }
}

void build_laplace_edges(const EmbeddedMesh& mesh, GeometryCache& cache) {
    std::map<std::pair<int, int>, double> weights;
    if (mesh.intrinsic_dim == 1) {
        for (Eigen::Index c = 0; c < mesh.num_cells(); ++c) {
            auto key = std::minmax(mesh.cells(c, 0), mesh.cells(c, 1));
            weights[key] += 1.0 / cache.cell_measures(c);
        }
    } else {
        for (Eigen::Index c = 0; c < mesh.num_cells(); ++c) {
            for (int corner = 0; corner < 3; ++corner) {
                const int a = mesh.cells(c, corner);
                const int b = mesh.cells(c, (corner + 1) % 3);
                const int d = mesh.cells(c, (corner + 2) % 3);
                const Eigen::VectorXd u = mesh.vertices.row(b) - mesh.vertices.row(a);
                const Eigen::VectorXd v = mesh.vertices.row(d) - mesh.vertices.row(a);
                const double cot = u.dot(v) / (2.0 * cache.cell_measures(c));
                weights[std::minmax(b, d)] += 0.5 * cot;
            }
        }
    }
    cache.laplace_edges.reserve(weights.size());
    for (const auto& [edge, w] : weights) cache.laplace_edges.push_back({edge.first, edge.second, w});
}

void build_frames(const EmbeddedMesh& mesh, const std::vector<std::vector<int>>& ring1,
                  GeometryCache& cache) {
    const int n = mesh.intrinsic_dim;
    const int N = mesh.ambient_dim;
    const int m = N - n;
    const Eigen::Index nv = mesh.num_vertices();
    cache.tangent_basis.resize(static_cast<std::size_t>(nv));
    cache.normal_basis.resize(static_cast<std::size_t>(nv));

    for (Eigen::Index i = 0; i < nv; ++i) {
        Eigen::MatrixXd T(N, n), Nb(N, m);
        if (n == 1) {
            const auto& nbrs = ring1[static_cast<std::size_t>(i)];
            // closed curve: exactly two neighbors; central difference tangent
            const Eigen::VectorXd t =
                (mesh.vertices.row(nbrs[1]) - mesh.vertices.row(nbrs[0])).normalized();
            T.col(0) = t;
            // complete to an orthonormal basis of the normal space
            int filled = 0;
            for (int k = 0; k < N && filled < m; ++k) {
                Eigen::VectorXd v = Eigen::VectorXd::Unit(N, k);
                v -= t * t.dot(v);
                for (int c = 0; c < filled; ++c) v -= Nb.col(c) * Nb.col(c).dot(v);
                const double norm = v.norm();
                if (norm > 0.25) Nb.col(filled++) = v / norm;
            }
            if (filled < m) throw Error(ErrorCode::IllConditionedFit, "normal frame completion failed");
        } else {
            const auto& nbrs = ring1[static_cast<std::size_t>(i)];
            Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(N, N);
            for (int j : nbrs) {
                const Eigen::VectorXd d = (mesh.vertices.row(j) - mesh.vertices.row(i)).normalized();
                cov += d * d.transpose();
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
            // ascending eigenvalues: small = normal directions, large = tangent
            Nb = eig.eigenvectors().leftCols(m);
            T = eig.eigenvectors().rightCols(n);
            if (eig.eigenvalues()(m) < 1.5 * std::max(eig.eigenvalues()(m - 1), 0.0))
                throw Error(ErrorCode::IllConditionedFit,
                            "tangent plane estimate degenerate at vertex " + std::to_string(i));
        }
        cache.tangent_basis[static_cast<std::size_t>(i)] = std::move(T);
        cache.normal_basis[static_cast<std::size_t>(i)] = std::move(Nb);
    }
}

void build_fit_stencils(const EmbeddedMesh& mesh, const std::vector<std::vector<int>>& ring1,
                        GeometryCache& cache) {
    const int n = mesh.intrinsic_dim;
    const int ncoef = 1 + n + n * (n + 1) / 2;
    const Eigen::Index nv = mesh.num_vertices();
    cache.fit_stencils.resize(static_cast<std::size_t>(nv));

    for (Eigen::Index i = 0; i < nv; ++i) {
        const int valence = static_cast<int>(ring1[static_cast<std::size_t>(i)].size());
        int depth = 2;
        if (valence < 5 || static_cast<int>(k_ring(ring1, static_cast<int>(i), 2).size()) < ncoef + 2)
            depth = 3;
        std::vector<int> nbrs = k_ring(ring1, static_cast<int>(i), depth);
        if (static_cast<int>(nbrs.size()) < ncoef)
            throw Error(ErrorCode::IllConditionedFit,
                        "stencil too small at vertex " + std::to_string(i));

        const auto& T = cache.tangent_basis[static_cast<std::size_t>(i)];
        const Eigen::Index deg = static_cast<Eigen::Index>(nbrs.size());
        Eigen::MatrixXd xi(deg, n);
        Eigen::VectorXd dist(deg);
        for (Eigen::Index j = 0; j < deg; ++j) {
            const Eigen::VectorXd d =
                mesh.vertices.row(nbrs[static_cast<std::size_t>(j)]) - mesh.vertices.row(i);
            xi.row(j) = (T.transpose() * d).transpose();
            dist(j) = d.norm();
        }
        const double scale = dist.mean();
        Eigen::MatrixXd design(deg, ncoef);
        for (Eigen::Index j = 0; j < deg; ++j) {
            const Eigen::VectorXd x = xi.row(j) / scale;
            design(j, 0) = 1.0;
            for (int a = 0; a < n; ++a) design(j, 1 + a) = x(a);
            int col = 1 + n;
            for (int a = 0; a < n; ++a) {
                for (int b = a; b < n; ++b) {
                    design(j, col++) = (a == b) ? 0.5 * x(a) * x(a) : x(a) * x(b);
                }
            }
        }
        Eigen::VectorXd sqw(deg);
        for (Eigen::Index j = 0; j < deg; ++j) sqw(j) = 1.0 / std::sqrt(std::max(dist(j), 1e-300));
        const Eigen::MatrixXd weighted = sqw.asDiagonal() * design;
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(weighted);
        if (qr.rank() < ncoef)
            throw Error(ErrorCode::IllConditionedFit,
                        "rank-deficient quadric fit at vertex " + std::to_string(i));
        Eigen::MatrixXd solve = qr.solve(Eigen::MatrixXd(sqw.asDiagonal()));
        // undo the coordinate scaling: b /= s, Q /= s^2
        for (int a = 0; a < n; ++a) solve.row(1 + a) /= scale;
        for (int q = 0; q < n * (n + 1) / 2; ++q) solve.row(1 + n + q) /= scale * scale;

        FitStencil st;
        st.neighbors = std::move(nbrs);
        st.solve = std::move(solve);
        cache.fit_stencils[static_cast<std::size_t>(i)] = std::move(st);
    }
}

Eigen::MatrixXd coeffs_to_sym(int n, const Eigen::VectorXd& coeffs) {
    Eigen::MatrixXd Q(n, n);
    int col = 1 + n;
    for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) {
            Q(a, b) = coeffs(col);
            Q(b, a) = coeffs(col);
            ++col;
        }
    }
    return Q;
}

} // namespace

Eigen::VectorXd fit_quadric(const Eigen::MatrixXd& xi, const Eigen::VectorXd& values,
                            const Eigen::VectorXd& weights) {
    const int n = static_cast<int>(xi.cols());
    const int ncoef = 1 + n + n * (n + 1) / 2;
    const Eigen::Index deg = xi.rows();
    if (deg < ncoef) throw Error(ErrorCode::IllConditionedFit, "not enough samples for quadric fit");
    Eigen::MatrixXd design(deg, ncoef);
    for (Eigen::Index j = 0; j < deg; ++j) {
        design(j, 0) = 1.0;
        for (int a = 0; a < n; ++a) design(j, 1 + a) = xi(j, a);
        int col = 1 + n;
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b)
                design(j, col++) = (a == b) ? 0.5 * xi(j, a) * xi(j, a) : xi(j, a) * xi(j, b);
    }
    const Eigen::VectorXd sqw = weights.cwiseMax(0.0).cwiseSqrt();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sqw.asDiagonal() * design);
    if (qr.rank() < ncoef) throw Error(ErrorCode::IllConditionedFit, "rank-deficient quadric fit");
    return qr.solve(sqw.cwiseProduct(values));
}

GeometryCache build_geometry_cache(const EmbeddedMesh& mesh) {
    GeometryCache cache;
    cache.mesh = &mesh;
    cache.n = mesh.intrinsic_dim;
    cache.m = mesh.codim();

    const Eigen::Index nv = mesh.num_vertices();
    const int n = cache.n;
    const int m = cache.m;

    build_cells(mesh, cache);

    cache.dual_measure = ScalarField::Zero(nv);
    cache.hat_measure = ScalarField::Zero(nv);
    for (Eigen::Index c = 0; c < mesh.num_cells(); ++c) {
        for (int a = 0; a <= n; ++a) {
            cache.dual_measure(mesh.cells(c, a)) += cache.cell_vertex_share(c, a);
            cache.hat_measure(mesh.cells(c, a)) += cache.cell_measures(c) / (n + 1);
        }
    }

    build_laplace_edges(mesh, cache);

    const auto ring1 = one_ring(mesh);
    build_frames(mesh, ring1, cache);
    build_fit_stencils(mesh, ring1, cache);

    // mean curvature: Laplace-Beltrami applied to each coordinate
    cache.mean_curvature = AmbientField::Zero(nv, mesh.ambient_dim);
    for (const auto& e : cache.laplace_edges) {
        const Eigen::RowVectorXd d = mesh.vertices.row(e.j) - mesh.vertices.row(e.i);
        cache.mean_curvature.row(e.i) += e.weight * d;
        cache.mean_curvature.row(e.j) -= e.weight * d;
    }
    for (Eigen::Index i = 0; i < nv; ++i) cache.mean_curvature.row(i) /= cache.dual_measure(i);

    // second fundamental form by quadric fit of the normal coordinates
    cache.second_fundamental.resize(static_cast<std::size_t>(nv));
    cache.ii_trace_defect.resize(nv);
    const int nsym = cache.sym_entries();
    for (Eigen::Index i = 0; i < nv; ++i) {
        const auto& st = cache.fit_stencils[static_cast<std::size_t>(i)];
        const auto& Nb = cache.normal_basis[static_cast<std::size_t>(i)];
        const Eigen::Index deg = static_cast<Eigen::Index>(st.neighbors.size());
        Eigen::MatrixXd targets(deg, m);
        for (Eigen::Index j = 0; j < deg; ++j) {
            const Eigen::VectorXd d =
                mesh.vertices.row(st.neighbors[static_cast<std::size_t>(j)]) - mesh.vertices.row(i);
            targets.row(j) = (Nb.transpose() * d).transpose();
        }
        const Eigen::MatrixXd coeffs = st.solve * targets; // ncoef x m
        Eigen::MatrixXd ii(mesh.ambient_dim, nsym);
        for (int s = 0; s < nsym; ++s) ii.col(s) = Nb * coeffs.row(1 + n + s).transpose();
        // columns are ordered [Q_11, (Q_12,) Q_22]: fix the diagonal picks
        Eigen::VectorXd trace = Eigen::VectorXd::Zero(mesh.ambient_dim);
        for (int a = 0; a < n; ++a) trace += ii.col(sym_index(n, a, a));
        cache.ii_trace_defect(i) = (trace.transpose() - cache.mean_curvature.row(i)).norm();
        cache.second_fundamental[static_cast<std::size_t>(i)] = std::move(ii);
    }

    // frame orthonormality diagnostic
    for (Eigen::Index i = 0; i < nv; ++i) {
        Eigen::MatrixXd frame(mesh.ambient_dim, n + m);
        frame.leftCols(n) = cache.tangent_basis[static_cast<std::size_t>(i)];
        frame.rightCols(m) = cache.normal_basis[static_cast<std::size_t>(i)];
        const double dev = (frame.transpose() * frame - Eigen::MatrixXd::Identity(n + m, n + m))
                               .cwiseAbs()
                               .maxCoeff();
        cache.max_frame_deviation = std::max(cache.max_frame_deviation, dev);
    }

    const MeshScale scale = mesh_scale(mesh);
    cache.h_max = scale.max_edge;
    cache.h_mean = scale.mean_edge;
    return cache;
}

AmbientField gradient(const GeometryCache& cache, const ScalarField& f) {
    const EmbeddedMesh& mesh = *cache.mesh;
    const int n = cache.n;
    AmbientField grad = AmbientField::Zero(mesh.num_vertices(), mesh.ambient_dim);
    for (Eigen::Index c = 0; c < mesh.num_cells(); ++c) {
        const auto& shape = cache.cell_shape_gradients[static_cast<std::size_t>(c)];
        Eigen::VectorXd g = Eigen::VectorXd::Zero(mesh.ambient_dim);
        for (int a = 0; a <= n; ++a) g += f(mesh.cells(c, a)) * shape.col(a);
        for (int a = 0; a <= n; ++a)
            grad.row(mesh.cells(c, a)) += cache.cell_vertex_share(c, a) * g.transpose();
    }
    for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) {
        const auto& T = cache.tangent_basis[static_cast<std::size_t>(i)];
        grad.row(i) = (T * (T.transpose() * (grad.row(i).transpose() / cache.dual_measure(i)))).transpose();
    }
    return grad;
}

ScalarField divergence(const GeometryCache& cache, const AmbientField& V) {
    const EmbeddedMesh& mesh = *cache.mesh;
    const int n = cache.n;
    const AmbientField Vt = tangential_part(cache, V);
    ScalarField div = ScalarField::Zero(mesh.num_vertices());
    for (Eigen::Index c = 0; c < mesh.num_cells(); ++c) {
        const auto& shape = cache.cell_shape_gradients[static_cast<std::size_t>(c)];
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(mesh.ambient_dim);
        for (int a = 0; a <= n; ++a) mean += Vt.row(mesh.cells(c, a)).transpose();
        mean /= (n + 1);
        for (int a = 0; a <= n; ++a)
            div(mesh.cells(c, a)) -= cache.cell_measures(c) * mean.dot(shape.col(a));
    }
    return div.cwiseQuotient(cache.hat_measure);
}

ScalarField laplace_beltrami(const GeometryCache& cache, const ScalarField& f) {
    ScalarField out = ScalarField::Zero(cache.num_vertices());
    for (const auto& e : cache.laplace_edges) {
        const double d = e.weight * (f(e.j) - f(e.i));
        out(e.i) += d;
        out(e.j) -= d;
    }
    return out.cwiseQuotient(cache.dual_measure);
}

AmbientField tangential_part(const GeometryCache& cache, const AmbientField& V) {
    AmbientField out(V.rows(), V.cols());
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
        const auto& T = cache.tangent_basis[static_cast<std::size_t>(i)];
        out.row(i) = (T * (T.transpose() * V.row(i).transpose())).transpose();
    }
    return out;
}

AmbientField normal_part(const GeometryCache& cache, const AmbientField& V) {
    return V - tangential_part(cache, V);
}

std::vector<Eigen::MatrixXd> hessian(const GeometryCache& cache, const ScalarField& u,
                                     ScalarField* raw_trace_defect) {
    const int n = cache.n;
    const Eigen::Index nv = cache.num_vertices();
    const ScalarField lap = laplace_beltrami(cache, u);
    std::vector<Eigen::MatrixXd> hess(static_cast<std::size_t>(nv));
    if (raw_trace_defect) raw_trace_defect->resize(nv);
    for (Eigen::Index i = 0; i < nv; ++i) {
        const auto& st = cache.fit_stencils[static_cast<std::size_t>(i)];
        Eigen::VectorXd targets(static_cast<Eigen::Index>(st.neighbors.size()));
        for (std::size_t j = 0; j < st.neighbors.size(); ++j)
            targets(static_cast<Eigen::Index>(j)) = u(st.neighbors[j]) - u(i);
        const Eigen::VectorXd coeffs = st.solve * targets;
        Eigen::MatrixXd Q = coeffs_to_sym(n, coeffs);
        const double defect = (lap(i) - Q.trace()) / n;
        Q += defect * Eigen::MatrixXd::Identity(n, n);
        if (raw_trace_defect) (*raw_trace_defect)(i) = std::abs(defect * n);
        hess[static_cast<std::size_t>(i)] = std::move(Q);
    }
    return hess;
}

Eigen::MatrixXd ii_contract(const GeometryCache& cache, Eigen::Index vertex,
                            const Eigen::VectorXd& y) {
    const int n = cache.n;
    const auto& ii = cache.second_fundamental[static_cast<std::size_t>(vertex)];
    Eigen::MatrixXd out(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
            const double v = ii.col(sym_index(n, a, b)).dot(y);
            out(a, b) = v;
            out(b, a) = v;
        }
    return out;
}

double integrate_dot_grad(const GeometryCache& cache, const AmbientField& V, const ScalarField& f) {
    const EmbeddedMesh& mesh = *cache.mesh;
    const int n = cache.n;
    const AmbientField Vt = tangential_part(cache, V);
    double total = 0.0;
    for (Eigen::Index c = 0; c < mesh.num_cells(); ++c) {
        const auto& shape = cache.cell_shape_gradients[static_cast<std::size_t>(c)];
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(mesh.ambient_dim);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(mesh.ambient_dim);
        for (int a = 0; a <= n; ++a) {
            mean += Vt.row(mesh.cells(c, a)).transpose();
            g += f(mesh.cells(c, a)) * shape.col(a);
        }
        mean /= (n + 1);
        total += cache.cell_measures(c) * mean.dot(g);
    }
    return total;
}

} // namespace logsob
