#include "shapeopt/assembly.hpp"

#include <algorithm>
#include <stdexcept>

namespace shapeopt {

Assembler::Assembler(const Mesh& mesh) : mesh_(&mesh) {
    const int nv = mesh.n_vertices();
    const int nt = mesh.n_triangles();

    // shared CSR pattern from the vertex adjacency
    std::vector<std::vector<int>> adj(nv);
    for (int v = 0; v < nv; ++v) adj[v].push_back(v);
    for (const auto& tri : mesh.triangles)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                if (a != b) adj[tri[a]].push_back(tri[b]);
    auto pattern = std::make_shared<SparsePattern>();
    pattern->n = nv;
    pattern->row_ptr.resize(nv + 1, 0);
    for (int v = 0; v < nv; ++v) {
        auto& row = adj[v];
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
        pattern->row_ptr[v + 1] = pattern->row_ptr[v] + static_cast<int>(row.size());
    }
    pattern->col_idx.reserve(pattern->row_ptr[nv]);
    for (int v = 0; v < nv; ++v)
        pattern->col_idx.insert(pattern->col_idx.end(), adj[v].begin(), adj[v].end());
    pattern_ = std::move(pattern);

    area_.resize(nt);
    stiff_local_.resize(nt);
    scatter_.resize(nt);
    bdry_entry_.resize(nt);
    for (int t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangles[t];
        const Vec2 p0 = mesh.vertices[tri[0]];
        const Vec2 p1 = mesh.vertices[tri[1]];
        const Vec2 p2 = mesh.vertices[tri[2]];
        const double area = 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p1.y - p0.y) * (p2.x - p0.x));
        if (area <= 0.0) throw std::invalid_argument("Assembler: nonpositive triangle area");
        area_[t] = area;
        // gradient coefficients: grad(lambda_a) = (b_a, c_a) / (2 area)
        const double bb[3] = {p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
        const double cc[3] = {p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                stiff_local_[t][3 * a + b] = (bb[a] * bb[b] + cc[a] * cc[b]) / (4.0 * area);
                const int pos = pattern_->find(tri[a], tri[b]);
                scatter_[t][3 * a + b] = pos;
                bdry_entry_[t][3 * a + b] =
                    (mesh.boundary_vertex[tri[a]] || mesh.boundary_vertex[tri[b]]) ? 1 : 0;
            }
    }
}

std::array<double, 3> Assembler::midpoint_values(const NodalVector& g, int t) const {
    const auto& tri = mesh_->triangles[t];
    return {0.5 * (g[tri[0]] + g[tri[1]]),
            0.5 * (g[tri[1]] + g[tri[2]]),
            0.5 * (g[tri[2]] + g[tri[0]])};
}

void Assembler::add_weighted_mass_local(std::vector<double>& values, int t,
                                        const std::array<double, 3>& w, double scale,
                                        bool skip_boundary) const {
    // midpoint-rule element mass with weights w on edges (0,1), (1,2), (2,0)
    const double s = scale * area_[t] / 12.0;
    const double m[9] = {s * (w[0] + w[2]), s * w[0],          s * w[2],
                         s * w[0],          s * (w[0] + w[1]), s * w[1],
                         s * w[2],          s * w[1],          s * (w[1] + w[2])};
    for (int e = 0; e < 9; ++e) {
        if (skip_boundary && bdry_entry_[t][e]) continue;
        values[scatter_[t][e]] += m[e];
    }
}

void Assembler::stiffness_values(const CoefficientSample& sample, const NodalVector& g,
                                 double eps, SparseMatrix& out) const {
    if (eps <= 0.0) throw std::invalid_argument("assemble_stiffness: eps must be positive");
    if (static_cast<int>(g.size()) != mesh_->n_vertices())
        throw std::invalid_argument("assemble_stiffness: g has wrong length");
    if (static_cast<int>(sample.eta.size()) != mesh_->n_triangles())
        throw std::invalid_argument("assemble_stiffness: sample has wrong length");
    if (out.pattern != pattern_) out = make_matrix(pattern_, true);

    auto& values = out.values;
    std::fill(values.begin(), values.end(), 0.0);
    const double inv_eps = 1.0 / eps;
    for (int t = 0; t < mesh_->n_triangles(); ++t) {
        const double alpha = sample.alpha(t);
        for (int e = 0; e < 9; ++e) {
            if (bdry_entry_[t][e]) continue;
            values[scatter_[t][e]] += alpha * stiff_local_[t][e];
        }
        const auto gm = midpoint_values(g, t);
        const std::array<double, 3> w = {1.0 - h_eps(gm[0], eps),
                                         1.0 - h_eps(gm[1], eps),
                                         1.0 - h_eps(gm[2], eps)};
        if (w[0] != 0.0 || w[1] != 0.0 || w[2] != 0.0)
            add_weighted_mass_local(values, t, w, inv_eps, /*skip_boundary=*/true);
    }
    // unit diagonal on eliminated rows keeps the operator SPD
    for (int v = 0; v < mesh_->n_vertices(); ++v)
        if (mesh_->boundary_vertex[v]) values[pattern_->find(v, v)] = 1.0;
    out.symmetric = true;
}

SparseMatrix Assembler::assemble_stiffness(const CoefficientSample& sample,
                                           const NodalVector& g, double eps) const {
    SparseMatrix A = make_matrix(pattern_, true);
    stiffness_values(sample, g, eps, A);
    return A;
}

SparseMatrix Assembler::assemble_mass() const {
    SparseMatrix M = make_matrix(pattern_, true);
    const std::array<double, 3> ones = {1.0, 1.0, 1.0};
    for (int t = 0; t < mesh_->n_triangles(); ++t)
        add_weighted_mass_local(M.values, t, ones, 1.0, false);
    return M;
}

SparseMatrix Assembler::assemble_weighted_mass(const NodalVector& g, double eps,
                                               WeightKind weight) const {
    if (eps <= 0.0) throw std::invalid_argument("assemble_weighted_mass: eps must be positive");
    if (static_cast<int>(g.size()) != mesh_->n_vertices())
        throw std::invalid_argument("assemble_weighted_mass: g has wrong length");
    SparseMatrix M = make_matrix(pattern_, true);
    for (int t = 0; t < mesh_->n_triangles(); ++t) {
        const auto gm = midpoint_values(g, t);
        std::array<double, 3> w;
        for (int q = 0; q < 3; ++q) {
            const double h = h_eps(gm[q], eps);
            w[q] = (weight == WeightKind::h_eps) ? h : 1.0 - h;
        }
        add_weighted_mass_local(M.values, t, w, 1.0, false);
    }
    return M;
}

SparseMatrix Assembler::assemble_subdomain_mass(const SubdomainSpec& spec) const {
    if (spec.kind == SubdomainKind::none)
        throw std::invalid_argument("assemble_subdomain_mass: subdomain kind is none");
    SparseMatrix M = make_matrix(pattern_, true);
    const std::array<double, 3> ones = {1.0, 1.0, 1.0};
    for (int t = 0; t < mesh_->n_triangles(); ++t)
        if (spec.contains(mesh_->centroid(t)))
            add_weighted_mass_local(M.values, t, ones, 1.0, false);
    return M;
}

NodalVector interpolate_nodal(const Mesh& mesh,
                              const std::function<double(double, double)>& func) {
    NodalVector v(mesh.n_vertices());
    for (int i = 0; i < mesh.n_vertices(); ++i)
        v[i] = func(mesh.vertices[i].x, mesh.vertices[i].y);
    return v;
}

}  // namespace shapeopt
