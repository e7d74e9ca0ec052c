#include "shapeopt/mesh.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "shapeopt/io.hpp"

namespace shapeopt {

double Mesh::triangle_area(int t) const {
    const auto& tri = triangles[t];
    const Vec2 a = vertices[tri[0]], b = vertices[tri[1]], c = vertices[tri[2]];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

Vec2 Mesh::centroid(int t) const {
    const auto& tri = triangles[t];
    const Vec2 a = vertices[tri[0]], b = vertices[tri[1]], c = vertices[tri[2]];
    return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

SubdomainSpec SubdomainSpec::square(double half_width, Vec2 c) {
    if (half_width <= 0.0) throw std::invalid_argument("square half_width must be positive");
    return {SubdomainKind::square, half_width, c};
}

SubdomainSpec SubdomainSpec::disk(double radius, Vec2 c) {
    if (radius <= 0.0) throw std::invalid_argument("disk radius must be positive");
    return {SubdomainKind::disk, radius, c};
}

SubdomainSpec SubdomainSpec::none() { return {SubdomainKind::none, 0.0, {0.0, 0.0}}; }

bool SubdomainSpec::contains(Vec2 p) const {
    switch (kind) {
        case SubdomainKind::square:
            return std::abs(p.x - center.x) <= size && std::abs(p.y - center.y) <= size;
        case SubdomainKind::disk: {
            const double dx = p.x - center.x, dy = p.y - center.y;
            return dx * dx + dy * dy <= size * size;
        }
        case SubdomainKind::none:
            return false;
    }
    return false;
}

Mesh build_structured_mesh(int n) {
    if (n < 2) throw std::invalid_argument("build_structured_mesh: need n >= 2");
    Mesh mesh;
    mesh.grid_n = n;
    mesh.vertices.resize(static_cast<size_t>(n) * n);
    mesh.boundary_vertex.resize(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        const double y = -1.0 + 2.0 * i / (n - 1);
        for (int j = 0; j < n; ++j) {
            const double x = -1.0 + 2.0 * j / (n - 1);
            const int v = i * n + j;
            mesh.vertices[v] = {x, y};
            mesh.boundary_vertex[v] = (i == 0 || i == n - 1 || j == 0 || j == n - 1) ? 1 : 0;
        }
    }
    mesh.triangles.reserve(2 * static_cast<size_t>(n - 1) * (n - 1));
    for (int i = 0; i + 1 < n; ++i) {
        for (int j = 0; j + 1 < n; ++j) {
            const int v00 = i * n + j;
            const int v10 = v00 + 1;
            const int v01 = v00 + n;
            const int v11 = v01 + 1;
            // split along the lower-left to upper-right diagonal, both CCW
            mesh.triangles.push_back({v00, v10, v11});
            mesh.triangles.push_back({v00, v11, v01});
        }
    }
    return mesh;
}

bool vertex_in_subdomain(const Mesh& mesh, const SubdomainSpec& spec, int i) {
    if (i < 0 || i >= mesh.n_vertices())
        throw std::invalid_argument("vertex_in_subdomain: index out of range");
    return spec.contains(mesh.vertices[i]);
}

std::array<QuadPoint, 3> element_quadrature(const Mesh& mesh, int t) {
    if (t < 0 || t >= mesh.n_triangles())
        throw std::invalid_argument("element_quadrature: index out of range");
    const auto& tri = mesh.triangles[t];
    const Vec2 a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
    const double w = mesh.triangle_area(t) / 3.0;
    return {{{{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}, w},
             {{0.5 * (b.x + c.x), 0.5 * (b.y + c.y)}, w},
             {{0.5 * (c.x + a.x), 0.5 * (c.y + a.y)}, w}}};
}

std::vector<std::uint8_t> subdomain_vertex_mask(const Mesh& mesh, const SubdomainSpec& spec) {
    std::vector<std::uint8_t> mask(mesh.n_vertices(), 0);
    for (int v = 0; v < mesh.n_vertices(); ++v)
        mask[v] = spec.contains(mesh.vertices[v]) ? 1 : 0;
    return mask;
}

std::vector<std::uint8_t> subdomain_element_mask(const Mesh& mesh, const SubdomainSpec& spec) {
    std::vector<std::uint8_t> mask(mesh.n_triangles(), 0);
    for (int t = 0; t < mesh.n_triangles(); ++t)
        mask[t] = spec.contains(mesh.centroid(t)) ? 1 : 0;
    return mask;
}

void write_mesh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_mesh: cannot open " + path);
    out << "vertices " << mesh.n_vertices() << " triangles " << mesh.n_triangles() << "\n";
    for (const auto& v : mesh.vertices)
        out << format_double(v.x) << " " << format_double(v.y) << "\n";
    for (const auto& t : mesh.triangles)
        out << t[0] << " " << t[1] << " " << t[2] << "\n";
    if (!out) throw std::runtime_error("write_mesh: write failed for " + path);
}

}  // namespace shapeopt
