#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace shapeopt {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Structured triangulation of the hold-all domain D = (-1,1)^2.
// grid_n vertices per side; every cell split along the lower-left to
// upper-right diagonal, so n_triangles = 2*(grid_n-1)^2.
struct Mesh {
    int grid_n = 0;
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;  // counterclockwise
    std::vector<std::uint8_t> boundary_vertex;  // 1 iff |x|=1 or |y|=1

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }
    double triangle_area(int t) const;
    Vec2 centroid(int t) const;
};

enum class SubdomainKind { square, disk, none };

// Observation / constraint region O. Membership uses closed sets so that
// vertex masks are stable when O aligns with grid lines.
struct SubdomainSpec {
    SubdomainKind kind = SubdomainKind::none;
    double size = 0.0;  // half-width (square) or radius (disk)
    Vec2 center{0.0, 0.0};

    static SubdomainSpec square(double half_width, Vec2 c = {0.0, 0.0});
    static SubdomainSpec disk(double radius, Vec2 c = {0.0, 0.0});
    static SubdomainSpec none();

    bool contains(Vec2 p) const;
};

Mesh build_structured_mesh(int n);

bool vertex_in_subdomain(const Mesh& mesh, const SubdomainSpec& spec, int i);

struct QuadPoint {
    Vec2 point;
    double weight;
};

// Edge-midpoint rule: three points, weight area/3 each; exact for degree <= 2.
std::array<QuadPoint, 3> element_quadrature(const Mesh& mesh, int t);

// Vertex mask (closed membership) and element mask (centroid rule) for O.
std::vector<std::uint8_t> subdomain_vertex_mask(const Mesh& mesh, const SubdomainSpec& spec);
std::vector<std::uint8_t> subdomain_element_mask(const Mesh& mesh, const SubdomainSpec& spec);

// Plain-text export: "vertices <n_v> triangles <n_t>" header, vertex rows, index rows.
void write_mesh(const Mesh& mesh, const std::string& path);

}  // namespace shapeopt
