#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "shapeopt/mesh.hpp"
#include "shapeopt/penalty.hpp"
#include "shapeopt/sparse.hpp"

namespace shapeopt {

enum class WeightKind { h_eps, one_minus_h_eps };

// Precomputes the shared CSR pattern, element geometry, reference stiffness
// blocks, and scatter maps for one mesh, so repeated assemblies are value-only.
class Assembler {
  public:
    explicit Assembler(const Mesh& mesh);

    const Mesh& mesh() const { return *mesh_; }
    std::shared_ptr<const SparsePattern> pattern() const { return pattern_; }
    double element_area(int t) const { return area_[t]; }

    // alpha-weighted P1 stiffness plus (1/eps) * (1 - H_eps(g))-weighted mass,
    // with symmetric elimination of Dirichlet rows/columns (unit diagonal).
    SparseMatrix assemble_stiffness(const CoefficientSample& sample,
                                    const NodalVector& g, double eps) const;
    // Value-only variant writing into an existing matrix on this pattern.
    void stiffness_values(const CoefficientSample& sample, const NodalVector& g,
                          double eps, SparseMatrix& out) const;

    SparseMatrix assemble_mass() const;  // B1
    SparseMatrix assemble_weighted_mass(const NodalVector& g, double eps,
                                        WeightKind weight) const;
    SparseMatrix assemble_subdomain_mass(const SubdomainSpec& spec) const;  // B3

    // g on the three edge midpoints of element t (P1 interpolation).
    std::array<double, 3> midpoint_values(const NodalVector& g, int t) const;

  private:
    const Mesh* mesh_;
    std::shared_ptr<const SparsePattern> pattern_;
    std::vector<double> area_;
    std::vector<std::array<double, 9>> stiff_local_;  // unweighted element stiffness
    std::vector<std::array<int, 9>> scatter_;         // value-array positions
    std::vector<std::array<std::uint8_t, 9>> bdry_entry_;  // row or col on boundary

    void add_weighted_mass_local(std::vector<double>& values, int t,
                                 const std::array<double, 3>& w, double scale,
                                 bool skip_boundary) const;
};

NodalVector interpolate_nodal(const Mesh& mesh,
                              const std::function<double(double, double)>& func);

}  // namespace shapeopt
