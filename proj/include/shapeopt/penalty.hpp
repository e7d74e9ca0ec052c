#pragma once

#include <cstdint>
#include <vector>

#include "shapeopt/mesh.hpp"

namespace shapeopt {

// Smoothed cutoff H_eps: 1 on {g >= 0}, cubic blend on (-eps, 0), 0 below -eps.
double h_eps(double g, double eps);

// Derivative of h_eps; 0 at the kinks g = 0 and g = -eps (both outer branches
// are flat) and outside the blend interval. Maximum 3/(2 eps) at g = -eps/2.
double h_eps_prime(double g, double eps);

// One realization of the random diffusion field: alpha = 1 + rho * eta with
// eta iid uniform[-1,1], piecewise constant per element.
struct CoefficientSample {
    std::vector<double> eta;  // one value per triangle, in [-1,1]
    double rho = 0.0;
    long long sample_id = 0;

    double alpha(int element) const { return 1.0 + rho * eta[element]; }
};

// Counter-based generation: the draw for (seed, sample_id, element) is a pure
// function of the key, so streams are independent of evaluation order and of
// how many samples are drawn.
CoefficientSample sample_coefficient(const Mesh& mesh, double rho,
                                     std::uint64_t seed, long long sample_id);

namespace detail {
std::uint64_t splitmix64(std::uint64_t x);
double uniform_pm1(std::uint64_t seed, long long sample_id, long long element);
}  // namespace detail

}  // namespace shapeopt
