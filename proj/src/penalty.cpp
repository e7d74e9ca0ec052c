#include "shapeopt/penalty.hpp"

#include <stdexcept>

namespace shapeopt {

double h_eps(double g, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("h_eps: eps must be positive");
    if (g >= 0.0) return 1.0;
    if (g <= -eps) return 0.0;
    return (eps - 2.0 * g) * (g + eps) * (g + eps) / (eps * eps * eps);
}

double h_eps_prime(double g, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("h_eps_prime: eps must be positive");
    if (g >= 0.0 || g <= -eps) return 0.0;
    return -6.0 * g * (g + eps) / (eps * eps * eps);
}

namespace detail {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double uniform_pm1(std::uint64_t seed, long long sample_id, long long element) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ (static_cast<std::uint64_t>(sample_id) * 0xD1342543DE82EF95ULL));
    h = splitmix64(h ^ (static_cast<std::uint64_t>(element) * 0xAF251AF3B0F025B5ULL));
    // 53-bit mantissa in [0,1), mapped to [-1,1)
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
}

}  // namespace detail

CoefficientSample sample_coefficient(const Mesh& mesh, double rho,
                                     std::uint64_t seed, long long sample_id) {
    if (rho < 0.0 || rho >= 1.0)
        throw std::invalid_argument("sample_coefficient: need 0 <= rho < 1");
    CoefficientSample s;
    s.rho = rho;
    s.sample_id = sample_id;
    s.eta.resize(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t)
        s.eta[t] = detail::uniform_pm1(seed, sample_id, t);
    return s;
}

}  // namespace shapeopt
