#include "shapeopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace shapeopt {

NodalVector descent_direction(DirectionMode mode, const std::vector<SampleSolution>& samples,
                              const NodalVector& g, const NodalVector& u_d, double eps) {
    if (samples.empty()) throw std::invalid_argument("descent_direction: no samples");
    const size_t n = g.size();
    std::vector<NodalVector> densities(samples.size());
    for (size_t s = 0; s < samples.size(); ++s) {
        const NodalVector& u = samples[s].u;
        const NodalVector& z = samples[s].z;
        NodalVector& dens = densities[s];
        dens.resize(n);
        switch (mode) {
            case DirectionMode::full:
                for (size_t v = 0; v < n; ++v)
                    dens[v] = h_eps_prime(g[v], eps) * u[v] * z[v];
                break;
            case DirectionMode::simplified:
                for (size_t v = 0; v < n; ++v) dens[v] = u[v] * z[v];
                break;
            case DirectionMode::reduced:
                for (size_t v = 0; v < n; ++v) {
                    const double r = u[v] - u_d[v];
                    dens[v] = 0.5 * r * r + u[v] * z[v] / eps;
                }
                break;
        }
    }
    NodalVector d = mc_expect(densities);
    const double scale = (mode == DirectionMode::reduced) ? -1.0 : -1.0 / eps;
    for (size_t v = 0; v < n; ++v) d[v] *= scale;
    return d;
}

double directional_derivative(const Assembler& assembler,
                              const std::vector<SampleSolution>& samples,
                              const NodalVector& g, const NodalVector& d,
                              const NodalVector& u_d, double eps, ObjectiveKind kind) {
    if (samples.empty()) throw std::invalid_argument("directional_derivative: no samples");
    const Mesh& mesh = assembler.mesh();
    std::vector<double> vals(samples.size());
    for (size_t s = 0; s < samples.size(); ++s) {
        const NodalVector& u = samples[s].u;
        const NodalVector& z = samples[s].z;
        double acc = 0.0;
        for (int t = 0; t < mesh.n_triangles(); ++t) {
            const auto gm = assembler.midpoint_values(g, t);
            const double hp[3] = {h_eps_prime(gm[0], eps), h_eps_prime(gm[1], eps),
                                  h_eps_prime(gm[2], eps)};
            if (hp[0] == 0.0 && hp[1] == 0.0 && hp[2] == 0.0) continue;
            const auto dm = assembler.midpoint_values(d, t);
            const auto um = assembler.midpoint_values(u, t);
            const auto zm = assembler.midpoint_values(z, t);
            const double w = assembler.element_area(t) / 3.0;
            double cell = 0.0;
            for (int q = 0; q < 3; ++q) cell += hp[q] * dm[q] * um[q] * zm[q];
            acc += w * cell / eps;
            if (kind == ObjectiveKind::on_K) {
                const auto rm = assembler.midpoint_values(u_d, t);
                double extra = 0.0;
                for (int q = 0; q < 3; ++q) {
                    const double r = um[q] - rm[q];
                    extra += hp[q] * dm[q] * r * r;
                }
                acc += 0.5 * w * extra;
            }
        }
        vals[s] = acc;
    }
    return mc_expect(vals);
}

NodalVector momentum_update(const NodalVector* d_prev, const NodalVector& d_new, double beta) {
    if (beta < 0.0 || beta >= 1.0)
        throw std::invalid_argument("momentum_update: need 0 <= beta < 1");
    if (!d_prev) return d_new;
    if (d_prev->size() != d_new.size())
        throw std::invalid_argument("momentum_update: length mismatch");
    NodalVector d(d_new.size());
    for (size_t v = 0; v < d.size(); ++v)
        d[v] = beta * (*d_prev)[v] + (1.0 - beta) * d_new[v];
    return d;
}

LineSearchResult line_search(const std::function<double(double)>& cost_at, double cost0,
                             double slope, double alpha_prev, const OptimizerParams& params) {
    std::map<double, double> memo;
    auto eval = [&](double a) {
        auto it = memo.find(a);
        if (it != memo.end()) return it->second;
        const double c = cost_at(a);
        memo.emplace(a, c);
        return c;
    };

    LineSearchResult stall;
    stall.stalled = true;

    const double a1 = 0.5 * alpha_prev, a2 = alpha_prev, a3 = 1.5 * alpha_prev;
    const double y1 = eval(a1), y2 = eval(a2), y3 = eval(a3);
    if (!std::isfinite(y1) || !std::isfinite(y2) || !std::isfinite(y3)) return stall;

    // quadratic through three equally spaced probes; fall back to the best
    // probe when the fit is not convex
    double cand;
    const double curv = y1 - 2.0 * y2 + y3;
    if (curv > 0.0) {
        cand = a2 + 0.5 * alpha_prev * (y1 - y3) / (2.0 * curv);
    } else {
        cand = a1;
        double best = y1;
        if (y2 < best) { best = y2; cand = a2; }
        if (y3 < best) { best = y3; cand = a3; }
    }
    cand = std::clamp(cand, params.alpha_min, params.alpha_max);

    for (double a = cand;;) {
        const double c = eval(a);
        if (std::isfinite(c) && c <= cost0 + params.armijo_c * a * slope)
            return {a, c, false};
        if (a <= params.alpha_min) break;
        a = std::max(0.5 * a, params.alpha_min);
    }
    // Armijo failed everywhere: accept alpha_min only on strict decrease
    const double cmin = eval(params.alpha_min);
    if (std::isfinite(cmin) && cmin < cost0) return {params.alpha_min, cmin, false};
    return stall;
}

NodalVector project_feasible(NodalVector g, const std::vector<std::uint8_t>& mask) {
    if (mask.empty()) return g;
    if (mask.size() != g.size())
        throw std::invalid_argument("project_feasible: mask length mismatch");
    for (size_t v = 0; v < g.size(); ++v)
        if (mask[v] && g[v] < 0.0) g[v] = 0.0;
    return g;
}

}  // namespace shapeopt
