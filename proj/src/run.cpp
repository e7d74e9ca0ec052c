#include <chrono>
#include <cmath>
#include <thread>
#include <utility>

#include "shapeopt/optimizer.hpp"
#include "shapeopt/problems.hpp"

namespace shapeopt {

namespace {

double norm2(const NodalVector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double diff_norm2(const NodalVector& a, const NodalVector& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

std::vector<CoefficientSample> draw_samples(const Mesh& mesh, const RunConfig& cfg,
                                            long long id_base) {
    std::vector<CoefficientSample> samples;
    samples.reserve(cfg.n_samples);
    for (int i = 0; i < cfg.n_samples; ++i)
        samples.push_back(sample_coefficient(mesh, cfg.rho, cfg.seed, id_base + i));
    return samples;
}

}  // namespace

RunResult run_optimization(const RunConfig& cfg, const IterCallback& on_iter) {
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    RunResult result;
    result.mesh = build_structured_mesh(cfg.grid_n);
    const Mesh& mesh = result.mesh;
    Assembler assembler(mesh);

    const NodalVector f = interpolate_nodal(mesh, lookup_function(cfg.f_tag));
    const NodalVector u_d = interpolate_nodal(mesh, lookup_function(cfg.ud_tag));
    NodalVector g = interpolate_nodal(mesh, lookup_function(cfg.g0_tag));

    std::vector<std::uint8_t> mask;
    if (cfg.constraint.kind != SubdomainKind::none)
        mask = subdomain_vertex_mask(mesh, cfg.constraint);
    g = project_feasible(std::move(g), mask);

    int threads = cfg.threads;
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;

    ObjectiveSpec obj{cfg.objective, u_d, cfg.subdomain};
    PdeLayer layer(assembler, draw_samples(mesh, cfg, 0), obj, f, cfg.eps, threads);

    RunHistory& hist = result.history;
    const OptimizerParams& P = cfg.opt;

    try {
        double cost = layer.expected_cost(g);
        hist.records.push_back({0, cost, 0.0, 0.0, 0.0, elapsed()});
        if (on_iter) on_iter(mesh, 0, g);
        hist.termination = "max_iters";

        NodalVector d_prev;
        bool have_prev = false;
        double alpha_prev = P.alpha_min;
        int stall_streak = 0;

        for (int k = 1; k <= P.max_iters; ++k) {
            if (cfg.resample && k > 1) {
                layer.set_samples(
                    draw_samples(mesh, cfg, static_cast<long long>(k - 1) * cfg.n_samples));
                cost = layer.expected_cost(g);
            }
            layer.solve_adjoints();

            const NodalVector d_raw =
                descent_direction(cfg.direction, layer.states(), g, u_d, cfg.eps);
            NodalVector d = momentum_update(have_prev ? &d_prev : nullptr, d_raw, P.momentum_beta);
            const double slope = directional_derivative(assembler, layer.states(), g, d, u_d,
                                                        cfg.eps, cfg.objective);

            auto cost_at = [&](double a) {
                NodalVector trial(g.size());
                for (size_t v = 0; v < g.size(); ++v) trial[v] = g[v] + a * d[v];
                trial = project_feasible(std::move(trial), mask);
                return layer.expected_cost(trial);
            };
            const LineSearchResult ls = line_search(cost_at, cost, slope, alpha_prev, P);

            if (ls.stalled) {
                ++stall_streak;
                if (stall_streak >= 2) {
                    hist.termination = "stalled";
                    break;
                }
                have_prev = false;  // drop the momentum term and retry
                continue;
            }
            stall_streak = 0;

            NodalVector g_new(g.size());
            for (size_t v = 0; v < g.size(); ++v) g_new[v] = g[v] + ls.alpha * d[v];
            g_new = project_feasible(std::move(g_new), mask);

            const double dg_abs = diff_norm2(g_new, g);
            const double gn = norm2(g_new);
            const double dg = (gn >= 1.0) ? dg_abs / gn : dg_abs;
            const double dc_abs = std::abs(ls.cost - cost);
            const double dc = (std::abs(ls.cost) >= 1.0) ? dc_abs / std::abs(ls.cost) : dc_abs;

            g = std::move(g_new);
            cost = ls.cost;
            alpha_prev = ls.alpha;
            d_prev = std::move(d);
            have_prev = true;
            layer.expected_cost(g);  // leave states at the accepted iterate

            hist.records.push_back({k, cost, ls.alpha, dc, dg, elapsed()});
            if (on_iter) on_iter(mesh, k, g);

            const bool flat_cost = dc < P.tol_cost;
            const bool flat_g = dg < P.tol_g;
            if (flat_cost && flat_g) {
                hist.termination = "cost_change+g_change";
                break;
            }
            if (flat_cost) {
                hist.termination = "cost_change";
                break;
            }
            if (flat_g) {
                hist.termination = "g_change";
                break;
            }
        }
    } catch (const SolverFailure&) {
        hist.termination = "solver_failure";
    }

    result.final_g = std::move(g);
    return result;
}

}  // namespace shapeopt
