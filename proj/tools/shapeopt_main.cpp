#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shapeopt/io.hpp"
#include "shapeopt/problems.hpp"

namespace fs = std::filesystem;
using namespace shapeopt;

namespace {

struct RunFlags {
    int example = 0;
    std::string config_path;
    int grid_n = 0;
    int samples = 0;
    double eps = 0.0;
    double rho = 0.0;
    std::uint64_t seed = 0;
    int max_iters = 0;
    std::string direction;
    int threads = -1;
    int snapshot_every = 0;
    std::vector<int> snapshot_at;
    std::string out_dir;
};

int cmd_run(const CLI::App& sub, RunFlags& fl) {
    RunConfig cfg;
    try {
        cfg = fl.example > 0 ? preset(fl.example) : parse_config_file(fl.config_path);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }

    // command-line flags take precedence over config-file values
    if (sub.count("--grid-n")) cfg.grid_n = fl.grid_n;
    if (sub.count("--samples")) cfg.n_samples = fl.samples;
    if (sub.count("--eps")) cfg.eps = fl.eps;
    if (sub.count("--rho")) cfg.rho = fl.rho;
    if (sub.count("--seed")) cfg.seed = fl.seed;
    if (sub.count("--max-iters")) cfg.opt.max_iters = fl.max_iters;
    if (sub.count("--threads")) cfg.threads = fl.threads;
    if (sub.count("--out")) cfg.out_dir = fl.out_dir;
    if (sub.count("--direction")) {
        try {
            cfg.direction = direction_from_string(fl.direction);
        } catch (const std::invalid_argument& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 2;
        }
    }
    if (cfg.grid_n < 2 || cfg.eps <= 0.0 || cfg.n_samples < 1 || cfg.opt.max_iters < 0 ||
        cfg.rho < 0.0 || cfg.rho >= 1.0) {
        std::fprintf(stderr, "error: invalid run parameters (need grid-n >= 2, eps > 0, "
                             "samples >= 1, max-iters >= 0, 0 <= rho < 1)\n");
        return 2;
    }

    std::set<int> snap_at(fl.snapshot_at.begin(), fl.snapshot_at.end());
    const int every = fl.snapshot_every;
    auto want_snapshot = [&](int iter) {
        if (snap_at.count(iter)) return true;
        return every > 0 && iter % every == 0;
    };

    try {
        fs::create_directories(cfg.out_dir);
        write_config(cfg, cfg.out_dir + "/config.txt");

        auto on_iter = [&](const Mesh& mesh, int iter, const NodalVector& g) {
            if (want_snapshot(iter)) write_field_snapshot(mesh, g, iter, cfg.out_dir);
        };
        const RunResult res = run_optimization(cfg, on_iter);

        write_history(res.history, cfg.out_dir + "/history.csv");
        write_field_csv(res.mesh, res.final_g, cfg.out_dir + "/shape_final.csv");
        write_contour_file(extract_zero_contour(res.mesh, res.final_g),
                           cfg.out_dir + "/contour_final.txt");

        for (const auto& r : res.history.records)
            std::printf("iter %4d  cost %.9g  step %.3g\n", r.iter, r.cost, r.step);
        std::printf("termination: %s\n", res.history.termination.c_str());
        if (!res.history.records.empty())
            std::printf("final cost: %.9g\n", res.history.records.back().cost);

        if (res.history.termination == "solver_failure") {
            std::fprintf(stderr, "error: linear solver failed to converge\n");
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

int cmd_gradient_check(int grid_n, double eps, double rho, int samples, std::uint64_t seed,
                       double fd_step, int n_directions) {
    try {
        const Mesh mesh = build_structured_mesh(grid_n);
        Assembler assembler(mesh);
        const NodalVector f = interpolate_nodal(mesh, lookup_function("const:2"));
        const NodalVector u_d = interpolate_nodal(mesh, lookup_function("ex1_target"));
        const NodalVector g = interpolate_nodal(mesh, [](double x, double) { return x; });
        ObjectiveSpec obj{ObjectiveKind::on_O, u_d, SubdomainSpec::square(0.5)};

        std::vector<CoefficientSample> samp;
        for (int i = 0; i < samples; ++i)
            samp.push_back(sample_coefficient(mesh, rho, seed, i));
        PdeLayer layer(assembler, std::move(samp), obj, f, eps, 1, 1e-12);

        std::printf("%-4s %-22s %-22s %s\n", "dir", "adjoint", "finite-diff", "rel-err");
        double max_rel = 0.0;
        for (int i = 0; i < n_directions; ++i) {
            // random low-frequency cosine direction
            std::uint64_t s = seed + 77771ULL * static_cast<std::uint64_t>(i + 1);
            const auto draw = [&s] {
                s = detail::splitmix64(s);
                return static_cast<int>((s >> 8) % 3) + 1;
            };
            const int kx = draw(), ky = draw();
            const NodalVector q = interpolate_nodal(mesh, [&](double x, double y) {
                return std::cos(kx * std::numbers::pi * x / 2.0) *
                       std::cos(ky * std::numbers::pi * y / 2.0);
            });

            layer.expected_cost(g);
            layer.solve_adjoints();
            const double dj_adjoint = directional_derivative(assembler, layer.states(), g, q,
                                                             u_d, eps, ObjectiveKind::on_O);

            NodalVector gp(g.size()), gm(g.size());
            for (size_t v = 0; v < g.size(); ++v) {
                gp[v] = g[v] + fd_step * q[v];
                gm[v] = g[v] - fd_step * q[v];
            }
            const double jp = layer.expected_cost(gp);
            const double jm = layer.expected_cost(gm);
            const double dj_fd = (jp - jm) / (2.0 * fd_step);

            const double rel = std::abs(dj_adjoint - dj_fd) / std::max(std::abs(dj_fd), 1e-14);
            max_rel = std::max(max_rel, rel);
            std::printf("%-4d %-22.15g %-22.15g %.3e\n", i, dj_adjoint, dj_fd, rel);
        }
        std::printf("max relative error: %.3e\n", max_rel);
        return max_rel < 1e-3 ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

int cmd_eps_sweep(int grid_n, const std::vector<double>& eps_list, double rho, int samples,
                  std::uint64_t seed) {
    try {
        const Mesh mesh = build_structured_mesh(grid_n);
        Assembler assembler(mesh);
        const NodalVector f = interpolate_nodal(mesh, lookup_function("const:2"));
        const NodalVector g = interpolate_nodal(mesh, lookup_function("ex1_g0"));

        std::printf("%-12s %s\n", "eps", "penalty-integral");
        std::vector<double> integrals;
        for (double eps : eps_list) {
            std::vector<double> vals(samples);
            for (int i = 0; i < samples; ++i) {
                const CoefficientSample sample = sample_coefficient(mesh, rho, seed, i);
                const NodalVector u = solve_primal(assembler, sample, g, eps, f);
                vals[i] = penalty_mass_integral(assembler, u, g, eps);
            }
            integrals.push_back(mc_expect(vals));
            std::printf("%-12g %.9e\n", eps, integrals.back());
        }
        for (size_t i = 1; i < integrals.size(); ++i)
            if (!(integrals[i] < integrals[i - 1])) {
                std::fprintf(stderr, "error: penalty integral not strictly decreasing\n");
                return 1;
            }
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

int cmd_mesh_info(int grid_n, const std::string& export_path) {
    try {
        const Mesh mesh = build_structured_mesh(grid_n);
        double area = 0.0;
        for (int t = 0; t < mesh.n_triangles(); ++t) area += mesh.triangle_area(t);
        int n_boundary = 0;
        for (auto b : mesh.boundary_vertex) n_boundary += b;
        std::printf("grid_n      %d\n", mesh.grid_n);
        std::printf("vertices    %d\n", mesh.n_vertices());
        std::printf("triangles   %d\n", mesh.n_triangles());
        std::printf("boundary    %d\n", n_boundary);
        std::printf("h           %s\n", format_double(2.0 / (grid_n - 1)).c_str());
        std::printf("total area  %s\n", format_double(area).c_str());
        if (!export_path.empty()) {
            write_mesh(mesh, export_path);
            std::printf("exported    %s\n", export_path.c_str());
        }
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shape optimization of elliptic PDEs with random diffusion on a fixed grid"};
    app.require_subcommand(1);

    RunFlags fl;
    auto* run = app.add_subcommand("run", "Run the optimization loop and write artifacts");
    auto* opt_example =
        run->add_option("--example", fl.example, "Built-in problem preset (1-4)")
            ->check(CLI::Range(1, 4));
    auto* opt_config = run->add_option("--config", fl.config_path, "Config file path")
                           ->check(CLI::ExistingFile);
    opt_example->excludes(opt_config);
    opt_config->excludes(opt_example);
    run->add_option("--grid-n", fl.grid_n, "Vertices per side of the structured grid");
    run->add_option("--samples", fl.samples, "Monte Carlo sample count");
    run->add_option("--eps", fl.eps, "Penalty / smoothing parameter");
    run->add_option("--rho", fl.rho, "Diffusion perturbation amplitude");
    run->add_option("--seed", fl.seed, "Random seed");
    run->add_option("--max-iters", fl.max_iters, "Iteration cap");
    run->add_option("--direction", fl.direction, "full | simplified | reduced");
    run->add_option("--threads", fl.threads, "Worker threads (0 = hardware)");
    run->add_option("--snapshot-every", fl.snapshot_every, "Snapshot every K iterations");
    run->add_option("--snapshot-at", fl.snapshot_at, "Snapshot at these iterations")
        ->delimiter(',');
    run->add_option("--out", fl.out_dir, "Output directory");

    int gc_grid_n = 17, gc_samples = 3, gc_directions = 5;
    double gc_eps = 0.25, gc_rho = 0.0, gc_fd_step = 1e-4;
    std::uint64_t gc_seed = 1234;
    auto* gc = app.add_subcommand("gradient-check",
                                  "Compare adjoint directional derivatives against "
                                  "centered finite differences");
    gc->add_option("--grid-n", gc_grid_n, "Vertices per side")->check(CLI::Range(3, 1 << 20));
    gc->add_option("--eps", gc_eps, "Penalty parameter")->check(CLI::PositiveNumber);
    gc->add_option("--rho", gc_rho, "Diffusion perturbation amplitude");
    gc->add_option("--samples", gc_samples, "Sample count")->check(CLI::PositiveNumber);
    gc->add_option("--seed", gc_seed, "Random seed");
    gc->add_option("--fd-step", gc_fd_step, "Finite-difference step")
        ->check(CLI::PositiveNumber);
    gc->add_option("--directions", gc_directions, "Number of test directions")
        ->check(CLI::Range(1, 1 << 20));

    int es_grid_n = 65, es_samples = 1;
    double es_rho = 0.0;
    std::uint64_t es_seed = 1234;
    std::vector<double> es_eps;
    auto* es = app.add_subcommand("eps-sweep",
                                  "Tabulate the residual penalty-mass integral over a list "
                                  "of eps values");
    es->add_option("--eps", es_eps, "Comma-separated eps values")->delimiter(',');
    es->add_option("--grid-n", es_grid_n, "Vertices per side")->check(CLI::Range(3, 1 << 20));
    es->add_option("--rho", es_rho, "Diffusion perturbation amplitude");
    es->add_option("--samples", es_samples, "Sample count")->check(CLI::PositiveNumber);
    es->add_option("--seed", es_seed, "Random seed");

    int mi_grid_n = 128;
    std::string mi_export;
    auto* mi = app.add_subcommand("mesh-info", "Print mesh statistics, optionally export");
    mi->add_option("--grid-n", mi_grid_n, "Vertices per side")->check(CLI::Range(2, 1 << 20));
    mi->add_option("--export", mi_export, "Write the mesh to this path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (app.got_subcommand(run)) {
        if (!opt_example->count() && !opt_config->count()) {
            std::fprintf(stderr, "error: run needs --example or --config\n");
            return 2;
        }
        return cmd_run(*run, fl);
    }
    if (app.got_subcommand(gc))
        return cmd_gradient_check(gc_grid_n, gc_eps, gc_rho, gc_samples, gc_seed, gc_fd_step,
                                  gc_directions);
    if (app.got_subcommand(es)) {
        if (es_eps.empty()) es_eps = {1e-2, 1e-3, 1e-4, 1e-5};
        for (double e : es_eps)
            if (!(e > 0.0)) {
                std::fprintf(stderr, "error: eps values must be positive\n");
                return 2;
            }
        return cmd_eps_sweep(es_grid_n, es_eps, es_rho, es_samples, es_seed);
    }
    if (app.got_subcommand(mi)) return cmd_mesh_info(mi_grid_n, mi_export);
    return 2;
}
