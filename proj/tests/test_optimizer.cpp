#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "doctest.h"
#include "shapeopt/problems.hpp"

using namespace shapeopt;

namespace {

NodalVector random_field(const Mesh& mesh, std::uint64_t seed, double lo, double hi) {
    NodalVector g(mesh.n_vertices());
    std::uint64_t s = seed;
    for (auto& v : g) {
        s = detail::splitmix64(s);
        v = lo + (hi - lo) * ((s >> 11) * 0x1.0p-53);
    }
    return g;
}

struct SmallSetup {
    Mesh mesh;
    Assembler assembler;
    NodalVector u_d;
    ObjectiveSpec obj;
    NodalVector f;

    explicit SmallSetup(ObjectiveKind kind)
        : mesh(build_structured_mesh(9)),
          assembler(mesh),
          u_d(interpolate_nodal(mesh, [](double x, double y) {
              return -(x - 0.5) * (x - 0.5) - (y - 0.5) * (y - 0.5) + 0.125;
          })),
          obj{kind, u_d,
              kind == ObjectiveKind::on_O ? SubdomainSpec::square(0.5) : SubdomainSpec::none()},
          f(mesh.n_vertices(), 2.0) {}
};

}  // namespace

TEST_CASE("momentum blends previous and new directions") {
    const NodalVector d_new{10.0, -4.0};
    const NodalVector d_prev{0.0, 2.0};

    const NodalVector first = momentum_update(nullptr, d_new, 0.9);
    CHECK(first[0] == 10.0);
    CHECK(first[1] == -4.0);

    const NodalVector none = momentum_update(&d_prev, d_new, 0.0);
    CHECK(none[0] == 10.0);
    CHECK(none[1] == -4.0);

    const NodalVector half = momentum_update(&d_prev, d_new, 0.5);
    CHECK(half[0] == 5.0);
    CHECK(half[1] == -1.0);

    const NodalVector heavy = momentum_update(&d_prev, d_new, 0.9);
    CHECK(heavy[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(heavy[1] == doctest::Approx(1.4).epsilon(1e-14));

    const NodalVector fixed = momentum_update(&d_new, d_new, 0.9);
    CHECK(fixed[0] == doctest::Approx(10.0).epsilon(1e-14));

    CHECK_THROWS_AS(momentum_update(&d_prev, d_new, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(momentum_update(&d_prev, d_new, -0.1), std::invalid_argument);
    const NodalVector shorter{1.0};
    CHECK_THROWS_AS(momentum_update(&shorter, d_new, 0.5), std::invalid_argument);
}

TEST_CASE("feasibility projection clamps only masked negatives") {
    const NodalVector g{-1.0, -2.0, 3.0};
    const std::vector<std::uint8_t> mask{1, 0, 1};
    const NodalVector p = project_feasible(g, mask);
    CHECK(p[0] == 0.0);
    CHECK(p[1] == -2.0);
    CHECK(p[2] == 3.0);

    const NodalVector pp = project_feasible(p, mask);  // idempotent
    CHECK(pp[0] == p[0]);
    CHECK(pp[1] == p[1]);
    CHECK(pp[2] == p[2]);

    const NodalVector id = project_feasible(g, {});
    CHECK(id[0] == -1.0);
    CHECK(id[1] == -2.0);

    CHECK_THROWS_AS(project_feasible(g, std::vector<std::uint8_t>{1, 0}),
                    std::invalid_argument);
}

TEST_CASE("line search lands on the quadratic minimizer with memoized probes") {
    OptimizerParams params;
    int calls = 0;
    auto cost = [&](double a) {
        ++calls;
        return (a - 4.0) * (a - 4.0);
    };
    const LineSearchResult r = line_search(cost, 16.0, -8.0, 4.0, params);
    CHECK_FALSE(r.stalled);
    CHECK(r.alpha == 4.0);
    CHECK(r.cost == 0.0);
    CHECK(calls == 3);  // the fit lands on the middle probe, which is memoized
}

TEST_CASE("line search clamps a far-away fit to alpha_max") {
    OptimizerParams params;
    int calls = 0;
    auto cost = [&](double a) {
        ++calls;
        return (a - 20.0) * (a - 20.0);
    };
    const LineSearchResult r = line_search(cost, 400.0, -40.0, 8.0, params);
    CHECK_FALSE(r.stalled);
    CHECK(r.alpha == 10.0);
    CHECK(r.cost == 100.0);
    CHECK(calls == 4);
}

TEST_CASE("line search takes the best probe when the fit is not convex") {
    OptimizerParams params;
    auto cost = [](double a) { return 100.0 - a; };
    const LineSearchResult r = line_search(cost, 100.0, -1.0, 2.0, params);
    CHECK_FALSE(r.stalled);
    CHECK(r.alpha == 3.0);  // 1.5 * alpha_prev
    CHECK(r.cost == 97.0);
}

TEST_CASE("line search stalls when no step decreases the cost") {
    OptimizerParams params;
    const LineSearchResult r =
        line_search([](double a) { return 100.0 + a; }, 100.0, -1.0, 2.0, params);
    CHECK(r.stalled);
}

TEST_CASE("line search stalls on non-finite costs") {
    OptimizerParams params;
    const LineSearchResult r = line_search(
        [](double) { return std::numeric_limits<double>::quiet_NaN(); }, 1.0, -1.0, 2.0,
        params);
    CHECK(r.stalled);
}

TEST_CASE("full direction equals the simplified one reweighted by the blend slope") {
    const SmallSetup s(ObjectiveKind::on_O);
    const double eps = 0.25;
    const NodalVector g = random_field(s.mesh, 11, -0.24, -0.01);  // inside the band
    std::vector<CoefficientSample> samples;
    for (int i = 0; i < 3; ++i) samples.push_back(sample_coefficient(s.mesh, 0.3, 4, i));
    PdeLayer layer(s.assembler, samples, s.obj, s.f, eps, 1);
    layer.expected_cost(g);
    layer.solve_adjoints();

    const NodalVector d_full =
        descent_direction(DirectionMode::full, layer.states(), g, s.u_d, eps);
    const NodalVector d_simp =
        descent_direction(DirectionMode::simplified, layer.states(), g, s.u_d, eps);
    double max_abs = 0.0;
    for (size_t v = 0; v < d_full.size(); ++v) {
        CHECK(d_full[v] ==
              doctest::Approx(h_eps_prime(g[v], eps) * d_simp[v]).epsilon(1e-12));
        max_abs = std::max(max_abs, std::abs(d_full[v]));
    }
    CHECK(max_abs > 0.0);
}

TEST_CASE("reduced direction matches its per-sample density") {
    const SmallSetup s(ObjectiveKind::on_K);
    const double eps = 0.25;
    const NodalVector g = random_field(s.mesh, 12, -0.2, 0.2);
    std::vector<CoefficientSample> samples;
    for (int i = 0; i < 2; ++i) samples.push_back(sample_coefficient(s.mesh, 0.3, 4, i));
    PdeLayer layer(s.assembler, samples, s.obj, s.f, eps, 1);
    layer.expected_cost(g);
    layer.solve_adjoints();

    const NodalVector d =
        descent_direction(DirectionMode::reduced, layer.states(), g, s.u_d, eps);
    std::vector<NodalVector> dens;
    for (const auto& st : layer.states()) {
        NodalVector v(g.size());
        for (size_t k = 0; k < g.size(); ++k) {
            const double r = st.u[k] - s.u_d[k];
            v[k] = 0.5 * r * r + st.u[k] * st.z[k] / eps;
        }
        dens.push_back(std::move(v));
    }
    const NodalVector mean = mc_expect(dens);
    for (size_t k = 0; k < g.size(); ++k)
        CHECK(d[k] == doctest::Approx(-mean[k]).epsilon(1e-13));

    CHECK_THROWS_AS(descent_direction(DirectionMode::full, {}, g, s.u_d, eps),
                    std::invalid_argument);
}

TEST_CASE("armijo slope agrees with finite differences of the expected cost") {
    for (ObjectiveKind kind : {ObjectiveKind::on_O, ObjectiveKind::on_K}) {
        CAPTURE(static_cast<int>(kind));
        const SmallSetup s(kind);
        const double eps = 0.25;
        const NodalVector g = random_field(s.mesh, 13, -0.2, 0.15);
        const NodalVector d = random_field(s.mesh, 14, -1.0, 1.0);
        std::vector<CoefficientSample> samples;
        for (int i = 0; i < 2; ++i) samples.push_back(sample_coefficient(s.mesh, 0.3, 4, i));
        PdeLayer layer(s.assembler, samples, s.obj, s.f, eps, 1, 1e-12);
        layer.expected_cost(g);
        layer.solve_adjoints();
        const double slope =
            directional_derivative(s.assembler, layer.states(), g, d, s.u_d, eps, kind);

        const double h = 1e-5;
        NodalVector gp = g, gm = g;
        for (size_t k = 0; k < g.size(); ++k) {
            gp[k] += h * d[k];
            gm[k] -= h * d[k];
        }
        const double fd = (layer.expected_cost(gp) - layer.expected_cost(gm)) / (2.0 * h);
        CHECK(slope == doctest::Approx(fd).epsilon(5e-4));
        CHECK(std::abs(slope) > 0.0);
    }
}

TEST_CASE("run with max_iters 0 records only the initial shape") {
    RunConfig cfg = preset(1);
    cfg.grid_n = 9;
    cfg.n_samples = 2;
    cfg.opt.max_iters = 0;
    cfg.threads = 1;
    int callback_hits = 0;
    const RunResult res = run_optimization(
        cfg, [&](const Mesh&, int iter, const NodalVector&) {
            CHECK(iter == 0);
            ++callback_hits;
        });
    REQUIRE(res.history.records.size() == 1);
    CHECK(res.history.records[0].iter == 0);
    CHECK(res.history.records[0].step == 0.0);
    CHECK(res.history.records[0].cost > 0.0);
    CHECK(res.history.termination == "max_iters");
    CHECK(callback_hits == 1);
}

TEST_CASE("with rho 0 the sample count does not matter") {
    RunConfig base = preset(1);
    base.grid_n = 9;
    base.eps = 1e-2;
    base.rho = 0.0;
    base.opt.max_iters = 3;
    base.threads = 1;

    RunConfig one = base, many = base;
    one.n_samples = 1;
    many.n_samples = 32;
    const RunResult ra = run_optimization(one);
    const RunResult rb = run_optimization(many);

    REQUIRE(ra.history.records.size() == rb.history.records.size());
    for (size_t i = 0; i < ra.history.records.size(); ++i) {
        CHECK(ra.history.records[i].iter == rb.history.records[i].iter);
        CHECK(ra.history.records[i].cost == rb.history.records[i].cost);
        CHECK(ra.history.records[i].step == rb.history.records[i].step);
        CHECK(ra.history.records[i].dcost == rb.history.records[i].dcost);
        CHECK(ra.history.records[i].dg == rb.history.records[i].dg);
    }
    REQUIRE(ra.final_g.size() == rb.final_g.size());
    for (size_t v = 0; v < ra.final_g.size(); ++v) CHECK(ra.final_g[v] == rb.final_g[v]);
}

TEST_CASE("repeat runs are bitwise reproducible, resampling included") {
    RunConfig cfg = preset(2);
    cfg.grid_n = 9;
    cfg.n_samples = 3;
    cfg.opt.max_iters = 3;
    cfg.resample = true;
    cfg.threads = 1;
    const RunResult ra = run_optimization(cfg);
    const RunResult rb = run_optimization(cfg);
    REQUIRE(ra.history.records.size() == rb.history.records.size());
    for (size_t i = 0; i < ra.history.records.size(); ++i) {
        CHECK(ra.history.records[i].cost == rb.history.records[i].cost);
        CHECK(ra.history.records[i].step == rb.history.records[i].step);
    }
    for (size_t v = 0; v < ra.final_g.size(); ++v) CHECK(ra.final_g[v] == rb.final_g[v]);
}

TEST_CASE("the constraint keeps the protected region nonnegative") {
    RunConfig cfg = preset(1);
    cfg.grid_n = 9;
    cfg.n_samples = 1;
    cfg.opt.max_iters = 2;
    cfg.threads = 1;
    REQUIRE(cfg.constraint.kind != SubdomainKind::none);
    const RunResult res = run_optimization(cfg);
    const auto mask = subdomain_vertex_mask(res.mesh, cfg.constraint);
    for (size_t v = 0; v < res.final_g.size(); ++v)
        if (mask[v]) CHECK(res.final_g[v] >= 0.0);
}

TEST_CASE("accepted steps decrease the cost and stay inside the step bounds") {
    RunConfig cfg = preset(1);
    cfg.grid_n = 17;
    cfg.eps = 1e-3;
    cfg.n_samples = 2;
    cfg.opt.max_iters = 6;
    cfg.threads = 1;
    std::vector<int> seen_iters;
    const RunResult res = run_optimization(
        cfg, [&](const Mesh&, int iter, const NodalVector&) { seen_iters.push_back(iter); });

    const auto& rec = res.history.records;
    REQUIRE(rec.size() >= 2);
    REQUIRE(seen_iters.size() == rec.size());
    for (size_t i = 0; i < rec.size(); ++i) CHECK(seen_iters[i] == rec[i].iter);
    for (size_t i = 1; i < rec.size(); ++i) {
        // equality happens when the direction flattens out right before the
        // cost-change threshold fires
        CHECK(rec[i].cost <= rec[i - 1].cost);
        CHECK(rec[i].step >= cfg.opt.alpha_min);
        CHECK(rec[i].step <= cfg.opt.alpha_max);
        CHECK(rec[i].iter > rec[i - 1].iter);
        CHECK(rec[i].dcost >= 0.0);
        CHECK(rec[i].dg >= 0.0);
    }
    const std::vector<std::string> allowed{"max_iters", "cost_change", "g_change",
                                           "cost_change+g_change", "stalled"};
    CHECK(std::find(allowed.begin(), allowed.end(), res.history.termination) !=
          allowed.end());
}
