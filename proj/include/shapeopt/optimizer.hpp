#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "shapeopt/pde.hpp"

namespace shapeopt {

enum class DirectionMode { full, simplified, reduced };

struct OptimizerParams {
    double alpha_min = 1.0;
    double alpha_max = 10.0;
    double armijo_c = 1e-4;
    double momentum_beta = 0.9;
    int max_iters = 1000;
    double tol_cost = 1e-8;
    double tol_g = 1e-8;
};

struct IterationRecord {
    int iter = 0;
    double cost = 0.0;
    double step = 0.0;   // accepted step size (0 for the initial row)
    double dcost = 0.0;  // cost change, relative when |cost| >= 1
    double dg = 0.0;     // g change 2-norm, relative when ||g|| >= 1
    double seconds = 0.0;
};

struct RunHistory {
    std::vector<IterationRecord> records;
    std::string termination;
};

// Nodal collocation of the gradient density, averaged over samples:
//   full:       -(1/eps) mean[H'_eps(g) u z]
//   simplified: -(1/eps) mean[u z]
//   reduced:    -mean[0.5 (u - u_d)^2 + (1/eps) u z]
NodalVector descent_direction(DirectionMode mode, const std::vector<SampleSolution>& samples,
                              const NodalVector& g, const NodalVector& u_d, double eps);

// Directional derivative of the discrete cost along d via the adjoint
// quadrature identity; this is the slope used in the Armijo test.
double directional_derivative(const Assembler& assembler,
                              const std::vector<SampleSolution>& samples,
                              const NodalVector& g, const NodalVector& d,
                              const NodalVector& u_d, double eps, ObjectiveKind kind);

// beta * d_prev + (1 - beta) * d_new; pass d_prev = nullptr on the first
// iteration (returns d_new unchanged).
NodalVector momentum_update(const NodalVector* d_prev, const NodalVector& d_new, double beta);

struct LineSearchResult {
    double alpha = 0.0;
    double cost = 0.0;
    bool stalled = false;
};

// Three-point quadratic fit on probes {0.5, 1, 1.5} * alpha_prev, clamped to
// [alpha_min, alpha_max], then Armijo backtracking; falls back to alpha_min
// with a strict-decrease test, else signals a stall.
LineSearchResult line_search(const std::function<double(double)>& cost_at, double cost0,
                             double slope, double alpha_prev, const OptimizerParams& params);

// Clamp g to max(g, 0) at masked vertices. Empty mask means no constraint.
NodalVector project_feasible(NodalVector g, const std::vector<std::uint8_t>& mask);

struct RunConfig;  // problems.hpp

struct RunResult {
    Mesh mesh;
    NodalVector final_g;
    RunHistory history;
};

using IterCallback = std::function<void(const Mesh&, int iter, const NodalVector& g)>;

// The full outer loop: states/adjoints, direction, momentum, line search,
// projected update, stopping tests. on_iter fires for the initial shape and
// after every accepted step.
RunResult run_optimization(const RunConfig& config, const IterCallback& on_iter = {});

}  // namespace shapeopt
