#pragma once

#include <stdexcept>
#include <vector>

#include "shapeopt/assembly.hpp"
#include "shapeopt/solver.hpp"

namespace shapeopt {

enum class ObjectiveKind { on_O, on_K };

struct ObjectiveSpec {
    ObjectiveKind kind = ObjectiveKind::on_O;
    NodalVector u_d;
    SubdomainSpec subdomain;  // required for on_O
};

struct SampleSolution {
    NodalVector u;
    NodalVector z;
    long long sample_id = 0;
    SolveReport primal_report;
    SolveReport adjoint_report;
};

struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// u solving A(omega) u = B1 f with Dirichlet elimination.
NodalVector solve_primal(const Assembler& assembler, const CoefficientSample& sample,
                         const NodalVector& g, double eps, const NodalVector& f,
                         SolveReport* report = nullptr, const NodalVector* warm = nullptr,
                         double tol = 1e-10);

// z solving A(omega) z = r, r = B3 (u - u_d) for on_O or the H_eps(g)-weighted
// mass applied to (u - u_d) for on_K; A is the same self-adjoint operator.
NodalVector solve_adjoint(const Assembler& assembler, const CoefficientSample& sample,
                          const NodalVector& g, double eps, const NodalVector& u,
                          const ObjectiveSpec& obj, SolveReport* report = nullptr,
                          const NodalVector* warm = nullptr, double tol = 1e-10);

// on_O: 0.5 (u-u_d)^T B3 (u-u_d); on_K: midpoint quadrature of
// H_eps(g) (u - u_d)^2 over D, halved.
double eval_cost(const Assembler& assembler, const NodalVector& u, const NodalVector& g,
                 double eps, const ObjectiveSpec& obj);

// Arithmetic mean by pairwise merging in fixed index order: independent of
// worker count, and a list of identical values averages to that value exactly.
double mc_expect(const std::vector<double>& values);
NodalVector mc_expect(const std::vector<NodalVector>& values);

// integral of (1 - H_eps(g)) u^2 over D (midpoint quadrature).
double penalty_mass_integral(const Assembler& assembler, const NodalVector& u,
                             const NodalVector& g, double eps);

// Orchestrates the per-sample inner loop (assemble, primal, adjoint, cost)
// with per-sample warm starts and a deterministic reduction. Thread-safe by
// partitioning samples; results are bitwise identical for any worker count.
class PdeLayer {
  public:
    PdeLayer(const Assembler& assembler, std::vector<CoefficientSample> samples,
             ObjectiveSpec obj, NodalVector f, double eps, int n_threads = 1,
             double solver_tol = 1e-10);

    // Primal solves at g for every sample (reusing previous states as warm
    // starts); returns the expected cost. Skipped if g matches the last call.
    double expected_cost(const NodalVector& g);
    // Adjoint solves at the g of the last expected_cost call.
    void solve_adjoints();

    const std::vector<SampleSolution>& states() const { return states_; }
    const ObjectiveSpec& objective() const { return obj_; }
    const NodalVector& forcing() const { return f_; }
    double eps() const { return eps_; }
    int n_samples() const { return static_cast<int>(samples_.size()); }
    const Assembler& assembler() const { return *assembler_; }

    void set_samples(std::vector<CoefficientSample> samples);

  private:
    const Assembler* assembler_;
    std::vector<CoefficientSample> samples_;
    ObjectiveSpec obj_;
    NodalVector f_;
    double eps_;
    int n_threads_;
    double tol_;

    NodalVector b0_;                    // B1 f with boundary entries zeroed
    SparseMatrix subdomain_mass_;       // B3, assembled once (on_O only)
    std::vector<SparseMatrix> A_;       // per-sample operator storage
    std::vector<SampleSolution> states_;
    std::vector<double> costs_;
    NodalVector last_g_;
    bool have_states_ = false;
    bool adjoints_current_ = false;

    void parallel_over_samples(const std::function<void(int)>& work);
};

}  // namespace shapeopt
