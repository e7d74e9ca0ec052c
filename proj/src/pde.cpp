#include "shapeopt/pde.hpp"

#include <algorithm>
#include <thread>

namespace shapeopt {

namespace {

NodalVector load_vector(const Assembler& assembler, const NodalVector& f) {
    const Mesh& mesh = assembler.mesh();
    SparseMatrix B1 = assembler.assemble_mass();
    NodalVector b;
    B1.matvec(f, b);
    for (int v = 0; v < mesh.n_vertices(); ++v)
        if (mesh.boundary_vertex[v]) b[v] = 0.0;
    return b;
}

void check_converged(const SolveReport& report, const char* what) {
    if (!report.converged)
        throw SolverFailure(std::string(what) + ": CG did not converge");
}

NodalVector adjoint_rhs(const Assembler& assembler, const NodalVector& g, double eps,
                        const NodalVector& u, const ObjectiveSpec& obj,
                        const SparseMatrix* B3) {
    const Mesh& mesh = assembler.mesh();
    NodalVector r(u.size());
    for (size_t i = 0; i < u.size(); ++i) r[i] = u[i] - obj.u_d[i];
    NodalVector rhs;
    if (obj.kind == ObjectiveKind::on_O) {
        SparseMatrix local;
        if (!B3) {
            local = assembler.assemble_subdomain_mass(obj.subdomain);
            B3 = &local;
        }
        B3->matvec(r, rhs);
    } else {
        SparseMatrix M = assembler.assemble_weighted_mass(g, eps, WeightKind::h_eps);
        M.matvec(r, rhs);
    }
    for (int v = 0; v < mesh.n_vertices(); ++v)
        if (mesh.boundary_vertex[v]) rhs[v] = 0.0;
    return rhs;
}

}  // namespace

NodalVector solve_primal(const Assembler& assembler, const CoefficientSample& sample,
                         const NodalVector& g, double eps, const NodalVector& f,
                         SolveReport* report, const NodalVector* warm, double tol) {
    SparseMatrix A = assembler.assemble_stiffness(sample, g, eps);
    NodalVector b = load_vector(assembler, f);
    auto [x, rep] = cg_solve(A, b, tol, -1, warm);
    check_converged(rep, "solve_primal");
    if (report) *report = rep;
    return x;
}

NodalVector solve_adjoint(const Assembler& assembler, const CoefficientSample& sample,
                          const NodalVector& g, double eps, const NodalVector& u,
                          const ObjectiveSpec& obj, SolveReport* report,
                          const NodalVector* warm, double tol) {
    SparseMatrix A = assembler.assemble_stiffness(sample, g, eps);
    NodalVector rhs = adjoint_rhs(assembler, g, eps, u, obj, nullptr);
    auto [z, rep] = cg_solve(A, rhs, tol, -1, warm);
    check_converged(rep, "solve_adjoint");
    if (report) *report = rep;
    return z;
}

double eval_cost(const Assembler& assembler, const NodalVector& u, const NodalVector& g,
                 double eps, const ObjectiveSpec& obj) {
    NodalVector r(u.size());
    for (size_t i = 0; i < u.size(); ++i) r[i] = u[i] - obj.u_d[i];
    if (obj.kind == ObjectiveKind::on_O) {
        SparseMatrix B3 = assembler.assemble_subdomain_mass(obj.subdomain);
        NodalVector Br;
        B3.matvec(r, Br);
        double acc = 0.0;
        for (size_t i = 0; i < r.size(); ++i) acc += r[i] * Br[i];
        return 0.5 * acc;
    }
    const Mesh& mesh = assembler.mesh();
    double acc = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto gm = assembler.midpoint_values(g, t);
        const auto rm = assembler.midpoint_values(r, t);
        const double w = assembler.element_area(t) / 3.0;
        for (int q = 0; q < 3; ++q)
            acc += w * h_eps(gm[q], eps) * rm[q] * rm[q];
    }
    return 0.5 * acc;
}

namespace {

double expect_range(const std::vector<double>& v, int lo, int hi) {
    if (hi - lo == 1) return v[lo];
    const int mid = lo + (hi - lo) / 2;
    const double mL = expect_range(v, lo, mid);
    const double mR = expect_range(v, mid, hi);
    const int nL = mid - lo, nR = hi - mid;
    // merge-mean keeps the average of identical values bitwise exact
    return mL + (static_cast<double>(nR) / (nL + nR)) * (mR - mL);
}

NodalVector expect_range(const std::vector<NodalVector>& v, int lo, int hi) {
    if (hi - lo == 1) return v[lo];
    const int mid = lo + (hi - lo) / 2;
    NodalVector mL = expect_range(v, lo, mid);
    const NodalVector mR = expect_range(v, mid, hi);
    const int nL = mid - lo, nR = hi - mid;
    const double w = static_cast<double>(nR) / (nL + nR);
    for (size_t i = 0; i < mL.size(); ++i) mL[i] += w * (mR[i] - mL[i]);
    return mL;
}

}  // namespace

double mc_expect(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("mc_expect: empty list");
    return expect_range(values, 0, static_cast<int>(values.size()));
}

NodalVector mc_expect(const std::vector<NodalVector>& values) {
    if (values.empty()) throw std::invalid_argument("mc_expect: empty list");
    return expect_range(values, 0, static_cast<int>(values.size()));
}

double penalty_mass_integral(const Assembler& assembler, const NodalVector& u,
                             const NodalVector& g, double eps) {
    const Mesh& mesh = assembler.mesh();
    double acc = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto gm = assembler.midpoint_values(g, t);
        const auto um = assembler.midpoint_values(u, t);
        const double w = assembler.element_area(t) / 3.0;
        for (int q = 0; q < 3; ++q)
            acc += w * (1.0 - h_eps(gm[q], eps)) * um[q] * um[q];
    }
    return acc;
}

PdeLayer::PdeLayer(const Assembler& assembler, std::vector<CoefficientSample> samples,
                   ObjectiveSpec obj, NodalVector f, double eps, int n_threads,
                   double solver_tol)
    : assembler_(&assembler),
      samples_(std::move(samples)),
      obj_(std::move(obj)),
      f_(std::move(f)),
      eps_(eps),
      n_threads_(n_threads < 1 ? 1 : n_threads),
      tol_(solver_tol) {
    if (samples_.empty()) throw std::invalid_argument("PdeLayer: empty sample set");
    std::sort(samples_.begin(), samples_.end(),
              [](const CoefficientSample& a, const CoefficientSample& b) {
                  return a.sample_id < b.sample_id;
              });
    b0_ = load_vector(assembler, f_);
    if (obj_.kind == ObjectiveKind::on_O)
        subdomain_mass_ = assembler.assemble_subdomain_mass(obj_.subdomain);
    const int M = static_cast<int>(samples_.size());
    A_.resize(M);
    states_.resize(M);
    costs_.resize(M);
    const int n = assembler.mesh().n_vertices();
    for (int i = 0; i < M; ++i) {
        states_[i].sample_id = samples_[i].sample_id;
        states_[i].u.assign(n, 0.0);
        states_[i].z.assign(n, 0.0);
    }
}

void PdeLayer::set_samples(std::vector<CoefficientSample> samples) {
    if (samples.size() != samples_.size())
        throw std::invalid_argument("set_samples: sample count must stay fixed");
    samples_ = std::move(samples);
    std::sort(samples_.begin(), samples_.end(),
              [](const CoefficientSample& a, const CoefficientSample& b) {
                  return a.sample_id < b.sample_id;
              });
    for (size_t i = 0; i < samples_.size(); ++i)
        states_[i].sample_id = samples_[i].sample_id;
    have_states_ = false;
    adjoints_current_ = false;
}

void PdeLayer::parallel_over_samples(const std::function<void(int)>& work) {
    const int M = static_cast<int>(samples_.size());
    std::vector<std::exception_ptr> errors(M);
    auto guarded = [&](int i) {
        try {
            work(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    const int W = std::min(n_threads_, M);
    if (W <= 1) {
        for (int i = 0; i < M; ++i) guarded(i);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(W);
        for (int w = 0; w < W; ++w)
            pool.emplace_back([&, w] {
                for (int i = w; i < M; i += W) guarded(i);
            });
        for (auto& th : pool) th.join();
    }
    for (int i = 0; i < M; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);
}

double PdeLayer::expected_cost(const NodalVector& g) {
    if (have_states_ && g == last_g_) return mc_expect(costs_);
    parallel_over_samples([&](int i) {
        assembler_->stiffness_values(samples_[i], g, eps_, A_[i]);
        SolveReport rep = cg_solve_inplace(A_[i], b0_, states_[i].u, tol_);
        check_converged(rep, "primal");
        states_[i].primal_report = rep;
        const NodalVector& u = states_[i].u;
        if (obj_.kind == ObjectiveKind::on_O) {
            NodalVector r(u.size()), Br;
            for (size_t k = 0; k < u.size(); ++k) r[k] = u[k] - obj_.u_d[k];
            subdomain_mass_.matvec(r, Br);
            double acc = 0.0;
            for (size_t k = 0; k < r.size(); ++k) acc += r[k] * Br[k];
            costs_[i] = 0.5 * acc;
        } else {
            costs_[i] = eval_cost(*assembler_, u, g, eps_, obj_);
        }
    });
    last_g_ = g;
    have_states_ = true;
    adjoints_current_ = false;
    return mc_expect(costs_);
}

void PdeLayer::solve_adjoints() {
    if (!have_states_) throw std::logic_error("solve_adjoints: no states computed");
    if (adjoints_current_) return;
    // the H_eps-weighted mass (on_K) is sample-independent: build it once
    SparseMatrix MH;
    if (obj_.kind == ObjectiveKind::on_K)
        MH = assembler_->assemble_weighted_mass(last_g_, eps_, WeightKind::h_eps);
    const Mesh& mesh = assembler_->mesh();
    parallel_over_samples([&](int i) {
        const NodalVector& u = states_[i].u;
        NodalVector r(u.size()), rhs;
        for (size_t k = 0; k < u.size(); ++k) r[k] = u[k] - obj_.u_d[k];
        if (obj_.kind == ObjectiveKind::on_O) subdomain_mass_.matvec(r, rhs);
        else MH.matvec(r, rhs);
        for (int v = 0; v < mesh.n_vertices(); ++v)
            if (mesh.boundary_vertex[v]) rhs[v] = 0.0;
        SolveReport rep = cg_solve_inplace(A_[i], rhs, states_[i].z, tol_);
        check_converged(rep, "adjoint");
        states_[i].adjoint_report = rep;
    });
    adjoints_current_ = true;
}

}  // namespace shapeopt
