#include "shapeopt/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace shapeopt {

namespace {

double dot(const NodalVector& a, const NodalVector& b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace

SolveReport cg_solve_inplace(const SparseMatrix& A, const NodalVector& b,
                             NodalVector& x, double tol, int max_iter) {
    const int n = A.rows();
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("cg_solve: dimension mismatch");
    if (tol <= 0.0) throw std::invalid_argument("cg_solve: tol must be positive");
    if (max_iter < 0) max_iter = 10 * n;
    x.resize(n, 0.0);

    SolveReport report;
    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) {
        x.assign(n, 0.0);
        report.converged = true;
        return report;
    }

    // Jacobi preconditioner: the penalty term makes exterior diagonals large,
    // which plain CG handles poorly.
    NodalVector inv_diag(n);
    const auto& pat = *A.pattern;
    for (int r = 0; r < n; ++r) {
        double d = 0.0;
        for (int p = pat.row_ptr[r]; p < pat.row_ptr[r + 1]; ++p)
            if (pat.col_idx[p] == r) { d = A.values[p]; break; }
        if (d <= 0.0) throw std::invalid_argument("cg_solve: nonpositive diagonal");
        inv_diag[r] = 1.0 / d;
    }

    NodalVector r(n), z(n), p(n), Ap(n);
    A.matvec(x, Ap);
    for (int i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = dot(r, z);

    int it = 0;
    for (; it < max_iter; ++it) {
        if (std::sqrt(dot(r, r)) <= tol * bnorm) break;
        A.matvec(p, Ap);
        const double pAp = dot(p, Ap);
        if (!(pAp > 0.0)) break;  // not SPD (or breakdown)
        const double alpha = rz / pAp;
        for (int i = 0; i < n; ++i) x[i] += alpha * p[i];
        for (int i = 0; i < n; ++i) r[i] -= alpha * Ap[i];
        for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }

    // true residual, so the report cannot be fooled by recurrence drift
    A.matvec(x, Ap);
    double rr = 0.0;
    for (int i = 0; i < n; ++i) {
        const double ri = b[i] - Ap[i];
        rr += ri * ri;
    }
    report.iterations = it;
    report.final_residual = std::sqrt(rr) / bnorm;
    report.converged = report.final_residual <= tol;
    return report;
}

std::pair<NodalVector, SolveReport> cg_solve(const SparseMatrix& A, const NodalVector& b,
                                             double tol, int max_iter, const NodalVector* x0) {
    NodalVector x;
    if (x0) x = *x0;
    else x.assign(A.rows(), 0.0);
    SolveReport report = cg_solve_inplace(A, b, x, tol, max_iter);
    return {std::move(x), report};
}

}  // namespace shapeopt
