#pragma once

#include <utility>

#include "shapeopt/sparse.hpp"

namespace shapeopt {

struct SolveReport {
    int iterations = 0;
    double final_residual = 0.0;  // relative 2-norm ||Ax-b|| / ||b||
    bool converged = false;
};

// Jacobi-preconditioned conjugate gradients. x is used as the warm start and
// holds the solution on return. max_iter < 0 selects the default 10*n.
SolveReport cg_solve_inplace(const SparseMatrix& A, const NodalVector& b,
                             NodalVector& x, double tol = 1e-10, int max_iter = -1);

std::pair<NodalVector, SolveReport> cg_solve(const SparseMatrix& A, const NodalVector& b,
                                             double tol = 1e-10, int max_iter = -1,
                                             const NodalVector* x0 = nullptr);

}  // namespace shapeopt
