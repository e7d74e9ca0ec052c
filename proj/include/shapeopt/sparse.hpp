#pragma once

#include <memory>
#include <vector>

namespace shapeopt {

using NodalVector = std::vector<double>;

// Immutable CSR sparsity structure. One pattern per mesh is shared by every
// assembled matrix so per-sample assembly only touches value arrays.
struct SparsePattern {
    int n = 0;
    std::vector<int> row_ptr;  // size n+1
    std::vector<int> col_idx;  // size nnz, sorted within each row

    int nnz() const { return static_cast<int>(col_idx.size()); }
    // Position of entry (r, c) in the value array, or -1 if not present.
    int find(int r, int c) const;
};

struct SparseMatrix {
    std::shared_ptr<const SparsePattern> pattern;
    std::vector<double> values;
    bool symmetric = false;

    int rows() const { return pattern ? pattern->n : 0; }
    double get(int r, int c) const;  // 0 for entries outside the pattern
    void matvec(const NodalVector& x, NodalVector& y) const;
};

SparseMatrix make_matrix(std::shared_ptr<const SparsePattern> pattern, bool symmetric);

}  // namespace shapeopt
