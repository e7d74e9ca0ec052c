#include "shapeopt/sparse.hpp"

#include <algorithm>
#include <stdexcept>

namespace shapeopt {

int SparsePattern::find(int r, int c) const {
    const int b = row_ptr[r], e = row_ptr[r + 1];
    const auto it = std::lower_bound(col_idx.begin() + b, col_idx.begin() + e, c);
    if (it == col_idx.begin() + e || *it != c) return -1;
    return static_cast<int>(it - col_idx.begin());
}

double SparseMatrix::get(int r, int c) const {
    const int p = pattern->find(r, c);
    return p < 0 ? 0.0 : values[p];
}

void SparseMatrix::matvec(const NodalVector& x, NodalVector& y) const {
    const auto& pat = *pattern;
    if (static_cast<int>(x.size()) != pat.n)
        throw std::invalid_argument("matvec: dimension mismatch");
    y.resize(pat.n);
    for (int r = 0; r < pat.n; ++r) {
        double acc = 0.0;
        for (int p = pat.row_ptr[r]; p < pat.row_ptr[r + 1]; ++p)
            acc += values[p] * x[pat.col_idx[p]];
        y[r] = acc;
    }
}

SparseMatrix make_matrix(std::shared_ptr<const SparsePattern> pattern, bool symmetric) {
    SparseMatrix m;
    m.values.assign(pattern->nnz(), 0.0);
    m.pattern = std::move(pattern);
    m.symmetric = symmetric;
    return m;
}

}  // namespace shapeopt
