#pragma once

#include <vector>

#include "tailsim/types.hpp"

namespace tailsim {

// One coordinate-form entry. `value` is ignored when a matrix is built
// without values (pattern-only).
struct Entry {
    Index row = 0;
    Index col = 0;
    double value = 1.0;
};

// Compressed sparse row pattern with optional values.
//
// Invariants (checked by the builders):
//   - row_starts has rows()+1 entries, non-decreasing, front 0, back nnz
//   - column indices are strictly increasing within each row
//   - values, when present, has exactly nnz entries
class SparseMatrix {
public:
    SparseMatrix() = default;

    // Builds from unordered coordinate entries. Throws ContractError on
    // out-of-range coordinates and duplicate (row, col) pairs.
    static SparseMatrix from_coo(Index rows, Index cols, std::vector<Entry> entries,
                                 bool with_values = false);

    // Adopts prebuilt CSR arrays; validates the invariants above.
    static SparseMatrix from_csr(Index rows, Index cols, std::vector<Index> row_starts,
                                 std::vector<Index> col_indices, std::vector<double> values = {});

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }
    Count nnz() const { return static_cast<Count>(col_indices_.size()); }
    bool has_values() const { return !values_.empty(); }

    const std::vector<Index>& row_starts() const { return row_starts_; }
    const std::vector<Index>& col_indices() const { return col_indices_; }
    const std::vector<double>& values() const { return values_; }

    // Number of stored entries inside a half-open window. Sublinear in the
    // window: two binary searches per covered row.
    Count count_in_window(const Window& w) const;
    Count count_in_window(Index row_lo, Index row_hi, Index col_lo, Index col_hi) const {
        return count_in_window(Window{row_lo, row_hi, col_lo, col_hi});
    }

    bool operator==(const SparseMatrix& other) const = default;

private:
    Index rows_ = 0;
    Index cols_ = 0;
    std::vector<Index> row_starts_{0};
    std::vector<Index> col_indices_;
    std::vector<double> values_;
};

// nnz / (rows * cols). Throws ContractError for an empty shape.
double density(const SparseMatrix& m);

// Exact transpose; preserves values when present. O(nnz + rows + cols).
SparseMatrix transpose(const SparseMatrix& m);

}  // namespace tailsim
