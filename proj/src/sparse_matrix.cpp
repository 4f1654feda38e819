#include "tailsim/sparse_matrix.hpp"

#include <algorithm>
#include <numeric>

namespace tailsim {

SparseMatrix SparseMatrix::from_coo(Index rows, Index cols, std::vector<Entry> entries,
                                    bool with_values) {
    if (rows < 0 || cols < 0) throw ContractError("matrix shape must be non-negative");
    for (const Entry& e : entries) {
        if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
            throw ContractError("coordinate (" + std::to_string(e.row) + ", " +
                                std::to_string(e.col) + ") outside " + std::to_string(rows) + "x" +
                                std::to_string(cols) + " matrix");
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].row == entries[i - 1].row && entries[i].col == entries[i - 1].col)
            throw ContractError("duplicate coordinate (" + std::to_string(entries[i].row) + ", " +
                                std::to_string(entries[i].col) + ")");
    }

    SparseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.row_starts_.assign(static_cast<std::size_t>(rows) + 1, 0);
    m.col_indices_.reserve(entries.size());
    if (with_values) m.values_.reserve(entries.size());
    for (const Entry& e : entries) {
        ++m.row_starts_[static_cast<std::size_t>(e.row) + 1];
        m.col_indices_.push_back(e.col);
        if (with_values) m.values_.push_back(e.value);
    }
    std::partial_sum(m.row_starts_.begin(), m.row_starts_.end(), m.row_starts_.begin());
    return m;
}

SparseMatrix SparseMatrix::from_csr(Index rows, Index cols, std::vector<Index> row_starts,
                                    std::vector<Index> col_indices, std::vector<double> values) {
    if (rows < 0 || cols < 0) throw ContractError("matrix shape must be non-negative");
    if (row_starts.size() != static_cast<std::size_t>(rows) + 1)
        throw ContractError("row_starts must have rows+1 entries");
    if (row_starts.front() != 0 || row_starts.back() != static_cast<Index>(col_indices.size()))
        throw ContractError("row_starts must span [0, nnz]");
    if (!values.empty() && values.size() != col_indices.size())
        throw ContractError("values must be empty or match nnz");
    for (Index r = 0; r < rows; ++r) {
        const Index lo = row_starts[static_cast<std::size_t>(r)];
        const Index hi = row_starts[static_cast<std::size_t>(r) + 1];
        if (lo > hi) throw ContractError("row_starts must be non-decreasing");
        for (Index i = lo; i < hi; ++i) {
            const Index c = col_indices[static_cast<std::size_t>(i)];
            if (c < 0 || c >= cols) throw ContractError("column index out of range");
            if (i > lo && col_indices[static_cast<std::size_t>(i) - 1] >= c)
                throw ContractError("column indices must be strictly increasing within a row");
        }
    }

    SparseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.row_starts_ = std::move(row_starts);
    m.col_indices_ = std::move(col_indices);
    m.values_ = std::move(values);
    return m;
}

Count SparseMatrix::count_in_window(const Window& w) const {
    if (w.row_lo < 0 || w.row_lo > w.row_hi || w.row_hi > rows_ || w.col_lo < 0 ||
        w.col_lo > w.col_hi || w.col_hi > cols_)
        throw ContractError("window [" + std::to_string(w.row_lo) + "," +
                            std::to_string(w.row_hi) + ")x[" + std::to_string(w.col_lo) + "," +
                            std::to_string(w.col_hi) + ") invalid for " + std::to_string(rows_) +
                            "x" + std::to_string(cols_) + " matrix");
    Count total = 0;
    for (Index r = w.row_lo; r < w.row_hi; ++r) {
        const auto begin = col_indices_.begin() + row_starts_[static_cast<std::size_t>(r)];
        const auto end = col_indices_.begin() + row_starts_[static_cast<std::size_t>(r) + 1];
        total += std::lower_bound(begin, end, w.col_hi) - std::lower_bound(begin, end, w.col_lo);
    }
    return total;
}

double density(const SparseMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0)
        throw ContractError("density undefined for an empty matrix shape");
    return static_cast<double>(m.nnz()) /
           (static_cast<double>(m.rows()) * static_cast<double>(m.cols()));
}

SparseMatrix transpose(const SparseMatrix& m) {
    const std::size_t nnz = m.col_indices().size();
    std::vector<Index> t_starts(static_cast<std::size_t>(m.cols()) + 1, 0);
    for (Index c : m.col_indices()) ++t_starts[static_cast<std::size_t>(c) + 1];
    std::partial_sum(t_starts.begin(), t_starts.end(), t_starts.begin());

    std::vector<Index> t_cols(nnz);
    std::vector<double> t_values(m.has_values() ? nnz : 0);
    std::vector<Index> cursor(t_starts.begin(), t_starts.end() - 1);
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index i = m.row_starts()[static_cast<std::size_t>(r)];
             i < m.row_starts()[static_cast<std::size_t>(r) + 1]; ++i) {
            const Index c = m.col_indices()[static_cast<std::size_t>(i)];
            const Index slot = cursor[static_cast<std::size_t>(c)]++;
            t_cols[static_cast<std::size_t>(slot)] = r;
            if (m.has_values()) t_values[static_cast<std::size_t>(slot)] = m.values()[static_cast<std::size_t>(i)];
        }
    }
    // Row-major traversal writes each transposed row in increasing column
    // order, so the CSR invariant holds without a sort.
    return SparseMatrix::from_csr(m.cols(), m.rows(), std::move(t_starts), std::move(t_cols),
                                  std::move(t_values));
}

}  // namespace tailsim
