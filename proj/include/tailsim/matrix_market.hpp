#pragma once

#include <filesystem>
#include <iosfwd>

#include "tailsim/sparse_matrix.hpp"

namespace tailsim {

// Reads a Matrix Market coordinate file. Accepted banner fields: real,
// integer or pattern; general or symmetric. Symmetric storage is expanded to
// general (off-diagonal entries mirrored); pattern entries get unit values.
// Indices are converted from the file's 1-based convention. Malformed
// banners, out-of-range coordinates, duplicate entries and count mismatches
// raise ParseError naming the offending line.
SparseMatrix load_matrix_market(const std::filesystem::path& path);
SparseMatrix load_matrix_market(std::istream& in, const std::string& name = "<stream>");

// Writes coordinate format (general; `pattern` when the matrix has no
// values). Output is deterministic: no timestamps or environment text.
void save_matrix_market(const SparseMatrix& m, const std::filesystem::path& path);
void save_matrix_market(const SparseMatrix& m, std::ostream& out);

}  // namespace tailsim
