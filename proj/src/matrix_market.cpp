#include "tailsim/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace tailsim {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

struct TaggedEntry {
    Index row;
    Index col;
    double value;
    long line;
};

}  // namespace

SparseMatrix load_matrix_market(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open matrix file: " + path.string());
    return load_matrix_market(in, path.string());
}

SparseMatrix load_matrix_market(std::istream& in, const std::string& name) {
    std::string text;
    long line_no = 0;

    auto next_line = [&](std::string& out) {
        while (std::getline(in, out)) {
            ++line_no;
            if (!out.empty() && out.back() == '\r') out.pop_back();
            return true;
        }
        return false;
    };

    if (!next_line(text)) throw ParseError(name + ": empty file", 1);

    std::istringstream banner(text);
    std::string magic, object, format, field, symmetry;
    banner >> magic >> object >> format >> field >> symmetry;
    if (magic != "%%MatrixMarket")
        throw ParseError(name + ": missing %%MatrixMarket banner", line_no);
    object = lower(object);
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (object != "matrix") throw ParseError(name + ": unsupported object '" + object + "'", line_no);
    if (format != "coordinate")
        throw ParseError(name + ": unsupported format '" + format + "' (coordinate only)", line_no);
    if (field != "real" && field != "integer" && field != "pattern")
        throw ParseError(name + ": unsupported field '" + field + "'", line_no);
    if (symmetry != "general" && symmetry != "symmetric")
        throw ParseError(name + ": unsupported symmetry '" + symmetry + "'", line_no);
    const bool pattern = field == "pattern";
    const bool symmetric = symmetry == "symmetric";

    // Size line: first non-comment, non-blank line after the banner.
    Index rows = 0, cols = 0;
    Count declared = 0;
    for (;;) {
        if (!next_line(text)) throw ParseError(name + ": missing size line", line_no);
        if (text.empty() || text[0] == '%') continue;
        std::istringstream sizes(text);
        if (!(sizes >> rows >> cols >> declared))
            throw ParseError(name + ": malformed size line '" + text + "'", line_no);
        std::string extra;
        if (sizes >> extra)
            throw ParseError(name + ": trailing tokens on size line", line_no);
        break;
    }
    if (rows < 0 || cols < 0 || declared < 0)
        throw ParseError(name + ": negative dimension or count", line_no);

    std::vector<TaggedEntry> raw;
    raw.reserve(static_cast<std::size_t>(declared));
    while (next_line(text)) {
        if (text.empty() || text[0] == '%') continue;
        std::istringstream entry(text);
        Index r = 0, c = 0;
        double v = 1.0;
        if (!(entry >> r >> c))
            throw ParseError(name + ": malformed entry '" + text + "'", line_no);
        if (!pattern && !(entry >> v))
            throw ParseError(name + ": entry missing value '" + text + "'", line_no);
        std::string extra;
        if (entry >> extra)
            throw ParseError(name + ": trailing tokens in entry '" + text + "'", line_no);
        if (r < 1 || r > rows || c < 1 || c > cols)
            throw ParseError(name + ": coordinate (" + std::to_string(r) + ", " +
                                 std::to_string(c) + ") outside declared " + std::to_string(rows) +
                                 "x" + std::to_string(cols),
                             line_no);
        raw.push_back({r - 1, c - 1, v, line_no});
    }
    if (static_cast<Count>(raw.size()) != declared)
        throw ParseError(name + ": declared " + std::to_string(declared) + " entries, found " +
                             std::to_string(raw.size()),
                         line_no);

    std::vector<TaggedEntry> expanded;
    expanded.reserve(raw.size() * (symmetric ? 2 : 1));
    for (const TaggedEntry& e : raw) {
        expanded.push_back(e);
        if (symmetric && e.row != e.col) expanded.push_back({e.col, e.row, e.value, e.line});
    }

    std::sort(expanded.begin(), expanded.end(), [](const TaggedEntry& a, const TaggedEntry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (std::size_t i = 1; i < expanded.size(); ++i) {
        if (expanded[i].row == expanded[i - 1].row && expanded[i].col == expanded[i - 1].col)
            throw ParseError(name + ": duplicate coordinate (" +
                                 std::to_string(expanded[i].row + 1) + ", " +
                                 std::to_string(expanded[i].col + 1) + ")",
                             std::max(expanded[i].line, expanded[i - 1].line));
    }

    std::vector<Entry> entries;
    entries.reserve(expanded.size());
    for (const TaggedEntry& e : expanded) entries.push_back({e.row, e.col, e.value});
    return SparseMatrix::from_coo(rows, cols, std::move(entries), !pattern);
}

void save_matrix_market(const SparseMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open output file: " + path.string());
    save_matrix_market(m, out);
}

void save_matrix_market(const SparseMatrix& m, std::ostream& out) {
    const bool pattern = !m.has_values();
    out << "%%MatrixMarket matrix coordinate " << (pattern ? "pattern" : "real") << " general\n";
    out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
    char buf[96];
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index i = m.row_starts()[static_cast<std::size_t>(r)];
             i < m.row_starts()[static_cast<std::size_t>(r) + 1]; ++i) {
            const Index c = m.col_indices()[static_cast<std::size_t>(i)];
            if (pattern) {
                std::snprintf(buf, sizeof buf, "%" PRId64 " %" PRId64, r + 1, c + 1);
            } else {
                std::snprintf(buf, sizeof buf, "%" PRId64 " %" PRId64 " %.17g", r + 1, c + 1,
                              m.values()[static_cast<std::size_t>(i)]);
            }
            out << buf << '\n';
        }
    }
}

}  // namespace tailsim
