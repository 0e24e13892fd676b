#pragma once

#include <filesystem>
#include <iosfwd>

#include "qstiefel/quat_matrix.hpp"

namespace qstiefel {

// QMAT1 text format:
//   QMAT1 <rows> <cols>
//   rows*cols lines in row-major order, each "w x y z" with 17 significant digits.
// Readers accept arbitrary whitespace between tokens.

void write_qmat(std::ostream& os, const QuatMatrix& a);
QuatMatrix read_qmat(std::istream& is);

void save_qmat(const std::filesystem::path& path, const QuatMatrix& a);
QuatMatrix load_qmat(const std::filesystem::path& path);

}  // namespace qstiefel
