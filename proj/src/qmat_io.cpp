#include "qstiefel/qmat_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "qstiefel/errors.hpp"

namespace qstiefel {

namespace {

double parse_double(const std::string& tok) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw ParseError("QMAT1: bad number '" + tok + "'");
  return v;
}

Index parse_dim(const std::string& tok) {
  long long v = -1;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc{} || ptr != end || v < 0) {
    throw ParseError("QMAT1: bad dimension '" + tok + "'");
  }
  return static_cast<Index>(v);
}

}  // namespace

void write_qmat(std::ostream& os, const QuatMatrix& a) {
  os << "QMAT1 " << a.rows() << ' ' << a.cols() << '\n';
  char buf[128];
  for (Index r = 0; r < a.rows(); ++r) {
    for (Index c = 0; c < a.cols(); ++c) {
      const Quaternion q = a(r, c);
      std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g\n", q.w, q.x, q.y, q.z);
      os << buf;
    }
  }
}

QuatMatrix read_qmat(std::istream& is) {
  std::string tok;
  if (!(is >> tok) || tok != "QMAT1") throw ParseError("QMAT1: missing magic header");
  std::string rtok;
  std::string ctok;
  if (!(is >> rtok >> ctok)) throw ParseError("QMAT1: missing dimensions");
  const Index rows = parse_dim(rtok);
  const Index cols = parse_dim(ctok);
  QuatMatrix a(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      double v[4];
      for (double& x : v) {
        if (!(is >> tok)) {
          throw ParseError("QMAT1: truncated at entry (" + std::to_string(r) + ", " +
                           std::to_string(c) + ")");
        }
        x = parse_double(tok);
      }
      a.set(r, c, {v[0], v[1], v[2], v[3]});
    }
  }
  if (is >> tok) throw ParseError("QMAT1: trailing data '" + tok + "'");
  return a;
}

void save_qmat(const std::filesystem::path& path, const QuatMatrix& a) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  write_qmat(os, a);
  if (!os) throw Error("write failed: " + path.string());
}

QuatMatrix load_qmat(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open " + path.string());
  return read_qmat(is);
}

}  // namespace qstiefel
