#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "nfv/core/checked.hpp"
#include "nfv/core/errors.hpp"

namespace nfv {

/// A variable bound; std::nullopt stands for -inf (lower) or +inf (upper).
using Bound = std::optional<Int>;

/// Dense row-major integer matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Int> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}

  [[nodiscard]] Int &at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  [[nodiscard]] Int at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  [[nodiscard]] Int max_abs() const {
    Int m = 0;
    for (Int v : data)
      m = std::max(m, checked_abs(v));
    return m;
  }

  friend bool operator==(const Matrix &, const Matrix &) = default;
};

/// min { w x : E^(n) x = b, l <= x <= u, x integral } where E^(n) repeats D
/// across the top r rows and places A on the block diagonal.
///
/// Coordinates are brick-major: coordinate i*t + j is variable j of brick i.
/// b holds the r global right-hand sides followed by n blocks of s local ones.
struct StandardNFoldProgram {
  std::size_t n = 1;
  std::size_t r = 0;
  std::size_t s = 0;
  std::size_t t = 0;
  Matrix D;
  Matrix A;
  /// Optional global blocks D_1..D_n, one per brick; empty means D everywhere.
  std::vector<Matrix> brick_D;
  std::vector<Int> b;
  std::vector<Bound> lower;
  std::vector<Bound> upper;
  std::vector<Int> weight;

  [[nodiscard]] std::size_t dimension() const { return n * t; }
  [[nodiscard]] std::size_t coord(std::size_t brick, std::size_t j) const {
    return brick * t + j;
  }
  [[nodiscard]] Int global_rhs(std::size_t row) const { return b[row]; }
  [[nodiscard]] Int local_rhs(std::size_t brick, std::size_t row) const {
    return b[r + brick * s + row];
  }

  [[nodiscard]] Int global_coef(std::size_t brick, std::size_t row, std::size_t j) const {
    return brick_D.empty() ? D.at(row, j) : brick_D[brick].at(row, j);
  }

  /// Largest absolute coefficient, max(|D|_inf, |A|_inf).
  [[nodiscard]] Int max_coefficient() const {
    Int a = std::max(D.max_abs(), A.max_abs());
    for (const auto &m : brick_D)
      a = std::max(a, m.max_abs());
    return a;
  }

  friend bool operator==(const StandardNFoldProgram &,
                         const StandardNFoldProgram &) = default;
};

struct Diagnostic {
  enum class Kind { DimensionMismatch, EmptyBox, ZeroBricks };
  Kind kind;
  std::string message;
  std::optional<std::size_t> coordinate;
};

/// Lists every violated structural invariant; empty means well formed.
inline std::vector<Diagnostic>
validate_program(const StandardNFoldProgram &p) {
  std::vector<Diagnostic> out;
  auto mismatch = [&](std::string what, std::size_t got, std::size_t want) {
    out.push_back({Diagnostic::Kind::DimensionMismatch,
                   what + ": expected " + std::to_string(want) + ", got " +
                       std::to_string(got),
                   std::nullopt});
  };
  if (p.n == 0)
    out.push_back({Diagnostic::Kind::ZeroBricks, "brick count must be positive",
                   std::nullopt});
  if (p.D.rows != p.r)
    mismatch("D rows", p.D.rows, p.r);
  if (p.D.cols != p.t)
    mismatch("D columns", p.D.cols, p.t);
  if (p.A.rows != p.s)
    mismatch("A rows", p.A.rows, p.s);
  if (p.A.cols != p.t)
    mismatch("A columns", p.A.cols, p.t);
  if (p.D.data.size() != p.D.rows * p.D.cols)
    mismatch("D storage", p.D.data.size(), p.D.rows * p.D.cols);
  if (!p.brick_D.empty()) {
    if (p.brick_D.size() != p.n)
      mismatch("per-brick D blocks", p.brick_D.size(), p.n);
    for (const auto &m : p.brick_D) {
      if (m.rows != p.r || m.cols != p.t || m.data.size() != p.r * p.t) {
        mismatch("per-brick D size", m.data.size(), p.r * p.t);
        break;
      }
    }
  }
  if (p.A.data.size() != p.A.rows * p.A.cols)
    mismatch("A storage", p.A.data.size(), p.A.rows * p.A.cols);
  if (p.b.size() != p.r + p.n * p.s)
    mismatch("b length", p.b.size(), p.r + p.n * p.s);
  const std::size_t dim = p.n * p.t;
  if (p.lower.size() != dim)
    mismatch("l length", p.lower.size(), dim);
  if (p.upper.size() != dim)
    mismatch("u length", p.upper.size(), dim);
  if (p.weight.size() != dim)
    mismatch("w length", p.weight.size(), dim);
  const std::size_t common = std::min(p.lower.size(), p.upper.size());
  for (std::size_t j = 0; j < common; ++j) {
    if (p.lower[j] && p.upper[j] && *p.lower[j] > *p.upper[j])
      out.push_back({Diagnostic::Kind::EmptyBox,
                     "empty box at coordinate " + std::to_string(j) + ": " +
                         std::to_string(*p.lower[j]) + " > " +
                         std::to_string(*p.upper[j]),
                     j});
  }
  return out;
}

inline void require_valid(const StandardNFoldProgram &p) {
  auto diags = validate_program(p);
  if (!diags.empty())
    throw InputError("invalid n-fold program: " + diags.front().message);
}

struct Evaluation {
  bool feasible = false;
  Int value = 0;
};

/// Checks membership in the feasible region and computes w x.
inline Evaluation evaluate(const StandardNFoldProgram &p,
                           const std::vector<Int> &x) {
  if (x.size() != p.dimension())
    throw InputError("assignment length " + std::to_string(x.size()) +
                     " does not match n*t = " + std::to_string(p.dimension()));
  Evaluation ev;
  ev.feasible = true;
  for (std::size_t j = 0; j < x.size(); ++j) {
    ev.value = checked_add(ev.value, checked_mul(p.weight[j], x[j]));
    if ((p.lower[j] && x[j] < *p.lower[j]) || (p.upper[j] && x[j] > *p.upper[j]))
      ev.feasible = false;
  }
  for (std::size_t row = 0; row < p.r; ++row) {
    Int sum = 0;
    for (std::size_t i = 0; i < p.n; ++i)
      for (std::size_t j = 0; j < p.t; ++j)
        sum = checked_add(sum, checked_mul(p.global_coef(i, row, j), x[p.coord(i, j)]));
    if (sum != p.global_rhs(row))
      ev.feasible = false;
  }
  for (std::size_t i = 0; i < p.n; ++i)
    for (std::size_t row = 0; row < p.s; ++row) {
      Int sum = 0;
      for (std::size_t j = 0; j < p.t; ++j)
        sum = checked_add(sum, checked_mul(p.A.at(row, j), x[p.coord(i, j)]));
      if (sum != p.local_rhs(i, row))
        ev.feasible = false;
    }
  return ev;
}

// ---------------------------------------------------------------------------
// Text format
//
//   nfold n r s t [bricks]
//   D   (r lines of t integers; n such blocks when the header ends in
//        'bricks', one per brick)
//   A   (s lines of t integers)
//   b   (one line, r + n*s integers)
//   l   (one line, n*t integers or -inf)
//   u   (one line, n*t integers or inf)
//   w   (one line, n*t integers)

namespace detail {

template <class Seq, class Fmt>
void write_line(std::ostream &os, const Seq &seq, Fmt fmt) {
  bool first = true;
  for (const auto &v : seq) {
    if (!first)
      os << ' ';
    first = false;
    os << fmt(v);
  }
  os << '\n';
}

inline std::vector<std::string> split_tokens(const std::string &line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok)
    out.push_back(tok);
  return out;
}

inline Int parse_int(const std::string &tok, const std::string &where) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(tok, &used);
  } catch (const std::exception &) {
    throw ParseError(where + ": expected integer, got '" + tok + "'");
  }
  if (used != tok.size())
    throw ParseError(where + ": expected integer, got '" + tok + "'");
  return static_cast<Int>(v);
}

} // namespace detail

inline void write_program(std::ostream &os, const StandardNFoldProgram &p) {
  os << "nfold " << p.n << ' ' << p.r << ' ' << p.s << ' ' << p.t
     << (p.brick_D.empty() ? "" : " bricks") << '\n';
  auto ident = [](Int v) { return std::to_string(v); };
  auto rows = [&](const Matrix &m) {
    for (std::size_t i = 0; i < m.rows; ++i)
      detail::write_line(os,
                         std::vector<Int>(m.data.begin() + static_cast<std::ptrdiff_t>(i * m.cols),
                                          m.data.begin() + static_cast<std::ptrdiff_t>((i + 1) * m.cols)),
                         ident);
  };
  if (p.brick_D.empty())
    rows(p.D);
  for (const auto &m : p.brick_D)
    rows(m);
  for (std::size_t i = 0; i < p.s; ++i)
    detail::write_line(os,
                       std::vector<Int>(p.A.data.begin() + i * p.t,
                                        p.A.data.begin() + (i + 1) * p.t),
                       ident);
  detail::write_line(os, p.b, ident);
  detail::write_line(os, p.lower, [](const Bound &v) {
    return v ? std::to_string(*v) : std::string("-inf");
  });
  detail::write_line(os, p.upper, [](const Bound &v) {
    return v ? std::to_string(*v) : std::string("inf");
  });
  detail::write_line(os, p.weight, ident);
}

inline std::string to_text(const StandardNFoldProgram &p) {
  std::ostringstream os;
  write_program(os, p);
  return os.str();
}

inline StandardNFoldProgram read_program(std::istream &is) {
  std::string line;
  std::size_t lineno = 0;
  auto next = [&](const char *what) {
    if (!std::getline(is, line))
      throw ParseError(std::string("unexpected end of input reading ") + what);
    ++lineno;
    return detail::split_tokens(line);
  };
  auto where = [&](const char *what) {
    return "line " + std::to_string(lineno) + " (" + what + ")";
  };

  auto head = next("header");
  if (head.size() < 5 || head.size() > 6 || head[0] != "nfold" ||
      (head.size() == 6 && head[5] != "bricks"))
    throw ParseError(where("header") + ": expected 'nfold n r s t [bricks]'");
  StandardNFoldProgram p;
  auto dim = [&](const std::string &tok) {
    Int v = detail::parse_int(tok, where("header"));
    if (v < 0)
      throw ParseError(where("header") + ": negative dimension");
    return static_cast<std::size_t>(v);
  };
  p.n = dim(head[1]);
  p.r = dim(head[2]);
  p.s = dim(head[3]);
  p.t = dim(head[4]);

  auto read_ints = [&](const char *what, std::size_t count) {
    auto toks = next(what);
    if (toks.size() != count)
      throw ParseError(where(what) + ": expected " + std::to_string(count) +
                       " values, got " + std::to_string(toks.size()));
    std::vector<Int> out;
    out.reserve(count);
    for (const auto &tok : toks)
      out.push_back(detail::parse_int(tok, where(what)));
    return out;
  };
  auto read_bounds = [&](const char *what, std::size_t count,
                         const char *inf_token) {
    auto toks = next(what);
    if (toks.size() != count)
      throw ParseError(where(what) + ": expected " + std::to_string(count) +
                       " values, got " + std::to_string(toks.size()));
    std::vector<Bound> out;
    out.reserve(count);
    for (const auto &tok : toks) {
      if (tok == inf_token)
        out.emplace_back(std::nullopt);
      else
        out.emplace_back(detail::parse_int(tok, where(what)));
    }
    return out;
  };

  auto read_matrix = [&](const char *what, std::size_t rows) {
    Matrix m(rows, p.t);
    for (std::size_t i = 0; i < rows; ++i) {
      auto row = read_ints(what, p.t);
      std::copy(row.begin(), row.end(), m.data.begin() + static_cast<std::ptrdiff_t>(i * p.t));
    }
    return m;
  };
  p.D = Matrix(p.r, p.t);
  if (head.size() == 6) {
    if (p.n > 1'000'000)
      throw ParseError(where("header") + ": too many per-brick blocks");
    for (std::size_t i = 0; i < p.n; ++i)
      p.brick_D.push_back(read_matrix("D_i", p.r));
  } else {
    p.D = read_matrix("D", p.r);
  }
  p.A = Matrix(p.s, p.t);
  for (std::size_t i = 0; i < p.s; ++i) {
    auto row = read_ints("A", p.t);
    std::copy(row.begin(), row.end(), p.A.data.begin() + i * p.t);
  }
  p.b = read_ints("b", p.r + p.n * p.s);
  p.lower = read_bounds("l", p.n * p.t, "-inf");
  p.upper = read_bounds("u", p.n * p.t, "inf");
  p.weight = read_ints("w", p.n * p.t);
  return p;
}

inline StandardNFoldProgram from_text(const std::string &text) {
  std::istringstream is(text);
  return read_program(is);
}

} // namespace nfv
