#pragma once

#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include "nfv/extended/program.hpp"

namespace nfv::ext {

// S-expression dump, one item per line:
//
//   (extended N)
//   (var NAME (lo L1 .. Ln) (hi U1 .. Un) (w W1 .. Wn))
//   (local REL EXPR (rhs B1 ..))
//   (global REL EXPR (rhs B))
//
// EXPR is the canonical key: (x j) (const c..) (lin (c e)..) (not e)
// (or e f) (bool m e) (bool m (cmp REL f g)) (sgn m e).

inline std::string dump(const ExtendedProgram &ep) {
  check_shape(ep);
  std::ostringstream os;
  auto bound = [](const Bound &b, const char *inf) {
    return b ? std::to_string(*b) : std::string(inf);
  };
  os << "(extended " << ep.n << ")\n";
  for (std::size_t j = 0; j < ep.t(); ++j) {
    const auto &name = ep.names[j];
    if (name.empty() || name.find_first_of("() \t\n") != std::string::npos)
      throw InputError("variable name '" + name + "' cannot be dumped");
    os << "(var " << name << " (lo";
    for (const auto &b : ep.lower[j])
      os << ' ' << bound(b, "-inf");
    os << ") (hi";
    for (const auto &b : ep.upper[j])
      os << ' ' << bound(b, "inf");
    os << ") (w";
    for (Int w : ep.weight[j])
      os << ' ' << w;
    os << "))\n";
  }
  for (const auto &c : ep.constraints) {
    os << '(' << (c.scope == Scope::Global ? "global" : "local") << ' '
       << to_string(c.rel) << ' ' << c.lhs.key() << " (rhs";
    for (Int v : c.rhs)
      os << ' ' << v;
    os << "))\n";
  }
  return os.str();
}

namespace detail {

struct SNode {
  std::string atom;
  std::vector<SNode> list;
  bool is_list = false;
};

class SParser {
public:
  explicit SParser(const std::string &text) : s_(text) {}

  bool at_end() {
    skip();
    return pos_ >= s_.size();
  }

  SNode next() {
    skip();
    if (pos_ >= s_.size())
      throw ParseError("unexpected end of s-expression input");
    if (s_[pos_] == ')')
      throw ParseError("unexpected ')' at offset " + std::to_string(pos_));
    if (s_[pos_] == '(') {
      ++pos_;
      SNode node;
      node.is_list = true;
      for (;;) {
        skip();
        if (pos_ >= s_.size())
          throw ParseError("unbalanced '(' in s-expression");
        if (s_[pos_] == ')') {
          ++pos_;
          return node;
        }
        node.list.push_back(next());
      }
    }
    std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) &&
           s_[pos_] != '(' && s_[pos_] != ')')
      ++pos_;
    return SNode{s_.substr(start, pos_ - start), {}, false};
  }

private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }
  const std::string &s_;
  std::size_t pos_ = 0;
};

inline const std::string &head(const SNode &n) {
  if (!n.is_list || n.list.empty() || n.list[0].is_list)
    throw ParseError("expected a tagged list");
  return n.list[0].atom;
}

inline const std::string &atom_of(const SNode &n) {
  if (n.is_list)
    throw ParseError("expected an atom, got a list");
  return n.atom;
}

inline Int int_of(const SNode &n) { return nfv::detail::parse_int(atom_of(n), "s-expression"); }

inline void arity(const SNode &n, std::size_t k) {
  if (n.list.size() != k)
    throw ParseError("'" + head(n) + "' expects " + std::to_string(k - 1) + " arguments");
}

inline Expr parse_expr(const SNode &n) {
  const std::string &tag = head(n);
  if (tag == "x") {
    arity(n, 2);
    Int j = int_of(n.list[1]);
    if (j < 0)
      throw ParseError("negative variable index");
    return var(static_cast<std::size_t>(j));
  }
  if (tag == "const") {
    if (n.list.size() < 2)
      throw ParseError("'const' needs a value");
    std::vector<Int> vals;
    for (std::size_t k = 1; k < n.list.size(); ++k)
      vals.push_back(int_of(n.list[k]));
    return vals.size() == 1 ? constant(vals[0]) : constant_per_brick(vals);
  }
  if (tag == "lin") {
    std::vector<std::pair<Int, Expr>> terms;
    for (std::size_t k = 1; k < n.list.size(); ++k) {
      const SNode &term = n.list[k];
      if (!term.is_list || term.list.size() != 2)
        throw ParseError("'lin' terms are (coefficient expr)");
      terms.emplace_back(int_of(term.list[0]), parse_expr(term.list[1]));
    }
    return lin(std::move(terms));
  }
  if (tag == "not") {
    arity(n, 2);
    return logical_not(parse_expr(n.list[1]));
  }
  if (tag == "or") {
    arity(n, 3);
    return logical_or(parse_expr(n.list[1]), parse_expr(n.list[2]));
  }
  if (tag == "bool" || tag == "sgn") {
    arity(n, 3);
    Int m = int_of(n.list[1]);
    if (m <= 0)
      throw ParseError("'" + tag + "' needs a positive m");
    const SNode &arg = n.list[2];
    if (tag == "bool" && arg.is_list && !arg.list.empty() && !arg.list[0].is_list &&
        arg.list[0].atom == "cmp") {
      arity(arg, 4);
      return bool_m(m, parse_relation(atom_of(arg.list[1])), parse_expr(arg.list[2]),
                    parse_expr(arg.list[3]));
    }
    return tag == "bool" ? bool_m(m, parse_expr(arg)) : sgn_m(m, parse_expr(arg));
  }
  throw ParseError("unknown expression tag '" + tag + "'");
}

inline std::vector<Int> tagged_ints(const SNode &n, const std::string &tag) {
  if (head(n) != tag)
    throw ParseError("expected (" + tag + " ...)");
  std::vector<Int> out;
  for (std::size_t k = 1; k < n.list.size(); ++k)
    out.push_back(int_of(n.list[k]));
  return out;
}

inline std::vector<Bound> tagged_bounds(const SNode &n, const std::string &tag,
                                        const char *inf) {
  if (head(n) != tag)
    throw ParseError("expected (" + tag + " ...)");
  std::vector<Bound> out;
  for (std::size_t k = 1; k < n.list.size(); ++k) {
    const std::string &a = atom_of(n.list[k]);
    out.push_back(a == inf ? Bound() : Bound(nfv::detail::parse_int(a, tag)));
  }
  return out;
}

} // namespace detail

inline ExtendedProgram parse_extended(const std::string &text) {
  detail::SParser parser(text);
  if (parser.at_end())
    throw ParseError("empty extended program");
  detail::SNode first = parser.next();
  if (detail::head(first) != "extended")
    throw ParseError("expected (extended N)");
  detail::arity(first, 2);
  Int n = detail::int_of(first.list[1]);
  if (n <= 0)
    throw ParseError("brick count must be positive");
  ExtendedProgram ep(static_cast<std::size_t>(n));
  while (!parser.at_end()) {
    detail::SNode item = parser.next();
    const std::string &tag = detail::head(item);
    if (tag == "var") {
      detail::arity(item, 5);
      std::size_t j = ep.add_variable(detail::atom_of(item.list[1]), 0, 0);
      ep.lower[j] = detail::tagged_bounds(item.list[2], "lo", "-inf");
      ep.upper[j] = detail::tagged_bounds(item.list[3], "hi", "inf");
      ep.weight[j] = detail::tagged_ints(item.list[4], "w");
    } else if (tag == "local" || tag == "global") {
      detail::arity(item, 4);
      UniformConstraint c;
      c.scope = tag == "local" ? Scope::Local : Scope::Global;
      c.rel = parse_relation(detail::atom_of(item.list[1]));
      c.lhs = detail::parse_expr(item.list[2]);
      c.rhs = detail::tagged_ints(item.list[3], "rhs");
      ep.constraints.push_back(std::move(c));
    } else {
      throw ParseError("unknown item '" + tag + "'");
    }
  }
  try {
    check_shape(ep);
  } catch (const InputError &e) {
    throw ParseError(e.what());
  }
  return ep;
}

} // namespace nfv::ext
