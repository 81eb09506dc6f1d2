#pragma once

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "psatz/polymatrix.hpp"

namespace psatz {

/// Maps variable slots to display names. Plain contexts use x1..xn; a
/// homogenized context exposes x0 for the homogenization slot.
struct VarTable {
  std::vector<std::string> names;

  static VarTable plain(std::size_t nvars) {
    VarTable t;
    t.names.reserve(nvars);
    for (std::size_t i = 0; i < nvars; ++i) t.names.push_back("x" + std::to_string(i + 1));
    return t;
  }
  static VarTable homogenized(std::size_t nslots) {
    VarTable t;
    t.names.reserve(nslots);
    for (std::size_t i = 0; i < nslots; ++i) t.names.push_back("x" + std::to_string(i));
    return t;
  }

  std::size_t nvars() const { return names.size(); }
  const std::string& name(std::size_t slot) const { return names.at(slot); }
  std::optional<std::size_t> find(std::string_view n) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == n) return i;
    return std::nullopt;
  }
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// ---------------------------------------------------------------------------
// Printing. Canonical form: terms in descending graded-lex order, exact
// rational coefficients, explicit '*' between factors.

inline std::string to_string(const Monomial& m, const VarTable& vars) {
  std::string out;
  for (std::size_t i = 0; i < m.nvars(); ++i) {
    if (m[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += vars.name(i);
    if (m[i] > 1) out += "^" + std::to_string(m[i]);
  }
  return out.empty() ? "1" : out;
}

inline std::string to_string(const Poly<Rational>& p, const VarTable& vars) {
  if (p.is_zero()) return "0";
  std::string out;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [m, c] = *it;
    const bool neg = c.sign() < 0;
    if (out.empty()) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    const Rational a = c.abs();
    if (m.is_constant()) {
      out += a.str();
    } else {
      if (!(a == Rational(1))) out += a.str() + "*";
      out += to_string(m, vars);
    }
  }
  return out;
}

inline std::string to_string(const PolyMatrix<Rational>& m, const VarTable& vars) {
  std::string out = "[";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += i ? ", [" : "[";
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j) out += ", ";
      out += to_string(m.at(i, j), vars);
    }
    out += "]";
  }
  return out + "]";
}

// ---------------------------------------------------------------------------
// Parsing. Grammar (exact into rational mode):
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*          '/' needs a constant divisor
//   factor := base ['^' uint]
//   base   := number | variable | '(' expr ')'
//   number := digits ['.' digits]

namespace detail {

class PolyParser {
 public:
  PolyParser(std::string_view text, const VarTable& vars) : s_(text), vars_(vars) {}

  Poly<Rational> parse_poly_all() {
    auto p = parse_expr();
    expect_end();
    return p;
  }
  PolyMatrix<Rational> parse_matrix_all() {
    auto m = parse_matrix();
    expect_end();
    return m;
  }
  std::vector<Poly<Rational>> parse_poly_list_all() {
    auto v = parse_list([this] { return parse_expr(); });
    expect_end();
    return v;
  }
  std::vector<PolyMatrix<Rational>> parse_matrix_list_all() {
    auto v = parse_list([this] { return parse_matrix(); });
    expect_end();
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }
  void expect_end() {
    if (peek() != '\0') fail("trailing input");
  }

  Poly<Rational> parse_expr() {
    Poly<Rational> acc(vars_.nvars());
    bool first = true;
    for (;;) {
      bool neg = false;
      if (consume('-')) neg = true;
      else if (consume('+')) {}
      else if (!first) break;
      auto t = parse_term();
      if (neg) acc -= t;
      else acc += t;
      first = false;
      const char c = peek();
      if (c != '+' && c != '-') break;
    }
    return acc;
  }

  Poly<Rational> parse_term() {
    auto p = parse_factor();
    for (;;) {
      if (consume('*')) {
        p = p * parse_factor();
      } else if (consume('/')) {
        auto q = parse_factor();
        if (q.degree() > 0) fail("division by a non-constant polynomial");
        const Rational c = q.coefficient(Monomial(vars_.nvars()));
        if (c.is_zero()) fail("division by zero");
        p = p.scaled(Rational(1) / c);
      } else {
        break;
      }
    }
    return p;
  }

  Poly<Rational> parse_factor() {
    if (consume('-')) return -parse_factor();
    auto p = parse_base();
    if (consume('^')) {
      const unsigned e = parse_uint();
      p = p.pow(e);
    }
    return p;
  }

  Poly<Rational> parse_base() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      auto p = parse_expr();
      expect(')');
      return p;
    }
    if (c >= '0' && c <= '9') return Poly<Rational>::constant(vars_.nvars(), parse_number());
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
      const std::size_t start = pos_;
      std::string id;
      while (pos_ < s_.size()) {
        const char d = s_[pos_];
        if ((d >= 'a' && d <= 'z') || (d >= 'A' && d <= 'Z') || (d >= '0' && d <= '9') || d == '_') {
          id.push_back(d);
          ++pos_;
        } else {
          break;
        }
      }
      auto slot = vars_.find(id);
      if (!slot) {
        pos_ = start;
        fail("unknown variable '" + id + "'");
      }
      return Poly<Rational>::variable(vars_.nvars(), *slot);
    }
    fail("expected a number, variable, or '('");
  }

  unsigned parse_uint() {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] < '0' || s_[pos_] > '9') fail("expected an exponent");
    unsigned v = 0;
    while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') {
      v = v * 10 + static_cast<unsigned>(s_[pos_] - '0');
      if (v > 1000) fail("exponent too large");
      ++pos_;
    }
    return v;
  }

  Rational parse_number() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') ++pos_;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      const std::size_t frac_start = pos_;
      while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') ++pos_;
      if (pos_ == frac_start) fail("expected digits after '.'");
    }
    return Rational::from_string(std::string(s_.substr(start, pos_ - start)));
  }

  PolyMatrix<Rational> parse_matrix() {
    expect('[');
    std::vector<std::vector<Poly<Rational>>> rows;
    for (;;) {
      expect('[');
      std::vector<Poly<Rational>> row;
      if (peek() != ']') {
        row.push_back(parse_expr());
        while (consume(',')) row.push_back(parse_expr());
      }
      expect(']');
      rows.push_back(std::move(row));
      if (!consume(',')) break;
    }
    expect(']');
    const std::size_t t = rows.size();
    for (const auto& r : rows)
      if (r.size() != t) fail("matrix must be square");
    PolyMatrix<Rational> m(t, vars_.nvars());
    for (std::size_t i = 0; i < t; ++i)
      for (std::size_t j = 0; j < t; ++j) m.set(i, j, std::move(rows[i][j]));
    return m;
  }

  template <class F>
  auto parse_list(F element) -> std::vector<decltype(element())> {
    std::vector<decltype(element())> out;
    expect('[');
    if (peek() != ']') {
      out.push_back(element());
      while (consume(',')) out.push_back(element());
    }
    expect(']');
    return out;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  const VarTable& vars_;
};

}  // namespace detail

inline Poly<Rational> parse_poly(std::string_view text, const VarTable& vars) {
  return detail::PolyParser(text, vars).parse_poly_all();
}
inline PolyMatrix<Rational> parse_poly_matrix(std::string_view text, const VarTable& vars) {
  return detail::PolyParser(text, vars).parse_matrix_all();
}
inline std::vector<Poly<Rational>> parse_poly_list(std::string_view text, const VarTable& vars) {
  return detail::PolyParser(text, vars).parse_poly_list_all();
}
inline std::vector<PolyMatrix<Rational>> parse_matrix_list(std::string_view text,
                                                           const VarTable& vars) {
  return detail::PolyParser(text, vars).parse_matrix_list_all();
}

}  // namespace psatz
