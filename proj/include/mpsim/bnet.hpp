#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mpsim/errors.hpp"
#include "mpsim/expr.hpp"
#include "mpsim/network.hpp"

namespace mpsim {

// Line-oriented model document: `NAME, EXPR` entries, `#` comments, an
// optional `targets, factors` header. Expressions use `!`, `&`, `|` and
// parentheses; `NOT`/`AND`/`OR` keywords (any case) are accepted as aliases.
struct ModelDocument {
  struct Entry {
    std::string target;
    std::string expression;
    int line;    // 1-based position of the entry
    int column;  // 1-based column where the expression text starts
  };
  bool has_header = false;
  std::vector<Entry> entries;
};

namespace detail {

inline bool is_ident_start(char c) {
  return c == '_' || std::isalpha(static_cast<unsigned char>(c));
}
inline bool is_ident_char(char c) {
  return c == '_' || std::isalnum(static_cast<unsigned char>(c));
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Recursive-descent expression parser over one line. Unparenthesised chains
// of the same operator are flattened into one n-ary node.
class ExprParser {
 public:
  ExprParser(std::string_view text, int line, int column_offset)
      : text_(text), line_(line), offset_(column_offset) {}

  Expr parse(const std::vector<std::pair<std::string, int>>& index) {
    index_ = &index;
    Expr e = parse_or();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  Expr parse_or() {
    std::vector<Expr> terms;
    terms.push_back(parse_and());
    while (peek_op('|', "or")) terms.push_back(parse_and());
    return terms.size() == 1 ? std::move(terms.front())
                             : Expr::disjunction(std::move(terms));
  }

  Expr parse_and() {
    std::vector<Expr> terms;
    terms.push_back(parse_factor());
    while (peek_op('&', "and")) terms.push_back(parse_factor());
    return terms.size() == 1 ? std::move(terms.front())
                             : Expr::conjunction(std::move(terms));
  }

  Expr parse_factor() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '!') {
      ++pos_;
      return Expr::negation(parse_factor());
    }
    std::size_t save = pos_;
    std::string word = read_ident();
    if (!word.empty() && lower(word) == "not") return Expr::negation(parse_factor());
    pos_ = save;
    return parse_atom();
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected expression");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_or();
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
      ++pos_;
      return e;
    }
    if (c == '0' || c == '1') {
      ++pos_;
      if (pos_ < text_.size() && is_ident_char(text_[pos_]))
        fail("bad constant");
      return Expr::constant(c == '1');
    }
    if (is_ident_start(c)) {
      std::size_t at = pos_;
      std::string name = read_ident();
      int idx = lookup(name);
      if (idx < 0) fail_at(at, "undeclared variable: " + name);
      return Expr::variable(idx);
    }
    fail(std::string("unexpected character '") + c + "'");
    return Expr::constant(false);  // unreachable
  }

  int lookup(const std::string& name) const {
    for (const auto& [n, i] : *index_)
      if (n == name) return i;
    return -1;
  }

  // Consumes the operator if present: symbol form or keyword alias.
  bool peek_op(char symbol, std::string_view keyword) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == symbol) {
      ++pos_;
      return true;
    }
    std::size_t save = pos_;
    std::string word = read_ident();
    if (!word.empty() && lower(word) == keyword) return true;
    pos_ = save;
    return false;
  }

  std::string read_ident() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() && is_ident_start(text_[pos_])) {
      ++pos_;
      while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const { fail_at(pos_, msg); }
  [[noreturn]] void fail_at(std::size_t at, const std::string& msg) const {
    throw ParseError(msg, line_, offset_ + static_cast<int>(at));
  }

  std::string_view text_;
  int line_;
  int offset_;
  std::size_t pos_ = 0;
  const std::vector<std::pair<std::string, int>>* index_ = nullptr;
};

}  // namespace detail

inline ModelDocument parse_model_document(std::string_view text) {
  ModelDocument doc;
  int line_no = 0;
  std::size_t pos = 0;
  bool first_entry = true;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::size_t begin = line.find_first_not_of(" \t");
    if (begin != std::string_view::npos && line[begin] != '#') {
      std::size_t comma = line.find(',');
      if (comma == std::string_view::npos)
        throw ParseError("expected 'NAME, EXPRESSION'", line_no,
                         static_cast<int>(begin) + 1);
      std::string_view head = line.substr(begin, comma - begin);
      std::size_t head_end = head.find_last_not_of(" \t");
      head = head.substr(0, head_end == std::string_view::npos ? 0 : head_end + 1);
      std::string target(head);
      std::string expr(line.substr(comma + 1));
      if (first_entry && detail::lower(target) == "targets") {
        std::size_t b = expr.find_first_not_of(" \t");
        std::size_t e = expr.find_last_not_of(" \t");
        if (b != std::string::npos &&
            detail::lower(expr.substr(b, e - b + 1)) == "factors") {
          doc.has_header = true;
          first_entry = false;
          pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
          continue;
        }
      }
      first_entry = false;
      if (target.empty() || !detail::is_ident_start(target[0]))
        throw ParseError("bad component name", line_no,
                         static_cast<int>(begin) + 1);
      for (char c : target)
        if (!detail::is_ident_char(c))
          throw ParseError("bad component name: " + target, line_no,
                           static_cast<int>(begin) + 1);
      doc.entries.push_back(
          {std::move(target), std::move(expr), line_no,
           static_cast<int>(comma) + 2});
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return doc;
}

// Component order is declaration order, which fixes bitstring positions.
inline Network parse_bnet(std::string_view text) {
  ModelDocument doc = parse_model_document(text);
  if (doc.entries.empty()) throw UsageError("empty model");
  std::vector<std::pair<std::string, int>> index;
  std::vector<std::string> names;
  for (const auto& e : doc.entries) {
    for (const auto& [n, i] : index)
      if (n == e.target)
        throw ParseError("duplicate target: " + e.target, e.line, 1);
    index.emplace_back(e.target, static_cast<int>(index.size()));
    names.push_back(e.target);
  }
  std::vector<Expr> locals;
  locals.reserve(doc.entries.size());
  for (const auto& e : doc.entries) {
    detail::ExprParser p(e.expression, e.line, e.column);
    locals.push_back(p.parse(index));
  }
  return Network(std::move(names), std::move(locals));
}

inline std::string serialize_bnet(const Network& net) {
  std::string out = "targets, factors\n";
  for (int i = 0; i < net.size(); ++i) {
    out += net.name(i);
    out += ", ";
    out += net.local(i).to_text(net.names());
    out += '\n';
  }
  return out;
}

// Accepts a length-n bitstring in component order, or comma-separated
// `NAME=0|1` assignments that cover every component.
inline Configuration parse_configuration(std::string_view text,
                                         const Network& net) {
  std::size_t b = text.find_first_not_of(" \t");
  std::size_t e = text.find_last_not_of(" \t");
  if (b == std::string_view::npos) throw UsageError("empty configuration");
  text = text.substr(b, e - b + 1);

  if (text.find('=') == std::string_view::npos) {
    if (static_cast<int>(text.size()) != net.size())
      throw UsageError("configuration has " + std::to_string(text.size()) +
                       " positions, model has " + std::to_string(net.size()));
    Configuration x{0, net.size()};
    for (int i = 0; i < net.size(); ++i) {
      char c = text[static_cast<std::size_t>(i)];
      if (c == '1')
        x.assign(i, true);
      else if (c != '0')
        throw UsageError(std::string("bad state character '") + c + "'");
    }
    return x;
  }

  Configuration x{0, net.size()};
  Mask covered = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string_view item = text.substr(
        pos, comma == std::string_view::npos ? text.size() - pos : comma - pos);
    std::size_t eq = item.find('=');
    if (eq == std::string_view::npos)
      throw UsageError("expected NAME=0|1 assignment");
    auto trim = [](std::string_view s) {
      std::size_t lo = s.find_first_not_of(" \t");
      if (lo == std::string_view::npos) return std::string_view{};
      std::size_t hi = s.find_last_not_of(" \t");
      return s.substr(lo, hi - lo + 1);
    };
    std::string_view name = trim(item.substr(0, eq));
    std::string_view value = trim(item.substr(eq + 1));
    int idx = net.index_of(name);
    if (idx < 0) throw UsageError("unknown component: " + std::string(name));
    if (covered & bit(idx))
      throw UsageError("component assigned twice: " + std::string(name));
    if (value != "0" && value != "1")
      throw UsageError("bad state for " + std::string(name) + ": " +
                       std::string(value));
    covered |= bit(idx);
    x.assign(idx, value == "1");
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (covered != full_mask(net.size())) {
    std::string missing;
    for_each_bit(full_mask(net.size()) & ~covered, [&](int i) {
      if (!missing.empty()) missing += ", ";
      missing += net.name(i);
    });
    throw UsageError("missing components: " + missing);
  }
  return x;
}

}  // namespace mpsim
