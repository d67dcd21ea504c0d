#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mpsim/bits.hpp"
#include "mpsim/errors.hpp"

namespace mpsim {

// Boolean expression over component variables, kept as the parsed tree.
// Conjunction and disjunction are n-ary; parenthesised sub-expressions stay
// separate nodes so that printing and re-parsing preserves structure.
class Expr {
 public:
  enum class Op : std::uint8_t { kFalse, kTrue, kVar, kNot, kAnd, kOr };

  // Default-constructs as the constant 0.
  Expr() { nodes_.push_back({Op::kFalse, -1, -1, -1}); }

  static Expr constant(bool v) {
    Expr e;
    e.nodes_[0].op = v ? Op::kTrue : Op::kFalse;
    return e;
  }

  static Expr variable(int index) {
    if (index < 0 || index >= kMaxComponents)
      throw UsageError("variable index out of range: " +
                       std::to_string(index));
    Expr e;
    e.nodes_[0] = {Op::kVar, index, -1, -1};
    e.support_ = bit(index);
    return e;
  }

  static Expr negation(Expr child) {
    Expr e;
    e.nodes_.clear();
    int c = e.append(child, child.root_);
    e.nodes_.push_back({Op::kNot, -1, c, -1});
    e.root_ = static_cast<int>(e.nodes_.size()) - 1;
    e.support_ = child.support_;
    return e;
  }

  static Expr conjunction(std::vector<Expr> terms) {
    return nary(Op::kAnd, std::move(terms));
  }

  static Expr disjunction(std::vector<Expr> terms) {
    return nary(Op::kOr, std::move(terms));
  }

  bool eval(std::uint64_t bits) const { return eval_at(root_, bits); }

  // Variables occurring syntactically in the expression.
  Mask support() const { return support_; }

  Op root_op() const { return nodes_[static_cast<std::size_t>(root_)].op; }

  bool structurally_equal(const Expr& other) const {
    return equal_at(root_, other, other.root_);
  }

  // Renders in model-file syntax: !, &, | with parentheses where needed to
  // reproduce this exact tree on re-parse.
  std::string to_text(const std::vector<std::string>& names) const {
    return render(root_, names);
  }

 private:
  struct Node {
    Op op;
    int var;      // kVar only
    int child;    // first child, -1 if none
    int sibling;  // next sibling, -1 if none
  };

  static Expr nary(Op op, std::vector<Expr> terms) {
    if (terms.empty()) throw UsageError("empty operand list");
    if (terms.size() == 1) return std::move(terms.front());
    Expr e;
    e.nodes_.clear();
    e.support_ = 0;
    int first = -1;
    int prev = -1;
    for (const Expr& t : terms) {
      int id = e.append(t, t.root_);
      if (prev >= 0)
        e.nodes_[static_cast<std::size_t>(prev)].sibling = id;
      else
        first = id;
      prev = id;
      e.support_ |= t.support_;
    }
    e.nodes_.push_back({op, -1, first, -1});
    e.root_ = static_cast<int>(e.nodes_.size()) - 1;
    return e;
  }

  // Deep-copies a subtree of `src` into this pool, returns the new root id.
  int append(const Expr& src, int id) {
    const Node& nd = src.nodes_[static_cast<std::size_t>(id)];
    int child = -1;
    if (nd.child >= 0) {
      std::vector<int> copies;
      for (int c = nd.child; c >= 0;
           c = src.nodes_[static_cast<std::size_t>(c)].sibling)
        copies.push_back(append(src, c));
      for (std::size_t i = 0; i + 1 < copies.size(); ++i)
        nodes_[static_cast<std::size_t>(copies[i])].sibling = copies[i + 1];
      child = copies.front();
    }
    nodes_.push_back({nd.op, nd.var, child, -1});
    return static_cast<int>(nodes_.size()) - 1;
  }

  bool eval_at(int id, std::uint64_t bits) const {
    const Node& nd = nodes_[static_cast<std::size_t>(id)];
    switch (nd.op) {
      case Op::kFalse:
        return false;
      case Op::kTrue:
        return true;
      case Op::kVar:
        return (bits >> nd.var) & 1;
      case Op::kNot:
        return !eval_at(nd.child, bits);
      case Op::kAnd:
        for (int c = nd.child; c >= 0;
             c = nodes_[static_cast<std::size_t>(c)].sibling)
          if (!eval_at(c, bits)) return false;
        return true;
      case Op::kOr:
        for (int c = nd.child; c >= 0;
             c = nodes_[static_cast<std::size_t>(c)].sibling)
          if (eval_at(c, bits)) return true;
        return false;
    }
    return false;
  }

  bool equal_at(int id, const Expr& other, int oid) const {
    const Node& a = nodes_[static_cast<std::size_t>(id)];
    const Node& b = other.nodes_[static_cast<std::size_t>(oid)];
    if (a.op != b.op || a.var != b.var) return false;
    int c = a.child;
    int oc = b.child;
    while (c >= 0 && oc >= 0) {
      if (!equal_at(c, other, oc)) return false;
      c = nodes_[static_cast<std::size_t>(c)].sibling;
      oc = other.nodes_[static_cast<std::size_t>(oc)].sibling;
    }
    return c < 0 && oc < 0;
  }

  std::string render(int id, const std::vector<std::string>& names) const {
    const Node& nd = nodes_[static_cast<std::size_t>(id)];
    switch (nd.op) {
      case Op::kFalse:
        return "0";
      case Op::kTrue:
        return "1";
      case Op::kVar:
        return names[static_cast<std::size_t>(nd.var)];
      case Op::kNot: {
        const Node& c = nodes_[static_cast<std::size_t>(nd.child)];
        std::string body = render(nd.child, names);
        bool atom = c.op == Op::kVar || c.op == Op::kTrue || c.op == Op::kFalse;
        return atom ? "!" + body : "!(" + body + ")";
      }
      case Op::kAnd:
        return render_nary(nd, names, " & ", Op::kAnd);
      case Op::kOr:
        return render_nary(nd, names, " | ", Op::kOr);
    }
    return {};
  }

  std::string render_nary(const Node& nd, const std::vector<std::string>& names,
                          const char* sep, Op self) const {
    std::string out;
    for (int c = nd.child; c >= 0;
         c = nodes_[static_cast<std::size_t>(c)].sibling) {
      if (!out.empty()) out += sep;
      Op cop = nodes_[static_cast<std::size_t>(c)].op;
      std::string body = render(c, names);
      // Same-operator children were parenthesised in the source (unbracketed
      // chains are flattened on parse); disjunctions under a conjunction need
      // parens for precedence.
      bool wrap = cop == self || (self == Op::kAnd && cop == Op::kOr);
      out += wrap ? "(" + body + ")" : body;
    }
    return out;
  }

  std::vector<Node> nodes_;
  int root_ = 0;
  Mask support_ = 0;
};

}  // namespace mpsim
