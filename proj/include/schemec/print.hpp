#pragma once

#include <string>
#include <vector>

#include "schemec/proposition.hpp"
#include "schemec/scheme.hpp"
#include "schemec/term.hpp"

namespace schemec {

// Printers emit the concrete syntax accepted by the parser. Bound variables
// print bare; free variables carry their sort, as in `x:iota`.
namespace detail {

class Printer {
 public:
  void term(const Term& t) {
    if (t.is_var()) {
      out_ += t.name();
      if (!is_bound(t.variable())) {
        out_ += ':';
        out_ += t.sort().name;
      }
      return;
    }
    out_ += t.name();
    if (t.args().empty()) return;
    out_ += '(';
    for (std::size_t i = 0; i < t.args().size(); ++i) {
      if (i) out_ += ", ";
      term(t.args()[i]);
    }
    out_ += ')';
  }

  void prop(const Prop& p) {
    switch (p.kind()) {
      case Prop::Kind::kAtom:
        out_ += p.predicate();
        if (p.args().empty()) return;
        out_ += '(';
        for (std::size_t i = 0; i < p.args().size(); ++i) {
          if (i) out_ += ", ";
          term(p.args()[i]);
        }
        out_ += ')';
        return;
      case Prop::Kind::kImplies: {
        bool wrap = !p.premise().is_atom();
        if (wrap) out_ += '(';
        prop(p.premise());
        if (wrap) out_ += ')';
        out_ += " => ";
        prop(p.conclusion());
        return;
      }
      case Prop::Kind::kForall:
        out_ += "forall ";
        out_ += p.bound_name();
        out_ += ':';
        out_ += p.bound_sort().name;
        out_ += ". ";
        env_.push_back(p.bound());
        prop(p.body());
        env_.pop_back();
        return;
    }
  }

  void scheme(const Scheme& t) {
    switch (t.kind()) {
      case Scheme::Kind::kVar:
        out_ += '<';
        prop(t.type());
        out_ += '>';
        return;
      case Scheme::Kind::kLam:
        out_ += "\\[";
        prop(t.type());
        out_ += "] ";
        scheme(t.body());
        return;
      case Scheme::Kind::kTermLam:
        out_ += "/\\";
        out_ += t.bound().name;
        out_ += ':';
        out_ += t.bound().sort.name;
        out_ += ". ";
        env_.push_back(t.bound());
        scheme(t.body());
        env_.pop_back();
        return;
      case Scheme::Kind::kApp:
      case Scheme::Kind::kTermApp: {
        std::vector<const Scheme*> spine;
        const Scheme* head = &t;
        while (head->is_app() || head->is_term_app()) {
          spine.push_back(head);
          head = &head->fn();
        }
        out_ += '(';
        scheme(*head);
        for (auto it = spine.rbegin(); it != spine.rend(); ++it) {
          if ((*it)->is_app()) {
            out_ += ' ';
            scheme((*it)->arg());
          } else {
            out_ += " @ ";
            term((*it)->term_arg());
          }
        }
        out_ += ')';
        return;
      }
    }
  }

  std::string take() { return std::move(out_); }

 private:
  bool is_bound(const Variable& v) const {
    for (const Variable& b : env_)
      if (b == v) return true;
    return false;
  }

  std::string out_;
  std::vector<Variable> env_;
};

}  // namespace detail

inline std::string print(const Term& t) {
  detail::Printer p;
  p.term(t);
  return p.take();
}

inline std::string print(const Prop& a) {
  detail::Printer p;
  p.prop(a);
  return p.take();
}

inline std::string print(const Scheme& t) {
  detail::Printer p;
  p.scheme(t);
  return p.take();
}

inline std::string print(const Context& g) {
  if (g.empty()) return "{}";
  std::string out = "{ ";
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) out += " ; ";
    out += print(g.props()[i]);
  }
  out += " }";
  return out;
}

}  // namespace schemec
