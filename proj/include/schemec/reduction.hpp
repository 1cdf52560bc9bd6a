#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "schemec/congruence.hpp"
#include "schemec/proposition.hpp"
#include "schemec/scheme.hpp"
#include "schemec/typing.hpp"

namespace schemec {

// Finite map from types to schemes, written [t1/A1, ..., tn/An]. Keys are
// compared up to alpha-equivalence.
class SchemeSubstitution {
 public:
  SchemeSubstitution() = default;
  SchemeSubstitution(std::initializer_list<std::pair<Prop, Scheme>> entries) {
    for (const auto& [k, v] : entries) set(k, v);
  }

  void set(const Prop& key, const Scheme& image) {
    std::string k = alpha_key(key);
    auto it = index_.find(k);
    if (it != index_.end()) {
      entries_[it->second].second = image;
      return;
    }
    index_.emplace(std::move(k), entries_.size());
    entries_.emplace_back(key, image);
  }

  const Scheme* find(const Prop& key) const {
    auto it = index_.find(alpha_key(key));
    return it == index_.end() ? nullptr : &entries_[it->second].second;
  }

  bool empty() const { return entries_.empty(); }
  const std::vector<std::pair<Prop, Scheme>>& entries() const { return entries_; }

  VariableSet free_vars() const {
    VariableSet out;
    for (const auto& [k, v] : entries_) {
      collect_free_vars(k, out);
      collect_free_vars(v, out);
    }
    return out;
  }

  void collect_names(std::set<std::string>& out) const {
    for (const auto& [k, v] : entries_) {
      schemec::collect_names(k, out);
      schemec::collect_names(v, out);
    }
  }

 private:
  std::vector<std::pair<Prop, Scheme>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// How a bound occurrence <A> with A ∈ Γ is treated: keep-or-replace
// (General), keep only (Minimal), replace only (Maximal).
enum class SubstMode { kGeneral, kMinimal, kMaximal };

namespace detail {

inline void collect_names(const Context& g, std::set<std::string>& out) {
  for (const Prop& p : g.props()) schemec::collect_names(p, out);
}

// Renames Λx when its name occurs in σ, bound occurrences included: a
// Λx inside an image must not land under hypotheses mentioning the outer x.
inline std::pair<Variable, Scheme> open_term_binder(const SchemeSubstitution& sigma,
                                                    const Context& g, const Scheme& t) {
  Variable x = t.bound();
  std::set<std::string> in_sigma;
  sigma.collect_names(in_sigma);
  if (!in_sigma.contains(x.name)) return {x, t.body()};
  std::set<std::string> avoid = std::move(in_sigma);
  schemec::collect_names(t, avoid);
  collect_names(g, avoid);
  Variable renamed{fresh_name(x.name, avoid), x.sort};
  return {renamed, subst_terms(x, Term::var(renamed), t.body())};
}

// Renames the Λ binders of an image that would capture a variable free in
// the local context it lands in.
inline Scheme freshen_for(const Context& g, const Scheme& image) {
  std::set<std::string> clash;
  bool any = false;
  std::unordered_set<const void*> seen;
  std::function<void(const Scheme&)> binders = [&](const Scheme& s) {
    if (any || !seen.insert(s.identity()).second) return;
    switch (s.kind()) {
      case Scheme::Kind::kVar: return;
      case Scheme::Kind::kLam:
      case Scheme::Kind::kTermApp: binders(s.is_lam() ? s.body() : s.fn()); return;
      case Scheme::Kind::kTermLam:
        any = true;
        binders(s.body());
        return;
      case Scheme::Kind::kApp:
        binders(s.fn());
        binders(s.arg());
        return;
    }
  };
  binders(image);
  if (!any) return image;
  for (const Variable& v : free_term_vars(g)) clash.insert(v.name);
  if (clash.empty()) return image;
  std::set<std::string> avoid = clash;
  schemec::collect_names(image, avoid);
  std::unordered_map<const void*, Scheme> memo;
  std::deque<Scheme> keep;  // renamed bodies stay alive while their nodes key the memo
  std::function<Scheme(const Scheme&)> go;
  std::function<Scheme(const Scheme&)> rebuild = [&](const Scheme& s) -> Scheme {
    switch (s.kind()) {
      case Scheme::Kind::kVar: return s;
      case Scheme::Kind::kLam: return Scheme::lam(s.type(), go(s.body()));
      case Scheme::Kind::kApp: return Scheme::app(go(s.fn()), go(s.arg()));
      case Scheme::Kind::kTermApp: return Scheme::term_app(go(s.fn()), s.term_arg());
      case Scheme::Kind::kTermLam: {
        if (!clash.contains(s.bound().name)) return Scheme::term_lam(s.bound(), go(s.body()));
        Variable renamed{fresh_name(s.bound().name, avoid), s.bound().sort};
        avoid.insert(renamed.name);
        const Scheme& body = keep.emplace_back(subst_terms(s.bound(), Term::var(renamed), s.body()));
        return Scheme::term_lam(renamed, go(body));
      }
    }
    return s;
  };
  go = [&](const Scheme& s) -> Scheme {
    auto it = memo.find(s.identity());
    if (it != memo.end()) return it->second;
    Scheme out = rebuild(s);
    memo.emplace(s.identity(), out);
    return out;
  };
  return go(image);
}

class SetBuilder {
 public:
  void add(Scheme s) {
    if (seen_.insert(alpha_key(s)).second) items_.push_back(std::move(s));
  }
  std::vector<Scheme> take() { return std::move(items_); }

 private:
  std::unordered_set<std::string> seen_;
  std::vector<Scheme> items_;
};

inline std::vector<Scheme> subst_general(const SchemeSubstitution& sigma, const Context& g,
                                         const Scheme& t) {
  switch (t.kind()) {
    case Scheme::Kind::kVar: {
      const Scheme* image = sigma.find(t.type());
      if (image == nullptr) return {t};
      if (g.contains(t.type())) {
        SetBuilder b;
        b.add(t);
        b.add(freshen_for(g, *image));
        return b.take();
      }
      return {freshen_for(g, *image)};
    }
    case Scheme::Kind::kLam: {
      std::vector<Scheme> out;
      for (Scheme& s : subst_general(sigma, g.with(t.type()), t.body()))
        out.push_back(Scheme::lam(t.type(), std::move(s)));
      return out;
    }
    case Scheme::Kind::kApp: {
      std::vector<Scheme> fns = subst_general(sigma, g, t.fn());
      std::vector<Scheme> args = subst_general(sigma, g, t.arg());
      SetBuilder b;
      for (const Scheme& f : fns)
        for (const Scheme& a : args) b.add(Scheme::app(f, a));
      return b.take();
    }
    case Scheme::Kind::kTermLam: {
      auto [x, body] = open_term_binder(sigma, g, t);
      std::vector<Scheme> out;
      for (Scheme& s : subst_general(sigma, g, body)) out.push_back(Scheme::term_lam(x, std::move(s)));
      return out;
    }
    case Scheme::Kind::kTermApp: {
      std::vector<Scheme> out;
      for (Scheme& s : subst_general(sigma, g, t.fn()))
        out.push_back(Scheme::term_app(std::move(s), t.term_arg()));
      return out;
    }
  }
  return {t};
}

// Memo for one local context; abstractions open a fresh one.
using SubstMemo = std::unordered_map<const void*, Scheme>;

inline Scheme subst_single(const SchemeSubstitution& sigma, const Context& g, const Scheme& t,
                           SubstMode mode, SubstMemo& memo);

inline Scheme subst_single_uncached(const SchemeSubstitution& sigma, const Context& g, const Scheme& t,
                                    SubstMode mode, SubstMemo& memo) {
  switch (t.kind()) {
    case Scheme::Kind::kVar: {
      const Scheme* image = sigma.find(t.type());
      if (image == nullptr) return t;
      if (g.contains(t.type()) && mode == SubstMode::kMinimal) return t;
      return freshen_for(g, *image);
    }
    case Scheme::Kind::kLam: {
      SubstMemo inner;
      Scheme body = subst_single(sigma, g.with(t.type()), t.body(), mode, inner);
      return body.same_node(t.body()) ? t : Scheme::lam(t.type(), std::move(body));
    }
    case Scheme::Kind::kApp: {
      Scheme f = subst_single(sigma, g, t.fn(), mode, memo);
      Scheme a = subst_single(sigma, g, t.arg(), mode, memo);
      return f.same_node(t.fn()) && a.same_node(t.arg()) ? t : Scheme::app(std::move(f), std::move(a));
    }
    case Scheme::Kind::kTermLam: {
      auto [x, body] = open_term_binder(sigma, g, t);
      if (x == t.bound()) {
        Scheme b = subst_single(sigma, g, body, mode, memo);
        return b.same_node(t.body()) ? t : Scheme::term_lam(x, std::move(b));
      }
      SubstMemo renamed;
      return Scheme::term_lam(x, subst_single(sigma, g, body, mode, renamed));
    }
    case Scheme::Kind::kTermApp: {
      Scheme f = subst_single(sigma, g, t.fn(), mode, memo);
      return f.same_node(t.fn()) ? t : Scheme::term_app(std::move(f), t.term_arg());
    }
  }
  return t;
}

inline Scheme subst_single(const SchemeSubstitution& sigma, const Context& g, const Scheme& t,
                           SubstMode mode, SubstMemo& memo) {
  auto it = memo.find(t.identity());
  if (it != memo.end()) return it->second;
  Scheme out = subst_single_uncached(sigma, g, t, mode, memo);
  memo.emplace(t.identity(), out);
  return out;
}

inline Scheme subst_single(const SchemeSubstitution& sigma, const Context& g, const Scheme& t,
                           SubstMode mode) {
  SubstMemo memo;
  return subst_single(sigma, g, t, mode, memo);
}

}  // namespace detail

// σ_Γ t. General mode yields every keep-or-replace choice at occurrences
// whose type is in the (locally extended) context; the other modes yield a
// singleton.
inline std::vector<Scheme> subst_scheme(const SchemeSubstitution& sigma, const Context& g,
                                        const Scheme& t, SubstMode mode) {
  if (mode == SubstMode::kGeneral) return detail::subst_general(sigma, g, t);
  return {detail::subst_single(sigma, g, t, mode)};
}

// The single element of a minimal or maximal substitution.
inline Scheme subst_one(const SchemeSubstitution& sigma, const Context& g, const Scheme& t,
                        SubstMode mode) {
  if (mode == SubstMode::kGeneral)
    throw PreconditionError("general substitution is set-valued; use subst_scheme");
  return detail::subst_single(sigma, g, t, mode);
}

// A scheme paired with a context in which it is well-typed.
class SchemeInContext {
 public:
  static SchemeInContext make(const Theory& th, Context g, Scheme t,
                              const TypingOptions& opts = {}) {
    infer(th, g, t, opts);
    return SchemeInContext(std::move(g), std::move(t));
  }
  // For results of reduction steps, typed by subject reduction.
  static SchemeInContext assume_typed(Context g, Scheme t) {
    return SchemeInContext(std::move(g), std::move(t));
  }

  const Scheme& scheme() const { return scheme_; }
  const Context& context() const { return context_; }

 private:
  SchemeInContext(Context g, Scheme t) : context_(std::move(g)), scheme_(std::move(t)) {}

  Context context_;
  Scheme scheme_;
};

// Child indices from the root: 0 is the function position or abstraction
// body, 1 the argument of a scheme application.
using Path = std::vector<int>;

inline std::string print_path(const Path& p) {
  if (p.empty()) return "root";
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(p[i]);
  }
  return out;
}

struct Reduct {
  Path path;
  Scheme scheme;
};

enum class Strategy { kMinimal, kMaximal, kClosestBinder, kFurthestBinder, kWeakMinimal };

inline const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kMinimal: return "min";
    case Strategy::kMaximal: return "max";
    case Strategy::kClosestBinder: return "closest";
    case Strategy::kFurthestBinder: return "furthest";
    case Strategy::kWeakMinimal: return "weak-min";
  }
  return "?";
}

inline std::optional<Strategy> parse_strategy(const std::string& name) {
  for (Strategy s : {Strategy::kMinimal, Strategy::kMaximal, Strategy::kClosestBinder,
                     Strategy::kFurthestBinder, Strategy::kWeakMinimal})
    if (name == strategy_name(s)) return s;
  return std::nullopt;
}

namespace detail {

// Contraction of a redex in local context g.
enum class Contraction { kGeneral, kMinimal, kMaximal, kClosest, kFurthest };

inline std::vector<Scheme> contract(const Context& g, const Scheme& redex, Contraction how) {
  if (redex.is_term_app()) {
    const Scheme& abs = redex.fn();
    return {subst_terms(abs.bound(), redex.term_arg(), abs.body())};
  }
  const Scheme& abs = redex.fn();
  SchemeSubstitution sigma{{abs.type(), redex.arg()}};
  switch (how) {
    case Contraction::kGeneral:
      return subst_general(sigma, g, abs.body());
    case Contraction::kMinimal:
      return {subst_single(sigma, g, abs.body(), SubstMode::kMinimal)};
    case Contraction::kMaximal:
      return {subst_single(sigma, g, abs.body(), SubstMode::kMaximal)};
    case Contraction::kClosest:
      return {subst_single(sigma, Context{}, abs.body(), SubstMode::kMinimal)};
    case Contraction::kFurthest:
      if (g.contains(abs.type())) return {abs.body()};
      return {subst_single(sigma, g, abs.body(), SubstMode::kMaximal)};
  }
  return {};
}

inline Contraction contraction_for(Strategy s) {
  switch (s) {
    case Strategy::kMinimal: return Contraction::kMinimal;
    case Strategy::kMaximal: return Contraction::kMaximal;
    case Strategy::kClosestBinder: return Contraction::kClosest;
    case Strategy::kFurthestBinder: return Contraction::kFurthest;
    case Strategy::kWeakMinimal: return Contraction::kMinimal;
  }
  return Contraction::kMinimal;
}

inline std::vector<std::pair<Path, Scheme>> local_reducts(const Context& g, const Scheme& t) {
  std::vector<std::pair<Path, Scheme>> out;
  if (is_redex(t)) {
    SetBuilder b;
    for (Scheme& s : contract(g, t, Contraction::kGeneral)) b.add(std::move(s));
    for (Scheme& s : b.take()) out.emplace_back(Path{}, std::move(s));
  }
  auto lift = [&out](int child, std::vector<std::pair<Path, Scheme>> inner, auto rebuild) {
    for (auto& [p, s] : inner) {
      Path q;
      q.reserve(p.size() + 1);
      q.push_back(child);
      q.insert(q.end(), p.begin(), p.end());
      out.emplace_back(std::move(q), rebuild(std::move(s)));
    }
  };
  switch (t.kind()) {
    case Scheme::Kind::kVar:
      break;
    case Scheme::Kind::kLam:
      lift(0, local_reducts(g.with(t.type()), t.body()),
           [&](Scheme s) { return Scheme::lam(t.type(), std::move(s)); });
      break;
    case Scheme::Kind::kApp:
      lift(0, local_reducts(g, t.fn()), [&](Scheme s) { return Scheme::app(std::move(s), t.arg()); });
      lift(1, local_reducts(g, t.arg()), [&](Scheme s) { return Scheme::app(t.fn(), std::move(s)); });
      break;
    case Scheme::Kind::kTermLam:
      lift(0, local_reducts(g, t.body()),
           [&](Scheme s) { return Scheme::term_lam(t.bound(), std::move(s)); });
      break;
    case Scheme::Kind::kTermApp:
      lift(0, local_reducts(g, t.fn()),
           [&](Scheme s) { return Scheme::term_app(std::move(s), t.term_arg()); });
      break;
  }
  return out;
}

inline std::optional<Path> leftmost_outermost_redex(const Scheme& t) {
  if (is_redex(t)) return Path{};
  auto descend = [](int child, const Scheme& s) -> std::optional<Path> {
    auto p = leftmost_outermost_redex(s);
    if (!p) return std::nullopt;
    p->insert(p->begin(), child);
    return p;
  };
  switch (t.kind()) {
    case Scheme::Kind::kVar:
      return std::nullopt;
    case Scheme::Kind::kLam:
    case Scheme::Kind::kTermLam:
    case Scheme::Kind::kTermApp:
      return descend(0, t.kind() == Scheme::Kind::kTermApp ? t.fn() : t.body());
    case Scheme::Kind::kApp:
      if (auto p = descend(0, t.fn())) return p;
      return descend(1, t.arg());
  }
  return std::nullopt;
}

// Path of the next weak minimal redex: the root if it is a redex, otherwise
// inside the function position of an application.
inline std::optional<Path> weak_minimal_redex(const Scheme& t) {
  Path p;
  const Scheme* cur = &t;
  while (true) {
    if (is_redex(*cur)) return p;
    if (!(cur->is_app() || cur->is_term_app())) return std::nullopt;
    p.push_back(0);
    cur = &cur->fn();
  }
}

template <typename F>
Scheme rebuild_at(const Context& g, const Scheme& t, const Path& path, std::size_t depth, F&& at) {
  if (depth == path.size()) return at(g, t);
  int child = path[depth];
  switch (t.kind()) {
    case Scheme::Kind::kLam:
      return Scheme::lam(t.type(), rebuild_at(g.with(t.type()), t.body(), path, depth + 1, at));
    case Scheme::Kind::kTermLam:
      return Scheme::term_lam(t.bound(), rebuild_at(g, t.body(), path, depth + 1, at));
    case Scheme::Kind::kTermApp:
      return Scheme::term_app(rebuild_at(g, t.fn(), path, depth + 1, at), t.term_arg());
    case Scheme::Kind::kApp:
      if (child == 0) return Scheme::app(rebuild_at(g, t.fn(), path, depth + 1, at), t.arg());
      return Scheme::app(t.fn(), rebuild_at(g, t.arg(), path, depth + 1, at));
    case Scheme::Kind::kVar:
      break;
  }
  throw PreconditionError("path " + print_path(path) + " does not address a subscheme");
}

}  // namespace detail

// Every one-step reduct with the position of the contracted redex.
// Reducts at the same position are deduplicated up to alpha-equivalence.
inline std::vector<Reduct> one_step_reducts(const SchemeInContext& t) {
  std::vector<Reduct> out;
  for (auto& [p, s] : detail::local_reducts(t.context(), t.scheme()))
    out.push_back(Reduct{std::move(p), std::move(s)});
  return out;
}

// Contracts the redex at `path` with the given substitution mode, using the
// context local to that position.
inline std::vector<Scheme> contract_at(const SchemeInContext& t, const Path& path, SubstMode mode) {
  auto how = mode == SubstMode::kGeneral   ? detail::Contraction::kGeneral
             : mode == SubstMode::kMinimal ? detail::Contraction::kMinimal
                                           : detail::Contraction::kMaximal;
  std::vector<Scheme> contracted;
  Context local;
  Scheme redex = t.scheme();
  detail::rebuild_at(t.context(), t.scheme(), path, 0, [&](const Context& g, const Scheme& s) {
    if (!is_redex(s)) throw PreconditionError("no redex at " + print_path(path));
    local = g;
    redex = s;
    return s;
  });
  std::vector<Scheme> out;
  for (const Scheme& c : detail::contract(local, redex, how))
    out.push_back(detail::rebuild_at(t.context(), t.scheme(), path, 0,
                                     [&](const Context&, const Scheme&) { return c; }));
  return out;
}

struct Step {
  Path path;
  SchemeInContext result;
};

// One step of a deterministic strategy; empty on normal forms.
inline std::optional<Step> strategy_step(const SchemeInContext& t, Strategy s) {
  std::optional<Path> path = s == Strategy::kWeakMinimal ? detail::weak_minimal_redex(t.scheme())
                                                         : detail::leftmost_outermost_redex(t.scheme());
  if (!path) return std::nullopt;
  auto how = detail::contraction_for(s);
  Scheme next = detail::rebuild_at(t.context(), t.scheme(), *path, 0,
                                   [&](const Context& g, const Scheme& redex) {
                                     return detail::contract(g, redex, how).front();
                                   });
  return Step{std::move(*path), SchemeInContext::assume_typed(t.context(), std::move(next))};
}

inline constexpr std::size_t kDefaultMaxSteps = 100000;
inline constexpr std::size_t kDefaultSizeBound = 10000;

struct TraceStep {
  Path path;
  Scheme scheme;
};

struct ReductionTrace {
  enum class Stop { kNormal, kStepBudget, kSizeBound };

  SchemeInContext start;
  std::vector<TraceStep> steps;
  bool terminated = false;  // normal form reached
  Stop stop = Stop::kNormal;

  const Scheme& last() const { return steps.empty() ? start.scheme() : steps.back().scheme; }
};

inline ReductionTrace reduce(const SchemeInContext& t, Strategy s,
                             std::size_t max_steps = kDefaultMaxSteps,
                             std::size_t size_bound = kDefaultSizeBound) {
  ReductionTrace trace{t, {}, false, ReductionTrace::Stop::kStepBudget};
  SchemeInContext cur = t;
  while (true) {
    if (cur.scheme().size() > size_bound) {
      trace.stop = ReductionTrace::Stop::kSizeBound;
      return trace;
    }
    std::optional<Step> next = strategy_step(cur, s);
    if (!next) {
      trace.terminated = true;
      trace.stop = ReductionTrace::Stop::kNormal;
      return trace;
    }
    if (trace.steps.size() >= max_steps) return trace;
    trace.steps.push_back(TraceStep{next->path, next->result.scheme()});
    cur = std::move(next->result);
  }
}

struct Cycle {
  std::size_t first_index;  // position in the trace of the first visit
  std::size_t length;       // steps until the repeat
  Scheme scheme;
};

// Follows a deterministic strategy and reports the first scheme seen twice,
// comparing up to alpha-equivalence of term binders.
inline std::optional<Cycle> detect_cycle(const SchemeInContext& t, Strategy s, std::size_t bound,
                                         std::size_t size_bound = kDefaultSizeBound) {
  std::unordered_map<std::string, std::size_t> seen;
  SchemeInContext cur = t;
  for (std::size_t i = 0; i <= bound; ++i) {
    if (cur.scheme().size() > size_bound) return std::nullopt;
    auto [it, inserted] = seen.emplace(alpha_key(cur.scheme()), i);
    if (!inserted) return Cycle{it->second, i - it->second, cur.scheme()};
    std::optional<Step> next = strategy_step(cur, s);
    if (!next) return std::nullopt;
    cur = std::move(next->result);
  }
  return std::nullopt;
}

struct Exploration {
  std::vector<Scheme> normal_forms;
  std::size_t visited = 0;
  bool complete = false;  // the reachable set was exhausted within the bounds
};

// Breadth-first search over the general reduction relation.
inline Exploration explore_normal_forms(const SchemeInContext& t,
                                        std::size_t max_states = kDefaultMaxSteps,
                                        std::size_t size_bound = kDefaultSizeBound) {
  Exploration out;
  std::unordered_set<std::string> seen;
  std::deque<Scheme> queue;
  seen.insert(alpha_key(t.scheme()));
  queue.push_back(t.scheme());
  bool truncated = false;
  while (!queue.empty()) {
    if (out.visited >= max_states) {
      truncated = true;
      break;
    }
    Scheme cur = std::move(queue.front());
    queue.pop_front();
    ++out.visited;
    auto reducts = one_step_reducts(SchemeInContext::assume_typed(t.context(), cur));
    if (reducts.empty()) {
      out.normal_forms.push_back(cur);
      continue;
    }
    for (Reduct& r : reducts) {
      if (r.scheme.size() > size_bound) {
        truncated = true;
        continue;
      }
      if (seen.insert(alpha_key(r.scheme)).second) queue.push_back(std::move(r.scheme));
    }
  }
  out.complete = !truncated;
  return out;
}

}  // namespace schemec
