#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "schemec/congruence.hpp"
#include "schemec/error.hpp"
#include "schemec/ha2.hpp"
#include "schemec/print.hpp"
#include "schemec/reduction.hpp"
#include "schemec/syntax.hpp"
#include "schemec/typing.hpp"

namespace schemec::cli {

inline constexpr int kOk = 0;
inline constexpr int kDomainFailure = 1;
inline constexpr int kUsage = 2;

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(what) {}
};

namespace detail {

struct Options {
  bool json = false;
  bool raw = false;
  std::optional<std::size_t> fuel;
  std::size_t size_bound = kDefaultSizeBound;
  std::size_t max_steps = kDefaultMaxSteps;
  std::string strategy = "weak-min";
  std::vector<std::string> files;
  std::string prop;
  std::size_t numeral = 0;
  std::size_t arity = 2;
};

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Rethrows syntax errors with the file name in front of the position.
template <typename F>
auto from_file(const std::string& path, F&& parse) {
  std::string text = read_file(path);
  try {
    return parse(text);
  } catch (const SyntaxError& e) {
    throw SyntaxError(e.message(), e.line(), e.column(), path);
  } catch (const TheoryError& e) {
    throw TheoryError(path + ": " + e.what());
  }
}

struct Inputs {
  Theory theory;
  Context context;
  Scheme scheme;
};

// [theory] context scheme
inline Inputs load_inputs(const std::vector<std::string>& files) {
  if (files.size() != 2 && files.size() != 3)
    throw UsageError("expected [theory] <context-file> <scheme-file>");
  Theory th = files.size() == 3 ? from_file(files[0], [](const std::string& t) { return parse_theory(t); })
                                : Theory::propositional();
  const std::string& ctx_path = files[files.size() - 2];
  const std::string& sch_path = files.back();
  Context g = from_file(ctx_path, [&](const std::string& t) { return parse_context(th.signature(), t); });
  Scheme s = from_file(sch_path, [&](const std::string& t) { return parse_scheme(th.signature(), t); });
  return Inputs{std::move(th), std::move(g), std::move(s)};
}

inline TypingOptions typing_options(const Options& o) {
  TypingOptions t;
  if (o.fuel) {
    t.fuel = *o.fuel;
  } else if (const char* env = std::getenv("SCHEMEC_FUEL")) {
    try {
      t.fuel = std::stoul(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("SCHEMEC_FUEL is not a number: ") + env);
    }
  }
  return t;
}

inline std::string show_type(const Theory& th, const Prop& p, const Options& o) {
  return print(o.raw ? p : fold_prop(th, p));
}

inline int cmd_theory_check(const Options& o, std::ostream& out) {
  if (o.files.size() != 1) throw UsageError("expected <theory-file>");
  Theory th = from_file(o.files[0], [](const std::string& t) { return parse_theory(t); });
  const Signature& sig = th.signature();
  out << "ok: " << sig.sorts().size() << " sorts, " << sig.functions().size() << " functions, "
      << sig.predicates().size() << " predicates, " << th.prop_rules().size() << " rules, "
      << th.term_rules().size() << " term rules\n";
  return kOk;
}

inline int cmd_check(const Options& o, std::ostream& out) {
  Inputs in = load_inputs(o.files);
  Prop type = infer(in.theory, in.context, in.scheme, typing_options(o));
  if (!o.prop.empty()) {
    Prop want = parse_prop(in.theory.signature(), o.prop);
    if (!check(in.theory, in.context, in.scheme, want, typing_options(o))) {
      out << show_type(in.theory, type, o) << "\n";
      throw TypingError("inferred type is not convertible to " + print(want));
    }
  }
  out << show_type(in.theory, type, o) << "\n";
  return kOk;
}

inline int cmd_reduce(const Options& o, std::ostream& out) {
  Strategy s = *parse_strategy(o.strategy);
  Inputs in = load_inputs(o.files);
  TypingOptions topts = typing_options(o);
  SchemeInContext start = SchemeInContext::make(in.theory, in.context, in.scheme, topts);
  ReductionTrace trace = reduce(start, s, o.max_steps, o.size_bound);
  auto type_of = [&](const Scheme& t) { return show_type(in.theory, infer(in.theory, in.context, t, topts), o); };
  if (o.json) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < trace.steps.size(); ++i)
      arr.push_back({{"step", i + 1},
                     {"position", print_path(trace.steps[i].path)},
                     {"scheme", print(trace.steps[i].scheme)},
                     {"type", type_of(trace.steps[i].scheme)}});
    out << arr.dump(2) << "\n";
    return kOk;
  }
  out << "0: " << print(start.scheme()) << "\n";
  for (std::size_t i = 0; i < trace.steps.size(); ++i)
    out << i + 1 << " [" << print_path(trace.steps[i].path) << "]: " << print(trace.steps[i].scheme) << "\n";
  switch (trace.stop) {
    case ReductionTrace::Stop::kNormal:
      out << "normal form after " << trace.steps.size() << " steps\n";
      break;
    case ReductionTrace::Stop::kStepBudget:
      out << "step budget exhausted after " << trace.steps.size() << " steps\n";
      break;
    case ReductionTrace::Stop::kSizeBound:
      out << "size bound exceeded after " << trace.steps.size() << " steps\n";
      break;
  }
  out << "type: " << type_of(trace.last()) << "\n";
  return kOk;
}

inline int cmd_reducts(const Options& o, std::ostream& out) {
  Inputs in = load_inputs(o.files);
  SchemeInContext t = SchemeInContext::make(in.theory, in.context, in.scheme, typing_options(o));
  std::vector<Reduct> rs = one_step_reducts(t);
  if (o.json) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const Reduct& r : rs) arr.push_back({{"position", print_path(r.path)}, {"scheme", print(r.scheme)}});
    out << arr.dump(2) << "\n";
    return kOk;
  }
  if (rs.empty()) out << "normal\n";
  for (std::size_t i = 0; i < rs.size(); ++i)
    out << "[" << i << "] " << print_path(rs[i].path) << ": " << print(rs[i].scheme) << "\n";
  return kOk;
}

inline int cmd_explore(const Options& o, std::istream& in_stream, std::ostream& out) {
  Inputs in = load_inputs(o.files);
  TypingOptions topts = typing_options(o);
  Scheme cur = SchemeInContext::make(in.theory, in.context, in.scheme, topts).scheme();
  while (true) {
    Prop type = infer(in.theory, in.context, cur, topts);
    out << "scheme: " << print(cur) << "\n";
    out << "type: " << show_type(in.theory, type, o) << "\n";
    std::vector<Reduct> rs = one_step_reducts(SchemeInContext::assume_typed(in.context, cur));
    if (rs.empty()) {
      out << "normal\n";
      return kOk;
    }
    for (std::size_t i = 0; i < rs.size(); ++i)
      out << "  [" << i << "] " << print_path(rs[i].path) << ": " << print(rs[i].scheme) << "\n";
    while (true) {
      out << "> " << std::flush;
      std::string line;
      if (!std::getline(in_stream, line) || line == "q") {
        out << "\nfinal: " << print(cur) << "\n";
        return kOk;
      }
      std::size_t idx = 0;
      bool ok = false;
      try {
        std::size_t used = 0;
        idx = std::stoul(line, &used);
        ok = used == line.size() && idx < rs.size();
      } catch (const std::exception&) {
      }
      if (!ok) {
        out << "choose an index between 0 and " << rs.size() - 1 << ", or q\n";
        continue;
      }
      cur = rs[idx].scheme;
      break;
    }
  }
}

inline int cmd_ha2_init(const Options& o, std::ostream& out) {
  out << print_theory(HA2Theory::make(o.arity).theory());
  return kOk;
}

inline int cmd_numeral(const Options& o, std::ostream& out) {
  out << print(numeral_proof(o.numeral)) << "\n";
  return kOk;
}

inline int cmd_witness(const Options& o, std::ostream& out) {
  if (o.files.size() != 2) throw UsageError("expected <theory-file> <scheme-file>");
  if (o.prop.empty()) throw UsageError("--prop is required");
  Theory parsed = from_file(o.files[0], [](const std::string& t) { return parse_theory(t); });
  HA2Theory th = HA2Theory::from_theory(std::move(parsed));
  Scheme t = from_file(o.files[1], [&](const std::string& s) { return parse_scheme(th.signature(), s); });
  Prop ex = parse_prop(th.signature(), o.prop);
  Witness w = extract_witness(th, t, ex, o.max_steps, typing_options(o));
  if (o.json) {
    nlohmann::ordered_json j{{"witness", print(w.term)},
                     {"certificate", print(w.certificate)},
                     {"type", print(w.type)},
                     {"steps", w.trace.steps.size()}};
    try {
      j["value"] = decode_numeral(th.theory(), w.term);
    } catch (const PreconditionError&) {
    }
    out << j.dump(2) << "\n";
    return kOk;
  }
  out << "witness: " << print(w.term) << "\n";
  try {
    out << "value: " << decode_numeral(th.theory(), w.term) << "\n";
  } catch (const PreconditionError&) {
  }
  out << "certificate: " << print(w.certificate) << "\n";
  out << "type: " << print(w.type) << "\n";
  return kOk;
}

}  // namespace detail

// Exit status 0 on success, 1 on a domain failure, 2 on usage or parse errors.
inline int run(std::vector<std::string> args, std::istream& in, std::ostream& out, std::ostream& err) {
  detail::Options o;
  CLI::App app{"scheme-calculus checker and reducer", "schemec"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--json", o.json, "machine-readable output");
  app.add_flag("--raw", o.raw, "print types without folding defined atoms");
  app.add_option("--fuel", o.fuel, "conversion fuel per query (default 10000, env SCHEMEC_FUEL)");
  app.add_option("--size-bound", o.size_bound, "stop when a scheme exceeds this many nodes");

  auto files = [&](CLI::App* sub, const char* what) {
    sub->add_option("files", o.files, what)->required();
  };
  auto* theory_check = app.add_subcommand("theory-check", "parse and validate a theory file");
  files(theory_check, "<theory>");
  auto* check = app.add_subcommand("check", "infer the type of a scheme");
  files(check, "[theory] <context> <scheme>");
  check->add_option("--prop", o.prop, "also check against this proposition");
  auto* reduce_cmd = app.add_subcommand("reduce", "reduce with a deterministic strategy");
  files(reduce_cmd, "[theory] <context> <scheme>");
  reduce_cmd->add_option("--strategy", o.strategy, "min, max, closest, furthest or weak-min")
      ->check(CLI::IsMember({"min", "max", "closest", "furthest", "weak-min"}));
  reduce_cmd->add_option("--max-steps", o.max_steps, "step budget");
  auto* reducts = app.add_subcommand("reducts", "list all one-step reducts");
  files(reducts, "[theory] <context> <scheme>");
  auto* explore = app.add_subcommand("explore", "step through reductions interactively");
  files(explore, "[theory] <context> <scheme>");
  auto* ha2_init = app.add_subcommand("ha2-init", "print the HA2 theory file");
  ha2_init->add_option("--arity", o.arity, "largest class arity (default 2)")->check(CLI::Range(1, 64));
  auto* numeral = app.add_subcommand("numeral", "print the numeral proof of N(n)");
  numeral->add_option("n", o.numeral, "the number")->required();
  auto* witness = app.add_subcommand("witness", "extract a witness from a proof of an existential");
  files(witness, "<theory> <scheme>");
  witness->add_option("--prop", o.prop, "the proven existential")->required();
  witness->add_option("--max-steps", o.max_steps, "weak minimal step budget");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (theory_check->parsed()) return detail::cmd_theory_check(o, out);
    if (check->parsed()) return detail::cmd_check(o, out);
    if (reduce_cmd->parsed()) return detail::cmd_reduce(o, out);
    if (reducts->parsed()) return detail::cmd_reducts(o, out);
    if (explore->parsed()) return detail::cmd_explore(o, in, out);
    if (ha2_init->parsed()) return detail::cmd_ha2_init(o, out);
    if (numeral->parsed()) return detail::cmd_numeral(o, out);
    if (witness->parsed()) return detail::cmd_witness(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SyntaxError& e) {
    err << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDomainFailure;
  }
  return kUsage;
}

}  // namespace schemec::cli
