#include "goalinf/pddl/parser.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "goalinf/error.hpp"

namespace goalinf::pddl {
namespace {

[[noreturn]] void fail(const SExpr& at, const std::string& message) {
  throw SyntaxError(message, at.line, at.column);
}

const std::string& expect_atom(const SExpr& e, const char* what) {
  if (e.is_list) fail(e, std::string("expected ") + what);
  return e.atom;
}

std::vector<TypedName> parse_typed_list(const std::vector<SExpr>& items, std::size_t begin) {
  std::vector<TypedName> out;
  std::size_t pending = 0;
  for (std::size_t i = begin; i < items.size(); ++i) {
    const SExpr& e = items[i];
    const std::string& tok = expect_atom(e, "a name in typed list");
    if (tok == "-") {
      if (i + 1 >= items.size()) fail(e, "missing type after '-'");
      if (pending == 0) fail(e, "type annotation without names");
      const std::string& type = expect_atom(items[i + 1], "a type name");
      for (std::size_t k = out.size() - pending; k < out.size(); ++k) out[k].type = type;
      pending = 0;
      ++i;
      continue;
    }
    out.push_back({tok, kRootType});
    ++pending;
  }
  return out;
}

long long parse_integer(const SExpr& e) {
  long long v = 0;
  const std::string& s = e.atom;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail(e, "expected integer expression, got '" + s + "'");
  return v;
}

NumExpr parse_num(const SExpr& e) {
  if (!e.is_list) return NumExpr::constant(parse_integer(e));
  if (e.items.empty()) fail(e, "empty numeric expression");
  const std::string& head = expect_atom(e.items.front(), "an operator or fluent name");
  if (head == "+" || head == "-") {
    if (e.items.size() != 3) fail(e, "'" + head + "' takes exactly two operands");
    NumExpr lhs = parse_num(e.items[1]);
    NumExpr rhs = parse_num(e.items[2]);
    return head == "+" ? NumExpr::add(std::move(lhs), std::move(rhs))
                       : NumExpr::sub(std::move(lhs), std::move(rhs));
  }
  if (head == "*" || head == "/") fail(e, "operator '" + head + "' is not supported");
  std::vector<std::string> args;
  for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(expect_atom(e.items[i], "a term"));
  return NumExpr::fluent_ref(head, std::move(args));
}

// Parses `((?x - t) ...)`-style variable lists used by exists.
std::vector<TypedName> parse_variables(const SExpr& e) {
  if (!e.is_list) fail(e, "expected variable list");
  auto vars = parse_typed_list(e.items, 0);
  if (vars.empty()) fail(e, "empty variable list");
  for (const auto& v : vars)
    if (!is_variable(v.name)) fail(e, "expected variable, got '" + v.name + "'");
  return vars;
}

}  // namespace

Formula parse_formula(const SExpr& e) {
  if (!e.is_list) fail(e, "expected formula, got '" + e.atom + "'");
  if (e.items.empty()) fail(e, "empty formula");
  const std::string& head = expect_atom(e.items.front(), "a connective or predicate");
  if (head == "and" || head == "or") {
    std::vector<Formula> parts;
    for (std::size_t i = 1; i < e.items.size(); ++i) parts.push_back(parse_formula(e.items[i]));
    return head == "and" ? Formula::conjunction(std::move(parts)) : Formula::disjunction(std::move(parts));
  }
  if (head == "not") {
    if (e.items.size() != 2) fail(e, "'not' takes exactly one argument");
    return Formula::negation(parse_formula(e.items[1]));
  }
  if (head == "exists") {
    if (e.items.size() != 3) fail(e, "'exists' takes a variable list and a body");
    auto vars = parse_variables(e.items[1]);
    Formula body = parse_formula(e.items[2]);
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) body = Formula::exists(*it, std::move(body));
    return body;
  }
  if (head == "=") {
    if (e.items.size() != 3) fail(e, "'=' takes exactly two operands");
    return Formula::equals(parse_num(e.items[1]), parse_num(e.items[2]));
  }
  if (head == "assign") {
    if (e.items.size() != 3) fail(e, "'assign' takes a fluent and a value");
    NumExpr target = parse_num(e.items[1]);
    if (target.kind != NumExpr::Kind::kFluent) fail(e.items[1], "assignment target must be a fluent");
    return Formula::assign(std::move(target), parse_num(e.items[2]));
  }
  if (head == "forall" || head == "when" || head == "imply" || head == "increase" || head == "decrease")
    fail(e, "'" + head + "' is outside the supported PDDL subset");
  std::vector<std::string> args;
  for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(expect_atom(e.items[i], "a term"));
  return Formula::atom(head, std::move(args));
}

Formula parse_formula(std::string_view text) { return parse_formula(read_one(text)); }

namespace {

ActionSchema parse_action_expr(const SExpr& e) {
  if (!e.has_head(":action")) fail(e, "expected (:action ...)");
  if (e.items.size() < 2) fail(e, "action without a name");
  ActionSchema action;
  action.name = expect_atom(e.items[1], "an action name");
  bool seen_pre = false;
  bool seen_eff = false;
  for (std::size_t i = 2; i < e.items.size(); i += 2) {
    const std::string& key = expect_atom(e.items[i], "an action keyword");
    if (i + 1 >= e.items.size()) fail(e.items[i], "keyword '" + key + "' without a value");
    const SExpr& value = e.items[i + 1];
    if (key == ":parameters") {
      if (!value.is_list) fail(value, "expected parameter list");
      action.parameters = parse_typed_list(value.items, 0);
      for (const auto& p : action.parameters)
        if (!is_variable(p.name)) fail(value, "parameter '" + p.name + "' is not a variable");
    } else if (key == ":precondition") {
      action.precondition = parse_formula(value);
      seen_pre = true;
    } else if (key == ":effect") {
      action.effect = parse_formula(value);
      seen_eff = true;
    } else {
      fail(e.items[i], "unknown action keyword '" + key + "'");
    }
  }
  if (!seen_pre) action.precondition = Formula::conjunction();
  if (!seen_eff) action.effect = Formula::conjunction();
  return action;
}

using Scope = std::map<std::string, std::string>;  // variable -> type

void check_type_known(const DomainAst& d, const std::string& type, const std::string& where) {
  if (!d.types.count(type)) throw SemanticError("undeclared type '" + type + "' in " + where);
}

std::string term_type(const std::string& term, const Scope& scope, const ProblemInstance* problem,
                      const std::string& where) {
  if (is_variable(term)) {
    auto it = scope.find(term);
    if (it == scope.end()) throw SemanticError("undeclared variable '" + term + "' in " + where);
    return it->second;
  }
  if (problem) {
    auto it = problem->objects.find(term);
    if (it != problem->objects.end()) return it->second;
  }
  throw SemanticError("undeclared object '" + term + "' in " + where);
}

void check_args(const DomainAst& d, const PredicateSignature& sig, const std::vector<std::string>& args,
                const Scope& scope, const ProblemInstance* problem, const std::string& where) {
  if (sig.parameters.size() != args.size())
    throw SemanticError("'" + sig.name + "' expects " + std::to_string(sig.parameters.size()) +
                        " arguments, got " + std::to_string(args.size()) + " in " + where);
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string t = term_type(args[i], scope, problem, where);
    const std::string& want = sig.parameters[i].type;
    bool ok = d.is_subtype(t, want) || (is_variable(args[i]) && d.is_subtype(want, t));
    if (!ok)
      throw SemanticError("argument '" + args[i] + "' of type '" + t + "' does not fit '" + want + "' of '" +
                          sig.name + "' in " + where);
  }
}

void check_num(const DomainAst& d, const NumExpr& e, const Scope& scope, const ProblemInstance* problem,
               const std::string& where) {
  switch (e.kind) {
    case NumExpr::Kind::kConstant: return;
    case NumExpr::Kind::kFluent: {
      const auto* sig = d.find_fluent(e.fluent);
      if (!sig) throw SemanticError("undeclared fluent '" + e.fluent + "' in " + where);
      check_args(d, *sig, e.args, scope, problem, where);
      return;
    }
    case NumExpr::Kind::kAdd:
    case NumExpr::Kind::kSub:
      for (const auto& op : e.operands) check_num(d, op, scope, problem, where);
      return;
  }
}

void check_atom(const DomainAst& d, const Formula& f, const Scope& scope, const ProblemInstance* problem,
                const std::string& where) {
  const auto* sig = d.find_predicate(f.predicate);
  if (!sig) throw SemanticError("undeclared predicate '" + f.predicate + "' in " + where);
  check_args(d, *sig, f.args, scope, problem, where);
}

void check_condition(const DomainAst& d, const Formula& f, Scope& scope, const ProblemInstance* problem,
                     const std::string& where) {
  switch (f.kind) {
    case Formula::Kind::kAnd:
    case Formula::Kind::kOr:
      for (const auto& c : f.children) check_condition(d, c, scope, problem, where);
      return;
    case Formula::Kind::kNot:
      check_condition(d, f.children.at(0), scope, problem, where);
      return;
    case Formula::Kind::kExists: {
      check_type_known(d, f.variable.type, where);
      if (scope.count(f.variable.name))
        throw SemanticError("variable '" + f.variable.name + "' shadows an outer binding in " + where);
      scope[f.variable.name] = f.variable.type;
      check_condition(d, f.children.at(0), scope, problem, where);
      scope.erase(f.variable.name);
      return;
    }
    case Formula::Kind::kAtom:
      check_atom(d, f, scope, problem, where);
      return;
    case Formula::Kind::kEquals:
      for (const auto& op : f.operands) check_num(d, op, scope, problem, where);
      return;
    case Formula::Kind::kAssign:
      throw SemanticError("assignment outside an effect in " + where);
  }
}

void check_literal_effect(const DomainAst& d, const Formula& f, const Scope& scope, const std::string& where) {
  switch (f.kind) {
    case Formula::Kind::kAtom:
      check_atom(d, f, scope, nullptr, where);
      return;
    case Formula::Kind::kNot:
      if (f.children.at(0).kind != Formula::Kind::kAtom)
        throw SemanticError("effect negates a non-atomic formula in " + where);
      check_atom(d, f.children[0], scope, nullptr, where);
      return;
    case Formula::Kind::kAssign:
      for (const auto& op : f.operands) check_num(d, op, scope, nullptr, where);
      return;
    default:
      throw SemanticError("effect must be a conjunction of literals and assignments in " + where);
  }
}

}  // namespace

ActionSchema parse_action(std::string_view text) { return parse_action_expr(read_one(text)); }

void check_domain(const DomainAst& d) {
  if (!d.types.count(kRootType)) throw SemanticError("type hierarchy lacks the root type 'object'");
  for (const auto& [type, parent] : d.types) {
    if (type == kRootType) continue;
    if (!d.types.count(parent)) throw SemanticError("undeclared type '" + parent + "' (parent of '" + type + "')");
    if (!d.is_subtype(type, kRootType)) throw SemanticError("type '" + type + "' is part of a cycle");
  }
  std::set<std::string> names;
  for (const auto& p : d.predicates) {
    if (!names.insert(p.name).second) throw SemanticError("duplicate predicate '" + p.name + "'");
    for (const auto& param : p.parameters) check_type_known(d, param.type, "predicate '" + p.name + "'");
  }
  names.clear();
  for (const auto& f : d.fluents) {
    if (!names.insert(f.name).second) throw SemanticError("duplicate fluent '" + f.name + "'");
    for (const auto& param : f.parameters) check_type_known(d, param.type, "fluent '" + f.name + "'");
  }
  names.clear();
  for (const auto& a : d.actions) {
    std::string where = "action '" + a.name + "'";
    if (!names.insert(a.name).second) throw SemanticError("duplicate " + where);
    Scope scope;
    for (const auto& p : a.parameters) {
      check_type_known(d, p.type, where);
      if (!scope.emplace(p.name, p.type).second) throw SemanticError("duplicate parameter '" + p.name + "' in " + where);
    }
    check_condition(d, a.precondition, scope, nullptr, where);
    if (a.effect.kind == Formula::Kind::kAnd) {
      for (const auto& c : a.effect.children) check_literal_effect(d, c, scope, where);
    } else {
      check_literal_effect(d, a.effect, scope, where);
    }
  }
}

void check_ground_formula(const Formula& formula, const DomainAst& domain, const ProblemInstance& problem) {
  Scope scope;
  check_condition(domain, formula, scope, &problem, "formula");
}

DomainAst parse_domain(std::string_view text) {
  SExpr root = read_one(text);
  if (!root.has_head("define")) fail(root, "expected (define ...)");
  if (root.items.size() < 2 || !root.items[1].has_head("domain") || root.items[1].items.size() != 2)
    fail(root, "expected (domain <name>)");
  DomainAst d;
  d.name = expect_atom(root.items[1].items[1], "a domain name");
  d.types[kRootType] = "";
  for (std::size_t i = 2; i < root.items.size(); ++i) {
    const SExpr& section = root.items[i];
    if (!section.is_list || section.items.empty()) fail(section, "expected a domain section");
    const std::string& key = expect_atom(section.items.front(), "a section keyword");
    if (key == ":requirements") {
      continue;
    } else if (key == ":types") {
      for (const auto& t : parse_typed_list(section.items, 1)) {
        if (t.name == kRootType) continue;
        d.types[t.name] = t.type;
        if (!d.types.count(t.type)) d.types[t.type] = kRootType;
      }
    } else if (key == ":predicates" || key == ":functions") {
      const bool fluents = key == ":functions";
      for (std::size_t k = 1; k < section.items.size(); ++k) {
        const SExpr& item = section.items[k];
        if (fluents && item.is_atom("-")) {  // `- number` return-type annotation
          ++k;
          continue;
        }
        if (!item.is_list || item.items.empty()) fail(item, "expected a signature");
        PredicateSignature sig;
        sig.name = expect_atom(item.items.front(), "a name");
        sig.parameters = parse_typed_list(item.items, 1);
        (fluents ? d.fluents : d.predicates).push_back(std::move(sig));
      }
    } else if (key == ":action") {
      d.actions.push_back(parse_action_expr(section));
    } else {
      fail(section, "unsupported domain section '" + key + "'");
    }
  }
  check_domain(d);
  return d;
}

DomainAst with_action(DomainAst domain, ActionSchema action) {
  auto it = std::find_if(domain.actions.begin(), domain.actions.end(),
                         [&](const auto& a) { return a.name == action.name; });
  if (it == domain.actions.end()) {
    domain.actions.push_back(std::move(action));
  } else {
    *it = std::move(action);
  }
  check_domain(domain);
  return domain;
}

}  // namespace goalinf::pddl
