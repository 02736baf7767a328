#include "goalinf/pddl/ast.hpp"

#include <algorithm>

namespace goalinf::pddl {

NumExpr NumExpr::constant(long long v) {
  NumExpr e;
  e.kind = Kind::kConstant;
  e.value = v;
  return e;
}

NumExpr NumExpr::fluent_ref(std::string name, std::vector<std::string> args) {
  NumExpr e;
  e.kind = Kind::kFluent;
  e.fluent = std::move(name);
  e.args = std::move(args);
  return e;
}

NumExpr NumExpr::add(NumExpr lhs, NumExpr rhs) {
  NumExpr e;
  e.kind = Kind::kAdd;
  e.operands = {std::move(lhs), std::move(rhs)};
  return e;
}

NumExpr NumExpr::sub(NumExpr lhs, NumExpr rhs) {
  NumExpr e;
  e.kind = Kind::kSub;
  e.operands = {std::move(lhs), std::move(rhs)};
  return e;
}

Formula Formula::conjunction(std::vector<Formula> parts) {
  Formula f;
  f.kind = Kind::kAnd;
  f.children = std::move(parts);
  return f;
}

Formula Formula::disjunction(std::vector<Formula> parts) {
  Formula f;
  f.kind = Kind::kOr;
  f.children = std::move(parts);
  return f;
}

Formula Formula::negation(Formula inner) {
  Formula f;
  f.kind = Kind::kNot;
  f.children.push_back(std::move(inner));
  return f;
}

Formula Formula::exists(TypedName var, Formula body) {
  Formula f;
  f.kind = Kind::kExists;
  f.variable = std::move(var);
  f.children.push_back(std::move(body));
  return f;
}

Formula Formula::atom(std::string predicate, std::vector<std::string> args) {
  Formula f;
  f.kind = Kind::kAtom;
  f.predicate = std::move(predicate);
  f.args = std::move(args);
  return f;
}

Formula Formula::equals(NumExpr lhs, NumExpr rhs) {
  Formula f;
  f.kind = Kind::kEquals;
  f.operands = {std::move(lhs), std::move(rhs)};
  return f;
}

Formula Formula::assign(NumExpr target, NumExpr value) {
  Formula f;
  f.kind = Kind::kAssign;
  f.operands = {std::move(target), std::move(value)};
  return f;
}

const PredicateSignature* DomainAst::find_predicate(const std::string& n) const {
  auto it = std::find_if(predicates.begin(), predicates.end(), [&](const auto& p) { return p.name == n; });
  return it == predicates.end() ? nullptr : &*it;
}

const FluentSignature* DomainAst::find_fluent(const std::string& n) const {
  auto it = std::find_if(fluents.begin(), fluents.end(), [&](const auto& p) { return p.name == n; });
  return it == fluents.end() ? nullptr : &*it;
}

const ActionSchema* DomainAst::find_action(const std::string& n) const {
  auto it = std::find_if(actions.begin(), actions.end(), [&](const auto& a) { return a.name == n; });
  return it == actions.end() ? nullptr : &*it;
}

bool DomainAst::is_subtype(const std::string& type, const std::string& ancestor) const {
  std::string t = type;
  for (std::size_t guard = 0; guard <= types.size(); ++guard) {
    if (t == ancestor) return true;
    auto it = types.find(t);
    if (it == types.end() || it->second.empty()) return false;
    t = it->second;
  }
  return false;
}

}  // namespace goalinf::pddl
