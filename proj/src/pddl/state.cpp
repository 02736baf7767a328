#include "goalinf/pddl/state.hpp"

#include "goalinf/error.hpp"
#include "goalinf/pddl/printer.hpp"

namespace goalinf::pddl {
namespace {

std::string resolve(const std::string& term, const Binding& binding) {
  if (!is_variable(term)) return term;
  auto it = binding.find(term);
  if (it == binding.end()) throw UnboundVariable("variable '" + term + "' is not bound");
  return it->second;
}

GroundAtom ground(const std::string& head, const std::vector<std::string>& args, const Binding& binding) {
  GroundAtom atom{head, {}};
  atom.args.reserve(args.size());
  for (const auto& a : args) atom.args.push_back(resolve(a, binding));
  return atom;
}

}  // namespace

State initial_state(const ProblemInstance& problem) {
  return State{problem.initial_facts, problem.initial_fluents};
}

long long eval_expr(const State& state, const NumExpr& e, const Binding& binding) {
  switch (e.kind) {
    case NumExpr::Kind::kConstant: return e.value;
    case NumExpr::Kind::kFluent: {
      GroundFluent key = ground(e.fluent, e.args, binding);
      auto it = state.fluents.find(key);
      if (it == state.fluents.end()) throw UnknownFluent("fluent " + to_string(key) + " has no value");
      return it->second;
    }
    case NumExpr::Kind::kAdd:
      return eval_expr(state, e.operands.at(0), binding) + eval_expr(state, e.operands.at(1), binding);
    case NumExpr::Kind::kSub:
      return eval_expr(state, e.operands.at(0), binding) - eval_expr(state, e.operands.at(1), binding);
  }
  return 0;
}

bool eval_formula(const State& state, const Formula& f, const Binding& binding, const DomainAst& domain,
                  const ProblemInstance& problem) {
  switch (f.kind) {
    case Formula::Kind::kAnd:
      for (const auto& c : f.children)
        if (!eval_formula(state, c, binding, domain, problem)) return false;
      return true;
    case Formula::Kind::kOr:
      for (const auto& c : f.children)
        if (eval_formula(state, c, binding, domain, problem)) return true;
      return false;
    case Formula::Kind::kNot:
      return !eval_formula(state, f.children.at(0), binding, domain, problem);
    case Formula::Kind::kExists: {
      Binding inner = binding;
      for (const auto& obj : problem.objects_of_type(domain, f.variable.type)) {
        inner[f.variable.name] = obj;
        if (eval_formula(state, f.children.at(0), inner, domain, problem)) return true;
      }
      return false;
    }
    case Formula::Kind::kAtom:
      return state.facts.count(ground(f.predicate, f.args, binding)) > 0;
    case Formula::Kind::kEquals:
      return eval_expr(state, f.operands.at(0), binding) == eval_expr(state, f.operands.at(1), binding);
    case Formula::Kind::kAssign:
      throw IllegalEffect("assignment evaluated as a condition");
  }
  return false;
}

State apply_effect(const State& state, const Formula& effect, const Binding& binding) {
  std::vector<const Formula*> parts;
  if (effect.kind == Formula::Kind::kAnd) {
    for (const auto& c : effect.children) parts.push_back(&c);
  } else {
    parts.push_back(&effect);
  }
  std::vector<GroundAtom> adds;
  std::vector<GroundAtom> dels;
  std::vector<std::pair<GroundFluent, long long>> assigns;
  for (const Formula* p : parts) {
    switch (p->kind) {
      case Formula::Kind::kAtom:
        adds.push_back(ground(p->predicate, p->args, binding));
        break;
      case Formula::Kind::kNot: {
        const Formula& inner = p->children.at(0);
        if (inner.kind != Formula::Kind::kAtom) throw IllegalEffect("negated non-atom " + print_formula(*p));
        dels.push_back(ground(inner.predicate, inner.args, binding));
        break;
      }
      case Formula::Kind::kAssign: {
        const NumExpr& target = p->operands.at(0);
        assigns.emplace_back(ground(target.fluent, target.args, binding),
                             eval_expr(state, p->operands.at(1), binding));
        break;
      }
      default:
        throw IllegalEffect("non-conjunctive effect " + print_formula(*p));
    }
  }
  State out = state;
  for (const auto& a : dels) out.facts.erase(a);
  for (auto& a : adds) out.facts.insert(std::move(a));
  for (auto& [f, v] : assigns) out.fluents[f] = v;
  return out;
}

Binding ActionInstance::binding(const DomainAst& domain) const {
  const ActionSchema& s = domain.actions.at(schema);
  Binding b;
  for (std::size_t i = 0; i < s.parameters.size() && i < args.size(); ++i) b[s.parameters[i].name] = args[i];
  return b;
}

std::vector<ActionInstance> ground_actions(const DomainAst& domain, const ProblemInstance& problem) {
  std::vector<ActionInstance> out;
  for (std::size_t si = 0; si < domain.actions.size(); ++si) {
    const ActionSchema& schema = domain.actions[si];
    std::vector<std::vector<std::string>> pools;
    bool empty = false;
    for (const auto& p : schema.parameters) {
      pools.push_back(problem.objects_of_type(domain, p.type));
      empty = empty || pools.back().empty();
    }
    if (empty) continue;
    std::vector<std::size_t> idx(pools.size(), 0);
    while (true) {
      ActionInstance inst{si, schema.name, {}};
      for (std::size_t k = 0; k < pools.size(); ++k) inst.args.push_back(pools[k][idx[k]]);
      out.push_back(std::move(inst));
      // odometer increment, last parameter fastest
      bool done = true;
      for (std::size_t k = pools.size(); k-- > 0;) {
        if (++idx[k] < pools[k].size()) {
          done = false;
          break;
        }
        idx[k] = 0;
      }
      if (done) break;
    }
  }
  return out;
}

}  // namespace goalinf::pddl
