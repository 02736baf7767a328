#include "goalinf/pddl/problem.hpp"

#include "goalinf/error.hpp"
#include "goalinf/pddl/parser.hpp"

namespace goalinf::pddl {

std::string to_string(const GroundAtom& atom) {
  std::string out = "(" + atom.predicate;
  for (const auto& a : atom.args) out += " " + a;
  return out + ")";
}

std::vector<std::string> ProblemInstance::objects_of_type(const DomainAst& domain, const std::string& type) const {
  std::vector<std::string> out;
  for (const auto& [name, t] : objects)
    if (domain.is_subtype(t, type)) out.push_back(name);
  return out;  // std::map iteration is already lexicographic
}

namespace {

void check_ground(const DomainAst& d, const ProblemInstance& p, const PredicateSignature* sig,
                  const GroundAtom& atom, const char* what) {
  if (!sig) throw SemanticError(std::string("undeclared ") + what + " '" + atom.predicate + "' in problem");
  if (sig->parameters.size() != atom.args.size())
    throw SemanticError("wrong arity for " + to_string(atom));
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    auto it = p.objects.find(atom.args[i]);
    if (it == p.objects.end()) throw SemanticError("undeclared object '" + atom.args[i] + "' in " + to_string(atom));
    if (!d.is_subtype(it->second, sig->parameters[i].type))
      throw SemanticError("object '" + atom.args[i] + "' has the wrong type in " + to_string(atom));
  }
}

}  // namespace

void check_problem(const DomainAst& d, const ProblemInstance& p) {
  for (const auto& [name, type] : p.objects)
    if (!d.types.count(type)) throw SemanticError("object '" + name + "' has undeclared type '" + type + "'");
  for (const auto& a : p.initial_facts) check_ground(d, p, d.find_predicate(a.predicate), a, "predicate");
  for (const auto& [f, v] : p.initial_fluents) check_ground(d, p, d.find_fluent(f.predicate), f, "fluent");
  std::map<std::string, int> targets;
  for (const auto& g : p.goals) {
    check_ground_formula(g.formula, d, p);
    if (!g.target_object.empty()) ++targets[g.target_object];
  }
  for (const auto& [obj, n] : targets)
    if (n != 1) throw SemanticError("object '" + obj + "' appears in " + std::to_string(n) + " goal candidates");
}

}  // namespace goalinf::pddl
