#include "goalinf/pddl/printer.hpp"

#include <sstream>

namespace goalinf::pddl {
namespace {

std::string join_args(const std::vector<std::string>& args) {
  std::string out;
  for (const auto& a : args) out += " " + a;
  return out;
}

std::string typed_list(const std::vector<TypedName>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ' ';
    out += names[i].name + " - " + names[i].type;
  }
  return out;
}

void print_formula_to(std::ostringstream& os, const Formula& f, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  switch (f.kind) {
    case Formula::Kind::kAnd:
    case Formula::Kind::kOr: {
      os << '(' << (f.kind == Formula::Kind::kAnd ? "and" : "or");
      const bool multiline = f.children.size() > 2;
      for (const auto& c : f.children) {
        if (multiline) {
          os << '\n' << pad << "  ";
          print_formula_to(os, c, indent + 2);
        } else {
          os << ' ';
          print_formula_to(os, c, indent);
        }
      }
      os << ')';
      return;
    }
    case Formula::Kind::kNot:
      os << "(not ";
      print_formula_to(os, f.children.at(0), indent);
      os << ')';
      return;
    case Formula::Kind::kExists:
      os << "(exists (" << f.variable.name << " - " << f.variable.type << ") ";
      print_formula_to(os, f.children.at(0), indent);
      os << ')';
      return;
    case Formula::Kind::kAtom:
      os << '(' << f.predicate << join_args(f.args) << ')';
      return;
    case Formula::Kind::kEquals:
      os << "(= " << print_expr(f.operands.at(0)) << ' ' << print_expr(f.operands.at(1)) << ')';
      return;
    case Formula::Kind::kAssign:
      os << "(assign " << print_expr(f.operands.at(0)) << ' ' << print_expr(f.operands.at(1)) << ')';
      return;
  }
}

}  // namespace

std::string print_expr(const NumExpr& e) {
  switch (e.kind) {
    case NumExpr::Kind::kConstant: return std::to_string(e.value);
    case NumExpr::Kind::kFluent: return "(" + e.fluent + join_args(e.args) + ")";
    case NumExpr::Kind::kAdd: return "(+ " + print_expr(e.operands.at(0)) + " " + print_expr(e.operands.at(1)) + ")";
    case NumExpr::Kind::kSub: return "(- " + print_expr(e.operands.at(0)) + " " + print_expr(e.operands.at(1)) + ")";
  }
  return {};
}

std::string print_formula(const Formula& formula) {
  std::ostringstream os;
  print_formula_to(os, formula, 0);
  return os.str();
}

std::string print_action(const ActionSchema& a) {
  std::ostringstream os;
  os << "(:action " << a.name << "\n :parameters (" << typed_list(a.parameters) << ")\n :precondition ";
  print_formula_to(os, a.precondition, 2);
  os << "\n :effect ";
  print_formula_to(os, a.effect, 2);
  os << ")";
  return os.str();
}

std::string print_domain(const DomainAst& d) {
  std::ostringstream os;
  os << "(define (domain " << d.name << ")\n";
  os << "  (:types";
  for (const auto& [type, parent] : d.types)
    if (!parent.empty()) os << ' ' << type << " - " << parent;
  os << ")\n  (:predicates";
  for (const auto& p : d.predicates) os << "\n    (" << p.name << (p.parameters.empty() ? "" : " ") << typed_list(p.parameters) << ')';
  os << ")\n  (:functions";
  for (const auto& f : d.fluents) os << "\n    (" << f.name << (f.parameters.empty() ? "" : " ") << typed_list(f.parameters) << ')';
  os << ")\n";
  for (const auto& a : d.actions) {
    std::string text = print_action(a);
    std::string indented = "  ";
    for (char c : text) {
      indented += c;
      if (c == '\n') indented += "  ";
    }
    os << indented << '\n';
  }
  os << ")\n";
  return os.str();
}

std::string print_problem(const ProblemInstance& p, const std::string& domain_name) {
  std::ostringstream os;
  os << "(define (problem " << (p.name.empty() ? "scene" : p.name) << ")\n  (:domain " << domain_name << ")\n";
  os << "  ; grid " << p.grid.width << "x" << p.grid.height << ", " << p.grid.walls.size() << " walls\n";
  for (const auto& w : p.grid.walls) os << "  ; wall " << w.x << " " << w.y << "\n";
  os << "  (:objects";
  for (const auto& [name, type] : p.objects) os << "\n    " << name << " - " << type;
  os << ")\n  (:init";
  for (const auto& a : p.initial_facts) os << "\n    " << to_string(a);
  for (const auto& [f, v] : p.initial_fluents) os << "\n    (= " << to_string(f) << ' ' << v << ')';
  os << ")\n";
  for (const auto& g : p.goals) os << "  ; goal " << g.label << ": " << print_formula(g.formula) << "\n";
  os << ")\n";
  return os.str();
}

}  // namespace goalinf::pddl
