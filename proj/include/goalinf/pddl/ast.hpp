#pragma once

#include <map>
#include <string>
#include <vector>

namespace goalinf::pddl {

inline constexpr const char* kRootType = "object";

struct TypedName {
  std::string name;
  std::string type = kRootType;

  bool operator==(const TypedName&) const = default;
};

// Integer-valued expression: constant, fluent reference, or binary +/-.
struct NumExpr {
  enum class Kind { kConstant, kFluent, kAdd, kSub };

  Kind kind = Kind::kConstant;
  long long value = 0;
  std::string fluent;
  std::vector<std::string> args;
  std::vector<NumExpr> operands;

  static NumExpr constant(long long v);
  static NumExpr fluent_ref(std::string name, std::vector<std::string> args);
  static NumExpr add(NumExpr lhs, NumExpr rhs);
  static NumExpr sub(NumExpr lhs, NumExpr rhs);

  bool operator==(const NumExpr&) const = default;
};

// Formula tree shared by preconditions, effects, goals and observations.
// kAssign only occurs inside effects: operands = {target fluent, value}.
struct Formula {
  enum class Kind { kAnd, kOr, kNot, kExists, kAtom, kEquals, kAssign };

  Kind kind = Kind::kAnd;
  std::vector<Formula> children;
  TypedName variable;
  std::string predicate;
  std::vector<std::string> args;
  std::vector<NumExpr> operands;

  static Formula conjunction(std::vector<Formula> parts = {});
  static Formula disjunction(std::vector<Formula> parts);
  static Formula negation(Formula inner);
  static Formula exists(TypedName var, Formula body);
  static Formula atom(std::string predicate, std::vector<std::string> args);
  static Formula equals(NumExpr lhs, NumExpr rhs);
  static Formula assign(NumExpr target, NumExpr value);

  bool operator==(const Formula&) const = default;
};

inline bool is_variable(const std::string& term) { return !term.empty() && term.front() == '?'; }

struct PredicateSignature {
  std::string name;
  std::vector<TypedName> parameters;

  bool operator==(const PredicateSignature&) const = default;
};

using FluentSignature = PredicateSignature;

struct ActionSchema {
  std::string name;
  std::vector<TypedName> parameters;
  Formula precondition;
  Formula effect;

  bool operator==(const ActionSchema&) const = default;
};

struct DomainAst {
  std::string name;
  // type -> parent; the root type maps to the empty string.
  std::map<std::string, std::string> types;
  std::vector<PredicateSignature> predicates;
  std::vector<FluentSignature> fluents;
  std::vector<ActionSchema> actions;

  const PredicateSignature* find_predicate(const std::string& name) const;
  const FluentSignature* find_fluent(const std::string& name) const;
  const ActionSchema* find_action(const std::string& name) const;
  // True when `type` equals `ancestor` or descends from it.
  bool is_subtype(const std::string& type, const std::string& ancestor) const;

  bool operator==(const DomainAst&) const = default;
};

}  // namespace goalinf::pddl
