#include "goalinf/planner/task.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

#include "goalinf/error.hpp"
#include "goalinf/pddl/state.hpp"

namespace goalinf::planner {
namespace {

std::string action_label(const std::string& schema, const std::vector<std::string>& args) {
  std::string label = "(" + schema;
  for (const auto& a : args) label += " " + a;
  return label + ")";
}

GroundAction::Kind kind_of(const std::string& schema) {
  if (schema == "pickup") return GroundAction::Kind::kPickup;
  if (schema == "unlock") return GroundAction::Kind::kUnlock;
  if (schema == "take") return GroundAction::Kind::kTake;
  return GroundAction::Kind::kOther;
}

std::string ground_term(const std::string& term, const std::map<std::string, std::string>& binding) {
  if (!pddl::is_variable(term)) return term;
  auto it = binding.find(term);
  if (it == binding.end()) throw UnboundVariable("variable '" + term + "' is not bound");
  return it->second;
}

std::vector<std::string> ground_terms(const std::vector<std::string>& terms,
                                      const std::map<std::string, std::string>& binding) {
  std::vector<std::string> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(ground_term(t, binding));
  return out;
}

CompiledFormula constant_formula(bool value) {
  CompiledFormula f;
  f.kind = value ? CompiledFormula::Kind::kTrue : CompiledFormula::Kind::kFalse;
  return f;
}

bool is_const(const CompiledFormula& f, bool value) {
  return f.kind == (value ? CompiledFormula::Kind::kTrue : CompiledFormula::Kind::kFalse);
}

// Cell fixed by an (and ... (= x c1) ... (= y c2) ...) goal, if any.
std::optional<Cell> pinned_cell(const CompiledFormula& f) {
  if (f.kind != CompiledFormula::Kind::kAnd) return std::nullopt;
  std::optional<int> x, y;
  for (const auto& c : f.children) {
    if (c.kind != CompiledFormula::Kind::kEquals) continue;
    const auto& l = c.operands[0];
    const auto& r = c.operands[1];
    const CompiledExpr* var = nullptr;
    const CompiledExpr* val = nullptr;
    if (l.kind == CompiledExpr::Kind::kFluent && r.kind == CompiledExpr::Kind::kConstant) var = &l, val = &r;
    if (r.kind == CompiledExpr::Kind::kFluent && l.kind == CompiledExpr::Kind::kConstant) var = &r, val = &l;
    if (!var) continue;
    if (var->slot == 0) x = static_cast<int>(val->value);
    if (var->slot == 1) y = static_cast<int>(val->value);
  }
  if (x && y) return Cell{*x, *y};
  return std::nullopt;
}

}  // namespace

GroundAction move_action(Direction d, double cost) {
  GroundAction a;
  a.kind = GroundAction::Kind::kMove;
  a.direction = d;
  a.label = "(move " + to_string(d) + ")";
  a.cost = cost;
  return a;
}

long long CompiledExpr::eval(const WorldState& s) const {
  switch (kind) {
    case Kind::kConstant: return value;
    case Kind::kFluent: return s.fluents[slot];
    case Kind::kAdd: return operands[0].eval(s) + operands[1].eval(s);
    case Kind::kSub: return operands[0].eval(s) - operands[1].eval(s);
  }
  return 0;
}

bool CompiledFormula::eval(const WorldState& s) const {
  switch (kind) {
    case Kind::kTrue: return true;
    case Kind::kFalse: return false;
    case Kind::kAnd:
      for (const auto& c : children)
        if (!c.eval(s)) return false;
      return true;
    case Kind::kOr:
      for (const auto& c : children)
        if (c.eval(s)) return true;
      return false;
    case Kind::kNot: return !children[0].eval(s);
    case Kind::kAtom: return s.holds(atom);
    case Kind::kEquals: return operands[0].eval(s) == operands[1].eval(s);
  }
  return false;
}

Task::Task(const pddl::DomainAst& domain, const pddl::ProblemInstance& problem, TaskOptions options)
    : domain_(domain), problem_(problem), options_(options) {
  if (!(options_.cost_scale > 0)) throw InvalidConfig("cost scale must be positive");
  pddl::check_problem(domain_, problem_);

  auto agents = problem_.objects_of_type(domain_, "agent");
  if (agents.size() != 1) throw InvalidConfig("a task needs exactly one agent, found " + std::to_string(agents.size()));
  agent_ = agents.front();

  auto register_fluent = [&](const pddl::GroundFluent& f) {
    if (fluent_index_.count(f)) return;
    if (fluents_.size() == kMaxDynamicFluents)
      throw StateSpaceTooLarge("more than " + std::to_string(kMaxDynamicFluents) + " changing fluents");
    fluent_index_[f] = fluents_.size();
    fluents_.push_back(f);
  };
  register_fluent({"xloc", {agent_}});
  register_fluent({"yloc", {agent_}});

  // Anything an effect can touch is dynamic; the rest is folded as constant.
  auto instances = pddl::ground_actions(domain_, problem_);
  for (const auto& inst : instances) {
    const auto& schema = domain_.actions[inst.schema];
    auto binding = inst.binding(domain_);
    std::vector<const pddl::Formula*> parts;
    if (schema.effect.kind == pddl::Formula::Kind::kAnd)
      for (const auto& c : schema.effect.children) parts.push_back(&c);
    else
      parts.push_back(&schema.effect);
    for (const auto* part : parts) {
      const pddl::Formula* lit = part->kind == pddl::Formula::Kind::kNot ? &part->children[0] : part;
      if (lit->kind == pddl::Formula::Kind::kAtom) {
        pddl::GroundAtom a{lit->predicate, ground_terms(lit->args, binding)};
        if (!atom_index_.count(a)) {
          if (atoms_.size() == kMaxDynamicAtoms)
            throw StateSpaceTooLarge("more than " + std::to_string(kMaxDynamicAtoms) + " changing atoms");
          atom_index_[a] = atoms_.size();
          atoms_.push_back(a);
        }
      } else if (lit->kind == pddl::Formula::Kind::kAssign) {
        const auto& target = lit->operands[0];
        register_fluent({target.fluent, ground_terms(target.args, binding)});
      } else {
        throw IllegalEffect("effect of '" + schema.name + "' is not a conjunction of literals and assignments");
      }
    }
  }

  for (const auto& a : problem_.initial_facts)
    if (auto slot = atom_slot(a)) initial_.atoms |= std::uint64_t{1} << *slot;
  for (std::size_t i = 0; i < fluents_.size(); ++i) {
    auto it = problem_.initial_fluents.find(fluents_[i]);
    if (it == problem_.initial_fluents.end())
      throw UnknownFluent("no initial value for " + pddl::to_string(fluents_[i]));
    initial_.fluents[i] = static_cast<std::int32_t>(it->second);
  }

  for (const auto& inst : instances) {
    const auto& schema = domain_.actions[inst.schema];
    auto binding = inst.binding(domain_);
    CompiledOperator op;
    op.schema = schema.name;
    op.args = inst.args;
    op.label = action_label(schema.name, inst.args);
    op.kind = kind_of(schema.name);
    op.precondition = compile(schema.precondition, binding);
    if (is_const(op.precondition, false)) continue;
    std::vector<const pddl::Formula*> parts;
    if (schema.effect.kind == pddl::Formula::Kind::kAnd)
      for (const auto& c : schema.effect.children) parts.push_back(&c);
    else
      parts.push_back(&schema.effect);
    for (const auto* part : parts) {
      if (part->kind == pddl::Formula::Kind::kAtom) {
        op.add |= std::uint64_t{1} << *atom_slot({part->predicate, ground_terms(part->args, binding)});
      } else if (part->kind == pddl::Formula::Kind::kNot) {
        const auto& lit = part->children[0];
        op.del |= std::uint64_t{1} << *atom_slot({lit.predicate, ground_terms(lit.args, binding)});
      } else {
        const auto& target = part->operands[0];
        op.assigns.emplace_back(*fluent_slot({target.fluent, ground_terms(target.args, binding)}),
                                compile(part->operands[1], binding));
      }
    }
    operators_.push_back(std::move(op));
  }
  std::sort(operators_.begin(), operators_.end(),
            [](const CompiledOperator& a, const CompiledOperator& b) { return a.label < b.label; });

  // Grid geometry.
  const auto& grid = problem_.grid;
  if (grid.width <= 0 || grid.height <= 0) throw InvalidConfig("grid must have positive dimensions");
  walls_.assign(static_cast<std::size_t>(grid.width * grid.height), 0);
  for (const auto& w : grid.walls)
    if (grid.in_bounds(w)) walls_[static_cast<std::size_t>(w.y * grid.width + w.x)] = 1;

  auto static_fluent = [&](const std::string& name, const std::string& obj) -> std::optional<long long> {
    auto it = problem_.initial_fluents.find({name, {obj}});
    if (it == problem_.initial_fluents.end()) return std::nullopt;
    return it->second;
  };
  for (const auto& door : problem_.objects_of_type(domain_, "door")) {
    auto x = static_fluent("xloc", door), y = static_fluent("yloc", door);
    if (!x || !y) continue;
    Cell cell{static_cast<int>(*x), static_cast<int>(*y)};
    pddl::GroundAtom locked{"locked", {door}};
    if (auto slot = atom_slot(locked)) {
      locks_.push_back({door, cell, *slot});
      locks_at_[cell] |= std::uint64_t{1} << *slot;
    } else if (problem_.initial_facts.count(locked) && grid.in_bounds(cell)) {
      walls_[static_cast<std::size_t>(cell.y * grid.width + cell.x)] = 1;
    }
  }
  for (const auto& key : problem_.objects_of_type(domain_, "key")) {
    KeyInfo info{key, atom_slot({"has", {agent_, key}}), atom_slot({"onmap", {key}})};
    if (info.has_atom) held_mask_ |= std::uint64_t{1} << *info.has_atom;
    keys_.push_back(info);
  }
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (atoms_[i].predicate == "taken") taken_mask_ |= std::uint64_t{1} << i;

  // Which key opens which lock: probe each unlock instance next to the lock.
  fits_.assign(keys_.size(), std::vector<bool>(locks_.size(), false));
  for (const auto& op : operators_) {
    if (op.kind != GroundAction::Kind::kUnlock) continue;
    for (std::size_t k = 0; k < keys_.size(); ++k) {
      if (!keys_[k].has_atom || std::find(op.args.begin(), op.args.end(), keys_[k].name) == op.args.end()) continue;
      for (std::size_t d = 0; d < locks_.size(); ++d) {
        if (std::find(op.args.begin(), op.args.end(), locks_[d].name) == op.args.end()) continue;
        for (Direction dir : kAllDirections) {
          WorldState probe = initial_;
          probe.atoms = (std::uint64_t{1} << *keys_[k].has_atom) | (std::uint64_t{1} << locks_[d].locked_atom);
          Cell at = step(locks_[d].cell, dir);
          probe.fluents[0] = at.x;
          probe.fluents[1] = at.y;
          if (op.precondition.eval(probe)) fits_[k][d] = true;
        }
      }
    }
  }

  for (const auto& g : problem_.goals) {
    CompiledGoal goal{g.label, g.target_object, compile(g.formula), std::nullopt, 0};
    goal.target_cell = pinned_cell(goal.formula);
    for (std::size_t d = 0; d < locks_.size(); ++d) {
      if (!goal.target_cell) {
        goal.needed_locks |= std::uint64_t{1} << d;
        continue;
      }
      // Needed: with every other door open, this one still separates start from target.
      std::set<Cell> seen = {initial_.agent_cell()};
      std::queue<Cell> q;
      q.push(initial_.agent_cell());
      while (!q.empty()) {
        Cell c = q.front();
        q.pop();
        for (Direction dir : kAllDirections) {
          Cell n = step(c, dir);
          if (!grid.in_bounds(n) || walls_[static_cast<std::size_t>(n.y * grid.width + n.x)] ||
              n == locks_[d].cell || seen.count(n))
            continue;
          seen.insert(n);
          q.push(n);
        }
      }
      if (!seen.count(*goal.target_cell)) goal.needed_locks |= std::uint64_t{1} << d;
    }
    goals_.push_back(std::move(goal));
  }
}

std::size_t Task::goal_index(const std::string& label) const {
  for (std::size_t i = 0; i < goals_.size(); ++i)
    if (goals_[i].label == label) return i;
  throw InvalidConfig("unknown goal '" + label + "'");
}

std::optional<std::size_t> Task::atom_slot(const pddl::GroundAtom& a) const {
  auto it = atom_index_.find(a);
  if (it == atom_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Task::fluent_slot(const pddl::GroundFluent& f) const {
  auto it = fluent_index_.find(f);
  if (it == fluent_index_.end()) return std::nullopt;
  return it->second;
}

CompiledFormula Task::compile(const pddl::Formula& formula) const { return compile(formula, {}); }

CompiledFormula Task::compile(const pddl::Formula& f, const std::map<std::string, std::string>& binding) const {
  using K = pddl::Formula::Kind;
  CompiledFormula out;
  switch (f.kind) {
    case K::kAnd:
    case K::kOr: {
      const bool conj = f.kind == K::kAnd;
      out.kind = conj ? CompiledFormula::Kind::kAnd : CompiledFormula::Kind::kOr;
      for (const auto& c : f.children) {
        auto cc = compile(c, binding);
        if (is_const(cc, conj)) continue;
        if (is_const(cc, !conj)) return constant_formula(!conj);
        out.children.push_back(std::move(cc));
      }
      if (out.children.empty()) return constant_formula(conj);
      if (out.children.size() == 1) return std::move(out.children.front());
      return out;
    }
    case K::kExists: {
      CompiledFormula any;
      any.kind = CompiledFormula::Kind::kOr;
      auto scoped = binding;
      for (const auto& obj : problem_.objects_of_type(domain_, f.variable.type)) {
        scoped[f.variable.name] = obj;
        auto cc = compile(f.children[0], scoped);
        if (is_const(cc, false)) continue;
        if (is_const(cc, true)) return constant_formula(true);
        any.children.push_back(std::move(cc));
      }
      if (any.children.empty()) return constant_formula(false);
      if (any.children.size() == 1) return std::move(any.children.front());
      return any;
    }
    case K::kNot: {
      auto cc = compile(f.children[0], binding);
      if (is_const(cc, true)) return constant_formula(false);
      if (is_const(cc, false)) return constant_formula(true);
      out.kind = CompiledFormula::Kind::kNot;
      out.children.push_back(std::move(cc));
      return out;
    }
    case K::kAtom: {
      pddl::GroundAtom a{f.predicate, ground_terms(f.args, binding)};
      if (auto slot = atom_slot(a)) {
        out.kind = CompiledFormula::Kind::kAtom;
        out.atom = *slot;
        return out;
      }
      return constant_formula(problem_.initial_facts.count(a) > 0);
    }
    case K::kEquals: {
      auto l = compile(f.operands[0], binding);
      auto r = compile(f.operands[1], binding);
      if (l.kind == CompiledExpr::Kind::kConstant && r.kind == CompiledExpr::Kind::kConstant)
        return constant_formula(l.value == r.value);
      out.kind = CompiledFormula::Kind::kEquals;
      out.operands = {std::move(l), std::move(r)};
      return out;
    }
    case K::kAssign: throw SemanticError("assignment used as a condition");
  }
  return out;
}

CompiledExpr Task::compile(const pddl::NumExpr& e, const std::map<std::string, std::string>& binding) const {
  using K = pddl::NumExpr::Kind;
  CompiledExpr out;
  switch (e.kind) {
    case K::kConstant:
      out.value = e.value;
      return out;
    case K::kFluent: {
      pddl::GroundFluent f{e.fluent, ground_terms(e.args, binding)};
      if (auto slot = fluent_slot(f)) {
        out.kind = CompiledExpr::Kind::kFluent;
        out.slot = *slot;
        return out;
      }
      auto it = problem_.initial_fluents.find(f);
      if (it == problem_.initial_fluents.end()) throw UnknownFluent("no value for " + pddl::to_string(f));
      out.value = it->second;
      return out;
    }
    case K::kAdd:
    case K::kSub: {
      auto l = compile(e.operands[0], binding);
      auto r = compile(e.operands[1], binding);
      const bool add = e.kind == K::kAdd;
      if (l.kind == CompiledExpr::Kind::kConstant && r.kind == CompiledExpr::Kind::kConstant) {
        out.value = add ? l.value + r.value : l.value - r.value;
        return out;
      }
      out.kind = add ? CompiledExpr::Kind::kAdd : CompiledExpr::Kind::kSub;
      out.operands = {std::move(l), std::move(r)};
      return out;
    }
  }
  return out;
}

bool Task::passable(Cell c, const WorldState& s) const {
  const auto& grid = problem_.grid;
  if (!grid.in_bounds(c) || walls_[static_cast<std::size_t>(c.y * grid.width + c.x)]) return false;
  auto it = locks_at_.find(c);
  return it == locks_at_.end() || (s.atoms & it->second) == 0;
}

WorldState Task::apply_operator(const WorldState& s, std::size_t index) const {
  const auto& op = operators_[index];
  WorldState next = s;
  next.atoms = (s.atoms & ~op.del) | op.add;
  for (const auto& [slot, expr] : op.assigns) next.fluents[slot] = static_cast<std::int32_t>(expr.eval(s));
  return next;
}

std::optional<WorldState> Task::apply(const WorldState& s, const GroundAction& a) const {
  if (terminal(s)) return std::nullopt;
  if (a.kind == GroundAction::Kind::kMove) {
    Cell to = step(s.agent_cell(), a.direction);
    if (!passable(to, s)) return std::nullopt;
    WorldState next = s;
    next.fluents[0] = to.x;
    next.fluents[1] = to.y;
    return next;
  }
  std::size_t index = operators_.size();
  if (a.op >= 0 && static_cast<std::size_t>(a.op) < operators_.size() && operators_[a.op].label == a.label) {
    index = static_cast<std::size_t>(a.op);
  } else {
    for (std::size_t i = 0; i < operators_.size(); ++i)
      if (operators_[i].label == a.label) index = i;
  }
  if (index == operators_.size() || !operators_[index].precondition.eval(s)) return std::nullopt;
  return apply_operator(s, index);
}

std::vector<Successor> Task::successors(const WorldState& s, std::optional<std::size_t> goal) const {
  std::vector<Successor> out;
  if (terminal(s)) return out;
  const double cost = options_.cost_scale;
  for (Direction d : kAllDirections) {
    Cell to = step(s.agent_cell(), d);
    if (!passable(to, s)) continue;
    WorldState next = s;
    next.fluents[0] = to.x;
    next.fluents[1] = to.y;
    out.push_back({move_action(d, cost), next});
  }
  for (std::size_t i = 0; i < operators_.size(); ++i) {
    if (!operators_[i].precondition.eval(s)) continue;
    GroundAction a;
    a.kind = operators_[i].kind;
    a.op = static_cast<int>(i);
    a.label = operators_[i].label;
    a.cost = cost;
    out.push_back({std::move(a), apply_operator(s, i)});
  }
  if (goal && problem_.forbid_surplus_keys)
    std::erase_if(out, [&](const Successor& x) { return !surplus_free(x.state, *goal); });
  std::sort(out.begin(), out.end(), [](const Successor& a, const Successor& b) { return a.action.label < b.action.label; });
  return out;
}

bool Task::surplus_free(const WorldState& s, std::size_t goal) const {
  if ((s.atoms & held_mask_) == 0) return true;
  std::vector<std::size_t> held, open;
  for (std::size_t k = 0; k < keys_.size(); ++k)
    if (keys_[k].has_atom && s.holds(*keys_[k].has_atom)) held.push_back(k);
  for (std::size_t d = 0; d < locks_.size(); ++d)
    if (((goals_[goal].needed_locks >> d) & 1u) && s.holds(locks_[d].locked_atom)) open.push_back(d);
  if (held.size() > open.size()) return false;

  // Kuhn's augmenting paths; both sides hold a handful of items.
  std::vector<int> owner(open.size(), -1);
  std::function<bool(std::size_t, std::vector<bool>&)> augment = [&](std::size_t k, std::vector<bool>& seen) {
    for (std::size_t j = 0; j < open.size(); ++j) {
      if (seen[j] || !fits_[held[k]][open[j]]) continue;
      seen[j] = true;
      if (owner[j] < 0 || augment(static_cast<std::size_t>(owner[j]), seen)) {
        owner[j] = static_cast<int>(k);
        return true;
      }
    }
    return false;
  };
  for (std::size_t k = 0; k < held.size(); ++k) {
    std::vector<bool> seen(open.size(), false);
    if (!augment(k, seen)) return false;
  }
  return true;
}

double Task::heuristic(const WorldState& s, std::size_t goal) const {
  const auto& target = goals_[goal].target_cell;
  if (!target) return 0.0;
  return manhattan(s.agent_cell(), *target) * options_.cost_scale;
}

std::vector<std::string> Task::inventory(const WorldState& s) const {
  std::vector<std::string> out;
  for (const auto& k : keys_)
    if (k.has_atom && s.holds(*k.has_atom)) out.push_back(k.name);
  return out;
}

std::vector<std::string> Task::locked_doors(const WorldState& s) const {
  std::vector<std::string> out;
  for (const auto& l : locks_)
    if (s.holds(l.locked_atom)) out.push_back(l.name);
  return out;
}

std::map<std::string, Cell> Task::keys_on_map(const WorldState& s) const {
  std::map<std::string, Cell> out;
  for (const auto& k : keys_) {
    if (!k.onmap_atom || !s.holds(*k.onmap_atom)) continue;
    auto x = problem_.initial_fluents.find({"xloc", {k.name}});
    auto y = problem_.initial_fluents.find({"yloc", {k.name}});
    if (x != problem_.initial_fluents.end() && y != problem_.initial_fluents.end())
      out[k.name] = {static_cast<int>(x->second), static_cast<int>(y->second)};
  }
  return out;
}

std::optional<std::string> Task::trophy_taken(const WorldState& s) const {
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (((taken_mask_ >> i) & 1u) && s.holds(i)) return atoms_[i].args.back();
  return std::nullopt;
}

std::string Task::describe(const WorldState& s) const {
  std::ostringstream os;
  Cell c = s.agent_cell();
  os << "agent (" << c.x << "," << c.y << ")";
  auto inv = inventory(s);
  os << " holding [";
  for (std::size_t i = 0; i < inv.size(); ++i) os << (i ? " " : "") << inv[i];
  os << "] locked [";
  auto locked = locked_doors(s);
  for (std::size_t i = 0; i < locked.size(); ++i) os << (i ? " " : "") << locked[i];
  os << "]";
  if (auto t = trophy_taken(s)) os << " took " << *t;
  return os.str();
}

}  // namespace goalinf::planner
