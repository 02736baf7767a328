#pragma once

#include <optional>
#include <string>

#include "goalinf/pddl/ast.hpp"
#include "goalinf/worldgen/scenario.hpp"

namespace goalinf::worldgen {

// Gameshow domain text with the unlock rule of the given variant. Movement
// is not part of the text: it is provided by the grid semantics of the planner.
std::string base_domain_text(Variant variant);

// The unlock operator alone, as translation is asked to produce it.
std::string unlock_operator_text(Variant variant);

// Base domain for `variant`, with its unlock action replaced by
// `operator_text` when given.
pddl::DomainAst build_domain(Variant variant, const std::optional<std::string>& operator_text = std::nullopt);

}  // namespace goalinf::worldgen
