#include "goalinf/worldgen/domains.hpp"

#include "goalinf/pddl/parser.hpp"

namespace goalinf::worldgen {
namespace {

constexpr const char* kAdjacent = R"(
                        (or (and (= (xloc ?a) (xloc ?d)) (= (- (yloc ?a) 1) (yloc ?d)))
                            (and (= (xloc ?a) (xloc ?d)) (= (+ (yloc ?a) 1) (yloc ?d)))
                            (and (= (- (xloc ?a) 1) (xloc ?d)) (= (yloc ?a) (yloc ?d)))
                            (and (= (+ (xloc ?a) 1) (xloc ?d)) (= (yloc ?a) (yloc ?d)))))";

std::string unlock_with(const std::string& color_test) {
  std::string text =
      "(:action unlock\n"
      " :parameters (?a - agent ?k - key ?d - door)\n"
      " :precondition (and (has ?a ?k) (locked ?d)";
  if (!color_test.empty()) text += "\n                    " + color_test;
  text += kAdjacent;
  text += ")\n :effect (and (not (has ?a ?k)) (not (locked ?d))))";
  return text;
}

}  // namespace

std::string unlock_operator_text(Variant variant) {
  switch (variant) {
    case Variant::kColorSame:
      return unlock_with("(exists (?c - color) (and (iscolor ?k ?c) (iscolor ?d ?c)))");
    case Variant::kColorDifferent:
      return unlock_with("(exists (?c - color) (and (iscolor ?k ?c) (not (iscolor ?d ?c))))");
    case Variant::kGeneric:
    case Variant::kSpatial:
      return unlock_with("");
  }
  return unlock_with("");
}

std::string base_domain_text(Variant variant) {
  return std::string(R"pddl((define (domain gameshow)
  (:requirements :strips :typing :negative-preconditions :existential-preconditions :numeric-fluents)
  (:types agent key door trophy color - object)
  (:predicates
    (has ?a - agent ?k - key)
    (onmap ?k - key)
    (locked ?d - door)
    (iscolor ?o - object ?c - color)
    (taken ?a - agent ?t - trophy))
  (:functions
    (xloc ?o - object)
    (yloc ?o - object)
    (keys-picked ?a - agent))
  (:action pickup
   :parameters (?a - agent ?k - key)
   :precondition (and (onmap ?k) (= (xloc ?a) (xloc ?k)) (= (yloc ?a) (yloc ?k)))
   :effect (and (has ?a ?k) (not (onmap ?k))
                (assign (keys-picked ?a) (+ (keys-picked ?a) 1))))
  )pddl") + unlock_operator_text(variant) +
         R"pddl(
  (:action take
   :parameters (?a - agent ?t - trophy)
   :precondition (and (= (xloc ?a) (xloc ?t)) (= (yloc ?a) (yloc ?t)))
   :effect (taken ?a ?t))
)
)pddl";
}

pddl::DomainAst build_domain(Variant variant, const std::optional<std::string>& operator_text) {
  pddl::DomainAst domain = pddl::parse_domain(base_domain_text(variant));
  if (operator_text) domain = pddl::with_action(std::move(domain), pddl::parse_action(*operator_text));
  return domain;
}

}  // namespace goalinf::worldgen
