#ifndef NESTCCG_DERIVATION_H_
#define NESTCCG_DERIVATION_H_

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nestccg/categories.h"

namespace nestccg {

// Combinatory rules, in priority order.
enum class Rule {
  kForwardApplication,      // FA:  X/Y  Y     → X
  kBackwardApplication,     // BA:  Y    X\Y   → X
  kForwardComposition,      // FC:  X/Y  Y/Z   → X/Z
  kBackwardComposition,     // BC:  Y\Z  X\Y   → X\Z
  kBackwardCrossed,         // BXC: Y/Z  X\Y   → X/Z
  kUnaryNounToNp,           // N → NP
  kUnaryTypeRaiseSubject,   // NP → S/(S\NP)
  kLeaf,
};

int priority(Rule r);
bool is_unary(Rule r);
std::string to_string(Rule r);

struct RuleResult {
  Category category;
  Rule rule;
};

std::vector<RuleResult> apply_binary(const Category& left, const Category& right);
std::vector<RuleResult> apply_unary(const Category& c);

struct Candidate {
  Category category;
  double log_prob = 0.0;
};

struct DerivationNode {
  Category category;
  Rule rule = Rule::kLeaf;
  std::size_t first = 0;  // token span, inclusive
  std::size_t last = 0;
  double score = 0.0;
  std::vector<std::shared_ptr<const DerivationNode>> children;
};

struct Derivation {
  std::shared_ptr<const DerivationNode> root;

  const Category& category() const { return root->category; }
  double score() const { return root->score; }
};

// Exhaustive CKY over per-token candidates. Returns nothing when no item
// covers the whole sentence (or, with an explicit goal, none matches it).
std::optional<Derivation> cky_parse(const std::vector<std::vector<Candidate>>& candidates,
                                    const std::optional<Category>& goal = std::nullopt);

// "(<category> <rule>| <children...>)" with leaves as "<token>|<category>".
std::string format_derivation(const Derivation& d, const std::vector<std::string>& tokens);

// Re-derives every internal node from its children; false on any mismatch.
bool verify_derivation(const Derivation& d);

}  // namespace nestccg

#endif  // NESTCCG_DERIVATION_H_
