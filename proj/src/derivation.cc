#include "nestccg/derivation.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

namespace nestccg {

int priority(Rule r) {
  switch (r) {
    case Rule::kForwardApplication: return 0;
    case Rule::kBackwardApplication: return 1;
    case Rule::kForwardComposition: return 2;
    case Rule::kBackwardComposition: return 3;
    case Rule::kBackwardCrossed: return 4;
    case Rule::kUnaryNounToNp: return 5;
    case Rule::kUnaryTypeRaiseSubject: return 6;
    case Rule::kLeaf: return -1;
  }
  return 99;
}

bool is_unary(Rule r) { return r == Rule::kUnaryNounToNp || r == Rule::kUnaryTypeRaiseSubject; }

std::string to_string(Rule r) {
  switch (r) {
    case Rule::kForwardApplication: return "FA";
    case Rule::kBackwardApplication: return "BA";
    case Rule::kForwardComposition: return "FC";
    case Rule::kBackwardComposition: return "BC";
    case Rule::kBackwardCrossed: return "BXC";
    case Rule::kUnaryNounToNp: return "U_N_NP";
    case Rule::kUnaryTypeRaiseSubject: return "U_TR_SUBJ";
    case Rule::kLeaf: return "LEAF";
  }
  return "?";
}

namespace {

// The category a rule yields once `formal` has consumed `actual`: unfeatured
// S atoms pick up the feature the match bound, and NP[nb] (a determiner
// marker) surfaces as plain NP.
Category combine_result(const Category& x, const Category& formal, const Category& actual) {
  Category r = instantiate_s_feature(x, bound_s_feature(formal, actual));
  if (r.is_atom() && r.base() == "NP" && r.feature() == "nb") return Category::atom("NP");
  return r;
}

void push_unique(std::vector<RuleResult>& out, Category c, Rule rule) {
  for (const auto& r : out)
    if (r.rule == rule && r.category == c) return;
  out.push_back({std::move(c), rule});
}

}  // namespace

std::vector<RuleResult> apply_binary(const Category& left, const Category& right) {
  std::vector<RuleResult> out;
  const bool lf = left.is_functor() && left.slash() == Slash::kForward;
  const bool lb = left.is_functor() && left.slash() == Slash::kBackward;
  const bool rf = right.is_functor() && right.slash() == Slash::kForward;
  const bool rb = right.is_functor() && right.slash() == Slash::kBackward;

  if (lf && matches(left.argument(), right)) {
    push_unique(out, combine_result(left.result(), left.argument(), right),
                Rule::kForwardApplication);
  }
  if (rb && matches(right.argument(), left)) {
    push_unique(out, combine_result(right.result(), right.argument(), left),
                Rule::kBackwardApplication);
  }
  if (lf && rf && matches(left.argument(), right.result())) {
    const Category x = combine_result(left.result(), left.argument(), right.result());
    push_unique(out, Category::functor(x, Slash::kForward, right.argument()),
                Rule::kForwardComposition);
  }
  if (lb && rb && matches(right.argument(), left.result())) {
    const Category x = combine_result(right.result(), right.argument(), left.result());
    push_unique(out, Category::functor(x, Slash::kBackward, left.argument()),
                Rule::kBackwardComposition);
  }
  if (lf && rb && matches(right.argument(), left.result())) {
    const Category x = combine_result(right.result(), right.argument(), left.result());
    push_unique(out, Category::functor(x, Slash::kForward, left.argument()),
                Rule::kBackwardCrossed);
  }
  return out;
}

std::vector<RuleResult> apply_unary(const Category& c) {
  std::vector<RuleResult> out;
  if (!c.is_atom()) return out;
  if (c.base() == "N") {
    out.push_back({Category::atom("NP"), Rule::kUnaryNounToNp});
  } else if (c.base() == "NP") {
    const Category s = Category::atom("S");
    const Category np = Category::atom("NP");
    out.push_back({Category::functor(s, Slash::kForward, Category::functor(s, Slash::kBackward, np)),
                   Rule::kUnaryTypeRaiseSubject});
  }
  return out;
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct Item {
  Category category;
  Rule rule = Rule::kLeaf;
  std::size_t first = 0;
  std::size_t last = 0;
  double score = 0.0;
  // Composition and unary steps in the subtree; fewer wins among score ties.
  int detours = 0;
  // Split point for binary items, candidate index for leaves.
  std::size_t split = 0;
  std::size_t left = kNone;
  std::size_t right = kNone;
};

bool scores_tie(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

// Strict preference of `a` over `b`.
bool better(const Item& a, const Item& b) {
  if (!scores_tie(a.score, b.score)) return a.score > b.score;
  if (a.detours != b.detours) return a.detours < b.detours;
  if (priority(a.rule) != priority(b.rule)) return priority(a.rule) < priority(b.rule);
  return a.split < b.split;
}

int detour_cost(Rule r) {
  return (r == Rule::kForwardApplication || r == Rule::kBackwardApplication || r == Rule::kLeaf)
             ? 0
             : 1;
}

struct Cell {
  // Leaf and binary items, and items produced by one unary step; kept apart so
  // a unary rule never applies to the output of another.
  std::map<std::string, std::size_t> base;
  std::map<std::string, std::size_t> unary;
};

class Chart {
 public:
  explicit Chart(std::size_t n) : n_(n), cells_(n * n) {}

  Cell& cell(std::size_t i, std::size_t j) { return cells_[i * n_ + j]; }
  const Item& item(std::size_t id) const { return items_[id]; }

  void offer(std::map<std::string, std::size_t>& slot, Item it) {
    auto found = slot.find(it.category.str());
    if (found == slot.end()) {
      slot.emplace(it.category.str(), items_.size());
      items_.push_back(std::move(it));
    } else if (better(it, items_[found->second])) {
      items_[found->second] = std::move(it);
    }
  }

  std::shared_ptr<const DerivationNode> build(std::size_t id) const {
    const Item& it = items_[id];
    DerivationNode node{it.category, it.rule, it.first, it.last, it.score, {}};
    if (it.left != kNone) node.children.push_back(build(it.left));
    if (it.right != kNone) node.children.push_back(build(it.right));
    return std::make_shared<const DerivationNode>(std::move(node));
  }

 private:
  std::size_t n_;
  std::vector<Cell> cells_;
  std::vector<Item> items_;
};

}  // namespace

std::optional<Derivation> cky_parse(const std::vector<std::vector<Candidate>>& candidates,
                                    const std::optional<Category>& goal) {
  const std::size_t n = candidates.size();
  if (n == 0) return std::nullopt;
  Chart chart(n);

  auto close_unary = [&](std::size_t i, std::size_t j) {
    Cell& c = chart.cell(i, j);
    for (const auto& [key, id] : c.base) {
      const Item src = chart.item(id);
      for (auto& r : apply_unary(src.category)) {
        Item it{r.category, r.rule, i, j, src.score, src.detours + 1, 0, id, kNone};
        chart.offer(c.unary, std::move(it));
      }
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (candidates[i].empty()) {
      throw std::invalid_argument("cky_parse: token " + std::to_string(i) + " has no candidates");
    }
    for (std::size_t k = 0; k < candidates[i].size(); ++k) {
      const Candidate& cand = candidates[i][k];
      chart.offer(chart.cell(i, i).base, Item{cand.category, Rule::kLeaf, i, i, cand.log_prob, 0, k});
    }
    close_unary(i, i);
  }

  for (std::size_t len = 2; len <= n; ++len) {
    for (std::size_t i = 0; i + len <= n; ++i) {
      const std::size_t j = i + len - 1;
      for (std::size_t k = i; k < j; ++k) {
        // Snapshot ids: offering may grow the item arena.
        std::vector<std::size_t> lefts, rights;
        for (const auto* m : {&chart.cell(i, k).base, &chart.cell(i, k).unary})
          for (const auto& [key, id] : *m) lefts.push_back(id);
        for (const auto* m : {&chart.cell(k + 1, j).base, &chart.cell(k + 1, j).unary})
          for (const auto& [key, id] : *m) rights.push_back(id);
        for (std::size_t l : lefts) {
          for (std::size_t r : rights) {
            const Item li = chart.item(l);
            const Item ri = chart.item(r);
            for (auto& res : apply_binary(li.category, ri.category)) {
              Item it{res.category, res.rule, i, j, li.score + ri.score,
                      li.detours + ri.detours + detour_cost(res.rule), k, l, r};
              chart.offer(chart.cell(i, j).base, std::move(it));
            }
          }
        }
      }
      close_unary(i, j);
    }
  }

  const Cell& top = chart.cell(0, n - 1);
  using Tier = std::function<bool(const Category&)>;
  std::vector<Tier> tiers;
  if (goal) {
    tiers.push_back([&](const Category& c) { return matches(*goal, c); });
  } else {
    tiers.push_back([](const Category& c) {
      return c.is_atom() && c.base() == "S" && c.feature() == "dcl";
    });
    tiers.push_back([](const Category& c) { return c.is_atom() && c.base() == "S"; });
    tiers.push_back([](const Category&) { return true; });
  }
  for (const Tier& accept : tiers) {
    std::size_t best = kNone;
    for (const auto* m : {&top.base, &top.unary}) {
      for (const auto& [key, id] : *m) {
        if (!accept(chart.item(id).category)) continue;
        if (best == kNone || better(chart.item(id), chart.item(best))) best = id;
      }
    }
    if (best != kNone) return Derivation{chart.build(best)};
  }
  return std::nullopt;
}

namespace {

void format_node(const DerivationNode& node, const std::vector<std::string>& tokens,
                 std::string& out) {
  if (node.rule == Rule::kLeaf) {
    out += tokens.at(node.first);
    out += '|';
    out += node.category.str();
    return;
  }
  out += '(';
  out += node.category.str();
  out += ' ';
  out += to_string(node.rule);
  out += '|';
  for (const auto& child : node.children) {
    out += ' ';
    format_node(*child, tokens, out);
  }
  out += ')';
}

bool verify_node(const DerivationNode& node) {
  if (node.rule == Rule::kLeaf) return node.children.empty() && node.first == node.last;
  if (is_unary(node.rule)) {
    if (node.children.size() != 1) return false;
    const auto& c = *node.children[0];
    if (is_unary(c.rule) || c.first != node.first || c.last != node.last) return false;
    const auto results = apply_unary(c.category);
    const bool ok = std::any_of(results.begin(), results.end(), [&](const RuleResult& r) {
      return r.rule == node.rule && r.category == node.category;
    });
    return ok && node.score == c.score && verify_node(c);
  }
  if (node.children.size() != 2) return false;
  const auto& l = *node.children[0];
  const auto& r = *node.children[1];
  if (l.first != node.first || r.last != node.last || l.last + 1 != r.first) return false;
  const auto results = apply_binary(l.category, r.category);
  const bool ok = std::any_of(results.begin(), results.end(), [&](const RuleResult& res) {
    return res.rule == node.rule && res.category == node.category;
  });
  return ok && node.score == l.score + r.score && verify_node(l) && verify_node(r);
}

}  // namespace

std::string format_derivation(const Derivation& d, const std::vector<std::string>& tokens) {
  std::string out;
  format_node(*d.root, tokens, out);
  return out;
}

bool verify_derivation(const Derivation& d) { return d.root && verify_node(*d.root); }

}  // namespace nestccg
