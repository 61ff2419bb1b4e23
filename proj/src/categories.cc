#include "nestccg/categories.h"

#include <algorithm>
#include <cctype>

namespace nestccg {

CategoryParseError::CategoryParseError(const std::string& input, std::size_t pos,
                                       const std::string& what)
    : std::runtime_error("cannot parse category '" + input + "' at position " +
                         std::to_string(pos) + ": " + what),
      pos_(pos) {}

namespace {

bool is_reserved(char c) {
  return c == '/' || c == '\\' || c == '(' || c == ')' || c == '[' || c == ']' ||
         std::isspace(static_cast<unsigned char>(c));
}

std::string wrap(const Category& c) { return c.is_atom() ? c.str() : "(" + c.str() + ")"; }

}  // namespace

Category Category::atom(std::string base, std::string feature) {
  if (base.empty() || std::any_of(base.begin(), base.end(), is_reserved)) {
    throw std::invalid_argument("Category::atom: invalid base '" + base + "'");
  }
  if (std::any_of(feature.begin(), feature.end(), is_reserved)) {
    throw std::invalid_argument("Category::atom: invalid feature '" + feature + "'");
  }
  auto n = std::make_shared<Node>();
  n->text = feature.empty() ? base : base + "[" + feature + "]";
  n->base = std::move(base);
  n->feature = std::move(feature);
  return Category(std::move(n));
}

Category Category::functor(const Category& result, Slash slash, const Category& argument) {
  auto n = std::make_shared<Node>();
  n->result = std::make_unique<Category>(result);
  n->argument = std::make_unique<Category>(argument);
  n->slash = slash;
  n->text = wrap(result) + (slash == Slash::kForward ? "/" : "\\") + wrap(argument);
  return Category(std::move(n));
}

std::size_t Category::depth() const {
  if (is_atom()) return 0;
  return 1 + std::max(result().depth(), argument().depth());
}

namespace {

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  Category parse() {
    Category c = cat();
    if (pos_ != s_.size()) fail("trailing characters");
    return c;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw CategoryParseError(s_, pos_, what); }

  Category cat() {
    Category c = basic();
    while (pos_ < s_.size() && (s_[pos_] == '/' || s_[pos_] == '\\')) {
      const Slash slash = s_[pos_] == '/' ? Slash::kForward : Slash::kBackward;
      ++pos_;
      c = Category::functor(c, slash, basic());
    }
    return c;
  }

  Category basic() {
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (s_[pos_] == '(') {
      ++pos_;
      Category c = cat();
      if (pos_ >= s_.size() || s_[pos_] != ')') fail("expected ')'");
      ++pos_;
      return c;
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() && !is_reserved(s_[pos_])) ++pos_;
    if (pos_ == start) fail("empty atom");
    std::string base = s_.substr(start, pos_ - start);
    std::string feature;
    if (pos_ < s_.size() && s_[pos_] == '[') {
      const std::size_t fstart = ++pos_;
      while (pos_ < s_.size() && !is_reserved(s_[pos_])) ++pos_;
      if (pos_ >= s_.size() || s_[pos_] != ']') fail("expected ']'");
      if (pos_ == fstart) fail("empty feature");
      feature = s_.substr(fstart, pos_ - fstart);
      ++pos_;
    }
    return Category::atom(std::move(base), std::move(feature));
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

void collect_binding(const Category& formal, const Category& actual, std::string& bound) {
  if (!bound.empty()) return;
  if (formal.is_atom() && actual.is_atom()) {
    if (formal.base() == "S" && !formal.has_feature() && actual.has_feature()) {
      bound = actual.feature();
    }
    return;
  }
  if (formal.is_functor() && actual.is_functor()) {
    collect_binding(formal.result(), actual.result(), bound);
    collect_binding(formal.argument(), actual.argument(), bound);
  }
}

}  // namespace

Category parse_category(const std::string& s) { return Parser(s).parse(); }

bool matches(const Category& formal, const Category& actual) {
  if (formal.is_atom() != actual.is_atom()) return false;
  if (formal.is_atom()) {
    return formal.base() == actual.base() &&
           (!formal.has_feature() || !actual.has_feature() || formal.feature() == actual.feature());
  }
  return formal.slash() == actual.slash() && matches(formal.result(), actual.result()) &&
         matches(formal.argument(), actual.argument());
}

std::string bound_s_feature(const Category& formal, const Category& actual) {
  std::string bound;
  collect_binding(formal, actual, bound);
  return bound;
}

Category instantiate_s_feature(const Category& c, const std::string& feature) {
  if (feature.empty()) return c;
  if (c.is_atom()) {
    return c.base() == "S" && !c.has_feature() ? Category::atom("S", feature) : c;
  }
  return Category::functor(instantiate_s_feature(c.result(), feature), c.slash(),
                           instantiate_s_feature(c.argument(), feature));
}

}  // namespace nestccg
