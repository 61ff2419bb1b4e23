#ifndef NESTCCG_CATEGORIES_H_
#define NESTCCG_CATEGORIES_H_

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace nestccg {

enum class Slash { kForward, kBackward };

class CategoryParseError : public std::runtime_error {
 public:
  CategoryParseError(const std::string& input, std::size_t pos, const std::string& what);
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

// Immutable CCG category: an atom such as S[dcl] or a functor Result/Arg,
// Result\Arg. Copies share structure.
class Category {
 public:
  static Category atom(std::string base, std::string feature = {});
  static Category functor(const Category& result, Slash slash, const Category& argument);

  bool is_atom() const { return node_->result == nullptr; }
  bool is_functor() const { return !is_atom(); }

  // Atom accessors.
  const std::string& base() const { return node_->base; }
  const std::string& feature() const { return node_->feature; }
  bool has_feature() const { return !node_->feature.empty(); }

  // Functor accessors.
  const Category& result() const { return *node_->result; }
  const Category& argument() const { return *node_->argument; }
  Slash slash() const { return node_->slash; }

  std::size_t depth() const;
  // Canonical form: every complex sub-category is parenthesized.
  const std::string& str() const { return node_->text; }

  bool operator==(const Category& o) const { return node_ == o.node_ || str() == o.str(); }
  bool operator<(const Category& o) const { return str() < o.str(); }

 private:
  struct Node {
    std::string base;
    std::string feature;
    std::unique_ptr<Category> result;
    std::unique_ptr<Category> argument;
    Slash slash = Slash::kForward;
    std::string text;
  };
  explicit Category(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

// Cat → Basic | Cat '/' Basic | Cat '\' Basic (left-associative);
// Basic → Atom ['[' feature ']'] | '(' Cat ')'.
Category parse_category(const std::string& s);

// Atoms match when bases agree and features agree or either side has none;
// functors match slash-wise and recursively.
bool matches(const Category& formal, const Category& actual);

// Feature bound to an unfeatured S in `formal` by a featured S in `actual`
// (CCGbank's S[X] variable); empty when nothing binds. Conflicting bindings
// keep the first one seen in left-to-right order.
std::string bound_s_feature(const Category& formal, const Category& actual);

// Gives every unfeatured S atom in `c` the feature `feature`.
Category instantiate_s_feature(const Category& c, const std::string& feature);

}  // namespace nestccg

#endif  // NESTCCG_CATEGORIES_H_
