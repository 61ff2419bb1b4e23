#ifndef NESTCCG_CORPUS_H_
#define NESTCCG_CORPUS_H_

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "nestccg/tensor.h"

namespace nestccg {

// Raised for malformed input files; carries the 1-based line when known.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t line = 0);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct Sentence {
  std::vector<std::string> tokens;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const Sentence&) const = default;
};

struct TaggedSentence {
  Sentence sentence;
  std::vector<std::string> tags;

  std::size_t size() const { return sentence.size(); }
  bool operator==(const TaggedSentence&) const = default;
};

// Supertag inventory. The reserved OTHER tag absorbs everything outside the
// kept set; it always sits at index size()-1.
class TagSet {
 public:
  static constexpr const char* kOther = "<OTHER>";

  TagSet() : TagSet(std::vector<std::string>{}) {}
  // `tags` excludes OTHER; it is appended. Throws on duplicates.
  explicit TagSet(std::vector<std::string> tags);

  std::size_t size() const { return tags_.size(); }
  std::size_t other_index() const { return tags_.size() - 1; }
  std::size_t index(const std::string& tag) const;
  const std::string& tag(std::size_t i) const { return tags_.at(i); }
  const std::vector<std::string>& tags() const { return tags_; }
  bool contains(const std::string& tag) const { return index_.count(tag) > 0; }

  bool operator==(const TagSet& o) const { return tags_ == o.tags_; }

 private:
  std::vector<std::string> tags_;
  std::unordered_map<std::string, std::size_t> index_;
};

// One n×d0 block of precomputed token vectors per sentence.
struct EmbeddingTable {
  std::size_t dim = 0;
  std::vector<Matrix> blocks;
};

std::vector<TaggedSentence> parse_tagged(std::istream& in);
std::vector<Sentence> parse_raw(std::istream& in);
std::vector<TaggedSentence> load_tagged(const std::string& path);
std::vector<Sentence> load_raw(const std::string& path);

void write_tagged(std::ostream& out, const std::vector<TaggedSentence>& data);
void write_raw(std::ostream& out, const std::vector<Sentence>& data);

std::vector<Sentence> sentences_of(const std::vector<TaggedSentence>& data);

// The `max_tags` most frequent tags, ties broken lexicographically.
TagSet build_tagset(const std::vector<TaggedSentence>& data, std::size_t max_tags);

EmbeddingTable parse_embeddings(std::istream& in, const std::vector<Sentence>& data);
EmbeddingTable load_embeddings(const std::string& path, const std::vector<Sentence>& data);
void write_embeddings(std::ostream& out, const EmbeddingTable& table);

}  // namespace nestccg

#endif  // NESTCCG_CORPUS_H_
