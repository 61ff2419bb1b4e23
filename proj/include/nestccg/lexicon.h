#ifndef NESTCCG_LEXICON_H_
#define NESTCCG_LEXICON_H_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "nestccg/corpus.h"

namespace nestccg {

using Ngram = std::vector<std::string>;

// Occurrence counts of every contiguous n-gram of length 1..max_len.
class CountTable {
 public:
  explicit CountTable(std::size_t max_len);

  void add_sentence(const Sentence& s);

  std::size_t max_len() const { return max_len_; }
  std::size_t count(const Ngram& ngram) const;
  // Sum of counts over all n-grams of length k (1 ≤ k ≤ max_len).
  std::size_t total(std::size_t k) const { return totals_.at(k - 1); }
  const std::map<Ngram, std::size_t>& counts() const { return counts_; }

 private:
  std::size_t max_len_;
  std::map<Ngram, std::size_t> counts_;
  std::vector<std::size_t> totals_;
};

CountTable count_ngrams(const std::vector<Sentence>& data, std::size_t max_len);

// Natural-log PMI of the adjacent pair (left, right). Returns −inf when the
// bigram never occurs; throws when either word is unseen.
double pmi(const CountTable& table, const std::string& left, const std::string& right);

// Splits wherever pmi(previous, next) < threshold.
std::vector<Ngram> segment(const Sentence& sentence, const CountTable& table, double threshold);

class PMILexicon {
 public:
  PMILexicon(std::size_t max_len, double threshold);

  // Throws if the n-gram is empty or longer than max_len.
  void insert(Ngram ngram);
  bool contains(const Ngram& ngram) const { return ngrams_.count(ngram) > 0; }
  bool contains(std::vector<std::string>::const_iterator first,
                std::vector<std::string>::const_iterator last) const;

  std::size_t max_len() const { return max_len_; }
  double threshold() const { return threshold_; }
  std::size_t size() const { return ngrams_.size(); }
  const std::set<Ngram>& ngrams() const { return ngrams_; }
  // Number of entries of each length; index k-1 holds length k.
  std::vector<std::size_t> length_histogram() const;

  bool operator==(const PMILexicon&) const = default;

 private:
  std::size_t max_len_;
  double threshold_;
  std::set<Ngram> ngrams_;
};

PMILexicon build_lexicon(const std::vector<Sentence>& data, std::size_t max_len,
                         double threshold);

void write_lexicon(std::ostream& out, const PMILexicon& lexicon);
PMILexicon parse_lexicon(std::istream& in);
PMILexicon load_lexicon(const std::string& path);

}  // namespace nestccg

#endif  // NESTCCG_LEXICON_H_
