#include "nestccg/lexicon.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace nestccg {

CountTable::CountTable(std::size_t max_len) : max_len_(max_len), totals_(max_len, 0) {
  if (max_len < 1) throw std::invalid_argument("CountTable: max_len must be >= 1");
}

void CountTable::add_sentence(const Sentence& s) {
  const auto& t = s.tokens;
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t k = 1; k <= max_len_ && i + k <= t.size(); ++k) {
      ++counts_[Ngram(t.begin() + i, t.begin() + i + k)];
      ++totals_[k - 1];
    }
  }
}

std::size_t CountTable::count(const Ngram& ngram) const {
  auto it = counts_.find(ngram);
  return it == counts_.end() ? 0 : it->second;
}

CountTable count_ngrams(const std::vector<Sentence>& data, std::size_t max_len) {
  if (max_len < 2) throw std::invalid_argument("count_ngrams: max_len must be >= 2");
  if (data.empty()) throw std::invalid_argument("count_ngrams: empty corpus");
  CountTable table(max_len);
  for (const auto& s : data) table.add_sentence(s);
  return table;
}

double pmi(const CountTable& table, const std::string& left, const std::string& right) {
  const double cl = static_cast<double>(table.count({left}));
  const double cr = static_cast<double>(table.count({right}));
  if (cl == 0.0 || cr == 0.0) {
    throw std::invalid_argument("pmi: unseen word '" + (cl == 0.0 ? left : right) + "'");
  }
  const double cb = static_cast<double>(table.count({left, right}));
  if (cb == 0.0) return -std::numeric_limits<double>::infinity();
  const double n1 = static_cast<double>(table.total(1));
  const double n2 = static_cast<double>(table.total(2));
  return std::log((cb / n2) / ((cl / n1) * (cr / n1)));
}

std::vector<Ngram> segment(const Sentence& sentence, const CountTable& table, double threshold) {
  const auto& t = sentence.tokens;
  std::vector<Ngram> pieces;
  if (t.empty()) return pieces;
  pieces.push_back({t[0]});
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (pmi(table, t[i - 1], t[i]) < threshold) pieces.emplace_back();
    pieces.back().push_back(t[i]);
  }
  return pieces;
}

PMILexicon::PMILexicon(std::size_t max_len, double threshold)
    : max_len_(max_len), threshold_(threshold) {
  if (max_len < 1) throw std::invalid_argument("PMILexicon: max_len must be >= 1");
}

void PMILexicon::insert(Ngram ngram) {
  if (ngram.empty() || ngram.size() > max_len_) {
    throw std::invalid_argument("PMILexicon: n-gram length " + std::to_string(ngram.size()) +
                                " outside [1, " + std::to_string(max_len_) + "]");
  }
  ngrams_.insert(std::move(ngram));
}

bool PMILexicon::contains(std::vector<std::string>::const_iterator first,
                          std::vector<std::string>::const_iterator last) const {
  return ngrams_.count(Ngram(first, last)) > 0;
}

std::vector<std::size_t> PMILexicon::length_histogram() const {
  std::vector<std::size_t> h(max_len_, 0);
  for (const auto& g : ngrams_) ++h[g.size() - 1];
  return h;
}

PMILexicon build_lexicon(const std::vector<Sentence>& data, std::size_t max_len,
                         double threshold) {
  // Segmentation only consults unigram and bigram statistics.
  const CountTable table = count_ngrams(data, 2);
  PMILexicon lexicon(max_len, threshold);
  for (const auto& s : data) {
    for (auto& piece : segment(s, table, threshold)) {
      if (piece.size() <= max_len) {
        lexicon.insert(std::move(piece));
        continue;
      }
      for (std::size_t i = 0; i + max_len <= piece.size(); ++i) {
        lexicon.insert(Ngram(piece.begin() + i, piece.begin() + i + max_len));
      }
    }
  }
  return lexicon;
}

void write_lexicon(std::ostream& out, const PMILexicon& lexicon) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", lexicon.threshold());
  out << "maxlen=" << lexicon.max_len() << " threshold=" << buf << '\n';
  for (const auto& g : lexicon.ngrams()) {
    for (std::size_t i = 0; i < g.size(); ++i) out << (i ? " " : "") << g[i];
    out << '\n';
  }
}

PMILexicon parse_lexicon(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("lexicon file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  long max_len = 0;
  char thr[64] = {0};
  char tail = 0;
  if (std::sscanf(line.c_str(), "maxlen=%ld threshold=%63s %c", &max_len, thr, &tail) != 2 ||
      max_len < 1) {
    throw FormatError("expected header 'maxlen=<int> threshold=<float>'", 1);
  }
  char* end = nullptr;
  const double threshold = std::strtod(thr, &end);
  if (end == thr || *end != '\0') throw FormatError("bad threshold '" + std::string(thr) + "'", 1);

  PMILexicon lexicon(static_cast<std::size_t>(max_len), threshold);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    Ngram g;
    std::string tok;
    while (ss >> tok) g.push_back(tok);
    if (g.empty()) continue;
    if (g.size() > lexicon.max_len()) {
      throw FormatError("n-gram longer than maxlen=" + std::to_string(max_len), lineno);
    }
    lexicon.insert(std::move(g));
  }
  return lexicon;
}

PMILexicon load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return parse_lexicon(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace nestccg
