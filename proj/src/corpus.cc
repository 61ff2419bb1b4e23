#include "nestccg/corpus.h"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace nestccg {

FormatError::FormatError(const std::string& what, std::size_t line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

TagSet::TagSet(std::vector<std::string> tags) : tags_(std::move(tags)) {
  tags_.emplace_back(kOther);
  for (std::size_t i = 0; i < tags_.size(); ++i) {
    if (!index_.emplace(tags_[i], i).second) {
      throw std::invalid_argument("TagSet: duplicate tag '" + tags_[i] + "'");
    }
  }
}

std::size_t TagSet::index(const std::string& tag) const {
  auto it = index_.find(tag);
  return it == index_.end() ? other_index() : it->second;
}

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return c == ' ' || c == '\t'; });
}

bool has_space(const std::string& s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

}  // namespace

std::vector<TaggedSentence> parse_tagged(std::istream& in) {
  std::vector<TaggedSentence> data;
  TaggedSentence current;
  std::string line;
  std::size_t lineno = 0;
  auto flush = [&] {
    if (!current.tags.empty()) data.push_back(std::move(current));
    current = TaggedSentence{};
  };
  while (std::getline(in, line)) {
    ++lineno;
    chomp(line);
    if (is_blank(line)) {
      flush();
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw FormatError("expected 'token<TAB>supertag'", lineno);
    }
    std::string token = line.substr(0, tab);
    std::string tag = line.substr(tab + 1);
    if (token.empty() || tag.empty() || has_space(token) || has_space(tag)) {
      throw FormatError("empty field or embedded whitespace", lineno);
    }
    current.sentence.tokens.push_back(std::move(token));
    current.tags.push_back(std::move(tag));
  }
  flush();
  if (data.empty()) throw FormatError("tagged dataset is empty");
  return data;
}

std::vector<Sentence> parse_raw(std::istream& in) {
  std::vector<Sentence> data;
  std::string line;
  while (std::getline(in, line)) {
    chomp(line);
    auto tokens = split_ws(line);
    if (!tokens.empty()) data.push_back(Sentence{std::move(tokens)});
  }
  if (data.empty()) throw FormatError("raw dataset is empty");
  return data;
}

std::vector<TaggedSentence> load_tagged(const std::string& path) {
  auto in = open_input(path);
  try {
    return parse_tagged(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::vector<Sentence> load_raw(const std::string& path) {
  auto in = open_input(path);
  try {
    return parse_raw(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_tagged(std::ostream& out, const std::vector<TaggedSentence>& data) {
  for (const auto& s : data) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      out << s.sentence.tokens[i] << '\t' << s.tags[i] << '\n';
    }
    out << '\n';
  }
}

void write_raw(std::ostream& out, const std::vector<Sentence>& data) {
  for (const auto& s : data) {
    for (std::size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << s.tokens[i];
    out << '\n';
  }
}

std::vector<Sentence> sentences_of(const std::vector<TaggedSentence>& data) {
  std::vector<Sentence> out;
  out.reserve(data.size());
  for (const auto& s : data) out.push_back(s.sentence);
  return out;
}

TagSet build_tagset(const std::vector<TaggedSentence>& data, std::size_t max_tags) {
  if (data.empty()) throw std::invalid_argument("build_tagset: no data");
  if (max_tags == 0) throw std::invalid_argument("build_tagset: max_tags must be >= 1");
  std::map<std::string, std::size_t> counts;
  for (const auto& s : data)
    for (const auto& t : s.tags) ++counts[t];
  counts.erase(TagSet::kOther);

  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > max_tags) ranked.resize(max_tags);
  std::vector<std::string> tags;
  tags.reserve(ranked.size());
  for (auto& [tag, count] : ranked) tags.push_back(tag);
  return TagSet(std::move(tags));
}

EmbeddingTable parse_embeddings(std::istream& in, const std::vector<Sentence>& data) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      chomp(line);
      if (!is_blank(line)) return true;
    }
    return false;
  };

  if (!next_line()) throw FormatError("embedding file is empty");
  long dim = 0, count = 0;
  char tail = 0;
  if (std::sscanf(line.c_str(), "d0=%ld sentences=%ld %c", &dim, &count, &tail) != 2 ||
      dim <= 0 || count < 0) {
    throw FormatError("expected header 'd0=<int> sentences=<int>'", lineno);
  }
  if (static_cast<std::size_t>(count) != data.size()) {
    throw FormatError("embedding file declares " + std::to_string(count) +
                      " sentences but the dataset has " + std::to_string(data.size()));
  }

  EmbeddingTable table;
  table.dim = static_cast<std::size_t>(dim);
  for (std::size_t s = 0; s < data.size(); ++s) {
    long index = -1, rows = -1;
    if (!next_line() ||
        std::sscanf(line.c_str(), "sentence %ld rows=%ld %c", &index, &rows, &tail) != 2) {
      throw FormatError("expected 'sentence <index> rows=<n>' for sentence " + std::to_string(s),
                        lineno);
    }
    if (index != static_cast<long>(s)) {
      throw FormatError("sentence index " + std::to_string(index) + " out of order, expected " +
                            std::to_string(s),
                        lineno);
    }
    if (rows != static_cast<long>(data[s].size())) {
      throw FormatError("shape mismatch in sentence " + std::to_string(s) + ": " +
                            std::to_string(rows) + " rows for " +
                            std::to_string(data[s].size()) + " tokens",
                        lineno);
    }
    Matrix block(static_cast<std::size_t>(rows), table.dim);
    for (long r = 0; r < rows; ++r) {
      if (!next_line()) throw FormatError("truncated block for sentence " + std::to_string(s));
      const auto fields = split_ws(line);
      if (fields.size() != table.dim) {
        throw FormatError("shape mismatch in sentence " + std::to_string(s) + ": expected " +
                              std::to_string(table.dim) + " values",
                          lineno);
      }
      for (std::size_t c = 0; c < fields.size(); ++c) {
        const char* begin = fields[c].c_str();
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(begin, &end);
        if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
          throw FormatError("non-numeric value '" + fields[c] + "'", lineno);
        }
        block(static_cast<std::size_t>(r), c) = v;
      }
    }
    table.blocks.push_back(std::move(block));
  }
  if (next_line()) throw FormatError("trailing content after last sentence", lineno);
  return table;
}

EmbeddingTable load_embeddings(const std::string& path, const std::vector<Sentence>& data) {
  auto in = open_input(path);
  try {
    return parse_embeddings(in, data);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_embeddings(std::ostream& out, const EmbeddingTable& table) {
  out << "d0=" << table.dim << " sentences=" << table.blocks.size() << '\n';
  const auto old = out.precision(17);
  for (std::size_t s = 0; s < table.blocks.size(); ++s) {
    const Matrix& b = table.blocks[s];
    out << "sentence " << s << " rows=" << b.rows() << '\n';
    for (std::size_t r = 0; r < b.rows(); ++r) {
      for (std::size_t c = 0; c < b.cols(); ++c) out << (c ? " " : "") << b(r, c);
      out << '\n';
    }
  }
  out.precision(old);
}

}  // namespace nestccg
