#include "zmpl/datasets.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "zmpl/errors.hpp"

namespace zmpl {

namespace {

// Chromosome lesions in rabbit lymphoblasts after streptonigrin exposure
// (60 micrograms/kg); 601 cells.
const std::map<Count, Count> kCytogenetic{{0, 413}, {1, 124}, {2, 42}, {3, 15},
                                           {4, 5},   {5, 0},   {6, 2}};

// Outbreaks of strikes in UK coal mining per four-week period, 1948-1959;
// 156 periods. The published ">= 4" cell is stored as exactly 4.
const std::map<Count, Count> kStrikes{{0, 46}, {1, 76}, {2, 24}, {3, 9}, {4, 1}};

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::string current;
  for (char ch : line) {
    if (ch == ',' || ch == ';' || std::isspace(static_cast<unsigned char>(ch))) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

bool parse_count(const std::string& token, Count& value) {
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  return res.ec == std::errc() && res.ptr == token.data() + token.size();
}

bool looks_numeric(const std::string& token) {
  return !token.empty() && (std::isdigit(static_cast<unsigned char>(token[0])) || token[0] == '-' ||
                            token[0] == '+' || token[0] == '.');
}

}  // namespace

std::vector<std::string> builtin_dataset_names() { return {"cytogenetic", "strikes"}; }

Dataset parse_dataset(const std::string& spec) {
  const std::string prefix = "builtin:";
  if (spec.rfind(prefix, 0) == 0) {
    const std::string tag = spec.substr(prefix.size());
    Dataset d;
    d.name = spec;
    d.preferred_tail = TailCell::open;
    if (tag == "cytogenetic") {
      d.sample = CountSample::from_frequencies(kCytogenetic);
    } else if (tag == "strikes") {
      d.sample = CountSample::from_frequencies(kStrikes);
    } else {
      throw DataError("unknown builtin dataset '" + tag + "' (available: cytogenetic, strikes)");
    }
    return d;
  }
  std::ifstream in(spec);
  if (!in) throw DataError("cannot open dataset file '" + spec + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_dataset_text(text.str(), spec);
}

Dataset parse_dataset_text(const std::string& text, const std::string& name) {
  std::istringstream is(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;
  int line_no = 0;
  bool first_content = true;
  while (std::getline(is, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (first_content && !looks_numeric(tokens[0])) {
      first_content = false;
      continue;  // header
    }
    first_content = false;
    rows.push_back(std::move(tokens));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw DataError(name + ": dataset is empty");

  const std::size_t width = rows.front().size();
  if (width != 1 && width != 2)
    throw DataError(name + ": expected one count or a value/frequency pair per line");
  std::map<Count, Count> freq;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto where = name + ":" + std::to_string(line_numbers[i]) + ": ";
    if (rows[i].size() != width) throw DataError(where + "inconsistent number of columns");
    Count value = 0;
    if (!parse_count(rows[i][0], value)) throw DataError(where + "count '" + rows[i][0] + "' is not an integer");
    if (value < 0) throw DataError(where + "negative count");
    Count count = 1;
    if (width == 2) {
      if (!parse_count(rows[i][1], count))
        throw DataError(where + "frequency '" + rows[i][1] + "' is not an integer");
      if (count < 0) throw DataError(where + "negative frequency");
    }
    freq[value] += count;
  }

  Dataset d;
  d.name = name;
  if (width == 1) {
    std::vector<Count> values;
    for (const auto& row : rows) {
      Count v = 0;
      parse_count(row[0], v);
      values.push_back(v);
    }
    d.sample = CountSample::from_values(std::move(values));
  } else {
    d.sample = CountSample::from_frequencies(freq);
  }
  if (d.sample.n() == 0) throw DataError(name + ": no observation has positive frequency");
  return d;
}

}  // namespace zmpl
