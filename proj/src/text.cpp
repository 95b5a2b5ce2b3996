#include "iol/text.hpp"

#include <sstream>

#include "iol/stopwords_data.hpp"

namespace iol::text {

const std::unordered_set<std::string>& english_stopwords() {
  static const std::unordered_set<std::string> words = [] {
    std::unordered_set<std::string> out;
    std::istringstream in(detail::kStopwordsEn);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      out.insert(line);
    }
    return out;
  }();
  return words;
}

std::vector<std::string> tokenize(std::string_view text, bool remove_stopwords) {
  const auto& stop = english_stopwords();
  std::vector<std::string> out;
  std::string cur;
  auto emit = [&] {
    if (cur.empty()) return;
    if (!remove_stopwords || !stop.contains(cur)) out.push_back(cur);
    cur.clear();
  };
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80 || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z')) {
      cur.push_back(ch);
    } else if (c >= 'A' && c <= 'Z') {
      cur.push_back(static_cast<char>(c - 'A' + 'a'));
    } else {
      emit();
    }
  }
  emit();
  return out;
}

std::vector<std::string> ngrams(const std::vector<std::string>& tokens, int max_n) {
  std::vector<std::string> out = tokens;
  for (int n = 2; n <= max_n; ++n) {
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
      std::string g = tokens[i];
      for (int j = 1; j < n; ++j) {
        g.push_back(' ');
        g += tokens[i + static_cast<std::size_t>(j)];
      }
      out.push_back(std::move(g));
    }
  }
  return out;
}

}  // namespace iol::text
