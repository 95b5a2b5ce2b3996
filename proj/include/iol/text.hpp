#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace iol::text {

// The shipped English stopword list (data/stopwords_en.txt).
const std::unordered_set<std::string>& english_stopwords();

// Lowercases ASCII and splits on anything that is not an ASCII letter or
// digit; bytes >= 0x80 are word characters, so UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view text, bool remove_stopwords);

// Tokens plus space-joined n-grams up to `max_n` (1 = unigrams only).
std::vector<std::string> ngrams(const std::vector<std::string>& tokens, int max_n);

}  // namespace iol::text
