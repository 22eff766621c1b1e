#pragma once

#include <algorithm>
#include <random>
#include <string>

#include "rfw/io.hpp"
#include "rfw/words.hpp"

namespace rfw::testing {

inline Nft fixture(const std::string& name) { return load_nft(std::string(RFW_FIXTURE_DIR) + "/" + name + ".json"); }

inline Word random_word(std::mt19937& rng, std::size_t alphabet, std::size_t min_len, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<int> letter(0, static_cast<int>(alphabet) - 1);
  Word w(len(rng));
  for (auto& a : w) a = letter(rng);
  return w;
}

inline UPWord random_up(std::mt19937& rng, std::size_t alphabet, std::size_t max_prefix, std::size_t max_period) {
  Word p = random_word(rng, alphabet, 0, max_prefix);
  Word v = random_word(rng, alphabet, 1, max_period);
  return canonicalize(p, v);
}

// Naive letterwise comparison of the first n letters.
inline bool agree_upto(const UPWord& x, const UPWord& y, std::size_t n) { return take(x, n) == take(y, n); }

inline Nft random_nft(std::mt19937& rng, int states, int letters, int trans) {
  Nft T;
  T.input = Alphabet({"a", "b"});
  T.output = Alphabet({"x", "y"});
  for (int q = 0; q < states; ++q) T.add_state("s" + std::to_string(q), rng() % 3 == 0 || q == 0, rng() % 2 == 0);
  for (int i = 0; i < trans; ++i) {
    Word out = random_word(rng, 2, 0, 2);
    T.add_transition(static_cast<int>(rng() % states), static_cast<Letter>(rng() % letters), static_cast<int>(rng() % states), out);
  }
  return T;
}

inline std::vector<UPWord> small_corpus(std::size_t letters, std::size_t max_prefix, std::size_t max_period) {
  std::vector<UPWord> all;
  std::vector<Word> words{{}};
  for (std::size_t len = 1; len <= std::max(max_prefix, max_period); ++len) {
    std::vector<Word> more;
    for (const auto& w : words)
      if (w.size() == len - 1)
        for (std::size_t a = 0; a < letters; ++a) {
          Word v = w;
          v.push_back(static_cast<Letter>(a));
          more.push_back(v);
        }
    words.insert(words.end(), more.begin(), more.end());
  }
  for (const auto& p : words)
    for (const auto& v : words)
      if (p.size() <= max_prefix && !v.empty() && v.size() <= max_period) {
        UPWord c = canonicalize(p, v);
        if (std::find(all.begin(), all.end(), c) == all.end()) all.push_back(c);
      }
  return all;
}

}  // namespace rfw::testing
