#pragma once

// Free-group words over letters 1..rank, negatives for inverses. Used for
// spine fundamental groups and the Brooks counting quasimorphisms.

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace vl::words {

using Word = std::vector<int>;

inline Word reduce(const Word& w) {
  Word out;
  for (int x : w) {
    if (x == 0) throw std::invalid_argument("letter 0 in word");
    if (!out.empty() && out.back() == -x)
      out.pop_back();
    else
      out.push_back(x);
  }
  return out;
}

inline Word inverse(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (int& x : out) x = -x;
  return out;
}

inline Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return reduce(out);
}

inline Word power(const Word& w, long long k) {
  Word base = k >= 0 ? reduce(w) : inverse(reduce(w));
  Word out;
  for (long long i = 0, m = k >= 0 ? k : -k; i < m; ++i) out = concat(out, base);
  return out;
}

inline Word cyclic_reduce(Word w) {
  w = reduce(w);
  while (w.size() >= 2 && w.front() == -w.back()) {
    w.erase(w.begin());
    w.pop_back();
  }
  return w;
}

// Conjugacy test for cyclically reduced words: equal up to rotation.
inline bool conjugate(const Word& a, const Word& b) {
  Word ca = cyclic_reduce(a), cb = cyclic_reduce(b);
  if (ca.size() != cb.size()) return false;
  if (ca.empty()) return true;
  for (size_t r = 0; r < ca.size(); ++r) {
    bool same = true;
    for (size_t i = 0; i < ca.size() && same; ++i)
      same = ca[(r + i) % ca.size()] == cb[i];
    if (same) return true;
  }
  return false;
}

// Occurrences of the reduced word w as a subword of the reduced word g,
// counted with overlaps (the Brooks convention, non-cyclic).
inline long long count_occurrences(const Word& g, const Word& w) {
  if (w.empty() || g.size() < w.size()) return 0;
  long long count = 0;
  for (size_t i = 0; i + w.size() <= g.size(); ++i) {
    bool hit = true;
    for (size_t j = 0; j < w.size() && hit; ++j) hit = g[i + j] == w[j];
    if (hit) ++count;
  }
  return count;
}

// Enumerates all reduced words of length exactly len over the given rank, in
// lexicographic order of letter sequences (-rank..-1, 1..rank skipping 0).
inline void enumerate_reduced(int rank, int len, const Word& prefix,
                              std::vector<Word>& out) {
  if (len == 0) {
    out.push_back(prefix);
    return;
  }
  for (int letter = -rank; letter <= rank; ++letter) {
    if (letter == 0) continue;
    if (!prefix.empty() && prefix.back() == -letter) continue;
    Word next = prefix;
    next.push_back(letter);
    enumerate_reduced(rank, len - 1, next, out);
  }
}

inline std::vector<Word> all_reduced_words(int rank, int max_len) {
  std::vector<Word> out;
  for (int len = 1; len <= max_len; ++len) enumerate_reduced(rank, len, {}, out);
  return out;
}

}  // namespace vl::words
