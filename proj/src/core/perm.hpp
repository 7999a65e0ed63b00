#pragma once

// Permutations of {0..n-1} stored as image arrays. Composition is
// "apply a, then b": compose(a,b)[i] = b[a[i]]. This is the one fixed
// convention; everything downstream (matrix actions, cylinder merging)
// uses it through these helpers.

#include <numeric>
#include <stdexcept>
#include <vector>

namespace vl {

using Perm = std::vector<int>;

inline bool is_perm(const Perm& p) {
  std::vector<char> seen(p.size(), 0);
  for (int x : p) {
    if (x < 0 || x >= static_cast<int>(p.size()) || seen[x]) return false;
    seen[x] = 1;
  }
  return true;
}

inline Perm identity_perm(int n) {
  Perm p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

inline Perm inverse(const Perm& p) {
  Perm q(p.size());
  for (int i = 0; i < static_cast<int>(p.size()); ++i) q[p[i]] = i;
  return q;
}

// compose(a,b)[i] = b[a[i]]  ("a then b")
inline Perm compose(const Perm& a, const Perm& b) {
  if (a.size() != b.size()) throw std::invalid_argument("size mismatch");
  Perm c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[i] = b[a[i]];
  return c;
}

inline Perm perm_pow(const Perm& p, long long k) {
  Perm r = identity_perm(static_cast<int>(p.size()));
  Perm base = k >= 0 ? p : inverse(p);
  long long m = k >= 0 ? k : -k;
  for (long long i = 0; i < m; ++i) r = compose(r, base);
  return r;
}

inline std::vector<std::vector<int>> cycles(const Perm& p) {
  std::vector<std::vector<int>> out;
  std::vector<char> seen(p.size(), 0);
  for (int i = 0; i < static_cast<int>(p.size()); ++i) {
    if (seen[i]) continue;
    std::vector<int> cyc;
    for (int j = i; !seen[j]; j = p[j]) {
      seen[j] = 1;
      cyc.push_back(j);
    }
    out.push_back(std::move(cyc));
  }
  return out;
}

// True iff the group generated by the given permutations acts transitively.
inline bool transitive(const std::vector<Perm>& gens, int n) {
  if (n <= 0) return false;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    for (const Perm& g : gens) {
      for (int j : {g[i], inverse(g)[i]}) {
        if (!seen[j]) {
          seen[j] = 1;
          ++count;
          stack.push_back(j);
        }
      }
    }
  }
  return count == n;
}

}  // namespace vl
