#include "quasim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace vl::qm {

using origami::SurfaceError;

namespace {

void require_reduced(const Word& w, const char* what) {
  if (words::reduce(w) != w)
    throw SurfaceError("UnreducedWord", std::string(what) + " must be reduced");
}

// Canonical representative of the {w, w^-1} pair: the lexicographically
// smaller one (never equal for nonempty reduced words).
bool canonical(const Word& w) { return w < words::inverse(w); }

}  // namespace

long long brooks_eval(const Word& g, const Word& w) {
  require_reduced(g, "g");
  require_reduced(w, "w");
  if (w.empty()) throw SurfaceError("UnreducedWord", "w must be nontrivial");
  return words::count_occurrences(g, w) - words::count_occurrences(g, words::inverse(w));
}

long long brooks_homog(const Word& p, const Word& w) {
  const Word pc = words::cyclic_reduce(p);
  if (pc.empty()) return 0;
  const long long m =
      std::max<long long>(1, (static_cast<long long>(w.size()) + pc.size() - 1) /
                                 static_cast<long long>(pc.size()));
  return brooks_eval(words::power(pc, m + 1), w) - brooks_eval(words::power(pc, m), w);
}

Rat CountingQM::eval(const Word& g) const {
  const Word gr = words::reduce(g);
  Rat out = 0;
  for (size_t i = 0; i < basis.size(); ++i)
    if (coeffs[i] != 0) out += coeffs[i] * brooks_eval(gr, basis[i]);
  return out;
}

Rat CountingQM::homog_periodic(const Word& p) const {
  Rat out = 0;
  for (size_t i = 0; i < basis.size(); ++i)
    if (coeffs[i] != 0) out += coeffs[i] * brooks_homog(p, basis[i]);
  return out;
}

double homogenize(const CountingQM& qm, const Word& g, int N, double tol) {
  if (N < 16) throw SurfaceError("NonConverged", "homogenization power too small");
  const Word gr = words::reduce(g);
  if (gr.empty()) return 0;
  // qm(g^N)/N = h + c/N once the power structure stabilizes; the Richardson
  // step 2*a(2N) - a(N) cancels the boundary term c, and the gate compares
  // two consecutive extrapolations.
  auto a = [&](long long n) { return to_double(qm.eval(words::power(gr, n))) / n; };
  const double a1 = a(N), a2 = a(2LL * N), a4 = a(4LL * N);
  const double r1 = 2 * a2 - a1, r2 = 2 * a4 - a2;
  if (std::abs(r1 - r2) >= tol)
    throw SurfaceError("NonConverged", "homogenized value did not stabilize");
  return r2;
}

CountingQM build_eta(int rank, const std::vector<Word>& peripherals, int target,
                     int len_cap) {
  const int k = static_cast<int>(peripherals.size());
  if (target < 0 || target >= k)
    throw SurfaceError("BadComponent", "peripheral index out of range");
  for (int L = 1; L <= len_cap; ++L) {
    std::vector<Word> cands;
    for (const Word& w : words::all_reduced_words(rank, L))
      if (canonical(w)) cands.push_back(w);
    const int V = static_cast<int>(cands.size());
    // Rows: homogenized peripheral values per candidate, augmented with the
    // Kronecker target; exact Gauss elimination with free variables at 0.
    std::vector<std::vector<Rat>> A(k, std::vector<Rat>(V + 1, Rat(0)));
    for (int j = 0; j < k; ++j) {
      for (int c = 0; c < V; ++c) A[j][c] = brooks_homog(peripherals[j], cands[c]);
      A[j][V] = j == target ? 1 : 0;
    }
    std::vector<int> pivot_col(k, -1);
    int row = 0;
    bool infeasible = false;
    for (int col = 0; col < V && row < k; ++col) {
      int pr = -1;
      for (int r = row; r < k; ++r)
        if (A[r][col] != 0) {
          pr = r;
          break;
        }
      if (pr < 0) continue;
      std::swap(A[row], A[pr]);
      const Rat inv = Rat(1) / A[row][col];
      for (int c = col; c <= V; ++c) A[row][c] *= inv;
      for (int r = 0; r < k; ++r) {
        if (r == row || A[r][col] == 0) continue;
        const Rat f = A[r][col];
        for (int c = col; c <= V; ++c) A[r][c] -= f * A[row][c];
      }
      pivot_col[row] = col;
      ++row;
    }
    for (int r = row; r < k; ++r)
      if (A[r][V] != 0) infeasible = true;  // inconsistent at this cap
    if (infeasible) {
      if (L < len_cap) continue;
      // Distinguish structurally degenerate peripherals from a short cap:
      // proportional rows can never be separated by longer words alone when
      // the words themselves are (powers of) conjugates.
      for (int j = 0; j < k; ++j) {
        if (j == target) continue;
        if (words::conjugate(peripherals[j], peripherals[target]) ||
            words::conjugate(peripherals[j], words::inverse(peripherals[target])))
          throw SurfaceError("DegeneratePeripherals",
                             "peripheral words are conjugacy-dependent");
      }
      throw SurfaceError("InfeasibleAtCap", "no eta within the word-length cap");
    }
    CountingQM qm;
    qm.basis = cands;
    qm.coeffs.assign(V, Rat(0));
    for (int r = 0; r < row; ++r) qm.coeffs[pivot_col[r]] = A[r][V];
    // Exact residual check.
    for (int j = 0; j < k; ++j) {
      const Rat want = j == target ? 1 : 0;
      if (qm.homog_periodic(peripherals[j]) != want)
        throw SurfaceError("Internal", "eta solve residual nonzero");
    }
    return qm;
  }
  throw SurfaceError("InfeasibleAtCap", "no eta within the word-length cap");
}

Rat PsiV::eval_exact(const Word& w, long long n) const {
  Rat out = s0 * n;
  for (size_t i = 0; i < eta.size(); ++i) out -= s[i] * eta[i].eval(w);
  return out;
}

double PsiV::eval(const Word& w, long long n) const { return to_double(eval_exact(w, n)); }

Rat PsiV::homog(const Word& w, long long n) const {
  Rat out = s0 * n;
  for (size_t i = 0; i < eta.size(); ++i) out -= s[i] * eta[i].homog_periodic(w);
  return out;
}

PsiV build_psi_v(const cyl::Decomposition& dec, const cyl::SpineQuotient& spine,
                 const cyl::Multitwist& mt, int component, int len_cap,
                 int defect_pairs, unsigned seed) {
  PsiV psi;
  psi.component = component;
  psi.pres = cover::spine_pi1(dec, spine, component);
  psi.s0 = 1;  // phi(g_v) = 1 by the F x Z model

  // Peripheral orbit representatives: one per cylinder boundary side lying
  // on the component, deduplicated up to conjugacy.
  auto add = [&](const Word& w, int cyl_id, long long n) {
    if (w.empty()) {
      if (n != 0)
        throw SurfaceError("DegeneratePeripherals",
                           "trivial peripheral word with nonzero shear degree");
      return;  // psi vanishes on it for free
    }
    for (size_t i = 0; i < psi.peripherals.size(); ++i)
      if (words::conjugate(psi.peripherals[i], w)) {
        if (psi.shear_deg[i] != n)
          throw SurfaceError("DegeneratePeripherals",
                             "conjugate peripherals with distinct shear degrees");
        return;
      }
    psi.peripherals.push_back(w);
    psi.cylinder.push_back(cyl_id);
    psi.shear_deg.push_back(n);
  };
  for (const cyl::Cylinder& cy : dec.cylinders) {
    if (!psi.pres.peripheral_bottom[cy.id].empty())
      add(psi.pres.peripheral_bottom[cy.id], cy.id, mt.twist_powers[cy.id]);
    if (!psi.pres.peripheral_top[cy.id].empty())
      add(psi.pres.peripheral_top[cy.id], cy.id, -mt.twist_powers[cy.id]);
  }

  for (size_t i = 0; i < psi.peripherals.size(); ++i) {
    psi.eta.push_back(
        build_eta(psi.pres.rank, psi.peripherals, static_cast<int>(i), len_cap));
    psi.s.push_back(psi.s0 * psi.shear_deg[i]);
  }

  psi.defect_pairs = defect_pairs;
  psi.defect = defect_estimate(psi, defect_pairs, seed);
  return psi;
}

double defect_estimate(const PsiV& psi, int pairs, unsigned seed, int max_len,
                       long long max_n) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> len_dist(0, max_len);
  std::uniform_int_distribution<int> letter_dist(1, 2 * std::max(1, psi.pres.rank));
  std::uniform_int_distribution<long long> n_dist(-max_n, max_n);
  auto random_word = [&]() {
    Word w;
    const int len = len_dist(rng);
    for (int i = 0; i < len; ++i) {
      int raw = letter_dist(rng);
      int letter = raw <= psi.pres.rank ? raw : psi.pres.rank - raw;
      w.push_back(letter);
    }
    return words::reduce(w);
  };
  double worst = 0;
  for (int i = 0; i < pairs; ++i) {
    const Word g = random_word(), h = random_word();
    const long long ng = n_dist(rng), nh = n_dist(rng);
    const Rat d = psi.eval_exact(words::concat(g, h), ng + nh) -
                  psi.eval_exact(g, ng) - psi.eval_exact(h, nh);
    worst = std::max(worst, std::abs(to_double(d)));
  }
  return worst;
}

}  // namespace vl::qm
