#pragma once

// Brooks counting quasimorphisms on the free spine groups, the combined
// quasimorphism psi^v on Gamma^v, and its quasi-line coordinate machinery.
//
// Gamma^v is modeled as F x Z (spine pi_1 times the shear degree): elements
// are (word, n) pairs, phi^v(word, n) = n, nu^v(word, n) = word. psi^v =
// s_0 phi^v - sum_i s_i eta_i(nu^v), with the eta_i Brooks combinations
// hitting Kronecker values on the peripheral words, and s_i = s_0 n_i
// chosen so psi^v kills every peripheral element.

#include <vector>

#include "cover.hpp"
#include "words.hpp"

namespace vl::qm {

using words::Word;

// Occurrences of w in the reduced word g minus occurrences of w^-1, counted
// with overlaps. Throws UnreducedWord when either input is unreduced.
long long brooks_eval(const Word& g, const Word& w);

// Exact homogenization of the w-counting quasimorphism on the periodic
// element p: the per-period occurrence rate in p^infinity, computed as
// net(p^(m+1)) - net(p^m) once m periods cover w. Conjugation-invariant.
long long brooks_homog(const Word& p, const Word& w);

struct CountingQM {
  std::vector<Word> basis;  // candidate words, parallel to coeffs
  std::vector<Rat> coeffs;
  Rat eval(const Word& g) const;           // raw counting value
  Rat homog_periodic(const Word& p) const; // exact homogenized value
};

// Numeric homogenization qm(g^N)/N with a convergence gate: the values at N
// and 2N must agree within tol, else throws NonConverged.
double homogenize(const CountingQM& qm, const Word& g, int N = 64, double tol = 1e-6);

// A Brooks combination whose homogenized value is 1 on peripherals[target]
// and 0 on the others, found by an exact linear solve over all canonical
// reduced words of length <= L, escalating L up to len_cap. Throws
// DegeneratePeripherals when two peripheral rows stay proportional at the
// cap, InfeasibleAtCap otherwise.
CountingQM build_eta(int rank, const std::vector<Word>& peripherals, int target,
                     int len_cap = 4);

struct GroupElt {
  Word w;
  long long n = 0;
};

struct PsiV {
  int component = 0;
  cover::FreePresentation pres;
  Rat s0 = 1;
  // Peripheral orbit data, parallel: the reduced boundary words, the
  // cylinder each bounds, and the shear degree n_j of the peripheral element.
  std::vector<Word> peripherals;
  std::vector<int> cylinder;
  std::vector<long long> shear_deg;
  std::vector<Rat> s;  // s_j = s0 * shear_deg_j
  std::vector<CountingQM> eta;
  double defect = 0;  // measured on random pairs at construction
  int defect_pairs = 0;

  Rat eval_exact(const Word& w, long long n) const;
  double eval(const Word& w, long long n) const;
  // Exact homogenized value (the nu-part is periodic in itself).
  Rat homog(const Word& w, long long n) const;
};

PsiV build_psi_v(const cyl::Decomposition& dec, const cyl::SpineQuotient& spine,
                 const cyl::Multitwist& mt, int component, int len_cap = 4,
                 int defect_pairs = 10000, unsigned seed = 12345);

// Max raw-psi defect |psi(gh) - psi(g) - psi(h)| over `pairs` seeded random
// pairs; the sample stream is a prefix-stable function of the seed.
double defect_estimate(const PsiV& psi, int pairs, unsigned seed, int max_len = 8,
                       long long max_n = 3);

}  // namespace vl::qm
