#include "origami.hpp"

#include <algorithm>
#include <numeric>

namespace vl::origami {

void validate(const Surface& s) {
  if (s.n < 1 || static_cast<int>(s.h.size()) != s.n || static_cast<int>(s.v.size()) != s.n)
    throw SurfaceError("NonBijective", "surface permutations must both have length n");
  if (!is_perm(s.h) || !is_perm(s.v))
    throw SurfaceError("NonBijective", "h and v must be permutations of {1..n}");
  if (!transitive({s.h, s.v}, s.n))
    throw SurfaceError("Disconnected", "the group <h,v> must act transitively on squares");
  if (genus(s) < 2)
    throw SurfaceError("GenusTooSmall", "surface '" + s.name + "' has genus < 2");
}

// One counterclockwise step around the vertex under a (square,corner) flag.
static std::pair<int, int> rotate(const Surface& s, const Perm& hinv, const Perm& vinv,
                                  int sq, int corner) {
  switch (corner) {
    case BL: return {hinv[sq], BR};
    case BR: return {vinv[sq], TR};
    case TR: return {s.h[sq], TL};
    default: return {s.v[sq], BL};
  }
}

std::vector<ConePoint> cone_points(const Surface& s) {
  const Perm hinv = inverse(s.h), vinv = inverse(s.v);
  std::vector<std::array<char, 4>> seen(s.n, {0, 0, 0, 0});
  std::vector<ConePoint> out;
  for (int i = 0; i < s.n; ++i) {
    for (int c = 0; c < 4; ++c) {
      if (seen[i][c]) continue;
      ConePoint pt;
      pt.id = static_cast<int>(out.size());
      int sq = i, corner = c;
      do {
        seen[sq][corner] = 1;
        pt.corners.emplace_back(sq, corner);
        std::tie(sq, corner) = rotate(s, hinv, vinv, sq, corner);
      } while (!(sq == i && corner == c));
      if (pt.corners.size() % 4 != 0)
        throw SurfaceError("BadLink", "corner cycle length not a multiple of 4");
      pt.angle_multiple = static_cast<int>(pt.corners.size()) / 4;
      out.push_back(std::move(pt));
    }
  }
  return out;
}

int genus(const Surface& s) {
  // V - E + F with E = 2n, F = n on the square complex.
  const int V = static_cast<int>(cone_points(s).size());
  const int chi = V - 2 * s.n + s.n;
  if ((2 - chi) % 2 != 0) throw SurfaceError("BadLink", "odd Euler characteristic");
  return (2 - chi) / 2;
}

CornerMap corner_map(const Surface& s) {
  CornerMap cm;
  cm.points = cone_points(s);
  cm.of.assign(s.n, {-1, -1, -1, -1});
  for (const ConePoint& pt : cm.points)
    for (auto [sq, corner] : pt.corners) cm.of[sq][corner] = pt.id;
  return cm;
}

Direction make_direction(long long p, long long q) {
  if (p == 0 && q == 0) throw SurfaceError("ZeroDirection", "direction (0,0) is not allowed");
  long long g = std::gcd(p < 0 ? -p : p, q < 0 ? -q : q);
  p /= g;
  q /= g;
  // Unoriented: canonical representative has q > 0, or q == 0 and p == 1.
  if (q < 0 || (q == 0 && p < 0)) {
    p = -p;
    q = -q;
  }
  return {p, q};
}

bool Matrix2Q::integral() const {
  return denominator(a) == 1 && denominator(b) == 1 && denominator(c) == 1 && denominator(d) == 1;
}

Matrix2Q Matrix2Q::inverse() const {
  const Rat dt = det();
  if (dt == 0) throw SurfaceError("SingularMatrix", "matrix is not invertible");
  return {d / dt, -b / dt, -c / dt, a / dt};
}

Matrix2Q mat_identity() { return {1, 0, 0, 1}; }

AffineChart apply_matrix(const Surface& s, const Matrix2Q& m) {
  if (m.det() == 0) throw SurfaceError("SingularMatrix", "chart matrix is not invertible");
  return {s, m};
}

namespace {
// Generator actions on the permutation pair; left action, so a word
// g1*g2*...*gk acts by applying gk first.
Surface act_T(const Surface& s, long long k) {
  // [[1,k],[0,1]]: horizontal gluings keep; v becomes v after undoing k
  // rightward steps.
  return {s.n, s.h, compose(perm_pow(s.h, -k), s.v), s.name};
}
Surface act_S(const Surface& s) {
  // [[0,-1],[1,0]]: quarter turn; (h,v) -> (v^-1, h).
  return {s.n, inverse(s.v), s.h, s.name};
}
Surface act_J(const Surface& s) {
  // [[1,0],[0,-1]]: vertical flip of the marking; (h,v) -> (h, v^-1).
  return {s.n, s.h, inverse(s.v), s.name};
}

struct Gen {
  char kind;      // 'T', 'S' or 'J'
  long long pow;  // exponent for T; ignored otherwise
};

long long as_ll(const Rat& r) {
  return static_cast<long long>(numerator(r));
}

// m = product of the returned generators, in order.
std::vector<Gen> decompose_gl2z(Matrix2Q m) {
  if (!m.integral()) throw SurfaceError("NotIntegral", "matrix action needs integer entries");
  Rat dt = m.det();
  if (dt != 1 && dt != -1)
    throw SurfaceError("NotUnimodular", "matrix action needs determinant +-1");
  std::vector<Gen> word;
  if (dt == -1) {
    // Peel J off the right: m = (m*J) * J and m*J has det 1.
    m = m.mul({1, 0, 0, -1});
  }
  // Euclid on the first column, peeling generators off the left.
  std::vector<Gen> left;
  while (m.c != 0) {
    long long a = as_ll(m.a), c = as_ll(m.c);
    // Division with remainder in [0,|c|) so the Euclid loop terminates.
    long long r = ((a % c) + (c > 0 ? c : -c)) % (c > 0 ? c : -c);
    long long k = (a - r) / c;
    if (k != 0) {
      left.push_back({'T', k});
      m = Matrix2Q{1, -Rat(k), 0, 1}.mul(m);  // T^-k * m
    }
    left.push_back({'S', 0});
    m = Matrix2Q{0, 1, -1, 0}.mul(m);  // S^-1 * m
  }
  // Now m = [[e, b],[0, e]] with e = +-1.
  if (m.a == -1) {
    left.push_back({'S', 0});
    left.push_back({'S', 0});
    m = Matrix2Q{-1, 0, 0, -1}.mul(m);
  }
  if (m.b != 0) left.push_back({'T', as_ll(m.b)});
  word = std::move(left);
  if (dt == -1) word.push_back({'J', 0});
  return word;
}
}  // namespace

Surface matrix_act(const Matrix2Q& m, const Surface& s) {
  std::vector<Gen> word = decompose_gl2z(m);
  Surface cur = s;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    switch (it->kind) {
      case 'T': cur = act_T(cur, it->pow); break;
      case 'S': cur = act_S(cur); break;
      default: cur = act_J(cur); break;
    }
  }
  return cur;
}

std::optional<Perm> is_affine_automorphism(const Surface& s, const Matrix2Q& m) {
  if (!m.integral() || (m.det() != 1 && m.det() != -1)) return std::nullopt;
  const Surface t = matrix_act(m, s);
  // Look for sigma with sigma(t.h(i)) = h(sigma(i)) and likewise for v.
  // Transitivity pins sigma once sigma(0) is chosen, so propagate and check.
  for (int root = 0; root < s.n; ++root) {
    Perm sigma(s.n, -1);
    sigma[0] = root;
    std::vector<int> stack{0};
    bool ok = true;
    while (ok && !stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      for (const auto& [pt, ps] : {std::pair{&t.h, &s.h}, std::pair{&t.v, &s.v}}) {
        int j = (*pt)[i], target = (*ps)[sigma[i]];
        if (sigma[j] == -1) {
          sigma[j] = target;
          stack.push_back(j);
        } else if (sigma[j] != target) {
          ok = false;
          break;
        }
      }
    }
    if (ok && is_perm(sigma) && compose(sigma, s.h) == compose(t.h, sigma) &&
        compose(sigma, s.v) == compose(t.v, sigma))
      return sigma;
  }
  return std::nullopt;
}

Matrix2Q direction_normalizer(const Direction& d) {
  if (d.q == 0) return mat_identity();                 // (1,0) already horizontal
  if (d.p == 0 && d.q == 1) return {0, -1, 1, 0};      // vertical: quarter turn
  // [[a,b],[-q,p]] with a*p + b*q = 1; take a = p^{-1} mod q, smallest >= 0.
  long long a = 0;
  const long long q = d.q;
  long long pm = ((d.p % q) + q) % q;
  for (long long cand = 0; cand < q; ++cand) {
    if ((cand * pm) % q == 1 % q) {
      a = cand;
      break;
    }
  }
  const long long b = (1 - a * d.p) / q;
  Matrix2Q m{Rat(a), Rat(b), Rat(-q), Rat(d.p)};
  if (m.det() != 1) throw SurfaceError("Internal", "normalizer construction failed");
  return m;
}

}  // namespace vl::origami
