#pragma once

// Square-tiled surfaces: permutation pairs, cone points, rational directions,
// and the GL(2,Z) action (via generator decomposition) used for Veech-group
// membership tests and direction normalization.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "perm.hpp"
#include "rational.hpp"

namespace vl::origami {

// Corner indices within a unit square.
enum Corner : int { BL = 0, BR = 1, TR = 2, TL = 3 };

struct SurfaceError : std::runtime_error {
  std::string code;  // NonBijective | Disconnected | GenusTooSmall | ...
  SurfaceError(std::string c, const std::string& msg)
      : std::runtime_error(msg), code(std::move(c)) {}
};

struct ConePoint {
  int id = 0;
  // (square, corner) pairs in cyclic (counterclockwise) order around the point.
  std::vector<std::pair<int, int>> corners;
  int angle_multiple = 1;  // cone angle 2*pi*k
  bool regular() const { return angle_multiple == 1; }
};

struct Surface {
  int n = 0;
  Perm h;  // right-neighbor: square to the right of i is h[i]
  Perm v;  // top-neighbor: square above i is v[i]
  std::string name;

  bool operator==(const Surface& o) const { return n == o.n && h == o.h && v == o.v; }
};

// Validates bijectivity, connectivity, genus >= 2. Throws SurfaceError.
void validate(const Surface& s);

// Vertex classes of the square complex; covers all 4n corners exactly once.
// Regular (k=1) classes are retained and flagged.
std::vector<ConePoint> cone_points(const Surface& s);

int genus(const Surface& s);

// Index of the cone point containing a given (square, corner); built once.
struct CornerMap {
  std::vector<ConePoint> points;
  std::vector<std::array<int, 4>> of;  // of[square][corner] -> cone point id
};
CornerMap corner_map(const Surface& s);

struct Direction {
  long long p = 1, q = 0;  // normalized: gcd=1 and (q>0 or (q==0 and p==1))
};
Direction make_direction(long long p, long long q);  // normalizes, validates

struct Matrix2Q {
  Rat a, b, c, d;  // [[a,b],[c,d]]
  Rat det() const { return a * d - b * c; }
  bool integral() const;
  std::pair<Rat, Rat> apply(const Rat& x, const Rat& y) const {
    return {a * x + b * y, c * x + d * y};
  }
  Matrix2Q mul(const Matrix2Q& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Matrix2Q inverse() const;
};
Matrix2Q mat_identity();

// A chart: the surface with each square sheared to the parallelogram m*[0,1]^2.
// Combinatorics unchanged; lengths are |m*w| for integer vectors w.
struct AffineChart {
  Surface surface;
  Matrix2Q m;
  std::pair<Rat, Rat> edge_h() const { return m.apply(1, 0); }
  std::pair<Rat, Rat> edge_v() const { return m.apply(0, 1); }
};
AffineChart apply_matrix(const Surface& s, const Matrix2Q& m);  // throws SingularMatrix

// Left action of an integral det +-1 matrix on the origami (re-marking into
// unit squares). Decomposes m into S/T/J generators.
Surface matrix_act(const Matrix2Q& m, const Surface& s);

// True iff m*s is isomorphic to s as a labeled-square complex up to
// relabeling; returns the relabeling witness (sigma with sigma conjugating
// the transformed pair to (h,v)) when true.
std::optional<Perm> is_affine_automorphism(const Surface& s, const Matrix2Q& m);

// SL(2,Z) matrix M with M*(p,q)^T = (+-1, 0); deterministic choice.
Matrix2Q direction_normalizer(const Direction& d);

}  // namespace vl::origami
