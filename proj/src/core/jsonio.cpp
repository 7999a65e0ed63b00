#include "jsonio.hpp"

#include <sstream>

namespace vl::jsonio {

using origami::SurfaceError;

namespace {
// "(1 2)(3 4)" -> image array; squares are 1-based on the wire.
Perm parse_cycles(const std::string& text, int n) {
  Perm p = identity_perm(n);
  size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == ',')) ++pos;
    if (pos == text.size()) break;
    if (text[pos] != '(')
      throw SurfaceError("BadCycleNotation", "expected '(' in '" + text + "'");
    size_t close = text.find(')', pos);
    if (close == std::string::npos)
      throw SurfaceError("BadCycleNotation", "unclosed cycle in '" + text + "'");
    std::istringstream in(text.substr(pos + 1, close - pos - 1));
    std::vector<int> cyc;
    for (std::string tok; in >> tok;) {
      // Allow comma separators inside a cycle too.
      for (char& ch : tok)
        if (ch == ',') ch = ' ';
      std::istringstream in2(tok);
      for (int x; in2 >> x;) {
        if (x < 1 || x > n)
          throw SurfaceError("BadCycleNotation", "square index out of range in '" + text + "'");
        cyc.push_back(x - 1);
      }
    }
    for (size_t i = 0; i < cyc.size(); ++i) {
      if (p[cyc[i]] != cyc[i])
        throw SurfaceError("BadCycleNotation", "repeated square in '" + text + "'");
      p[cyc[i]] = cyc[(i + 1) % cyc.size()];
    }
    pos = close + 1;
  }
  if (!is_perm(p)) throw SurfaceError("NonBijective", "cycles do not define a permutation");
  return p;
}

Perm parse_perm_field(const json& j, int n, const char* field) {
  if (!j.contains(field))
    throw SurfaceError("MissingField", std::string("surface JSON lacks '") + field + "'");
  const json& f = j.at(field);
  if (f.is_string()) return parse_cycles(f.get<std::string>(), n);
  if (!f.is_array() || static_cast<int>(f.size()) != n)
    throw SurfaceError("NonBijective", std::string("'") + field + "' must be a length-n array");
  Perm p(n);
  for (int i = 0; i < n; ++i) {
    int x = f.at(i).get<int>();
    if (x < 1 || x > n)
      throw SurfaceError("NonBijective", std::string("'") + field + "' entries must be in 1..n");
    p[i] = x - 1;
  }
  if (!is_perm(p))
    throw SurfaceError("NonBijective", std::string("'") + field + "' is not a permutation");
  return p;
}
}  // namespace

origami::Surface parse_surface(const json& j) {
  if (!j.contains("n") || !j.at("n").is_number_integer())
    throw SurfaceError("MissingField", "surface JSON needs integer 'n'");
  origami::Surface s;
  s.n = j.at("n").get<int>();
  if (s.n < 1) throw SurfaceError("NonBijective", "'n' must be positive");
  s.h = parse_perm_field(j, s.n, "h");
  s.v = parse_perm_field(j, s.n, "v");
  s.name = j.value("name", std::string{});
  origami::validate(s);
  return s;
}

json surface_to_json(const origami::Surface& s) {
  json jh = json::array(), jv = json::array();
  for (int i = 0; i < s.n; ++i) {
    jh.push_back(s.h[i] + 1);
    jv.push_back(s.v[i] + 1);
  }
  return json{{"n", s.n}, {"h", jh}, {"v", jv}, {"name", s.name}};
}

origami::Direction parse_direction(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw SurfaceError("BadDirection", "direction must be a [p, q] pair");
  return origami::make_direction(j.at(0).get<long long>(), j.at(1).get<long long>());
}

json direction_to_json(const origami::Direction& d) { return json::array({d.p, d.q}); }

origami::Matrix2Q parse_matrix(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j.at(0).is_array() || j.at(0).size() != 2 ||
      !j.at(1).is_array() || j.at(1).size() != 2)
    throw SurfaceError("BadMatrix", "matrix must be a 2x2 array");
  auto cell = [&](int r, int c) -> Rat {
    const json& e = j.at(r).at(c);
    if (e.is_number_integer()) return Rat(e.get<long long>());
    if (e.is_string()) return parse_rat(e.get<std::string>());
    throw SurfaceError("BadMatrix", "matrix entries must be integers or 'a/b' strings");
  };
  return {cell(0, 0), cell(0, 1), cell(1, 0), cell(1, 1)};
}

json matrix_to_json(const origami::Matrix2Q& m) {
  return json::array({json::array({format_rat(m.a), format_rat(m.b)}),
                      json::array({format_rat(m.c), format_rat(m.d)})});
}

}  // namespace vl::jsonio
