#pragma once

// JSON bindings for the wire formats: surfaces in/out, directions, matrices.
// nlohmann::json's std::map backing emits keys sorted, which is what the
// byte-determinism contract wants; never switch to ordered_json here.

#include <json.hpp>
#include <string>

#include "origami.hpp"

namespace vl::jsonio {

using json = nlohmann::json;

// Accepts {"n", "h", "v", "name"?} with h/v either 1-based image arrays or
// cycle-notation strings like "(1 2)(3 4)". Throws SurfaceError on bad input.
origami::Surface parse_surface(const json& j);
json surface_to_json(const origami::Surface& s);

origami::Direction parse_direction(const json& j);  // [p, q]
json direction_to_json(const origami::Direction& d);

origami::Matrix2Q parse_matrix(const json& j);  // [["a","b"],["c","d"]] rationals
json matrix_to_json(const origami::Matrix2Q& m);

}  // namespace vl::jsonio
