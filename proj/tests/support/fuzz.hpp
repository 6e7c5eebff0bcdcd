#pragma once

#include <cstdint>
#include <random>

#include "atlaspaint/mesh.hpp"

namespace testing_support {

// Random mesh with float32-exact coordinates (so PLY round-trips are exact),
// optional normals, and some degenerate and repeated-index triangles.
atlaspaint::Mesh random_mesh(std::mt19937_64& rng, bool with_normals);

// Closed random-ish surface that straddles x = `midline`: a jittered UV
// ellipsoid, optionally with vertices snapped onto the plane.
atlaspaint::Mesh random_straddling_mesh(std::mt19937_64& rng, double midline);

}  // namespace testing_support
