#pragma once

#include "axon/scheme.hpp"

namespace axon {

// Nearest pipe end or block attachment point within radius (3D), otherwise
// raw unchanged. Ties go to the lower object id.
Point3 snap(const Scheme& scheme, Point3 raw, double radius);

}  // namespace axon
