#pragma once

#include <string>

#include "ssmi/model.hpp"

namespace ssmi {

// Dataflow diagram in DOT: inputs as boxes, parameters as triangles,
// calculated variables as circles, outputs as ovals; the repeating portion
// sits in one dashed cluster; edges point from a variable to its users.
std::string to_dot(const Model& m);

}  // namespace ssmi
