#pragma once

#include "ecl/instruct/program.hpp"
#include "ecl/world/world.hpp"

namespace ecl {

// Path length (moves plus interactions) of the privileged expert plan.
// Throws UnreachableError when the program cannot be achieved.
int expert_path_length(const GridWorld& world, const Program& program);

}  // namespace ecl
