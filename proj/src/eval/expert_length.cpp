#include "ecl/eval/expert_length.hpp"

#include "ecl/executor/expert.hpp"

namespace ecl {

int expert_path_length(const GridWorld& world, const Program& program) {
  return plan_expert(world, program).path_length;
}

}  // namespace ecl
