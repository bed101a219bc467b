#pragma once

#include <cstdint>
#include <vector>

#include "ecl/world/sensor.hpp"

namespace ecl {

// Observation stream of one demonstration plus the language-side
// annotations available to the learner.
struct DemoTrace {
  struct Completion {
    long frame = 0;                  // frame index at which the subgoal completed
    std::vector<ClassId> mentioned;  // object words of the subgoal
  };
  struct HeldInterval {
    long begin = 0;  // first frame with the object in hand
    long end = 0;    // one past the last
    ClassId cls = -1;
  };

  std::vector<Observation> frames;
  std::vector<Completion> completions;
  std::vector<HeldInterval> held;
};

enum class SampleSource { SubgoalCompletion, PickupHeld };

struct DemoFrameSample {
  std::vector<Proposal> proposals;
  std::vector<ClassId> mentioned;
  SampleSource source = SampleSource::SubgoalCompletion;
};

inline constexpr int kCompletionOffsets[] = {-4, -3, -2, -1, 1, 2};

struct FrameCollection {
  std::vector<DemoFrameSample> samples;
  int skipped_demos = 0;  // demos without completion annotations
};

// Frames around each subgoal completion (clipped to the trajectory) labelled
// with the subgoal's words, plus every frame of each held interval labelled
// with the held class. Frames without proposals are dropped. The result is
// shuffled deterministically by `seed`.
FrameCollection collect_training_frames(const std::vector<DemoTrace>& demos, uint64_t seed);

}  // namespace ecl
