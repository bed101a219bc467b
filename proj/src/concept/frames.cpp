#include "ecl/concept/frames.hpp"

#include <algorithm>

#include "ecl/common/rng.hpp"

namespace ecl {

FrameCollection collect_training_frames(const std::vector<DemoTrace>& demos, uint64_t seed) {
  FrameCollection out;
  for (const auto& demo : demos) {
    if (demo.completions.empty()) {
      ++out.skipped_demos;
      continue;
    }
    const long n = static_cast<long>(demo.frames.size());
    for (const auto& done : demo.completions) {
      if (done.mentioned.empty()) continue;
      for (int off : kCompletionOffsets) {
        const long f = done.frame + off;
        if (f < 0 || f >= n) continue;
        const auto& obs = demo.frames[static_cast<size_t>(f)];
        DemoFrameSample s;
        s.proposals = obs.proposals;
        if (obs.held) s.proposals.push_back(*obs.held);
        if (s.proposals.empty()) continue;
        s.mentioned = done.mentioned;
        out.samples.push_back(std::move(s));
      }
    }
    for (const auto& h : demo.held) {
      for (long f = std::max(0L, h.begin); f < std::min(n, h.end); ++f) {
        const auto& obs = demo.frames[static_cast<size_t>(f)];
        if (!obs.held) continue;
        DemoFrameSample s;
        s.proposals.push_back(*obs.held);
        s.mentioned = {h.cls};
        s.source = SampleSource::PickupHeld;
        out.samples.push_back(std::move(s));
      }
    }
  }
  Rng rng(derive_seed(seed, "frame-shuffle"));
  std::shuffle(out.samples.begin(), out.samples.end(), rng);
  return out;
}

}  // namespace ecl
