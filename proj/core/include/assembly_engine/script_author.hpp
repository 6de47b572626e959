#pragma once

#include <optional>
#include <vector>

#include "assembly_engine/monitor.hpp"
#include "assembly_engine/sim.hpp"

namespace ae {

struct AuthorOptions {
  double speed = 0.04;    // metres per frame, fast enough to cross any box within the dwell
  double clearance = 0.06; // hover height above the top of the build volume
  int hold_extra = 3;     // frames held past the dwell
  int tail_frames = 15;   // frames after the last move
  int max_frames = 200000;
};

struct AuthoredScript {
  /// Input scenario plus the hand script, with the camera trajectory held to
  /// the end of the script.
  Scenario scenario;
  std::vector<InteractionEvent> events;
  bool plan_complete = false;
  int deviations = 0;
  int replans = 0;
};

/// Plays the assembler against a live session: for every active step the hand
/// rises to hover height, crosses to the part the engine asks for, descends,
/// dwells, then carries the part to its target region. Removal steps dwell on
/// the structure. Replans are resolved the way headless runs resolve them.
/// With `deviate_at`, the step of that index (first plan) is placed in the
/// legal region nearest its target instead.
///
/// Keyframes are only ever appended past the last simulated frame, so a
/// headless run of the result reproduces the authored session exactly.
AuthoredScript author_guided(const Scenario& base, std::optional<int> deviate_at = std::nullopt,
                             const AuthorOptions& options = {});

/// `trials` pick trials against the first plan step, alternating between the
/// requested part (even trials) and the other loose parts in turn. Each trial
/// dwells on the part, lifts it, and returns it to release. Hand targets are
/// ground-truth part centres; keyframes carry the expected events as intents.
AuthoredScript author_pick_trials(const Scenario& base, int trials,
                                  const AuthorOptions& options = {});

} // namespace ae
