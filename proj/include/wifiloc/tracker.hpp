/*
 * wifiloc - Wi-Fi fingerprint indoor localization engine
 * Copyright 2026 The wifiloc Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <optional>
#include <set>

namespace wifiloc {

struct TrackerConfig {
  /// Consecutive identical estimates required before the current area moves.
  int required_streak = 3;
};

/// Per-session smoothing state. The current area only changes after
/// `required_streak` consecutive identical estimates that differ from it;
/// `visited` backs the play-once-per-session behaviour of the front end.
struct TrackerState {
  std::optional<int> current;
  std::optional<int> candidate;
  int streak = 0;
  std::set<int> visited;

  friend bool operator==(const TrackerState& a, const TrackerState& b) {
    return a.current == b.current && a.candidate == b.candidate && a.streak == b.streak &&
           a.visited == b.visited;
  }
};

struct TrackerUpdate {
  TrackerState state;
  bool changed = false;
  bool first_visit = false;
};

/// Pure transition function. An estimate equal to the current area resets
/// any pending candidate streak; this biases the tracker toward stability.
inline TrackerUpdate tracker_update(TrackerState state, int estimate,
                                    const TrackerConfig& config = {}) {
  TrackerUpdate out;
  if (state.current && *state.current == estimate) {
    state.candidate.reset();
    state.streak = 0;
    out.state = std::move(state);
    return out;
  }
  if (state.candidate && *state.candidate == estimate)
    ++state.streak;
  else {
    state.candidate = estimate;
    state.streak = 1;
  }
  if (state.streak >= config.required_streak) {
    state.current = state.candidate;
    state.candidate.reset();
    state.streak = 0;
    out.changed = true;
    out.first_visit = state.visited.insert(*state.current).second;
  }
  out.state = std::move(state);
  return out;
}

/// Clears everything; a fresh session revisits areas as if never seen.
inline TrackerState reset_session(const TrackerState&) { return TrackerState{}; }

}  // namespace wifiloc
