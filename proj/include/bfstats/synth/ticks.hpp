#pragma once

namespace bfstats::synth {

/// Exchange odds tick grid over [1.01, 1000]. Indices run 0..tick_count()-1.
int tick_count();
double tick_price(int index);
/// Index of the nearest grid price at or below `price` (clamped to the grid).
int tick_index(double price);

}  // namespace bfstats::synth
