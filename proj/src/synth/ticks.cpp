#include "bfstats/synth/ticks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace bfstats::synth {

namespace {

struct Band {
  double lo;
  double hi;
  double step;
};

constexpr std::array<Band, 10> kBands{{{1.01, 2.0, 0.01},
                                       {2.0, 3.0, 0.02},
                                       {3.0, 4.0, 0.05},
                                       {4.0, 6.0, 0.1},
                                       {6.0, 10.0, 0.2},
                                       {10.0, 20.0, 0.5},
                                       {20.0, 30.0, 1.0},
                                       {30.0, 50.0, 2.0},
                                       {50.0, 100.0, 5.0},
                                       {100.0, 1000.0, 10.0}}};

const std::vector<double>& grid() {
  static const std::vector<double> prices = [] {
    std::vector<double> p;
    for (const auto& b : kBands) {
      const int steps = static_cast<int>(std::lround((b.hi - b.lo) / b.step));
      for (int i = 0; i < steps; ++i) p.push_back(std::round((b.lo + i * b.step) * 100.0) / 100.0);
    }
    p.push_back(1000.0);
    return p;
  }();
  return prices;
}

}  // namespace

int tick_count() { return static_cast<int>(grid().size()); }

double tick_price(int index) {
  const auto& g = grid();
  return g[static_cast<std::size_t>(std::clamp(index, 0, static_cast<int>(g.size()) - 1))];
}

int tick_index(double price) {
  const auto& g = grid();
  auto it = std::upper_bound(g.begin(), g.end(), price + 1e-9);
  if (it == g.begin()) return 0;
  return static_cast<int>(std::distance(g.begin(), it)) - 1;
}

}  // namespace bfstats::synth
