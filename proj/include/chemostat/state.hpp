#pragma once

#include <array>

namespace chemostat {

// One point of the model's phase space: nutrient, prey, predator.
struct State {
    double N = 0.0;
    double P = 0.0;
    double Z = 0.0;
};

using Mat3 = std::array<std::array<double, 3>, 3>;

}  // namespace chemostat
