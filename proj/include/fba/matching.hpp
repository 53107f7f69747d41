#pragma once

#include <vector>

#include "fba/features.hpp"

namespace fba {

struct Match {
    int source = 0;    // index into the query feature list
    int target = 0;    // index into the reference feature list
    double distance = 0.0;
};

using MatchSet = std::vector<Match>;

// Nearest-neighbor descriptor matching with the nearest/second-nearest ratio
// test. Each source feature appears at most once. Empty inputs give an empty
// set.
MatchSet match_features(const std::vector<Feature>& source,
                        const std::vector<Feature>& reference,
                        double ratio_threshold = 0.8);

}  // namespace fba
