#include "fba/matching.hpp"

#include <cmath>
#include <stdexcept>

namespace fba {

MatchSet match_features(const std::vector<Feature>& source,
                        const std::vector<Feature>& reference,
                        double ratio_threshold) {
    if (ratio_threshold <= 0.0 || ratio_threshold > 1.0)
        throw std::invalid_argument("match_features: ratio_threshold in (0, 1]");
    MatchSet matches;
    if (source.empty() || reference.empty()) return matches;

    for (int i = 0; i < static_cast<int>(source.size()); ++i) {
        const auto& d = source[i].descriptor;
        double best = 1e300, second = 1e300;
        int best_j = -1;
        for (int j = 0; j < static_cast<int>(reference.size()); ++j) {
            const auto& e = reference[j].descriptor;
            if (e.size() != d.size()) continue;
            double dist = 0.0;
            for (std::size_t k = 0; k < d.size(); ++k) {
                const double diff = static_cast<double>(d[k]) - e[k];
                dist += diff * diff;
                if (dist >= second) break;
            }
            if (dist < best) {
                second = best;
                best = dist;
                best_j = j;
            } else if (dist < second) {
                second = dist;
            }
        }
        if (best_j < 0) continue;
        // ratio test on Euclidean distances; a missing second neighbor passes
        const double ratio = second < 1e300 ? std::sqrt(best / second) : 0.0;
        if (ratio < ratio_threshold)
            matches.push_back({i, best_j, std::sqrt(best)});
    }
    return matches;
}

}  // namespace fba
