#pragma once

#include <vector>

#include "fba/image.hpp"

namespace fba {

// Per-pixel arithmetic mean of the burst (the p = 0 case of the Fourier
// merge).
PlanarImage align_and_average(const std::vector<PlanarImage>& frames);

struct DirichletEnergy {
    Plane map;     // squared gradient magnitude box-summed over the block
    double total;  // sum of the squared gradient magnitude over all pixels
};

// Central-difference gradient energy integrated over a block x block window
// (mirrored borders) around each pixel. Color frames are reduced to luma.
DirichletEnergy dirichlet_energy(const PlanarImage& frame, int block = 100);

// Mean of the top_k frames ranked by total Dirichlet energy; ties keep the
// lower frame index first.
PlanarImage lucky_frame_average(const std::vector<PlanarImage>& frames, int top_k,
                                int block = 100);

// Per-pixel weights w_tex^gamma where w_tex is the normalized |Laplacian| of
// each frame and gamma = lambda * normalized |Laplacian| of the frame mean.
// Pixels where every weight vanishes fall back to the plain mean.
PlanarImage sharpness_selectivity_average(const std::vector<PlanarImage>& frames,
                                          double lambda = 50.0);

// Per frequency, averages the n_sel = max(1, round(top_fraction * M))
// coefficients of largest magnitude (ties keep the lower frame index).
PlanarImage frequency_percentile_fusion(const std::vector<PlanarImage>& frames,
                                        double top_fraction);

}  // namespace fba
