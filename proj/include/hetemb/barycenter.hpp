#pragma once

#include <cstddef>
#include <vector>

#include "hetemb/graph.hpp"

namespace hetemb {

/// hist[d] = number of nodes with degree d.
std::vector<double> degree_histogram(const Graph& g);

/// 1-D Wasserstein-2 barycenter (equal weights) of histograms over integer
/// support: quantile functions are averaged on a midpoint grid of
/// `grid_size` levels (0 picks max(1024, N^2) with N the largest total mass
/// rounded up) and the averaged quantiles are split linearly between the two
/// nearest integers. Returns a probability vector.
std::vector<double> degree_barycenter(const std::vector<std::vector<double>>& histograms,
                                      std::size_t grid_size = 0);

}  // namespace hetemb
