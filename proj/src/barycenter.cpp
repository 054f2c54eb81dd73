#include "hetemb/barycenter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hetemb {

std::vector<double> degree_histogram(const Graph& g) {
  std::vector<double> hist;
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    const std::size_t d = g.degree(static_cast<NodeId>(i));
    if (hist.size() <= d) hist.resize(d + 1, 0.0);
    hist[d] += 1.0;
  }
  return hist;
}

std::vector<double> degree_barycenter(const std::vector<std::vector<double>>& histograms,
                                      std::size_t grid_size) {
  if (histograms.empty()) throw std::domain_error("degree_barycenter: no histograms");
  double largest_mass = 0.0;
  std::vector<std::vector<double>> cdfs;
  for (const auto& h : histograms) {
    const double mass = std::accumulate(h.begin(), h.end(), 0.0);
    if (!(mass > 0.0) || std::any_of(h.begin(), h.end(), [](double x) { return x < 0.0; })) {
      throw std::domain_error("degree_barycenter: empty or negative histogram");
    }
    largest_mass = std::max(largest_mass, mass);
    std::vector<double> cdf(h.size());
    double run = 0.0;
    for (std::size_t d = 0; d < h.size(); ++d) {
      run += h[d];
      cdf[d] = run / mass;
    }
    cdfs.push_back(std::move(cdf));
  }
  if (grid_size == 0) {
    const double n = std::ceil(largest_mass);
    grid_size = static_cast<std::size_t>(std::max(1024.0, std::min(n * n, 4e6)));
  }

  std::vector<double> out;
  const double inv_k = 1.0 / static_cast<double>(cdfs.size());
  const double unit = 1.0 / static_cast<double>(grid_size);
  std::vector<std::size_t> cursor(cdfs.size(), 0);
  for (std::size_t m = 0; m < grid_size; ++m) {
    const double t = (static_cast<double>(m) + 0.5) * unit;
    double q = 0.0;
    for (std::size_t k = 0; k < cdfs.size(); ++k) {
      // t increases with m, so each quantile cursor only moves forward.
      auto& c = cursor[k];
      while (c + 1 < cdfs[k].size() && cdfs[k][c] < t) ++c;
      q += static_cast<double>(c);
    }
    q *= inv_k;
    const double lo = std::floor(q);
    const double frac = q - lo;
    const auto bin = static_cast<std::size_t>(lo);
    if (out.size() < bin + 2) out.resize(bin + 2, 0.0);
    out[bin] += (1.0 - frac) * unit;
    out[bin + 1] += frac * unit;
  }
  while (out.size() > 1 && out.back() == 0.0) out.pop_back();
  return out;
}

}  // namespace hetemb
