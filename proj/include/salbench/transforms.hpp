#pragma once

#include <vector>

#include "salbench/grid.hpp"

namespace salbench {

/// Normalizes a nonnegative grid to unit sum. Errors: NegativeValue,
/// ZeroMass, NonFinite.
DensityGrid density_from_grid(GridShape shape, std::vector<double> values);
DensityGrid density_from_grid(const SaliencyGrid& grid);

/// Rank transform to a uniform value histogram: the pixel with ascending
/// rank k (ties averaged) maps to (k - 0.5) / N. Output lies in (0, 1) and
/// is invariant under strictly increasing transforms of the input.
SaliencyGrid equalize(const SaliencyGrid& map);
std::vector<double> equalize_values(const std::vector<double>& values);

// 1D Gaussian kernel sampled at integer offsets, truncated at
// ceil(4*sigma) + 1 and renormalized to unit sum. The extra tap keeps the
// truncation error of a blurred delta below 1e-6 in absolute value.
int gaussian_kernel_radius(double sigma);
std::vector<double> gaussian_kernel_1d(double sigma);

/// Separable Gaussian convolution with reflecting boundary (half-sample
/// symmetric). Preserves total mass; sigma = 0 returns the input unchanged.
std::vector<double> gaussian_blur(const std::vector<double>& values,
                                  GridShape shape, double sigma);
SaliencyGrid gaussian_blur(const SaliencyGrid& grid, double sigma);
DensityGrid gaussian_blur(const DensityGrid& density, double sigma);

/// Converts a saliency map into a probability distribution: grids that are
/// already distributions pass through, otherwise the minimum is subtracted
/// if negative and the result is divided by its sum. Constant maps that are
/// not already distributions are rejected as DegenerateMap.
DensityGrid normalize_to_distribution(const SaliencyGrid& map);

/// Shifts and scales to zero mean and unit population standard deviation
/// (divide by N). Errors: ZeroVariance on constant maps.
SaliencyGrid zscore_normalize(const SaliencyGrid& map);

} // namespace salbench
