#include "salbench/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace salbench {

namespace {

double checked_sum(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) {
        if (!std::isfinite(v))
            fail(Errc::NonFinite, "grid contains NaN or Inf");
        if (v < 0.0)
            fail(Errc::NegativeValue, "grid contains negative values");
        sum += v;
    }
    return sum;
}

} // namespace

DensityGrid density_from_grid(GridShape shape, std::vector<double> values) {
    const double sum = checked_sum(values);
    if (sum <= 0.0)
        fail(Errc::ZeroMass, "grid has zero total mass");
    for (double& v : values) v /= sum;
    return DensityGrid(shape, std::move(values));
}

DensityGrid density_from_grid(const SaliencyGrid& grid) {
    return density_from_grid(grid.shape(), grid.values());
}

std::vector<double> equalize_values(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[a] < values[b];
    });

    // Runs of equal values share their average 1-based rank.
    std::vector<double> out(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j); // (i+1 + j)/2
        const double level = (avg_rank - 0.5) / static_cast<double>(n);
        for (std::size_t k = i; k < j; ++k) out[order[k]] = level;
        i = j;
    }
    return out;
}

SaliencyGrid equalize(const SaliencyGrid& map) {
    return SaliencyGrid(map.shape(), equalize_values(map.values()));
}

int gaussian_kernel_radius(double sigma) {
    if (sigma < 0.0)
        fail(Errc::NegativeSigma, "sigma must be nonnegative");
    if (sigma == 0.0) return 0;
    return static_cast<int>(std::ceil(4.0 * sigma)) + 1;
}

std::vector<double> gaussian_kernel_1d(double sigma) {
    const int radius = gaussian_kernel_radius(sigma);
    std::vector<double> kernel(2 * radius + 1, 1.0);
    if (radius == 0) return kernel;
    double sum = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        const double v = std::exp(-0.5 * t * t / (sigma * sigma));
        kernel[t + radius] = v;
        sum += v;
    }
    for (double& v : kernel) v /= sum;
    return kernel;
}

namespace {

// Half-sample symmetric reflection of an arbitrary integer index into [0, n).
inline int reflect_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - 1 - i;
}

void convolve_line(const double* in, double* out, int n, int stride,
                   const std::vector<double>& kernel, int radius) {
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int t = -radius; t <= radius; ++t) {
            const int j = reflect_index(i + t, n);
            acc += kernel[t + radius] * in[j * stride];
        }
        out[i * stride] = acc;
    }
}

} // namespace

std::vector<double> gaussian_blur(const std::vector<double>& values,
                                  GridShape shape, double sigma) {
    if (sigma < 0.0)
        fail(Errc::NegativeSigma, "sigma must be nonnegative");
    if (sigma == 0.0) return values;

    const int radius = gaussian_kernel_radius(sigma);
    const std::vector<double> kernel = gaussian_kernel_1d(sigma);
    const int h = shape.height, w = shape.width;

    std::vector<double> tmp(values.size());
    for (int r = 0; r < h; ++r)
        convolve_line(values.data() + static_cast<std::size_t>(r) * w,
                      tmp.data() + static_cast<std::size_t>(r) * w, w, 1, kernel, radius);

    std::vector<double> out(values.size());
    for (int c = 0; c < w; ++c)
        convolve_line(tmp.data() + c, out.data() + c, h, w, kernel, radius);
    return out;
}

SaliencyGrid gaussian_blur(const SaliencyGrid& grid, double sigma) {
    return SaliencyGrid(grid.shape(), gaussian_blur(grid.values(), grid.shape(), sigma));
}

DensityGrid gaussian_blur(const DensityGrid& density, double sigma) {
    return DensityGrid(density.shape(), gaussian_blur(density.values(), density.shape(), sigma));
}

DensityGrid normalize_to_distribution(const SaliencyGrid& map) {
    const std::vector<double>& v = map.values();
    const auto [min_it, max_it] = std::minmax_element(v.begin(), v.end());
    const double min = *min_it, max = *max_it;

    // Already a distribution: pass through unchanged (this also admits the
    // exact uniform distribution, which the constant check below would not).
    if (min >= 0.0) {
        double sum = std::accumulate(v.begin(), v.end(), 0.0);
        if (std::abs(sum - 1.0) <= 1e-6)
            return DensityGrid(map.shape(), v);
    }
    if (min == max)
        fail(Errc::DegenerateMap, "constant map cannot be normalized to a distribution");

    std::vector<double> out = v;
    if (min < 0.0)
        for (double& x : out) x -= min;
    const double sum = std::accumulate(out.begin(), out.end(), 0.0);
    if (sum <= 0.0)
        fail(Errc::DegenerateMap, "map has zero mass after shifting");
    for (double& x : out) x /= sum;
    return DensityGrid(map.shape(), std::move(out));
}

SaliencyGrid zscore_normalize(const SaliencyGrid& map) {
    const std::vector<double>& v = map.values();
    // Constancy is checked on the values, not on the accumulated variance:
    // rounding in the mean of many equal values can make the latter positive.
    const auto [min_it, max_it] = std::minmax_element(v.begin(), v.end());
    if (*min_it == *max_it)
        fail(Errc::ZeroVariance, "constant map has zero variance");
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= n;
    if (var <= 0.0)
        fail(Errc::ZeroVariance, "constant map has zero variance");
    const double std_dev = std::sqrt(var);
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - mean) / std_dev;
    return SaliencyGrid(map.shape(), std::move(out));
}

} // namespace salbench
