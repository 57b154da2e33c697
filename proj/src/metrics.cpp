#include "salbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "salbench/transforms.hpp"

namespace salbench {

const char* metric_name(MetricId metric) {
    switch (metric) {
        case MetricId::AUC: return "AUC";
        case MetricId::sAUC: return "sAUC";
        case MetricId::NSS: return "NSS";
        case MetricId::IG: return "IG";
        case MetricId::CC: return "CC";
        case MetricId::KLDiv: return "KLDiv";
        case MetricId::SIM: return "SIM";
    }
    return "?";
}

std::optional<MetricId> metric_from_name(std::string_view name) {
    for (MetricId m : kAllMetrics)
        if (name == metric_name(m)) return m;
    return std::nullopt;
}

SaliencyGrid empirical_saliency_map(const FixationSet& fixations, GridShape shape,
                                    double sigma) {
    require_nonempty(fixations);
    require_within(fixations, shape);
    if (sigma < 0.0)
        fail(Errc::NegativeSigma, "sigma must be nonnegative");

    const int h = shape.height, w = shape.width;
    std::vector<double> grid(shape.pixels(), 0.0);

    if (sigma == 0.0) {
        for (const Fixation& f : fixations.points)
            grid[static_cast<std::size_t>(f.row) * w + f.col] += 1.0;
        return SaliencyGrid(shape, std::move(grid));
    }

    const int radius = gaussian_kernel_radius(sigma);
    const int taps = 2 * radius + 1;

    // Splatting the separable kernel per fixation and blurring the full
    // count grid are algebraically the same convolution; pick the cheaper.
    const std::size_t splat_cost = fixations.size() * static_cast<std::size_t>(taps) * taps;
    const std::size_t blur_cost = 2 * shape.pixels() * static_cast<std::size_t>(taps);
    if (splat_cost <= blur_cost) {
        // Splat count * kernel per distinct pixel so that repeated fixations
        // scale the map exactly.
        std::vector<double> counts(shape.pixels(), 0.0);
        for (const Fixation& f : fixations.points)
            counts[static_cast<std::size_t>(f.row) * w + f.col] += 1.0;

        const std::vector<double> k = gaussian_kernel_1d(sigma);
        const int period_r = 2 * h, period_c = 2 * w;
        for (int row = 0; row < h; ++row) {
            for (int col = 0; col < w; ++col) {
                const double count = counts[static_cast<std::size_t>(row) * w + col];
                if (count == 0.0) continue;
                for (int dr = -radius; dr <= radius; ++dr) {
                    int r = row + dr;
                    if (h == 1) {
                        r = 0;
                    } else {
                        r %= period_r;
                        if (r < 0) r += period_r;
                        if (r >= h) r = period_r - 1 - r;
                    }
                    const double kr = count * k[dr + radius];
                    double* row_ptr = grid.data() + static_cast<std::size_t>(r) * w;
                    for (int dc = -radius; dc <= radius; ++dc) {
                        int c = col + dc;
                        if (w == 1) {
                            c = 0;
                        } else {
                            c %= period_c;
                            if (c < 0) c += period_c;
                            if (c >= w) c = period_c - 1 - c;
                        }
                        row_ptr[c] += kr * k[dc + radius];
                    }
                }
            }
        }
        return SaliencyGrid(shape, std::move(grid));
    }

    for (const Fixation& f : fixations.points)
        grid[static_cast<std::size_t>(f.row) * w + f.col] += 1.0;
    return SaliencyGrid(shape, gaussian_blur(grid, shape, sigma));
}

namespace {

std::vector<double> values_at(const SaliencyGrid& map, const FixationSet& fixations) {
    require_within(fixations, map.shape());
    std::vector<double> out;
    out.reserve(fixations.size());
    for (const Fixation& f : fixations.points) out.push_back(map.at(f.row, f.col));
    return out;
}

// Trapezoidal ROC area over the combined threshold set. Positives and
// negatives are passed as value lists; counts are accumulated exactly in
// integers so the result is reproducible to the last bit.
double roc_area(std::vector<double> positives, std::vector<double> negatives) {
    std::sort(positives.begin(), positives.end());
    std::sort(negatives.begin(), negatives.end());
    const std::size_t n_pos = positives.size();
    const std::size_t n_neg = negatives.size();

    // Walk thresholds from the highest value down; at each distinct value v
    // the ROC gains the points with saliency >= v. The trapezoid between
    // consecutive thresholds contributes
    //   d_neg * (2 * pos_above + d_pos) / (2 * n_pos * n_neg),
    // summed exactly as integers.
    std::size_t ip = n_pos, in = n_neg;
    std::size_t pos_above = 0, neg_above = 0;
    double twice_area_num = 0.0; // sum of d_neg * (2*pos_above + d_pos)
    while (ip > 0 || in > 0) {
        double v;
        if (ip > 0 && in > 0)
            v = std::max(positives[ip - 1], negatives[in - 1]);
        else if (ip > 0)
            v = positives[ip - 1];
        else
            v = negatives[in - 1];

        std::size_t d_pos = 0, d_neg = 0;
        while (ip > 0 && positives[ip - 1] == v) { ++d_pos; --ip; }
        while (in > 0 && negatives[in - 1] == v) { ++d_neg; --in; }

        twice_area_num += static_cast<double>(d_neg) *
                          (2.0 * static_cast<double>(pos_above) + static_cast<double>(d_pos));
        pos_above += d_pos;
        neg_above += d_neg;
    }
    (void)neg_above;
    return twice_area_num / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

} // namespace

MetricScore auc(const SaliencyGrid& map, const FixationSet& fixations) {
    require_nonempty(fixations);
    std::vector<double> positives = values_at(map, fixations);
    return {MetricId::AUC, roc_area(std::move(positives), map.values())};
}

MetricScore auc_2afc_oracle(const SaliencyGrid& map, const FixationSet& fixations,
                            const FixationSet& nonfixations) {
    require_nonempty(fixations, Errc::EmptySet);
    require_nonempty(nonfixations, Errc::EmptySet);
    const std::vector<double> pos = values_at(map, fixations);
    const std::vector<double> neg = values_at(map, nonfixations);
    double twice_correct = 0.0;
    for (double p : pos)
        for (double q : neg) {
            if (p > q) twice_correct += 2.0;
            else if (p == q) twice_correct += 1.0;
        }
    return {MetricId::AUC,
            twice_correct / (2.0 * static_cast<double>(pos.size()) *
                             static_cast<double>(neg.size()))};
}

MetricScore sauc(const SaliencyGrid& map, const FixationSet& fixations,
                 const FixationSet& nonfix_fixations) {
    require_nonempty(fixations, Errc::EmptySet);
    require_nonempty(nonfix_fixations, Errc::EmptySet);
    std::vector<double> positives = values_at(map, fixations);
    std::vector<double> negatives = values_at(map, nonfix_fixations);
    return {MetricId::sAUC, roc_area(std::move(positives), std::move(negatives))};
}

MetricScore nss(const SaliencyGrid& map, const FixationSet& fixations) {
    require_nonempty(fixations);
    const SaliencyGrid z = zscore_normalize(map);
    const std::vector<double> vals = values_at(z, fixations);
    const double sum = std::accumulate(vals.begin(), vals.end(), 0.0);
    return {MetricId::NSS, sum / static_cast<double>(vals.size())};
}

MetricScore ig(const DensityGrid& density, const FixationSet& fixations,
               const DensityGrid& baseline) {
    if (!(density.shape() == baseline.shape()))
        fail(Errc::ShapeMismatch, "density and baseline shapes differ");
    require_nonempty(fixations);
    require_within(fixations, density.shape());
    constexpr double eps = 1e-20;
    const double inv_ln2 = 1.4426950408889634073599246810019;
    double sum = 0.0;
    for (const Fixation& f : fixations.points) {
        sum += (std::log(density.at(f.row, f.col) + eps) -
                std::log(baseline.at(f.row, f.col) + eps)) * inv_ln2;
    }
    return {MetricId::IG, sum / static_cast<double>(fixations.size())};
}

MetricScore cc(const SaliencyGrid& map, const SaliencyGrid& empirical) {
    if (!(map.shape() == empirical.shape()))
        fail(Errc::ShapeMismatch, "map shapes differ");
    const std::vector<double>& a = map.values();
    const std::vector<double>& b = empirical.values();
    for (const auto* v : {&a, &b}) {
        const auto [min_it, max_it] = std::minmax_element(v->begin(), v->end());
        if (*min_it == *max_it)
            fail(Errc::ZeroVariance, "constant map in correlation");
    }
    const double n = static_cast<double>(a.size());
    const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a <= 0.0 || var_b <= 0.0)
        fail(Errc::ZeroVariance, "constant map in correlation");
    return {MetricId::CC, cov / std::sqrt(var_a * var_b)};
}

MetricScore kldiv(const SaliencyGrid& empirical, const SaliencyGrid& map) {
    if (!(empirical.shape() == map.shape()))
        fail(Errc::ShapeMismatch, "map shapes differ");
    const DensityGrid e = normalize_to_distribution(empirical);
    const DensityGrid q = normalize_to_distribution(map);
    constexpr double eps = 2.2e-16;
    double sum = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i)
        sum += e[i] * std::log((e[i] + eps) / (q[i] + eps));
    return {MetricId::KLDiv, sum};
}

MetricScore sim(const SaliencyGrid& map, const SaliencyGrid& empirical) {
    if (!(map.shape() == empirical.shape()))
        fail(Errc::ShapeMismatch, "map shapes differ");
    const DensityGrid p = normalize_to_distribution(map);
    const DensityGrid q = normalize_to_distribution(empirical);
    return {MetricId::SIM, detail::sim_on_simplex(p.values(), q.values())};
}

namespace detail {

double sim_on_simplex(const std::vector<double>& p, const std::vector<double>& q) {
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sum += std::min(p[i], q[i]);
    return sum;
}

} // namespace detail

} // namespace salbench
