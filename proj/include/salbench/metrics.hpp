#pragma once

#include <optional>
#include <string_view>

#include "salbench/grid.hpp"

namespace salbench {

enum class MetricId { AUC, sAUC, NSS, IG, CC, KLDiv, SIM };

constexpr MetricId kAllMetrics[] = {MetricId::AUC, MetricId::sAUC, MetricId::NSS,
                                    MetricId::IG,  MetricId::CC,   MetricId::KLDiv,
                                    MetricId::SIM};

const char* metric_name(MetricId metric);
std::optional<MetricId> metric_from_name(std::string_view name);

struct MetricScore {
    MetricId metric;
    double value;
};

/// Fixation count grid convolved with a Gaussian of the given sigma.
/// Total mass equals the fixation count.
SaliencyGrid empirical_saliency_map(const FixationSet& fixations, GridShape shape,
                                    double sigma);

/// Area under the ROC curve with fixated saliency values as positives and
/// every pixel value as a negative; thresholds are the combined values.
/// Equals the 2AFC fraction with ties counted as one half.
MetricScore auc(const SaliencyGrid& map, const FixationSet& fixations);

/// Exhaustive mean over all (fixation, nonfixation) pairs of
/// 1 / 0.5 / 0 for greater / equal / smaller saliency. Independent check
/// for the ROC-based AUC implementations.
MetricScore auc_2afc_oracle(const SaliencyGrid& map, const FixationSet& fixations,
                            const FixationSet& nonfixations);

/// ROC area with saliency values at the given nonfixation locations as
/// negatives (typically other images' fixations).
MetricScore sauc(const SaliencyGrid& map, const FixationSet& fixations,
                 const FixationSet& nonfix_fixations);

/// Mean z-scored saliency value at the fixated pixels.
MetricScore nss(const SaliencyGrid& map, const FixationSet& fixations);

/// Mean log2(density) - log2(baseline) at fixated pixels, in bits per
/// fixation; both logs regularized with epsilon = 1e-20.
MetricScore ig(const DensityGrid& density, const FixationSet& fixations,
               const DensityGrid& baseline);

/// Pearson correlation between the two maps over pixels.
MetricScore cc(const SaliencyGrid& map, const SaliencyGrid& empirical);

/// KL divergence KL[empirical || map] in nats after converting both inputs
/// to distributions; epsilon = 2.2e-16 regularizes empty bins. Lower is
/// better.
MetricScore kldiv(const SaliencyGrid& empirical, const SaliencyGrid& map);

/// Sum of pixelwise minima after converting both inputs to distributions;
/// equals 1 minus half their l1 distance.
MetricScore sim(const SaliencyGrid& map, const SaliencyGrid& empirical);

namespace detail {
// SIM of two unit-sum nonnegative vectors, no normalization.
double sim_on_simplex(const std::vector<double>& p, const std::vector<double>& q);
}

} // namespace salbench
