#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "salbench/grid.hpp"
#include "salbench/metrics.hpp"
#include "salbench/rng.hpp"

namespace salbench {

/// Draws categorical samples from a density grid via an inverse-CDF lookup.
class CategoricalSampler {
public:
    explicit CategoricalSampler(const DensityGrid& density);

    Fixation draw(Rng& rng) const;
    FixationSet draw_set(Rng& rng, int n) const;

private:
    GridShape shape_;
    std::vector<double> cdf_;
};

struct SgdConfig {
    int batch_size = 50;
    double initial_lr = 1e-7;
    double lr_decay = 1.0 / 3.0;
    double min_lr = 1e-9;
    int validation_samples = 1000;
    int validation_interval = 1000; // training samples between validations
    std::uint64_t seed = 0;
};

// The default step sizes are tuned for full-resolution grids around
// 768x1024 where pixel probabilities are of order 1e-6. Scaling them by the
// pixel-count ratio keeps the relative step per update comparable on
// smaller grids.
SgdConfig scale_sgd_to_grid(SgdConfig config, GridShape shape);

struct DeriveConfig {
    double empirical_sigma = 35.0;
    int fixations_per_image = 100;          // SIM only
    SgdConfig sgd;                          // SIM only
    std::optional<DensityGrid> centerbias;  // sAUC only
};

/// Saliency map maximizing the expected metric performance under the given
/// fixation density. NSS and IG share one map, as do CC and KLDiv.
SaliencyGrid derive_map(const DensityGrid& density, MetricId metric,
                        const DeriveConfig& config);

SaliencyGrid derive_auc_map(const DensityGrid& density);
SaliencyGrid derive_sauc_map(const DensityGrid& density, const DensityGrid& centerbias);
SaliencyGrid derive_nss_ig_map(const DensityGrid& density);
SaliencyGrid derive_cc_kldiv_map(const DensityGrid& density, double sigma);

/// Euclidean projection onto the probability simplex (sort-and-threshold).
std::vector<double> project_to_simplex_values(std::vector<double> values);
DensityGrid project_to_simplex(const SaliencyGrid& grid);

/// Monte-Carlo estimate of the expected SIM score of `map` against
/// empirical maps built from `n_samples` draws of `n_fix` fixations each.
double expected_sim(const SaliencyGrid& map, const DensityGrid& density, int n_fix,
                    int n_samples, double sigma, std::uint64_t seed);

/// SIM map via projected stochastic subgradient ascent on sampled fixation
/// sets, starting from the normalized CC map. The returned map is the
/// best-scoring iterate on a fixed validation set, so its validation score
/// never falls below the initialization's.
SaliencyGrid derive_sim_map(const DensityGrid& density, const DeriveConfig& config);

} // namespace salbench
