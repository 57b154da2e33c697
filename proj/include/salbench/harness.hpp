#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "salbench/derive.hpp"
#include "salbench/grid.hpp"
#include "salbench/metrics.hpp"
#include "salbench/rng.hpp"

namespace salbench {

struct GaussianComponent {
    double row_frac;    // center, as a fraction of the grid height
    double col_frac;    // center, as a fraction of the grid width
    double sigma_frac;  // isotropic sigma, as a fraction of the grid height
    double weight;
};

DensityGrid gaussian_mixture_density(GridShape shape,
                                     std::span<const GaussianComponent> components);

/// The synthetic stand-in density used by the shipped experiments: a
/// three-component isotropic Gaussian mixture with one sharp peak.
DensityGrid benchmark_density(GridShape shape);

/// A single broad central blob; source distribution for synthetic center
/// bias fixations.
DensityGrid centerbias_blob_density(GridShape shape);

/// Center bias for the synthetic experiments: fixations sampled from the
/// central blob, smoothed by a Gaussian KDE (bandwidth 0.22).
DensityGrid make_kde_centerbias(GridShape shape, std::uint64_t seed);

/// Default evaluation sigma: 35 px at 768 px image height (about one degree
/// of visual angle on common eye-tracking setups), scaled to the grid.
double scaled_sigma(GridShape shape);

/// n independent draws (with replacement) from the pixel distribution.
FixationSet sample_fixations(const DensityGrid& density, int n, Rng& rng);

struct ExperimentConfig {
    int n_sets = 1000;
    int n_fix = 100;
    std::uint64_t seed = 0;
    double sigma = 0.0; // <= 0 selects scaled_sigma(grid)
};

struct ScoreMatrix {
    std::vector<std::string> map_types;
    std::vector<MetricId> metrics;
    // scores[map][metric]; NaN marks entries where the metric is undefined
    // for that map (e.g. NSS of a constant map).
    std::vector<std::vector<double>> scores;
    std::vector<std::vector<double>> stderrs;
    // per_set[map][metric][set], kept for paired comparisons.
    std::vector<std::vector<std::vector<double>>> per_set;
};

/// Derives the five map types (AUC, sAUC, NSS/IG, CC/KL-Div, SIM) and
/// evaluates each under all seven metrics on n_sets sampled fixation sets.
/// sAUC nonfixations are sampled from the centerbias; IG uses the
/// centerbias as its baseline.
ScoreMatrix run_crossmetric_experiment(const DensityGrid& density,
                                       const DensityGrid& centerbias,
                                       const ExperimentConfig& config);

struct CcApproxCell {
    int n_fix;
    double sigma;
    double cc_mean_empirical;
    double cc_mean_normalized; // empirical maps z-scored before averaging
};

/// Compares the mean empirical map against the mean normalized empirical
/// map under CC, over a grid of fixation counts and kernel sizes.
std::vector<CcApproxCell> run_cc_approximation_experiment(
    const DensityGrid& density, int n_sets, std::span<const int> n_fix_list,
    std::span<const double> sigma_list, std::uint64_t seed);

struct SimCountTable {
    std::vector<std::string> map_labels; // SIM_<c> per count, then CC
    std::vector<int> eval_counts;
    std::vector<std::vector<double>> mean_sim;   // [map][count]
    std::vector<std::vector<double>> stderr_sim; // [map][count]
    // per_set[count][map][set], for paired comparisons.
    std::vector<std::vector<std::vector<double>>> per_set;
};

/// Derives SIM maps for each fixation count (plus the CC map) and scores
/// every map at every count.
SimCountTable run_sim_count_experiment(const DensityGrid& density,
                                       std::span<const int> fix_counts,
                                       const ExperimentConfig& config);

struct BinningResult {
    double auc_density;
    double auc_density_binned;
    double auc_equalized;
    double auc_equalized_binned;
};

/// AUC of the raw density and its equalized version, before and after
/// 256-level quantization.
BinningResult run_binning_experiment(const DensityGrid& density,
                                     const FixationSet& fixations);

} // namespace salbench
