#pragma once

#include <optional>
#include <string>
#include <vector>

#include "salbench/grid.hpp"

namespace salbench {

/// Continuous piecewise linear function with equidistant breakpoints over
/// [0, 1]. Evaluation clamps the argument into [0, 1].
class PiecewiseLinearFn {
public:
    explicit PiecewiseLinearFn(std::vector<double> knot_values);

    double operator()(double x) const;

    int segments() const { return static_cast<int>(knots_.size()) - 1; }
    const std::vector<double>& knots() const { return knots_; }

private:
    std::vector<double> knots_;
};

double eval_piecewise_linear(const PiecewiseLinearFn& fn, double x);

/// Normalized elliptic distance from the image center: 0 at the center,
/// 1 at the corners. `alpha` weights the vertical axis.
double center_bias_radius(int row, int col, GridShape shape, double alpha);

/// Maps a saliency map (rescaled to [0,1]) to a fixation density: a monotone
/// pixelwise nonlinearity times a radial center-bias profile, normalized to
/// unit sum. map_min/map_max record the joint rescaling range of the fit.
struct ProbabilisticModelFit {
    PiecewiseLinearFn nonlinearity;  // monotone nondecreasing, knots >= 0
    PiecewiseLinearFn cb_profile;
    double alpha = 1.0;
    double map_min = 0.0;
    double map_max = 1.0;
};

/// Density for a map already rescaled to [0, 1]. Both factors are floored
/// at 1e-12 before the product so no pixel gets exactly zero mass.
DensityGrid model_density(const ProbabilisticModelFit& fit, const SaliencyGrid& map);

/// Rescales a raw map with the fit's stored range and applies model_density.
DensityGrid apply_fit(const ProbabilisticModelFit& fit, const SaliencyGrid& raw_map);

struct ConversionOptions {
    int segments_nl = 20;
    int segments_cb = 12;
    int max_iterations = 2000;
    double rel_tol = 1e-7;
};

struct FitDiagnostics {
    double initial_ll = 0.0;
    double final_ll = 0.0;
    std::vector<double> ll_trace; // log-likelihood after each accepted step
};

/// Joint maximum-likelihood fit of nonlinearity, center-bias profile and
/// alpha over a dataset of per-stimulus maps and fixations. Maps are first
/// rescaled jointly to [0, 1] by the global min/max. Full-batch gradient
/// ascent with backtracking line search; monotonicity of the nonlinearity
/// is enforced by a squared-increment parametrization.
ProbabilisticModelFit fit_conversion(const std::vector<SaliencyGrid>& maps,
                                     const FixationDataset& dataset,
                                     const ConversionOptions& options = {},
                                     FitDiagnostics* diagnostics = nullptr);

/// Gaussian kernel density estimate of fixation positions in coordinates
/// normalized to [0, 1] per axis (pixel centers).
struct CenterBiasKde {
    std::vector<std::pair<double, double>> normalized_points; // (x, y)
    double bandwidth = 0.22;
};

CenterBiasKde fit_kde_centerbias(const FixationDataset& dataset, double bandwidth);

/// KDE evaluated at the pixel centers of `shape`, renormalized to sum 1.
/// With `exclude_stimulus` set, the excluded stimulus's fixations are left
/// out (points are recomputed from the dataset).
DensityGrid kde_density_for_size(const CenterBiasKde& kde, GridShape shape,
                                 const std::optional<std::string>& exclude_stimulus,
                                 const FixationDataset& dataset);

/// Picks the candidate bandwidth maximizing the mean leave-one-image-out
/// log-likelihood per held-out fixation. Folds are evaluated on each
/// stimulus's own grid unless `eval_shape` overrides it.
double crossvalidate_bandwidth(const FixationDataset& dataset,
                               const std::vector<double>& candidates,
                               std::optional<GridShape> eval_shape = std::nullopt);

/// Sum over fixations of ln(density + 1e-20), in nats.
double log_likelihood(const DensityGrid& density, const FixationSet& fixations);

} // namespace salbench
