#include "salbench/probabilistic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace salbench {

namespace {
constexpr double kFactorFloor = 1e-12;
constexpr double kLogEps = 1e-20;
} // namespace

PiecewiseLinearFn::PiecewiseLinearFn(std::vector<double> knot_values)
    : knots_(std::move(knot_values)) {
    if (knots_.size() < 2)
        fail(Errc::BadArgument, "piecewise linear function needs at least 2 knots");
    for (double v : knots_)
        if (!std::isfinite(v))
            fail(Errc::NonFinite, "piecewise linear knot not finite");
}

double PiecewiseLinearFn::operator()(double x) const {
    if (x < 0.0) x = 0.0;
    if (x > 1.0) x = 1.0;
    const int s = segments();
    const double t = x * s;
    int k = static_cast<int>(t);
    if (k >= s) k = s - 1;
    const double u = t - k;
    return knots_[k] * (1.0 - u) + knots_[k + 1] * u;
}

double eval_piecewise_linear(const PiecewiseLinearFn& fn, double x) { return fn(x); }

double center_bias_radius(int row, int col, GridShape shape, double alpha) {
    if (alpha <= 0.0)
        fail(Errc::BadArgument, "alpha must be positive");
    const double x_max = shape.width - 1;
    const double y_max = shape.height - 1;
    const double dx = col - 0.5 * x_max;
    const double dy = row - 0.5 * y_max;
    const double den2 = 0.25 * x_max * x_max + 0.25 * alpha * y_max * y_max;
    if (den2 <= 0.0) return 0.0;
    const double r = std::sqrt((dx * dx + alpha * dy * dy) / den2);
    return std::min(r, 1.0);
}

DensityGrid model_density(const ProbabilisticModelFit& fit, const SaliencyGrid& map) {
    const GridShape shape = map.shape();
    std::vector<double> out(map.size());
    double sum = 0.0;
    std::size_t i = 0;
    for (int r = 0; r < shape.height; ++r) {
        for (int c = 0; c < shape.width; ++c, ++i) {
            const double f = std::max(fit.nonlinearity(map[i]), kFactorFloor);
            const double radius = center_bias_radius(r, c, shape, fit.alpha);
            const double g = std::max(fit.cb_profile(radius), kFactorFloor);
            out[i] = f * g;
            sum += out[i];
        }
    }
    if (sum <= 0.0)
        fail(Errc::ZeroMass, "model density vanished everywhere");
    for (double& v : out) v /= sum;
    return DensityGrid(shape, std::move(out));
}

DensityGrid apply_fit(const ProbabilisticModelFit& fit, const SaliencyGrid& raw_map) {
    const double range = fit.map_max - fit.map_min;
    std::vector<double> rescaled(raw_map.size());
    for (std::size_t i = 0; i < raw_map.size(); ++i) {
        const double m = range > 0.0 ? (raw_map[i] - fit.map_min) / range : 0.5;
        rescaled[i] = std::clamp(m, 0.0, 1.0);
    }
    return model_density(fit, SaliencyGrid(raw_map.shape(), std::move(rescaled)));
}

// ---------------------------------------------------------------------------
// Conversion fit
// ---------------------------------------------------------------------------

namespace {

struct FitParams {
    std::vector<double> a;      // nonlinearity increments, v_k = sum_{j<=k} a_j^2
    std::vector<double> c;      // center-bias profile knots
    double lambda = 0.0;        // alpha = exp(lambda)

    std::size_t size() const { return a.size() + c.size() + 1; }
};

std::vector<double> knots_from_increments(const std::vector<double>& a) {
    std::vector<double> v(a.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        acc += a[k] * a[k];
        v[k] = acc;
    }
    return v;
}

struct FitGradient {
    std::vector<double> a;
    std::vector<double> c;
    double lambda = 0.0;

    double norm() const {
        double s = lambda * lambda;
        for (double x : a) s += x * x;
        for (double x : c) s += x * x;
        return std::sqrt(s);
    }
};

// Per-stimulus caches that do not change across iterations.
struct StimulusCache {
    GridShape shape;
    std::vector<int> seg_m;     // nonlinearity segment per pixel
    std::vector<double> u_m;    // position inside the segment
    std::vector<double> rad_a;  // (col - x_max/2)^2
    std::vector<double> rad_b;  // (row - y_max/2)^2
    double rad_c = 0.0;         // x_max^2 / 4
    double rad_d = 0.0;         // y_max^2 / 4
    std::vector<std::size_t> fixation_pixels;
    double n_fix = 0.0;
};

class ConversionObjective {
public:
    ConversionObjective(const std::vector<SaliencyGrid>& maps,
                        const FixationDataset& dataset, int segments_nl, int segments_cb)
        : segments_nl_(segments_nl), segments_cb_(segments_cb) {
        if (dataset.empty())
            fail(Errc::EmptyDataset, "conversion fit needs a nonempty dataset");
        if (maps.size() != dataset.size())
            fail(Errc::BadArgument, "need exactly one map per stimulus");

        double gmin = maps[0][0], gmax = maps[0][0];
        for (std::size_t s = 0; s < maps.size(); ++s) {
            if (!(maps[s].shape() == dataset.stimulus(s).shape))
                fail(Errc::ShapeMismatch,
                     "map shape differs from stimulus " + dataset.stimulus(s).id);
            for (std::size_t i = 0; i < maps[s].size(); ++i) {
                gmin = std::min(gmin, maps[s][i]);
                gmax = std::max(gmax, maps[s][i]);
            }
        }
        map_min_ = gmin;
        map_max_ = gmax;
        const double range = gmax - gmin;

        caches_.reserve(maps.size());
        for (std::size_t s = 0; s < maps.size(); ++s) {
            StimulusCache cache;
            cache.shape = maps[s].shape();
            const int h = cache.shape.height, w = cache.shape.width;
            const std::size_t n = cache.shape.pixels();
            cache.seg_m.resize(n);
            cache.u_m.resize(n);
            cache.rad_a.resize(n);
            cache.rad_b.resize(n);
            const double x_max = w - 1, y_max = h - 1;
            cache.rad_c = 0.25 * x_max * x_max;
            cache.rad_d = 0.25 * y_max * y_max;
            std::size_t i = 0;
            for (int r = 0; r < h; ++r) {
                for (int col = 0; col < w; ++col, ++i) {
                    const double m = range > 0.0 ? (maps[s][i] - gmin) / range : 0.5;
                    double t = std::clamp(m, 0.0, 1.0) * segments_nl_;
                    int k = static_cast<int>(t);
                    if (k >= segments_nl_) k = segments_nl_ - 1;
                    cache.seg_m[i] = k;
                    cache.u_m[i] = t - k;
                    const double dx = col - 0.5 * x_max;
                    const double dy = r - 0.5 * y_max;
                    cache.rad_a[i] = dx * dx;
                    cache.rad_b[i] = dy * dy;
                }
            }
            for (const Fixation& f : dataset.fixations(s).points)
                cache.fixation_pixels.push_back(
                    static_cast<std::size_t>(f.row) * w + f.col);
            cache.n_fix = static_cast<double>(cache.fixation_pixels.size());
            total_fixations_ += cache.fixation_pixels.size();
            caches_.push_back(std::move(cache));
        }
        if (total_fixations_ == 0)
            fail(Errc::EmptyDataset, "conversion fit needs at least one fixation");
    }

    double map_min() const { return map_min_; }
    double map_max() const { return map_max_; }

    double log_likelihood(const FitParams& params) const {
        return evaluate(params, nullptr);
    }

    double log_likelihood_and_gradient(const FitParams& params, FitGradient& grad) const {
        grad.a.assign(params.a.size(), 0.0);
        grad.c.assign(params.c.size(), 0.0);
        grad.lambda = 0.0;
        return evaluate(params, &grad);
    }

private:
    // Computes the summed log-likelihood; when `grad` is given, also its
    // gradient with respect to the raw parameters.
    double evaluate(const FitParams& params, FitGradient* grad) const {
        const std::vector<double> v = knots_from_increments(params.a);
        const std::vector<double>& c = params.c;
        const double alpha = std::exp(params.lambda);

        std::vector<double> dll_dv(v.size(), 0.0);
        std::vector<double> dll_dc(c.size(), 0.0);
        double dll_dalpha = 0.0;
        double ll = 0.0;

        std::vector<double> f_val, g_val, r_seg_u, dr_dalpha;
        std::vector<int> r_seg;

        for (const StimulusCache& cache : caches_) {
            const std::size_t n = cache.seg_m.size();
            f_val.resize(n);
            g_val.resize(n);
            r_seg.resize(n);
            r_seg_u.resize(n);
            dr_dalpha.resize(n);

            const double den2 = cache.rad_c + alpha * cache.rad_d;
            const double den = std::sqrt(std::max(den2, 0.0));

            double z = 0.0;
            std::vector<double> zv, zc;
            double zalpha = 0.0;
            if (grad) {
                zv.assign(v.size(), 0.0);
                zc.assign(c.size(), 0.0);
            }

            for (std::size_t i = 0; i < n; ++i) {
                const int k = cache.seg_m[i];
                const double u = cache.u_m[i];
                const double f_raw = v[k] * (1.0 - u) + v[k + 1] * u;
                const double f = std::max(f_raw, kFactorFloor);
                f_val[i] = f;

                double r = 0.0, drda = 0.0;
                const double num2 = cache.rad_a[i] + alpha * cache.rad_b[i];
                if (den > 0.0 && num2 > 0.0) {
                    const double num = std::sqrt(num2);
                    r = std::min(num / den, 1.0);
                    // d/dalpha of sqrt(A + a B)/sqrt(C + a D)
                    drda = cache.rad_b[i] / (2.0 * num * den) -
                           num * cache.rad_d / (2.0 * den2 * den);
                }
                double t = r * segments_cb_;
                int kr = static_cast<int>(t);
                if (kr >= segments_cb_) kr = segments_cb_ - 1;
                const double ur = t - kr;
                const double g_raw = c[kr] * (1.0 - ur) + c[kr + 1] * ur;
                const double g = std::max(g_raw, kFactorFloor);
                g_val[i] = g;
                r_seg[i] = kr;
                r_seg_u[i] = ur;
                dr_dalpha[i] = drda;

                const double w = f * g;
                z += w;

                if (grad) {
                    if (f_raw >= kFactorFloor) {
                        zv[k] += g * (1.0 - u);
                        zv[k + 1] += g * u;
                    }
                    if (g_raw >= kFactorFloor) {
                        zc[kr] += f * (1.0 - ur);
                        zc[kr + 1] += f * ur;
                        const double slope = (c[kr + 1] - c[kr]) * segments_cb_;
                        zalpha += f * slope * drda;
                    }
                }
            }

            double ll_s = -cache.n_fix * std::log(z);
            for (std::size_t p : cache.fixation_pixels)
                ll_s += std::log(f_val[p]) + std::log(g_val[p]);
            ll += ll_s;

            if (grad) {
                const double ratio = cache.n_fix / z;
                for (std::size_t k = 0; k < v.size(); ++k) dll_dv[k] -= ratio * zv[k];
                for (std::size_t k = 0; k < c.size(); ++k) dll_dc[k] -= ratio * zc[k];
                dll_dalpha -= ratio * zalpha;

                for (std::size_t p : cache.fixation_pixels) {
                    const int k = cache.seg_m[p];
                    const double u = cache.u_m[p];
                    const double f_raw = v[k] * (1.0 - u) + v[k + 1] * u;
                    if (f_raw >= kFactorFloor) {
                        dll_dv[k] += (1.0 - u) / f_val[p];
                        dll_dv[k + 1] += u / f_val[p];
                    }
                    const int kr = r_seg[p];
                    const double ur = r_seg_u[p];
                    const double g_raw = c[kr] * (1.0 - ur) + c[kr + 1] * ur;
                    if (g_raw >= kFactorFloor) {
                        dll_dc[kr] += (1.0 - ur) / g_val[p];
                        dll_dc[kr + 1] += ur / g_val[p];
                        const double slope = (c[kr + 1] - c[kr]) * segments_cb_;
                        dll_dalpha += slope * dr_dalpha[p] / g_val[p];
                    }
                }
            }
        }

        if (grad) {
            // Chain rule through v_k = sum_{j<=k} a_j^2: suffix sums over k.
            double suffix = 0.0;
            for (std::size_t j = v.size(); j-- > 0;) {
                suffix += dll_dv[j];
                grad->a[j] = 2.0 * params.a[j] * suffix;
            }
            grad->c = dll_dc;
            grad->lambda = dll_dalpha * alpha;
        }
        return ll;
    }

    int segments_nl_;
    int segments_cb_;
    double map_min_ = 0.0;
    double map_max_ = 1.0;
    std::vector<StimulusCache> caches_;
    std::size_t total_fixations_ = 0;
};

} // namespace

ProbabilisticModelFit fit_conversion(const std::vector<SaliencyGrid>& maps,
                                     const FixationDataset& dataset,
                                     const ConversionOptions& options,
                                     FitDiagnostics* diagnostics) {
    if (options.segments_nl < 1 || options.segments_cb < 1)
        fail(Errc::BadArgument, "segment counts must be positive");

    const ConversionObjective objective(maps, dataset, options.segments_nl,
                                        options.segments_cb);

    // Identity nonlinearity, flat center-bias profile, alpha = 1. The first
    // increment starts slightly above zero so its squared parametrization
    // keeps a live gradient.
    FitParams params;
    params.a.assign(options.segments_nl + 1, std::sqrt(1.0 / options.segments_nl));
    params.a[0] = 1e-3;
    params.c.assign(options.segments_cb + 1, 1.0);
    params.lambda = 0.0;

    double ll = objective.log_likelihood(params);
    if (diagnostics) {
        diagnostics->initial_ll = ll;
        diagnostics->ll_trace.clear();
    }

    FitGradient grad;
    double step = 0.25;
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        objective.log_likelihood_and_gradient(params, grad);
        const double gnorm = grad.norm();
        if (gnorm <= 0.0 || !std::isfinite(gnorm)) break;

        step = std::min(step * 2.0, 64.0);
        bool accepted = false;
        FitParams trial = params;
        double trial_ll = ll;
        while (step > 1e-13) {
            const double scale = step / gnorm;
            for (std::size_t j = 0; j < params.a.size(); ++j)
                trial.a[j] = params.a[j] + scale * grad.a[j];
            for (std::size_t j = 0; j < params.c.size(); ++j)
                trial.c[j] = params.c[j] + scale * grad.c[j];
            trial.lambda = params.lambda + scale * grad.lambda;

            trial_ll = objective.log_likelihood(trial);
            if (std::isfinite(trial_ll) && trial_ll > ll) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        const double improvement = trial_ll - ll;
        params = trial;
        ll = trial_ll;
        if (diagnostics) diagnostics->ll_trace.push_back(ll);
        if (improvement < options.rel_tol * (std::abs(ll) + 1.0)) break;
    }

    if (diagnostics) diagnostics->final_ll = ll;

    std::vector<double> nl_knots = knots_from_increments(params.a);
    ProbabilisticModelFit fit{PiecewiseLinearFn(std::move(nl_knots)),
                              PiecewiseLinearFn(params.c), std::exp(params.lambda),
                              objective.map_min(), objective.map_max()};
    return fit;
}

// ---------------------------------------------------------------------------
// KDE center bias
// ---------------------------------------------------------------------------

namespace {

std::vector<std::pair<double, double>> normalized_fixations(
    const FixationDataset& dataset, const std::optional<std::string>& exclude) {
    std::vector<std::pair<double, double>> points;
    for (std::size_t s = 0; s < dataset.size(); ++s) {
        if (exclude && dataset.stimulus(s).id == *exclude) continue;
        const GridShape shape = dataset.stimulus(s).shape;
        for (const Fixation& f : dataset.fixations(s).points)
            points.emplace_back((f.col + 0.5) / shape.width,
                                (f.row + 0.5) / shape.height);
    }
    return points;
}

DensityGrid kde_evaluate(const std::vector<std::pair<double, double>>& points,
                         double bandwidth, GridShape shape) {
    std::vector<double> grid(shape.pixels(), 0.0);
    const double inv_2bw2 = 1.0 / (2.0 * bandwidth * bandwidth);
    std::size_t i = 0;
    double sum = 0.0;
    for (int r = 0; r < shape.height; ++r) {
        const double py = (r + 0.5) / shape.height;
        for (int c = 0; c < shape.width; ++c, ++i) {
            const double px = (c + 0.5) / shape.width;
            double acc = 0.0;
            for (const auto& [x, y] : points) {
                const double dx = px - x;
                const double dy = py - y;
                acc += std::exp(-(dx * dx + dy * dy) * inv_2bw2);
            }
            grid[i] = acc;
            sum += acc;
        }
    }
    if (sum <= 0.0)
        fail(Errc::ZeroMass, "kernel density vanished on the grid");
    for (double& v : grid) v /= sum;
    return DensityGrid(shape, std::move(grid));
}

} // namespace

CenterBiasKde fit_kde_centerbias(const FixationDataset& dataset, double bandwidth) {
    if (bandwidth <= 0.0)
        fail(Errc::BadArgument, "bandwidth must be positive");
    if (dataset.empty() || dataset.total_fixations() == 0)
        fail(Errc::EmptyDataset, "center bias estimation needs fixations");
    return CenterBiasKde{normalized_fixations(dataset, std::nullopt), bandwidth};
}

DensityGrid kde_density_for_size(const CenterBiasKde& kde, GridShape shape,
                                 const std::optional<std::string>& exclude_stimulus,
                                 const FixationDataset& dataset) {
    if (shape.height < 1 || shape.width < 1)
        fail(Errc::BadArgument, "evaluation shape must be at least 1x1");
    if (!exclude_stimulus)
        return kde_evaluate(kde.normalized_points, kde.bandwidth, shape);

    if (!dataset.has(*exclude_stimulus))
        fail(Errc::BadArgument, "unknown stimulus id: " + *exclude_stimulus);
    const auto points = normalized_fixations(dataset, exclude_stimulus);
    if (points.empty())
        fail(Errc::EmptyAfterExclusion,
             "no fixations left after excluding " + *exclude_stimulus);
    return kde_evaluate(points, kde.bandwidth, shape);
}

double crossvalidate_bandwidth(const FixationDataset& dataset,
                               const std::vector<double>& candidates,
                               std::optional<GridShape> eval_shape) {
    if (dataset.size() < 2)
        fail(Errc::TooFewStimuli, "crossvalidation needs at least 2 stimuli");
    if (candidates.empty())
        fail(Errc::BadArgument, "no candidate bandwidths");

    double best_bw = candidates.front();
    double best_ll = -std::numeric_limits<double>::infinity();
    for (const double bw : candidates) {
        if (bw <= 0.0)
            fail(Errc::BadArgument, "bandwidth must be positive");
        const CenterBiasKde kde{{}, bw};
        double total_ll = 0.0;
        std::size_t total_fix = 0;
        for (std::size_t s = 0; s < dataset.size(); ++s) {
            const FixationSet& held_out = dataset.fixations(s);
            if (held_out.empty()) continue;
            const GridShape stim_shape = dataset.stimulus(s).shape;
            const GridShape grid_shape = eval_shape.value_or(stim_shape);
            const DensityGrid density = kde_density_for_size(
                kde, grid_shape, dataset.stimulus(s).id, dataset);
            for (const Fixation& f : held_out.points) {
                int row = f.row, col = f.col;
                if (!(grid_shape == stim_shape)) {
                    row = std::min(grid_shape.height - 1,
                                   static_cast<int>((f.row + 0.5) * grid_shape.height /
                                                    stim_shape.height));
                    col = std::min(grid_shape.width - 1,
                                   static_cast<int>((f.col + 0.5) * grid_shape.width /
                                                    stim_shape.width));
                }
                total_ll += std::log(density.at(row, col) + kLogEps);
            }
            total_fix += held_out.size();
        }
        if (total_fix == 0)
            fail(Errc::EmptyDataset, "crossvalidation needs fixations");
        const double mean_ll = total_ll / static_cast<double>(total_fix);
        if (mean_ll > best_ll) {
            best_ll = mean_ll;
            best_bw = bw;
        }
    }
    return best_bw;
}

double log_likelihood(const DensityGrid& density, const FixationSet& fixations) {
    require_nonempty(fixations);
    require_within(fixations, density.shape());
    double ll = 0.0;
    for (const Fixation& f : fixations.points)
        ll += std::log(density.at(f.row, f.col) + kLogEps);
    return ll;
}

} // namespace salbench
