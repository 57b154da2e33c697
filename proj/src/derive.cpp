#include "salbench/derive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "salbench/transforms.hpp"

namespace salbench {

CategoricalSampler::CategoricalSampler(const DensityGrid& density)
    : shape_(density.shape()), cdf_(density.size()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < density.size(); ++i) {
        acc += density[i];
        cdf_[i] = acc;
    }
    cdf_.back() = 1.0;
}

Fixation CategoricalSampler::draw(Rng& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cdf_.begin());
    if (idx >= cdf_.size()) idx = cdf_.size() - 1;
    return {static_cast<int>(idx / shape_.width), static_cast<int>(idx % shape_.width)};
}

FixationSet CategoricalSampler::draw_set(Rng& rng, int n) const {
    FixationSet out;
    out.points.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.points.push_back(draw(rng));
    return out;
}

SgdConfig scale_sgd_to_grid(SgdConfig config, GridShape shape) {
    const double reference_pixels = 768.0 * 1024.0;
    const double factor = reference_pixels / static_cast<double>(shape.pixels());
    config.initial_lr *= factor;
    config.min_lr *= factor;
    return config;
}

SaliencyGrid derive_auc_map(const DensityGrid& density) {
    return equalize(density.as_saliency());
}

SaliencyGrid derive_sauc_map(const DensityGrid& density, const DensityGrid& centerbias) {
    if (!(density.shape() == centerbias.shape()))
        fail(Errc::ShapeMismatch, "centerbias shape differs from density");
    std::vector<double> ratio(density.size());
    for (std::size_t i = 0; i < density.size(); ++i) {
        if (centerbias[i] <= 0.0)
            fail(Errc::ZeroCenterbias, "centerbias has a nonpositive pixel");
        ratio[i] = density[i] / centerbias[i];
    }
    return SaliencyGrid(density.shape(), equalize_values(ratio));
}

SaliencyGrid derive_nss_ig_map(const DensityGrid& density) {
    return density.as_saliency();
}

SaliencyGrid derive_cc_kldiv_map(const DensityGrid& density, double sigma) {
    if (sigma <= 0.0)
        fail(Errc::NegativeSigma, "sigma must be positive");
    return SaliencyGrid(density.shape(),
                        gaussian_blur(density.values(), density.shape(), sigma));
}

std::vector<double> project_to_simplex_values(std::vector<double> values) {
    for (double v : values)
        if (!std::isfinite(v)) fail(Errc::NonFinite, "projection input not finite");

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double cumsum = 0.0;
    double tau = 0.0;
    std::size_t support = 0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        cumsum += sorted[j];
        const double candidate = (cumsum - 1.0) / static_cast<double>(j + 1);
        if (sorted[j] - candidate > 0.0) {
            tau = candidate;
            support = j + 1;
        }
    }
    (void)support;
    for (double& v : values) v = std::max(v - tau, 0.0);
    return values;
}

DensityGrid project_to_simplex(const SaliencyGrid& grid) {
    std::vector<double> v = project_to_simplex_values(grid.values());
    // The threshold rule leaves the sum within an ulp of 1; rescale so the
    // density invariant holds exactly.
    const double sum = std::accumulate(v.begin(), v.end(), 0.0);
    for (double& x : v) x /= sum;
    return DensityGrid(grid.shape(), std::move(v));
}

namespace {

// Normalized empirical map (unit sum) for one sampled fixation set.
std::vector<double> sampled_empirical_distribution(const CategoricalSampler& sampler,
                                                   Rng& rng, int n_fix, GridShape shape,
                                                   double sigma) {
    const FixationSet fix = sampler.draw_set(rng, n_fix);
    SaliencyGrid e = empirical_saliency_map(fix, shape, sigma);
    std::vector<double> v = e.values();
    const double sum = std::accumulate(v.begin(), v.end(), 0.0);
    for (double& x : v) x /= sum;
    return v;
}

} // namespace

double expected_sim(const SaliencyGrid& map, const DensityGrid& density, int n_fix,
                    int n_samples, double sigma, std::uint64_t seed) {
    if (n_fix < 1 || n_samples < 1)
        fail(Errc::BadArgument, "n_fix and n_samples must be at least 1");
    if (!(map.shape() == density.shape()))
        fail(Errc::ShapeMismatch, "map shape differs from density");
    const std::vector<double> p = normalize_to_distribution(map).values();
    const CategoricalSampler sampler(density);
    Rng rng(Rng::derive_seed(seed, /*stream=*/0x5e5));
    double acc = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        const std::vector<double> e =
            sampled_empirical_distribution(sampler, rng, n_fix, density.shape(), sigma);
        acc += detail::sim_on_simplex(p, e);
    }
    return acc / static_cast<double>(n_samples);
}

SaliencyGrid derive_sim_map(const DensityGrid& density, const DeriveConfig& config) {
    const SgdConfig& sgd = config.sgd;
    if (sgd.batch_size < 1 || sgd.lr_decay <= 0.0 || sgd.lr_decay >= 1.0 ||
        sgd.min_lr >= sgd.initial_lr || config.fixations_per_image < 1)
        fail(Errc::BadArgument, "invalid SGD configuration");

    const GridShape shape = density.shape();
    const std::size_t n = shape.pixels();
    const double sigma = config.empirical_sigma;
    const int n_fix = config.fixations_per_image;

    // Start from the normalized CC map (plain blur here so that sigma = 0,
    // which the CC derivation rejects, still works for degenerate setups).
    if (sigma < 0.0)
        fail(Errc::NegativeSigma, "sigma must be nonnegative");
    std::vector<double> map =
        normalize_to_distribution(
            SaliencyGrid(shape, gaussian_blur(density.values(), shape, sigma)))
            .values();

    const CategoricalSampler sampler(density);
    Rng train_rng(Rng::derive_seed(sgd.seed, /*stream=*/1));
    Rng val_rng(Rng::derive_seed(sgd.seed, /*stream=*/2));

    // Fixed validation set, built once.
    std::vector<std::vector<double>> validation;
    validation.reserve(static_cast<std::size_t>(sgd.validation_samples));
    for (int s = 0; s < sgd.validation_samples; ++s)
        validation.push_back(
            sampled_empirical_distribution(sampler, val_rng, n_fix, shape, sigma));

    const auto validation_score = [&](const std::vector<double>& m) {
        double acc = 0.0;
        for (const auto& e : validation) acc += detail::sim_on_simplex(m, e);
        return acc / static_cast<double>(validation.size());
    };

    std::vector<double> best = map;
    double best_score = validation_score(map);
    double last_score = best_score;

    double lr = sgd.initial_lr;
    long long samples_seen = 0;
    long long next_validation = sgd.validation_interval;
    constexpr long long kSampleCap = 10'000'000;

    std::vector<double> grad(n);
    std::vector<double> e_buf;

    while (lr >= sgd.min_lr) {
        // One batch: average the SIM subgradient (indicator of map < e,
        // ties weighted 0.5) over batch_size sampled empirical maps.
        std::fill(grad.begin(), grad.end(), 0.0);
        for (int b = 0; b < sgd.batch_size; ++b) {
            e_buf = sampled_empirical_distribution(sampler, train_rng, n_fix, shape, sigma);
            for (std::size_t i = 0; i < n; ++i) {
                if (map[i] < e_buf[i]) grad[i] += 1.0;
                else if (map[i] == e_buf[i]) grad[i] += 0.5;
            }
        }
        const double scale = lr / static_cast<double>(sgd.batch_size);
        for (std::size_t i = 0; i < n; ++i) map[i] += scale * grad[i];
        map = project_to_simplex_values(std::move(map));

        samples_seen += sgd.batch_size;
        if (samples_seen > kSampleCap)
            fail(Errc::CapReached, "SIM optimization exceeded the training sample cap");

        if (samples_seen >= next_validation) {
            next_validation += sgd.validation_interval;
            const double score = validation_score(map);
            if (score > best_score) {
                best_score = score;
                best = map;
            }
            // A tie counts as no improvement; otherwise an exactly
            // stationary map (e.g. a delta density) would never terminate.
            if (score <= last_score) {
                map = best;
                lr *= sgd.lr_decay;
                last_score = best_score;
            } else {
                last_score = score;
            }
        }
    }

    const double sum = std::accumulate(best.begin(), best.end(), 0.0);
    for (double& x : best) x /= sum;
    return SaliencyGrid(shape, std::move(best));
}

SaliencyGrid derive_map(const DensityGrid& density, MetricId metric,
                        const DeriveConfig& config) {
    switch (metric) {
        case MetricId::AUC:
            return derive_auc_map(density);
        case MetricId::sAUC:
            if (!config.centerbias)
                fail(Errc::MissingCenterbias, "sAUC derivation requires a centerbias");
            return derive_sauc_map(density, *config.centerbias);
        case MetricId::NSS:
        case MetricId::IG:
            return derive_nss_ig_map(density);
        case MetricId::CC:
        case MetricId::KLDiv:
            return derive_cc_kldiv_map(density, config.empirical_sigma);
        case MetricId::SIM:
            return derive_sim_map(density, config);
    }
    fail(Errc::BadArgument, "unknown metric");
}

} // namespace salbench
