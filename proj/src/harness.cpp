#include "salbench/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "salbench/io.hpp"
#include "salbench/probabilistic.hpp"
#include "salbench/transforms.hpp"

namespace salbench {

DensityGrid gaussian_mixture_density(GridShape shape,
                                     std::span<const GaussianComponent> components) {
    if (components.empty())
        fail(Errc::BadArgument, "mixture needs at least one component");
    std::vector<double> grid(shape.pixels(), 0.0);
    for (const GaussianComponent& comp : components) {
        const double cr = comp.row_frac * shape.height;
        const double cc = comp.col_frac * shape.width;
        const double sigma = comp.sigma_frac * shape.height;
        const double inv_2s2 = 1.0 / (2.0 * sigma * sigma);
        std::size_t i = 0;
        for (int r = 0; r < shape.height; ++r) {
            for (int c = 0; c < shape.width; ++c, ++i) {
                const double dr = (r + 0.5) - cr;
                const double dc = (c + 0.5) - cc;
                grid[i] += comp.weight * std::exp(-(dr * dr + dc * dc) * inv_2s2);
            }
        }
    }
    return density_from_grid(shape, std::move(grid));
}

DensityGrid benchmark_density(GridShape shape) {
    static const GaussianComponent components[] = {
        {0.30, 0.32, 0.045, 0.45},
        {0.42, 0.68, 0.095, 0.34},
        {0.72, 0.46, 0.160, 0.21},
    };
    return gaussian_mixture_density(shape, components);
}

DensityGrid centerbias_blob_density(GridShape shape) {
    static const GaussianComponent components[] = {{0.5, 0.5, 0.28, 1.0}};
    return gaussian_mixture_density(shape, components);
}

DensityGrid make_kde_centerbias(GridShape shape, std::uint64_t seed) {
    const DensityGrid blob = centerbias_blob_density(shape);
    Rng rng(Rng::derive_seed(seed, /*stream=*/0xcb));
    // 20 pseudo-stimuli of 250 fixations each.
    FixationDataset dataset;
    const CategoricalSampler sampler(blob);
    for (int s = 0; s < 20; ++s) {
        FixationSet fix = sampler.draw_set(rng, 250);
        dataset.add({"cb" + std::to_string(s), shape}, std::move(fix));
    }
    const CenterBiasKde kde = fit_kde_centerbias(dataset, 0.22);
    return kde_density_for_size(kde, shape, std::nullopt, dataset);
}

double scaled_sigma(GridShape shape) { return shape.height * 35.0 / 768.0; }

FixationSet sample_fixations(const DensityGrid& density, int n, Rng& rng) {
    if (n < 1)
        fail(Errc::BadArgument, "sample count must be at least 1");
    return CategoricalSampler(density).draw_set(rng, n);
}

namespace {

double mean_of(const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stderr_of(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double mean = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(xs.size() - 1);
    return std::sqrt(var / static_cast<double>(xs.size()));
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs a metric evaluation, mapping numeric degeneracies (constant maps and
// the like) to NaN while contract errors keep propagating.
template <typename Fn>
double numeric_or_nan(Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        if (cli_exit_code(e.code()) == 3) return kNaN;
        throw;
    }
}

} // namespace

ScoreMatrix run_crossmetric_experiment(const DensityGrid& density,
                                       const DensityGrid& centerbias,
                                       const ExperimentConfig& config) {
    if (config.n_sets < 1 || config.n_fix < 1)
        fail(Errc::BadArgument, "n_sets and n_fix must be at least 1");
    if (!(density.shape() == centerbias.shape()))
        fail(Errc::ShapeMismatch, "centerbias shape differs from density");

    const GridShape shape = density.shape();
    const double sigma = config.sigma > 0.0 ? config.sigma : scaled_sigma(shape);

    DeriveConfig sim_config;
    sim_config.empirical_sigma = sigma;
    sim_config.fixations_per_image = config.n_fix;
    sim_config.sgd = scale_sgd_to_grid(SgdConfig{}, shape);
    sim_config.sgd.seed = Rng::derive_seed(config.seed, /*stream=*/3);

    ScoreMatrix matrix;
    matrix.map_types = {"AUC", "sAUC", "NSS_IG", "CC_KLDiv", "SIM"};
    matrix.metrics.assign(std::begin(kAllMetrics), std::end(kAllMetrics));

    std::vector<SaliencyGrid> maps;
    maps.push_back(derive_auc_map(density));
    maps.push_back(derive_sauc_map(density, centerbias));
    maps.push_back(derive_nss_ig_map(density));
    maps.push_back(derive_cc_kldiv_map(density, sigma));
    maps.push_back(derive_sim_map(density, sim_config));

    // Density view of each map for the IG column.
    std::vector<std::optional<DensityGrid>> map_densities;
    for (const SaliencyGrid& map : maps) {
        try {
            map_densities.emplace_back(normalize_to_distribution(map));
        } catch (const Error&) {
            map_densities.emplace_back(std::nullopt);
        }
    }

    const std::size_t n_maps = maps.size();
    const std::size_t n_metrics = matrix.metrics.size();
    matrix.per_set.assign(n_maps, std::vector<std::vector<double>>(
                                      n_metrics, std::vector<double>(config.n_sets)));

    const CategoricalSampler fix_sampler(density);
    const CategoricalSampler nonfix_sampler(centerbias);

    for (int t = 0; t < config.n_sets; ++t) {
        Rng fix_rng(Rng::derive_seed(config.seed, 10, static_cast<std::uint64_t>(t)));
        Rng nonfix_rng(Rng::derive_seed(config.seed, 11, static_cast<std::uint64_t>(t)));
        const FixationSet fix = fix_sampler.draw_set(fix_rng, config.n_fix);
        const FixationSet nonfix = nonfix_sampler.draw_set(nonfix_rng, config.n_fix);
        const SaliencyGrid empirical = empirical_saliency_map(fix, shape, sigma);

        for (std::size_t m = 0; m < n_maps; ++m) {
            const SaliencyGrid& map = maps[m];
            for (std::size_t k = 0; k < n_metrics; ++k) {
                double value = kNaN;
                switch (matrix.metrics[k]) {
                    case MetricId::AUC:
                        value = auc(map, fix).value;
                        break;
                    case MetricId::sAUC:
                        value = sauc(map, fix, nonfix).value;
                        break;
                    case MetricId::NSS:
                        value = numeric_or_nan([&] { return nss(map, fix).value; });
                        break;
                    case MetricId::IG:
                        value = map_densities[m]
                                    ? ig(*map_densities[m], fix, centerbias).value
                                    : kNaN;
                        break;
                    case MetricId::CC:
                        value = numeric_or_nan([&] { return cc(map, empirical).value; });
                        break;
                    case MetricId::KLDiv:
                        value = numeric_or_nan([&] { return kldiv(empirical, map).value; });
                        break;
                    case MetricId::SIM:
                        value = numeric_or_nan([&] { return sim(map, empirical).value; });
                        break;
                }
                matrix.per_set[m][k][static_cast<std::size_t>(t)] = value;
            }
        }
    }

    matrix.scores.assign(n_maps, std::vector<double>(n_metrics, kNaN));
    matrix.stderrs.assign(n_maps, std::vector<double>(n_metrics, kNaN));
    for (std::size_t m = 0; m < n_maps; ++m) {
        for (std::size_t k = 0; k < n_metrics; ++k) {
            const std::vector<double>& xs = matrix.per_set[m][k];
            const bool any_nan =
                std::any_of(xs.begin(), xs.end(), [](double x) { return std::isnan(x); });
            if (any_nan) continue;
            matrix.scores[m][k] = mean_of(xs);
            matrix.stderrs[m][k] = stderr_of(xs);
        }
    }
    return matrix;
}

std::vector<CcApproxCell> run_cc_approximation_experiment(
    const DensityGrid& density, int n_sets, std::span<const int> n_fix_list,
    std::span<const double> sigma_list, std::uint64_t seed) {
    if (n_sets < 1 || n_fix_list.empty() || sigma_list.empty())
        fail(Errc::BadArgument, "cc approximation experiment needs sets, counts and sigmas");

    const GridShape shape = density.shape();
    const std::size_t n = shape.pixels();
    const CategoricalSampler sampler(density);
    std::vector<CcApproxCell> cells;

    std::uint64_t cell_index = 0;
    for (const int n_fix : n_fix_list) {
        for (const double sigma : sigma_list) {
            // Build phase: average plain and z-scored empirical maps.
            Rng build_rng(Rng::derive_seed(seed, 20, cell_index));
            std::vector<double> mean_emp(n, 0.0), mean_norm(n, 0.0);
            for (int t = 0; t < n_sets; ++t) {
                const FixationSet fix = sampler.draw_set(build_rng, n_fix);
                const SaliencyGrid emp = empirical_saliency_map(fix, shape, sigma);
                const SaliencyGrid norm = zscore_normalize(emp);
                for (std::size_t i = 0; i < n; ++i) {
                    mean_emp[i] += emp[i];
                    mean_norm[i] += norm[i];
                }
            }
            const double inv = 1.0 / static_cast<double>(n_sets);
            for (std::size_t i = 0; i < n; ++i) {
                mean_emp[i] *= inv;
                mean_norm[i] *= inv;
            }
            const SaliencyGrid map_emp(shape, std::move(mean_emp));
            const SaliencyGrid map_norm(shape, std::move(mean_norm));

            // Evaluation phase: fresh samples scored against both maps.
            Rng eval_rng(Rng::derive_seed(seed, 21, cell_index));
            double acc_emp = 0.0, acc_norm = 0.0;
            for (int t = 0; t < n_sets; ++t) {
                const FixationSet fix = sampler.draw_set(eval_rng, n_fix);
                const SaliencyGrid emp = empirical_saliency_map(fix, shape, sigma);
                acc_emp += cc(map_emp, emp).value;
                acc_norm += cc(map_norm, emp).value;
            }
            cells.push_back({n_fix, sigma, acc_emp / n_sets, acc_norm / n_sets});
            ++cell_index;
        }
    }
    return cells;
}

SimCountTable run_sim_count_experiment(const DensityGrid& density,
                                       std::span<const int> fix_counts,
                                       const ExperimentConfig& config) {
    if (fix_counts.empty())
        fail(Errc::BadArgument, "sim count experiment needs fixation counts");
    const GridShape shape = density.shape();
    const double sigma = config.sigma > 0.0 ? config.sigma : scaled_sigma(shape);

    SimCountTable table;
    table.eval_counts.assign(fix_counts.begin(), fix_counts.end());

    std::vector<SaliencyGrid> maps;
    for (const int count : fix_counts) {
        DeriveConfig cfg;
        cfg.empirical_sigma = sigma;
        cfg.fixations_per_image = count;
        cfg.sgd = scale_sgd_to_grid(SgdConfig{}, shape);
        cfg.sgd.seed = Rng::derive_seed(config.seed, 30, static_cast<std::uint64_t>(count));
        maps.push_back(derive_sim_map(density, cfg));
        table.map_labels.push_back("SIM_" + std::to_string(count));
    }
    maps.push_back(derive_cc_kldiv_map(density, sigma));
    table.map_labels.push_back("CC");

    const std::size_t n_maps = maps.size();
    const std::size_t n_counts = table.eval_counts.size();
    const CategoricalSampler sampler(density);

    table.per_set.assign(n_counts, std::vector<std::vector<double>>(
                                       n_maps, std::vector<double>(config.n_sets)));
    for (std::size_t ci = 0; ci < n_counts; ++ci) {
        for (int t = 0; t < config.n_sets; ++t) {
            Rng rng(Rng::derive_seed(config.seed, 31,
                                     ci * 1000003ull + static_cast<std::uint64_t>(t)));
            const FixationSet fix = sampler.draw_set(rng, table.eval_counts[ci]);
            const SaliencyGrid empirical = empirical_saliency_map(fix, shape, sigma);
            for (std::size_t m = 0; m < n_maps; ++m)
                table.per_set[ci][m][static_cast<std::size_t>(t)] =
                    sim(maps[m], empirical).value;
        }
    }

    table.mean_sim.assign(n_maps, std::vector<double>(n_counts, 0.0));
    table.stderr_sim.assign(n_maps, std::vector<double>(n_counts, 0.0));
    for (std::size_t m = 0; m < n_maps; ++m) {
        for (std::size_t ci = 0; ci < n_counts; ++ci) {
            table.mean_sim[m][ci] = mean_of(table.per_set[ci][m]);
            table.stderr_sim[m][ci] = stderr_of(table.per_set[ci][m]);
        }
    }
    return table;
}

BinningResult run_binning_experiment(const DensityGrid& density,
                                     const FixationSet& fixations) {
    require_nonempty(fixations);
    require_within(fixations, density.shape());
    const SaliencyGrid raw = density.as_saliency();
    const SaliencyGrid equalized = equalize(raw);
    BinningResult out{};
    out.auc_density = auc(raw, fixations).value;
    out.auc_density_binned = auc(quantize_256(raw), fixations).value;
    out.auc_equalized = auc(equalized, fixations).value;
    out.auc_equalized_binned = auc(quantize_256(equalized), fixations).value;
    return out;
}

} // namespace salbench
