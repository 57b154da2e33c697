// Command-line interface for the saliency benchmarking toolkit.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "salbench/derive.hpp"
#include "salbench/harness.hpp"
#include "salbench/io.hpp"
#include "salbench/metrics.hpp"
#include "salbench/probabilistic.hpp"
#include "salbench/transforms.hpp"

namespace {

using namespace salbench;

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

MetricId parse_metric(const std::string& name) {
    const auto metric = metric_from_name(name);
    if (!metric)
        fail(Errc::BadArgument, "unknown metric '" + name + "'");
    return *metric;
}

GridShape parse_size(const std::string& text) {
    const auto x = text.find('x');
    if (x == std::string::npos)
        fail(Errc::BadArgument, "size must be WxH, e.g. 64x64");
    try {
        const int width = std::stoi(text.substr(0, x));
        const int height = std::stoi(text.substr(x + 1));
        if (width < 1 || height < 1)
            fail(Errc::BadArgument, "size must be positive");
        return GridShape{height, width};
    } catch (const std::invalid_argument&) {
        fail(Errc::BadArgument, "size must be WxH, e.g. 64x64");
    } catch (const std::out_of_range&) {
        fail(Errc::BadArgument, "size out of range");
    }
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::string cur;
    for (char ch : text + ",") {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(std::stoi(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (out.empty()) fail(Errc::BadArgument, "empty list");
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::string cur;
    for (char ch : text + ",") {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(std::stod(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (out.empty()) fail(Errc::BadArgument, "empty list");
    return out;
}

void write_map(const SaliencyGrid& map, const std::string& path) {
    if (has_suffix(path, ".png"))
        export_png8(map, path, /*equalize_first=*/false);
    else
        save_grid(path, map);
}

// --- derive -----------------------------------------------------------------

struct DeriveArgs {
    std::string density_path, centerbias_path, out_path;
    std::string metric = "AUC";
    double sigma = 35.0;
    int fixations_per_image = 100;
    std::uint64_t seed = 0;
};

int run_derive(const DeriveArgs& args) {
    const DensityGrid density = load_density(args.density_path);
    const MetricId metric = parse_metric(args.metric);

    DeriveConfig config;
    config.empirical_sigma = args.sigma;
    config.fixations_per_image = args.fixations_per_image;
    config.sgd = scale_sgd_to_grid(SgdConfig{}, density.shape());
    config.sgd.seed = args.seed;
    if (!args.centerbias_path.empty())
        config.centerbias = load_density(args.centerbias_path);

    write_map(derive_map(density, metric, config), args.out_path);
    return 0;
}

// --- evaluate ----------------------------------------------------------------

struct EvaluateArgs {
    std::string map_path, fixations_path, stimuli_path, baseline_path, out_path;
    std::string metric = "AUC";
    double empirical_sigma = 35.0;
};

int run_evaluate(const EvaluateArgs& args) {
    const SaliencyGrid map = load_map_any(args.map_path);
    const FixationDataset dataset =
        load_fixation_dataset(args.fixations_path, args.stimuli_path);
    const MetricId metric = parse_metric(args.metric);

    std::optional<DensityGrid> baseline;
    std::optional<DensityGrid> map_density;
    if (metric == MetricId::IG) {
        if (args.baseline_path.empty())
            fail(Errc::BadArgument, "IG evaluation requires --baseline");
        baseline = load_density(args.baseline_path);
        map_density = normalize_to_distribution(map);
    }

    std::string csv = "stimulus_id,metric,score\n";
    double total = 0.0;
    std::size_t scored = 0;
    for (std::size_t s = 0; s < dataset.size(); ++s) {
        const FixationSet& fix = dataset.fixations(s);
        if (fix.empty()) continue;
        if (!(dataset.stimulus(s).shape == map.shape()))
            fail(Errc::ShapeMismatch,
                 "stimulus " + dataset.stimulus(s).id + " size differs from the map");

        double value = 0.0;
        switch (metric) {
            case MetricId::AUC:
                value = auc(map, fix).value;
                break;
            case MetricId::sAUC: {
                FixationSet others;
                for (std::size_t o = 0; o < dataset.size(); ++o) {
                    if (o == s) continue;
                    const auto& pts = dataset.fixations(o).points;
                    others.points.insert(others.points.end(), pts.begin(), pts.end());
                }
                value = sauc(map, fix, others).value;
                break;
            }
            case MetricId::NSS:
                value = nss(map, fix).value;
                break;
            case MetricId::IG:
                value = ig(*map_density, fix, *baseline).value;
                break;
            case MetricId::CC:
                value = cc(map, empirical_saliency_map(fix, map.shape(),
                                                       args.empirical_sigma)).value;
                break;
            case MetricId::KLDiv:
                value = kldiv(empirical_saliency_map(fix, map.shape(), args.empirical_sigma),
                              map).value;
                break;
            case MetricId::SIM:
                value = sim(map, empirical_saliency_map(fix, map.shape(),
                                                        args.empirical_sigma)).value;
                break;
        }
        csv += dataset.stimulus(s).id + "," + metric_name(metric) + "," +
               format_double(value) + "\n";
        total += value;
        ++scored;
    }
    if (scored == 0)
        fail(Errc::EmptyDataset, "no stimulus has fixations");
    csv += "mean," + std::string(metric_name(metric)) + "," +
           format_double(total / static_cast<double>(scored)) + "\n";

    if (args.out_path.empty())
        std::cout << csv;
    else
        write_text_file_atomic(args.out_path, csv);
    return 0;
}

// --- convert / apply-fit -------------------------------------------------------

struct ConvertArgs {
    std::string maps_dir, fixations_path, stimuli_path, out_path;
    int segments_nl = 20;
    int segments_cb = 12;
};

int run_convert(const ConvertArgs& args) {
    const FixationDataset dataset =
        load_fixation_dataset(args.fixations_path, args.stimuli_path);
    std::vector<SaliencyGrid> maps;
    for (std::size_t s = 0; s < dataset.size(); ++s) {
        const std::string base = args.maps_dir + "/" + dataset.stimulus(s).id;
        std::string path;
        if (std::filesystem::exists(base + ".sald")) path = base + ".sald";
        else if (std::filesystem::exists(base + ".png")) path = base + ".png";
        else fail(Errc::IoError, "no map found for stimulus '" + dataset.stimulus(s).id +
                                     "' under " + args.maps_dir);
        maps.push_back(load_map_any(path));
    }
    ConversionOptions options;
    options.segments_nl = args.segments_nl;
    options.segments_cb = args.segments_cb;
    save_fit(args.out_path, fit_conversion(maps, dataset, options));
    return 0;
}

struct ApplyFitArgs {
    std::string fit_path, map_path, out_path;
};

int run_apply_fit(const ApplyFitArgs& args) {
    const ProbabilisticModelFit fit = load_fit(args.fit_path);
    const SaliencyGrid map = load_map_any(args.map_path);
    save_density(args.out_path, apply_fit(fit, map));
    return 0;
}

// --- centerbias -----------------------------------------------------------------

struct CenterbiasArgs {
    std::string fixations_path, stimuli_path, out_path, size_text, exclude;
    double bandwidth = 0.22;
    std::string crossvalidate;
};

int run_centerbias(const CenterbiasArgs& args) {
    const FixationDataset dataset =
        load_fixation_dataset(args.fixations_path, args.stimuli_path);
    const GridShape shape = parse_size(args.size_text);

    double bandwidth = args.bandwidth;
    if (!args.crossvalidate.empty())
        bandwidth = crossvalidate_bandwidth(dataset, parse_double_list(args.crossvalidate));

    const CenterBiasKde kde = fit_kde_centerbias(dataset, bandwidth);
    const std::optional<std::string> exclude =
        args.exclude.empty() ? std::nullopt : std::optional<std::string>(args.exclude);
    save_density(args.out_path, kde_density_for_size(kde, shape, exclude, dataset));
    return 0;
}

// --- benchmark / experiments ------------------------------------------------------

struct BenchmarkArgs {
    std::string density_path, centerbias_path, out_path;
    int n_sets = 1000;
    int n_fix = 100;
    std::uint64_t seed = 0;
};

int run_benchmark(const BenchmarkArgs& args) {
    const DensityGrid density = load_density(args.density_path);
    const DensityGrid centerbias = load_density(args.centerbias_path);
    ExperimentConfig config;
    config.n_sets = args.n_sets;
    config.n_fix = args.n_fix;
    config.seed = args.seed;
    const ScoreMatrix matrix = run_crossmetric_experiment(density, centerbias, config);
    write_text_file_atomic(args.out_path, score_matrix_csv(matrix));
    return 0;
}

struct CcApproxArgs {
    std::string density_path, out_path;
    std::string n_fix_list = "1,10,100";
    std::string sigma_list;
    int n_sets = 10000;
    std::uint64_t seed = 0;
};

int run_cc_approx(const CcApproxArgs& args) {
    const DensityGrid density = load_density(args.density_path);
    const std::vector<int> n_fix = parse_int_list(args.n_fix_list);
    std::vector<double> sigmas;
    if (args.sigma_list.empty()) {
        const double base = scaled_sigma(density.shape());
        sigmas = {base / 3.0, base, base * 3.0};
    } else {
        sigmas = parse_double_list(args.sigma_list);
    }
    const auto cells =
        run_cc_approximation_experiment(density, args.n_sets, n_fix, sigmas, args.seed);
    write_text_file_atomic(args.out_path, cc_approx_csv(cells));
    return 0;
}

struct SimCountArgs {
    std::string density_path, out_path;
    std::string counts = "1,10,100,1000";
    int n_sets = 1000;
    std::uint64_t seed = 0;
};

int run_sim_count(const SimCountArgs& args) {
    const DensityGrid density = load_density(args.density_path);
    ExperimentConfig config;
    config.n_sets = args.n_sets;
    config.seed = args.seed;
    const SimCountTable table =
        run_sim_count_experiment(density, parse_int_list(args.counts), config);
    write_text_file_atomic(args.out_path, sim_count_csv(table));
    return 0;
}

struct BinningArgs {
    std::string density_path, fixations_path, out_path;
    int n = 50000;
    std::uint64_t seed = 0;
};

int run_binning(const BinningArgs& args) {
    const DensityGrid density = load_density(args.density_path);
    FixationSet fixations;
    if (!args.fixations_path.empty()) {
        fixations = load_fixations_for_shape(args.fixations_path, density.shape());
    } else {
        Rng rng(Rng::derive_seed(args.seed, /*stream=*/0xb1));
        fixations = sample_fixations(density, args.n, rng);
    }
    write_text_file_atomic(args.out_path, binning_csv(run_binning_experiment(density, fixations)));
    return 0;
}

// --- sample / visualize / synth-density ----------------------------------------------

struct SampleArgs {
    std::string density_path, out_path;
    int n = 100;
    std::uint64_t seed = 0;
};

int run_sample(const SampleArgs& args) {
    const DensityGrid density = load_density(args.density_path);
    Rng rng(Rng::derive_seed(args.seed, /*stream=*/0x5a));
    FixationSet fixations = sample_fixations(density, args.n, rng);
    fixations.stimulus_id = "stim";
    save_fixation_table(args.out_path, {fixations});
    return 0;
}

struct VisualizeArgs {
    std::string density_path, fixations_path, out_path;
};

int run_visualize(const VisualizeArgs& args) {
    const DensityGrid density = load_density(args.density_path);
    std::optional<FixationSet> fixations;
    if (!args.fixations_path.empty())
        fixations = load_fixations_for_shape(args.fixations_path, density.shape());

    const QuartileRender render =
        render_density_quartiles(density, fixations ? &*fixations : nullptr);
    export_png8(render.image, args.out_path, /*equalize_first=*/false);

    std::cout << "area,pixels";
    if (render.has_fixations) std::cout << ",fixations";
    std::cout << "\n";
    for (int a = 0; a < 4; ++a) {
        std::cout << (a + 1) << "," << render.area_pixels[a];
        if (render.has_fixations) std::cout << "," << render.area_fixations[a];
        std::cout << "\n";
    }
    if (render.has_fixations) {
        std::cout << "expected per area: " << format_double(render.expected_per_area)
                  << " (sd " << format_double(render.count_stddev) << ")\n";
    }
    return 0;
}

struct SynthArgs {
    std::string size_text = "64x64";
    std::string kind = "benchmark";
    std::uint64_t seed = 0;
    std::string out_path;
};

int run_synth(const SynthArgs& args) {
    const GridShape shape = parse_size(args.size_text);
    if (args.kind == "benchmark")
        save_density(args.out_path, benchmark_density(shape));
    else if (args.kind == "blob")
        save_density(args.out_path, centerbias_blob_density(shape));
    else if (args.kind == "kde-cb")
        save_density(args.out_path, make_kde_centerbias(shape, args.seed));
    else
        fail(Errc::BadArgument, "unknown kind '" + args.kind + "'");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Saliency model benchmarking: metric-specific map derivation, "
                 "metric evaluation, and probabilistic model tooling"};
    app.require_subcommand(1);

    DeriveArgs derive_args;
    auto* derive_cmd = app.add_subcommand(
        "derive", "Derive the saliency map that maximizes a metric for a density");
    derive_cmd->add_option("--density", derive_args.density_path)->required();
    derive_cmd->add_option("--metric", derive_args.metric)->required();
    derive_cmd->add_option("--centerbias", derive_args.centerbias_path);
    derive_cmd->add_option("--sigma", derive_args.sigma);
    derive_cmd->add_option("--fixations-per-image", derive_args.fixations_per_image);
    derive_cmd->add_option("--seed", derive_args.seed);
    derive_cmd->add_option("--out", derive_args.out_path)->required();

    EvaluateArgs evaluate_args;
    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "Score a saliency map against fixations");
    evaluate_cmd->add_option("--map", evaluate_args.map_path)->required();
    evaluate_cmd->add_option("--fixations", evaluate_args.fixations_path)->required();
    evaluate_cmd->add_option("--stimuli", evaluate_args.stimuli_path)->required();
    evaluate_cmd->add_option("--metric", evaluate_args.metric)->required();
    evaluate_cmd->add_option("--baseline", evaluate_args.baseline_path);
    evaluate_cmd->add_option("--empirical-sigma", evaluate_args.empirical_sigma);
    evaluate_cmd->add_option("--out", evaluate_args.out_path);

    ConvertArgs convert_args;
    auto* convert_cmd = app.add_subcommand(
        "convert", "Fit a probabilistic model from per-stimulus saliency maps");
    convert_cmd->add_option("--maps", convert_args.maps_dir)->required();
    convert_cmd->add_option("--fixations", convert_args.fixations_path)->required();
    convert_cmd->add_option("--stimuli", convert_args.stimuli_path)->required();
    convert_cmd->add_option("--out", convert_args.out_path)->required();
    convert_cmd->add_option("--segments-nl", convert_args.segments_nl);
    convert_cmd->add_option("--segments-cb", convert_args.segments_cb);

    ApplyFitArgs apply_args;
    auto* apply_cmd =
        app.add_subcommand("apply-fit", "Apply a conversion fit to a saliency map");
    apply_cmd->add_option("--fit", apply_args.fit_path)->required();
    apply_cmd->add_option("--map", apply_args.map_path)->required();
    apply_cmd->add_option("--out", apply_args.out_path)->required();

    CenterbiasArgs cb_args;
    auto* cb_cmd =
        app.add_subcommand("centerbias", "Estimate a center-bias density from fixations");
    cb_cmd->add_option("--fixations", cb_args.fixations_path)->required();
    cb_cmd->add_option("--stimuli", cb_args.stimuli_path)->required();
    cb_cmd->add_option("--bandwidth", cb_args.bandwidth);
    cb_cmd->add_option("--crossvalidate", cb_args.crossvalidate);
    cb_cmd->add_option("--size", cb_args.size_text)->required();
    cb_cmd->add_option("--out", cb_args.out_path)->required();
    cb_cmd->add_option("--exclude", cb_args.exclude);

    BenchmarkArgs bench_args;
    auto* bench_cmd = app.add_subcommand(
        "benchmark", "Cross-metric score matrix of the five derived map types");
    bench_cmd->add_option("--density", bench_args.density_path)->required();
    bench_cmd->add_option("--centerbias", bench_args.centerbias_path)->required();
    bench_cmd->add_option("--n-sets", bench_args.n_sets);
    bench_cmd->add_option("--n-fix", bench_args.n_fix);
    bench_cmd->add_option("--seed", bench_args.seed);
    bench_cmd->add_option("--out", bench_args.out_path)->required();

    auto* experiment_cmd = app.add_subcommand("experiment", "Reproduction experiments");
    experiment_cmd->require_subcommand(1);

    CcApproxArgs cc_args;
    auto* cc_cmd = experiment_cmd->add_subcommand(
        "cc-approx", "Mean empirical vs mean normalized empirical map under CC");
    cc_cmd->add_option("--density", cc_args.density_path)->required();
    cc_cmd->add_option("--n-sets", cc_args.n_sets);
    cc_cmd->add_option("--n-fix-list", cc_args.n_fix_list);
    cc_cmd->add_option("--sigma-list", cc_args.sigma_list);
    cc_cmd->add_option("--seed", cc_args.seed);
    cc_cmd->add_option("--out", cc_args.out_path)->required();

    SimCountArgs sim_args;
    auto* sim_cmd = experiment_cmd->add_subcommand(
        "sim-count", "SIM map dependence on the fixation count per sample");
    sim_cmd->add_option("--density", sim_args.density_path)->required();
    sim_cmd->add_option("--counts", sim_args.counts);
    sim_cmd->add_option("--n-sets", sim_args.n_sets);
    sim_cmd->add_option("--seed", sim_args.seed);
    sim_cmd->add_option("--out", sim_args.out_path)->required();

    BinningArgs bin_args;
    auto* bin_cmd = experiment_cmd->add_subcommand(
        "binning", "AUC sensitivity to 8-bit quantization");
    bin_cmd->add_option("--density", bin_args.density_path)->required();
    bin_cmd->add_option("--fixations", bin_args.fixations_path);
    bin_cmd->add_option("--n", bin_args.n);
    bin_cmd->add_option("--seed", bin_args.seed);
    bin_cmd->add_option("--out", bin_args.out_path)->required();

    SampleArgs sample_args;
    auto* sample_cmd = app.add_subcommand("sample", "Sample fixations from a density");
    sample_cmd->add_option("--density", sample_args.density_path)->required();
    sample_cmd->add_option("--n", sample_args.n)->required();
    sample_cmd->add_option("--seed", sample_args.seed);
    sample_cmd->add_option("--out", sample_args.out_path)->required();

    VisualizeArgs vis_args;
    auto* vis_cmd = app.add_subcommand(
        "visualize", "Equal-mass quartile rendering of a density");
    vis_cmd->add_option("--density", vis_args.density_path)->required();
    vis_cmd->add_option("--fixations", vis_args.fixations_path);
    vis_cmd->add_option("--out", vis_args.out_path)->required();

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand(
        "synth-density", "Write one of the bundled synthetic densities");
    synth_cmd->add_option("--size", synth_args.size_text);
    synth_cmd->add_option("--kind", synth_args.kind)
        ->check(CLI::IsMember({"benchmark", "blob", "kde-cb"}));
    synth_cmd->add_option("--seed", synth_args.seed);
    synth_cmd->add_option("--out", synth_args.out_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*derive_cmd) return run_derive(derive_args);
        if (*evaluate_cmd) return run_evaluate(evaluate_args);
        if (*convert_cmd) return run_convert(convert_args);
        if (*apply_cmd) return run_apply_fit(apply_args);
        if (*cb_cmd) return run_centerbias(cb_args);
        if (*bench_cmd) return run_benchmark(bench_args);
        if (*cc_cmd) return run_cc_approx(cc_args);
        if (*sim_cmd) return run_sim_count(sim_args);
        if (*bin_cmd) return run_binning(bin_args);
        if (*sample_cmd) return run_sample(sample_args);
        if (*vis_cmd) return run_visualize(vis_args);
        if (*synth_cmd) return run_synth(synth_args);
    } catch (const Error& e) {
        std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
        return cli_exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
