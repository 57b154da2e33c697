#include "salbench/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "salbench/png_io.hpp"
#include "salbench/transforms.hpp"

namespace salbench {

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_text_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) fail(Errc::IoError, "cannot open " + tmp + " for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f) fail(Errc::IoError, "short write to " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) fail(Errc::IoError, "cannot rename " + tmp + " to " + path);
}

// ---------------------------------------------------------------------------
// SALD container
// ---------------------------------------------------------------------------

namespace {

constexpr char kSaldMagic[4] = {'S', 'A', 'L', 'D'};
constexpr std::uint32_t kSaldVersion = 1;

void put_u32_le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

std::uint32_t get_u32_le(const unsigned char* p) {
    return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
           (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
}

void put_f64_le(std::string& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

double get_f64_le(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t(p[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

void save_sald(const std::string& path, GridShape shape,
               const std::vector<double>& values) {
    std::string out;
    out.reserve(16 + values.size() * 8);
    out.append(kSaldMagic, 4);
    put_u32_le(out, kSaldVersion);
    put_u32_le(out, static_cast<std::uint32_t>(shape.height));
    put_u32_le(out, static_cast<std::uint32_t>(shape.width));
    for (double v : values) put_f64_le(out, v);
    write_text_file_atomic(path, out);
}

std::pair<GridShape, std::vector<double>> load_sald(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(Errc::IoError, "cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(data.data());

    if (data.size() < 16 || std::memcmp(data.data(), kSaldMagic, 4) != 0)
        fail(Errc::FormatError, path + ": missing SALD magic");
    const std::uint32_t version = get_u32_le(p + 4);
    if (version != kSaldVersion)
        fail(Errc::FormatError, path + ": unsupported version " + std::to_string(version));
    const std::uint32_t height = get_u32_le(p + 8);
    const std::uint32_t width = get_u32_le(p + 12);
    if (height < 1 || width < 1)
        fail(Errc::FormatError, path + ": invalid grid size");
    const std::size_t count = std::size_t(height) * width;
    if (data.size() != 16 + count * 8)
        fail(Errc::FormatError, path + ": payload size mismatch");

    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) values[i] = get_f64_le(p + 16 + i * 8);
    return {GridShape{static_cast<int>(height), static_cast<int>(width)},
            std::move(values)};
}

} // namespace

void save_grid(const std::string& path, const SaliencyGrid& grid) {
    save_sald(path, grid.shape(), grid.values());
}

void save_density(const std::string& path, const DensityGrid& density) {
    save_sald(path, density.shape(), density.values());
}

SaliencyGrid load_grid(const std::string& path) {
    auto [shape, values] = load_sald(path);
    try {
        return SaliencyGrid(shape, std::move(values));
    } catch (const Error& e) {
        fail(Errc::InvariantViolation, path + ": " + e.what());
    }
}

DensityGrid load_density(const std::string& path) {
    auto [shape, values] = load_sald(path);
    try {
        return DensityGrid(shape, std::move(values));
    } catch (const Error& e) {
        fail(Errc::InvariantViolation, path + ": " + e.what());
    }
}

SaliencyGrid load_map_any(const std::string& path) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".png")
        return load_png8(path);
    return load_grid(path);
}

// ---------------------------------------------------------------------------
// CSV parsing
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(Errc::IoError, "cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

int parse_int_field(const std::string& field, const std::string& path, std::size_t line_no) {
    int value = 0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        fail(Errc::FormatError,
             path + ":" + std::to_string(line_no) + ": not an integer: '" + field + "'");
    return value;
}

} // namespace

std::vector<Stimulus> load_stimulus_index(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty() || lines[0] != "stimulus_id,width,height")
        fail(Errc::FormatError, path + ":1: expected header 'stimulus_id,width,height'");

    std::vector<Stimulus> stimuli;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != 3)
            fail(Errc::FormatError, path + ":" + std::to_string(i + 1) + ": expected 3 fields");
        const int width = parse_int_field(fields[1], path, i + 1);
        const int height = parse_int_field(fields[2], path, i + 1);
        if (fields[0].empty())
            fail(Errc::FormatError, path + ":" + std::to_string(i + 1) + ": empty stimulus id");
        if (width < 1 || height < 1)
            fail(Errc::InvariantViolation,
                 path + ":" + std::to_string(i + 1) + ": nonpositive stimulus size");
        for (const Stimulus& s : stimuli)
            if (s.id == fields[0])
                fail(Errc::InvariantViolation,
                     path + ":" + std::to_string(i + 1) + ": duplicate stimulus id '" +
                         fields[0] + "'");
        stimuli.push_back({fields[0], GridShape{height, width}});
    }
    return stimuli;
}

void save_stimulus_index(const std::string& path, const std::vector<Stimulus>& stimuli) {
    std::string out = "stimulus_id,width,height\n";
    for (const Stimulus& s : stimuli)
        out += s.id + "," + std::to_string(s.shape.width) + "," +
               std::to_string(s.shape.height) + "\n";
    write_text_file_atomic(path, out);
}

FixationDataset load_fixation_dataset(const std::string& fixations_csv,
                                      const std::string& stimuli_csv) {
    const std::vector<Stimulus> stimuli = load_stimulus_index(stimuli_csv);
    std::unordered_map<std::string, std::size_t> index;
    std::vector<FixationSet> sets(stimuli.size());
    for (std::size_t i = 0; i < stimuli.size(); ++i) index[stimuli[i].id] = i;

    const std::vector<std::string> lines = read_lines(fixations_csv);
    if (lines.empty() || lines[0] != "stimulus_id,x,y")
        fail(Errc::FormatError, fixations_csv + ":1: expected header 'stimulus_id,x,y'");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != 3)
            fail(Errc::FormatError,
                 fixations_csv + ":" + std::to_string(i + 1) + ": expected 3 fields");
        const auto it = index.find(fields[0]);
        if (it == index.end())
            fail(Errc::InvariantViolation, fixations_csv + ":" + std::to_string(i + 1) +
                                               ": unknown stimulus id '" + fields[0] + "'");
        const int x = parse_int_field(fields[1], fixations_csv, i + 1);
        const int y = parse_int_field(fields[2], fixations_csv, i + 1);
        const GridShape shape = stimuli[it->second].shape;
        if (x < 0 || x >= shape.width || y < 0 || y >= shape.height)
            fail(Errc::InvariantViolation,
                 fixations_csv + ":" + std::to_string(i + 1) + ": fixation (" +
                     fields[1] + "," + fields[2] + ") outside stimulus '" + fields[0] + "'");
        sets[it->second].points.push_back({y, x});
    }

    FixationDataset dataset;
    for (std::size_t i = 0; i < stimuli.size(); ++i)
        dataset.add(stimuli[i], std::move(sets[i]));
    return dataset;
}

void save_fixation_table(const std::string& path, const std::vector<FixationSet>& sets) {
    std::string out = "stimulus_id,x,y\n";
    for (const FixationSet& set : sets)
        for (const Fixation& f : set.points)
            out += set.stimulus_id + "," + std::to_string(f.col) + "," +
                   std::to_string(f.row) + "\n";
    write_text_file_atomic(path, out);
}

FixationSet load_fixations_for_shape(const std::string& path, GridShape shape) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty() || lines[0] != "stimulus_id,x,y")
        fail(Errc::FormatError, path + ":1: expected header 'stimulus_id,x,y'");
    FixationSet out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != 3)
            fail(Errc::FormatError, path + ":" + std::to_string(i + 1) + ": expected 3 fields");
        const int x = parse_int_field(fields[1], path, i + 1);
        const int y = parse_int_field(fields[2], path, i + 1);
        if (x < 0 || x >= shape.width || y < 0 || y >= shape.height)
            fail(Errc::InvariantViolation, path + ":" + std::to_string(i + 1) +
                                               ": fixation (" + fields[1] + "," + fields[2] +
                                               ") outside the grid");
        out.points.push_back({y, x});
        if (out.stimulus_id.empty()) out.stimulus_id = fields[0];
    }
    return out;
}

// ---------------------------------------------------------------------------
// 8-bit export
// ---------------------------------------------------------------------------

void export_png8(const SaliencyGrid& map, const std::string& path, bool equalize_first) {
    const SaliencyGrid src = equalize_first ? equalize(map) : map;
    const auto [min_it, max_it] = std::minmax_element(src.values().begin(), src.values().end());
    const double min = *min_it, max = *max_it;

    Gray8Image image;
    image.width = src.width();
    image.height = src.height();
    image.pixels.resize(src.size());
    if (max == min) {
        std::fill(image.pixels.begin(), image.pixels.end(), std::uint8_t{128});
    } else {
        const double scale = 255.0 / (max - min);
        for (std::size_t i = 0; i < src.size(); ++i) {
            const double level = std::floor((src[i] - min) * scale + 0.5);
            image.pixels[i] = static_cast<std::uint8_t>(std::clamp(level, 0.0, 255.0));
        }
    }
    write_gray8_png(path, image);
}

SaliencyGrid load_png8(const std::string& path) {
    const Gray8Image image = read_gray8_png(path);
    std::vector<double> values(image.pixels.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = static_cast<double>(image.pixels[i]);
    return SaliencyGrid(GridShape{image.height, image.width}, std::move(values));
}

SaliencyGrid quantize_256(const SaliencyGrid& map) {
    const auto [min_it, max_it] = std::minmax_element(map.values().begin(), map.values().end());
    const double min = *min_it, max = *max_it;
    std::vector<double> out(map.size(), 0.0);
    if (max > min) {
        const double scale = 256.0 / (max - min);
        for (std::size_t i = 0; i < map.size(); ++i) {
            const double bin = std::floor((map[i] - min) * scale);
            out[i] = std::min(bin, 255.0);
        }
    }
    return SaliencyGrid(map.shape(), std::move(out));
}

// ---------------------------------------------------------------------------
// Quartile visualization
// ---------------------------------------------------------------------------

QuartileRender render_density_quartiles(const DensityGrid& density,
                                        const FixationSet* fixations) {
    const std::size_t n = density.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (density[a] != density[b]) return density[a] > density[b];
        return a < b;
    });

    // Cumulative mass cuts at 0.25/0.5/0.75 assign each pixel to one of four
    // areas, densest first.
    std::vector<std::uint8_t> area(n, 3);
    QuartileRender render;
    render.area_pixels = {0, 0, 0, 0};
    double cumulative = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t px = order[i];
        int a = 0;
        if (cumulative >= 0.75) a = 3;
        else if (cumulative >= 0.5) a = 2;
        else if (cumulative >= 0.25) a = 1;
        area[px] = static_cast<std::uint8_t>(a);
        render.area_pixels[static_cast<std::size_t>(a)] += 1;
        cumulative += density[px];
    }

    // Shade by area (darker = denser); boundary pixels are drawn black.
    static constexpr double kLevels[4] = {40.0, 110.0, 180.0, 250.0};
    const int h = density.height(), w = density.width();
    std::vector<double> image(n);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * w + c;
            bool boundary = false;
            if (r + 1 < h && area[i + static_cast<std::size_t>(w)] != area[i]) boundary = true;
            if (c + 1 < w && area[i + 1] != area[i]) boundary = true;
            image[i] = boundary ? 0.0 : kLevels[area[i]];
        }
    }
    render.image = SaliencyGrid(density.shape(), std::move(image));

    if (fixations) {
        require_nonempty(*fixations);
        require_within(*fixations, density.shape());
        render.has_fixations = true;
        render.area_fixations = {0, 0, 0, 0};
        for (const Fixation& f : fixations->points) {
            const std::size_t i = static_cast<std::size_t>(f.row) * w + f.col;
            render.area_fixations[area[i]] += 1;
        }
        const double count = static_cast<double>(fixations->size());
        render.expected_per_area = count / 4.0;
        render.count_stddev = std::sqrt(count * 0.25 * 0.75);
    }
    return render;
}

// ---------------------------------------------------------------------------
// Fit serialization
// ---------------------------------------------------------------------------

namespace {
constexpr char kFitMagic[] = "SALFIT";
constexpr int kFitVersion = 1;
} // namespace

void save_fit(const std::string& path, const ProbabilisticModelFit& fit) {
    std::string out;
    out += std::string(kFitMagic) + " " + std::to_string(kFitVersion) + "\n";
    out += "alpha " + format_double(fit.alpha) + "\n";
    out += "map_min " + format_double(fit.map_min) + "\n";
    out += "map_max " + format_double(fit.map_max) + "\n";
    out += "nl_knots " + std::to_string(fit.nonlinearity.knots().size());
    for (double v : fit.nonlinearity.knots()) out += " " + format_double(v);
    out += "\ncb_knots " + std::to_string(fit.cb_profile.knots().size());
    for (double v : fit.cb_profile.knots()) out += " " + format_double(v);
    out += "\n";
    write_text_file_atomic(path, out);
}

ProbabilisticModelFit load_fit(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail(Errc::IoError, "cannot open " + path);

    std::string magic;
    int version = 0;
    if (!(f >> magic >> version) || magic != kFitMagic)
        fail(Errc::FormatError, path + ": not a fit file");
    if (version != kFitVersion)
        fail(Errc::FormatError, path + ": unsupported version " + std::to_string(version));

    const auto read_keyed_double = [&](const char* key) {
        std::string k;
        double v = 0.0;
        if (!(f >> k >> v) || k != key)
            fail(Errc::FormatError, path + ": expected '" + key + "'");
        return v;
    };
    const double alpha = read_keyed_double("alpha");
    const double map_min = read_keyed_double("map_min");
    const double map_max = read_keyed_double("map_max");

    const auto read_knots = [&](const char* key) {
        std::string k;
        std::size_t count = 0;
        if (!(f >> k >> count) || k != key || count < 2)
            fail(Errc::FormatError, path + ": expected '" + key + "'");
        std::vector<double> knots(count);
        for (double& v : knots)
            if (!(f >> v)) fail(Errc::FormatError, path + ": truncated knot list");
        return knots;
    };
    std::vector<double> nl = read_knots("nl_knots");
    std::vector<double> cb = read_knots("cb_knots");

    if (alpha <= 0.0)
        fail(Errc::InvariantViolation, path + ": alpha must be positive");
    for (std::size_t i = 0; i < nl.size(); ++i) {
        if (nl[i] < 0.0)
            fail(Errc::InvariantViolation, path + ": nonlinearity knots must be nonnegative");
        if (i > 0 && nl[i] < nl[i - 1])
            fail(Errc::InvariantViolation, path + ": nonlinearity knots must be nondecreasing");
    }
    return ProbabilisticModelFit{PiecewiseLinearFn(std::move(nl)),
                                 PiecewiseLinearFn(std::move(cb)), alpha, map_min, map_max};
}

// ---------------------------------------------------------------------------
// Experiment tables
// ---------------------------------------------------------------------------

std::string score_matrix_csv(const ScoreMatrix& matrix) {
    std::string out = "map,metric,mean,stderr\n";
    for (std::size_t m = 0; m < matrix.map_types.size(); ++m)
        for (std::size_t k = 0; k < matrix.metrics.size(); ++k)
            out += matrix.map_types[m] + "," + metric_name(matrix.metrics[k]) + "," +
                   format_double(matrix.scores[m][k]) + "," +
                   format_double(matrix.stderrs[m][k]) + "\n";
    return out;
}

std::string cc_approx_csv(const std::vector<CcApproxCell>& cells) {
    std::string out = "n_fix,sigma,cc_mean_empirical,cc_mean_normalized_empirical,difference\n";
    for (const CcApproxCell& cell : cells)
        out += std::to_string(cell.n_fix) + "," + format_double(cell.sigma) + "," +
               format_double(cell.cc_mean_empirical) + "," +
               format_double(cell.cc_mean_normalized) + "," +
               format_double(cell.cc_mean_normalized - cell.cc_mean_empirical) + "\n";
    return out;
}

std::string sim_count_csv(const SimCountTable& table) {
    std::string out = "map,eval_n_fix,mean_sim,stderr\n";
    for (std::size_t m = 0; m < table.map_labels.size(); ++m)
        for (std::size_t ci = 0; ci < table.eval_counts.size(); ++ci)
            out += table.map_labels[m] + "," + std::to_string(table.eval_counts[ci]) + "," +
                   format_double(table.mean_sim[m][ci]) + "," +
                   format_double(table.stderr_sim[m][ci]) + "\n";
    return out;
}

std::string binning_csv(const BinningResult& result) {
    std::string out = "map,binning,auc\n";
    out += "density,none," + format_double(result.auc_density) + "\n";
    out += "density,256," + format_double(result.auc_density_binned) + "\n";
    out += "equalized,none," + format_double(result.auc_equalized) + "\n";
    out += "equalized,256," + format_double(result.auc_equalized_binned) + "\n";
    return out;
}

} // namespace salbench
