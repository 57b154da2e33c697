#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "salbench/grid.hpp"
#include "salbench/harness.hpp"
#include "salbench/probabilistic.hpp"

namespace salbench {

/// Shortest decimal form that round-trips a double (17 significant digits).
std::string format_double(double value);

/// Writes content to path via a temporary file and rename.
void write_text_file_atomic(const std::string& path, const std::string& content);

// --- SALD grid container -----------------------------------------------
// Magic "SALD", version u32, height u32, width u32, then height*width
// float64 values, all little-endian, row-major. Density-consuming loaders
// additionally validate the density invariants.

void save_grid(const std::string& path, const SaliencyGrid& grid);
void save_density(const std::string& path, const DensityGrid& density);
SaliencyGrid load_grid(const std::string& path);
DensityGrid load_density(const std::string& path);

/// Loads a saliency map from .png (8-bit grayscale, values 0..255) or .sald.
SaliencyGrid load_map_any(const std::string& path);

// --- CSV fixation data ---------------------------------------------------
// StimulusIndex: header "stimulus_id,width,height".
// FixationTable: header "stimulus_id,x,y" with x = column, y = row.

std::vector<Stimulus> load_stimulus_index(const std::string& path);
void save_stimulus_index(const std::string& path, const std::vector<Stimulus>& stimuli);

FixationDataset load_fixation_dataset(const std::string& fixations_csv,
                                      const std::string& stimuli_csv);
void save_fixation_table(const std::string& path,
                         const std::vector<FixationSet>& sets);

/// Fixation table rows merged into one set and validated against a single
/// grid shape (for commands that take fixations without a stimulus index).
FixationSet load_fixations_for_shape(const std::string& path, GridShape shape);

// --- 8-bit export ---------------------------------------------------------

/// Linearly maps [min, max] to 0..255 (round half up) and writes a grayscale
/// PNG; constant maps map to 128. With equalize_first the map is equalized
/// before quantization, which preserves the value ranking almost exactly.
void export_png8(const SaliencyGrid& map, const std::string& path, bool equalize_first);

SaliencyGrid load_png8(const std::string& path);

/// Replaces each value by its bin index over 256 equidistant bins spanning
/// [min, max]. Idempotent.
SaliencyGrid quantize_256(const SaliencyGrid& map);

// --- density visualization -------------------------------------------------

struct QuartileRender {
    SaliencyGrid image = SaliencyGrid::zeros(GridShape{1, 1}); // gray levels 0..255
    std::array<std::size_t, 4> area_pixels; // darkest (densest) area first
    bool has_fixations = false;
    std::array<std::size_t, 4> area_fixations{};
    double expected_per_area = 0.0;
    double count_stddev = 0.0;
};

/// Partitions pixels into four areas of equal probability mass (densest
/// first, ties broken by pixel index) and shades them; when fixations are
/// given, reports per-area counts with the expected count and its binomial
/// standard deviation.
QuartileRender render_density_quartiles(const DensityGrid& density,
                                        const FixationSet* fixations);

// --- fit serialization ------------------------------------------------------

void save_fit(const std::string& path, const ProbabilisticModelFit& fit);
ProbabilisticModelFit load_fit(const std::string& path);

// --- experiment tables -------------------------------------------------------

std::string score_matrix_csv(const ScoreMatrix& matrix);
std::string cc_approx_csv(const std::vector<CcApproxCell>& cells);
std::string sim_count_csv(const SimCountTable& table);
std::string binning_csv(const BinningResult& result);

} // namespace salbench
