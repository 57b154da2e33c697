#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "salbench/error.hpp"

namespace salbench {

struct GridShape {
    int height = 0;
    int width = 0;

    std::size_t pixels() const {
        return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    }
    bool operator==(const GridShape&) const = default;
};

/// Real-valued map over a pixel grid, arbitrary scale. Row-major storage,
/// immutable after construction. All values must be finite.
class SaliencyGrid {
public:
    SaliencyGrid(GridShape shape, std::vector<double> values);

    static SaliencyGrid zeros(GridShape shape) {
        return SaliencyGrid(shape, std::vector<double>(shape.pixels(), 0.0));
    }

    GridShape shape() const { return shape_; }
    int height() const { return shape_.height; }
    int width() const { return shape_.width; }
    std::size_t size() const { return values_.size(); }

    double operator[](std::size_t i) const { return values_[i]; }
    double at(int row, int col) const {
        return values_[static_cast<std::size_t>(row) * shape_.width + col];
    }
    const std::vector<double>& values() const { return values_; }

private:
    GridShape shape_;
    std::vector<double> values_;
};

/// Fixation probability density over a pixel grid: nonnegative values that
/// sum to 1 within 1e-6. Immutable after construction.
class DensityGrid {
public:
    DensityGrid(GridShape shape, std::vector<double> values);

    GridShape shape() const { return shape_; }
    int height() const { return shape_.height; }
    int width() const { return shape_.width; }
    std::size_t size() const { return values_.size(); }

    double operator[](std::size_t i) const { return values_[i]; }
    double at(int row, int col) const {
        return values_[static_cast<std::size_t>(row) * shape_.width + col];
    }
    const std::vector<double>& values() const { return values_; }

    SaliencyGrid as_saliency() const { return SaliencyGrid(shape_, values_); }

private:
    GridShape shape_;
    std::vector<double> values_;
};

struct Fixation {
    int row = 0;
    int col = 0;
    bool operator==(const Fixation&) const = default;
};

/// Observed or sampled fixation locations for one stimulus, in pixel
/// coordinates (row, col) with origin at the top-left.
struct FixationSet {
    std::vector<Fixation> points;
    std::string stimulus_id;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

// Throws OutOfBounds if any fixation lies outside the grid.
void require_within(const FixationSet& fixations, GridShape shape);
// Throws EmptyFixations (or EmptySet, per `code`) on an empty set.
void require_nonempty(const FixationSet& fixations, Errc code = Errc::EmptyFixations);

struct Stimulus {
    std::string id;
    GridShape shape;
};

/// Stimuli index plus per-stimulus fixations. Stimulus order is the
/// insertion order and is preserved by all operations.
class FixationDataset {
public:
    void add(Stimulus stimulus, FixationSet fixations);

    std::size_t size() const { return stimuli_.size(); }
    bool empty() const { return stimuli_.empty(); }

    const Stimulus& stimulus(std::size_t i) const { return stimuli_[i]; }
    const FixationSet& fixations(std::size_t i) const { return fixations_[i]; }

    bool has(const std::string& id) const { return index_.count(id) != 0; }
    std::size_t index_of(const std::string& id) const;

    std::size_t total_fixations() const;

private:
    std::vector<Stimulus> stimuli_;
    std::vector<FixationSet> fixations_;
    std::unordered_map<std::string, std::size_t> index_;
};

} // namespace salbench
