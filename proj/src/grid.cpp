#include "salbench/grid.hpp"

#include <cmath>
#include <numeric>

namespace salbench {

namespace {

void check_shape(GridShape shape, std::size_t n_values) {
    if (shape.height < 1 || shape.width < 1)
        fail(Errc::InvariantViolation, "grid shape must be at least 1x1");
    if (shape.pixels() != n_values)
        fail(Errc::InvariantViolation, "value count does not match grid shape");
}

} // namespace

SaliencyGrid::SaliencyGrid(GridShape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
    check_shape(shape_, values_.size());
    for (double v : values_)
        if (!std::isfinite(v))
            fail(Errc::NonFinite, "saliency grid contains NaN or Inf");
}

DensityGrid::DensityGrid(GridShape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
    check_shape(shape_, values_.size());
    double sum = 0.0;
    for (double v : values_) {
        if (!std::isfinite(v))
            fail(Errc::NonFinite, "density grid contains NaN or Inf");
        if (v < 0.0)
            fail(Errc::InvariantViolation, "density grid contains negative values");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6)
        fail(Errc::InvariantViolation, "density grid does not sum to 1");
}

void require_within(const FixationSet& fixations, GridShape shape) {
    for (const Fixation& f : fixations.points) {
        if (f.row < 0 || f.row >= shape.height || f.col < 0 || f.col >= shape.width)
            fail(Errc::OutOfBounds, "fixation (" + std::to_string(f.row) + "," +
                                        std::to_string(f.col) + ") outside grid");
    }
}

void require_nonempty(const FixationSet& fixations, Errc code) {
    if (fixations.empty())
        fail(code, "fixation set is empty");
}

void FixationDataset::add(Stimulus stimulus, FixationSet fixations) {
    if (index_.count(stimulus.id))
        fail(Errc::InvariantViolation, "duplicate stimulus id: " + stimulus.id);
    if (stimulus.shape.height < 1 || stimulus.shape.width < 1)
        fail(Errc::InvariantViolation, "stimulus " + stimulus.id + " has nonpositive size");
    require_within(fixations, stimulus.shape);
    fixations.stimulus_id = stimulus.id;
    index_.emplace(stimulus.id, stimuli_.size());
    stimuli_.push_back(std::move(stimulus));
    fixations_.push_back(std::move(fixations));
}

std::size_t FixationDataset::index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end())
        fail(Errc::BadArgument, "unknown stimulus id: " + id);
    return it->second;
}

std::size_t FixationDataset::total_fixations() const {
    std::size_t n = 0;
    for (const auto& f : fixations_) n += f.size();
    return n;
}

} // namespace salbench
