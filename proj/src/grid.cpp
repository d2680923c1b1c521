#include "sfcd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sfcd/errors.hpp"

namespace sfcd {

namespace {

std::string shape_string(std::size_t width, std::size_t height) {
  return std::to_string(width) + "x" + std::to_string(height);
}

}  // namespace

Image::Image(std::size_t width, std::size_t height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width_ == 0 || height_ == 0) {
    throw InputError("image has zero dimension (" + shape_string(width_, height_) + ")");
  }
  if (data_.size() != width_ * height_) {
    throw InputError("image data has " + std::to_string(data_.size()) + " samples, expected " +
                     std::to_string(width_ * height_) + " for " + shape_string(width_, height_));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i]) || data_[i] < 0.0) {
      throw InputError("image sample " + std::to_string(i) + " is negative or not finite");
    }
  }
}

Image::Image(std::size_t width, std::size_t height, double fill)
    : Image(width, height, std::vector<double>(width * height, fill)) {}

LabelMap::LabelMap(std::size_t width, std::size_t height, std::vector<Label> labels,
                   std::size_t classes)
    : width_(width), height_(height), classes_(classes), labels_(std::move(labels)) {
  if (width_ == 0 || height_ == 0) {
    throw InputError("label map has zero dimension (" + shape_string(width_, height_) + ")");
  }
  if (labels_.size() != width_ * height_) {
    throw InputError("label map has " + std::to_string(labels_.size()) + " labels, expected " +
                     std::to_string(width_ * height_));
  }
  for (Label label : labels_) {
    if (label >= classes_) {
      throw InputError("label " + std::to_string(label) + " out of range for " +
                       std::to_string(classes_) + " classes");
    }
  }
}

std::size_t LabelMap::count(Label label) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

MembershipField::MembershipField(std::size_t width, std::size_t height, std::size_t clusters,
                                 std::vector<double> values)
    : width_(width), height_(height), clusters_(clusters), values_(std::move(values)) {
  if (clusters_ < 2) throw InputError("membership field needs at least 2 clusters");
  if (width_ == 0 || height_ == 0) {
    throw InputError("membership field has zero dimension (" + shape_string(width_, height_) + ")");
  }
  if (values_.size() != width_ * height_ * clusters_) {
    throw InputError("membership field has " + std::to_string(values_.size()) +
                     " values, expected " + std::to_string(width_ * height_ * clusters_));
  }
  for (double u : values_) {
    if (!(u >= 0.0 && u <= 1.0)) throw InputError("membership value outside [0, 1]");
  }
}

double max_row_sum_error(const MembershipField& field) {
  double worst = 0.0;
  for (std::size_t j = 0; j < field.pixels(); ++j) {
    double sum = 0.0;
    for (double u : field.row(j)) sum += u;
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

bool is_normalized(const MembershipField& field, double tolerance) {
  return max_row_sum_error(field) <= tolerance;
}

ClusterCenters::ClusterCenters(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw InputError("need at least 2 cluster centers");
  for (double v : values_) {
    if (!std::isfinite(v)) throw InputError("cluster center is not finite");
  }
  if (!std::is_sorted(values_.begin(), values_.end())) {
    throw InputError("cluster centers must be sorted ascending");
  }
}

ClusterCenters ClusterCenters::sorted(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return ClusterCenters(std::move(values));
}

bool ClusterCenters::has_duplicates() const {
  return std::adjacent_find(values_.begin(), values_.end()) != values_.end();
}

LabelMap defuzzify(const MembershipField& field) {
  std::vector<LabelMap::Label> labels(field.pixels());
  for (std::size_t j = 0; j < field.pixels(); ++j) {
    auto row = field.row(j);
    // max_element returns the first maximum, which is the lowest index on ties.
    labels[j] = static_cast<LabelMap::Label>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return LabelMap(field.width(), field.height(), std::move(labels), field.clusters());
}

}  // namespace sfcd
