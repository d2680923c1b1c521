#pragma once

// Dense 2-D grids shared by every stage of the pipeline. All grids are
// row-major and immutable once constructed.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sfcd {

/// Non-negative scalar intensities on a width x height grid.
class Image {
 public:
  /// Throws InputError on zero dimensions, size mismatch, or a negative or
  /// non-finite sample.
  Image(std::size_t width, std::size_t height, std::vector<double> data);
  Image(std::size_t width, std::size_t height, double fill);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return data_.size(); }

  double operator[](std::size_t index) const { return data_[index]; }
  double at(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }
  std::span<const double> data() const { return data_; }

  bool same_shape(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> data_;
};

/// Hard assignment of every pixel to one of `classes` labels.
class LabelMap {
 public:
  using Label = std::uint32_t;

  /// Throws InputError if the size is wrong or a label is >= classes.
  LabelMap(std::size_t width, std::size_t height, std::vector<Label> labels, std::size_t classes);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return labels_.size(); }
  std::size_t classes() const { return classes_; }

  Label operator[](std::size_t index) const { return labels_[index]; }
  std::span<const Label> labels() const { return labels_; }

  bool same_shape(const LabelMap& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  /// Number of pixels carrying `label`.
  std::size_t count(Label label) const;

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::size_t classes_;
  std::vector<Label> labels_;
};

/// Per-pixel membership degrees, stored pixel-major: the `clusters` values of
/// pixel j are contiguous at [j * clusters, (j + 1) * clusters).
class MembershipField {
 public:
  /// Throws InputError on size mismatch, fewer than two clusters, or a value
  /// outside [0, 1]. Row sums are not enforced here; see is_normalized.
  MembershipField(std::size_t width, std::size_t height, std::size_t clusters,
                  std::vector<double> values);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t pixels() const { return width_ * height_; }
  std::size_t clusters() const { return clusters_; }

  double operator()(std::size_t pixel, std::size_t cluster) const {
    return values_[pixel * clusters_ + cluster];
  }
  std::span<const double> row(std::size_t pixel) const {
    return std::span<const double>(values_).subspan(pixel * clusters_, clusters_);
  }
  std::span<const double> values() const { return values_; }

  bool same_shape(const MembershipField& other) const {
    return width_ == other.width_ && height_ == other.height_ && clusters_ == other.clusters_;
  }

  friend bool operator==(const MembershipField&, const MembershipField&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::size_t clusters_;
  std::vector<double> values_;
};

/// Largest |sum_i u_ij - 1| over all pixels.
double max_row_sum_error(const MembershipField& field);

/// True when every pixel's memberships sum to one within `tolerance`.
bool is_normalized(const MembershipField& field, double tolerance = 1e-9);

/// Scalar cluster centers in non-decreasing order. Duplicates are
/// representable (a collapsed update produces them) but rejected by the
/// membership computation.
class ClusterCenters {
 public:
  /// Throws InputError if fewer than two values, a value is not finite, or
  /// the values are not sorted ascending.
  explicit ClusterCenters(std::vector<double> values);

  /// Sorts `values` first.
  static ClusterCenters sorted(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t index) const { return values_[index]; }
  std::span<const double> values() const { return values_; }

  bool has_duplicates() const;

  friend bool operator==(const ClusterCenters&, const ClusterCenters&) = default;

 private:
  std::vector<double> values_;
};

/// Per-pixel argmax of the memberships; ties go to the lowest cluster index.
LabelMap defuzzify(const MembershipField& field);

}  // namespace sfcd
