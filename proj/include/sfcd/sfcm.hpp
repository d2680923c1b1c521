#pragma once

// Fuzzy c-means with a spatial regularization term.
//
// One iteration of run_sfcm:
//   1. memberships from the current centers (fcm_membership)
//   2. optionally, a spatial function h from those memberships and the
//      reweighted memberships u' ~ u^p h^q (apply_spatial)
//   3. centers recomputed from the final memberships (update_centers),
//      re-sorted ascending with membership columns permuted to match
//   4. stop once the largest membership change falls below epsilon
//
// All functions are single-threaded and deterministic: reductions always
// accumulate in pixel order.

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "sfcd/config.hpp"
#include "sfcd/grid.hpp"

namespace sfcd {

/// Non-negative per-pixel, per-cluster weights, laid out like MembershipField.
class SpatialField {
 public:
  SpatialField(std::size_t width, std::size_t height, std::size_t clusters,
               std::vector<double> values);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t pixels() const { return width_ * height_; }
  std::size_t clusters() const { return clusters_; }

  double operator()(std::size_t pixel, std::size_t cluster) const {
    return values_[pixel * clusters_ + cluster];
  }
  std::span<const double> values() const { return values_; }

 private:
  std::size_t width_;
  std::size_t height_;
  std::size_t clusters_;
  std::vector<double> values_;
};

struct IterationRecord {
  int iteration = 0;
  double max_delta = 0.0;  ///< largest |u(t) - u(t-1)| over all pixels and clusters
  double objective = 0.0;  ///< sum_j sum_i u_ij^m (x_j - v_i)^2 after the center update
};

struct ChangeResult {
  MembershipField membership;
  ClusterCenters centers;
  LabelMap labels;
  Image change_map;  ///< 1 where the pixel belongs to the highest-center cluster, else 0
  int iterations = 0;
  std::vector<IterationRecord> trace;

  std::size_t changed_count() const;
};

/// Initial centers per cfg.init. percentile: the (k + 0.5) / c quantiles of
/// the intensities (linear interpolation); if two coincide, the same
/// quantiles over the distinct intensity values are used instead.
/// kmeans-like: 1-D hard k-means seeded by the percentile centers.
/// fixed: cfg.fixed_centers sorted.
///
/// Throws NumericalError("degenerate image for c clusters") when the image
/// holds fewer than c distinct intensities.
ClusterCenters init_centers(const Image& image, const SfcmConfig& cfg);

/// Standard FCM membership. A pixel equal to a center belongs crisply to the
/// lowest such center. Throws NumericalError on duplicate centers and
/// InputError when m <= 1.
MembershipField fcm_membership(const Image& image, const ClusterCenters& centers, double m);

struct CenterUpdate {
  ClusterCenters centers;
  /// order[k] is the pre-sort cluster index now at sorted position k.
  std::vector<std::size_t> order;
};

/// Weighted means v_i = sum_j u_ij^m x_j / sum_j u_ij^m, sorted ascending.
/// Throws NumericalError("cluster collapsed") if some cluster has zero
/// total weight.
CenterUpdate update_centers(const Image& image, const MembershipField& field, double m);

/// Reorders membership columns: column k of the result is column order[k]
/// of the input.
MembershipField permute_clusters(const MembershipField& field, const std::vector<std::size_t>& order);

/// Sum of memberships over the (2r+1) x (2r+1) window around each pixel,
/// center included, clipped at the image border.
SpatialField spatial_neighbor(const MembershipField& field, int radius);

/// Sum of memberships over all pixels falling in the same intensity bin.
/// Bins split [min, max] of the image into `levels` equal-width intervals;
/// a constant image has a single bin.
SpatialField spatial_intensity(const MembershipField& field, const Image& image, int levels);

/// u'_ij = u_ij^p h_ij^q / sum_k u_kj^p h_kj^q, with 0^0 = 1. A pixel whose
/// denominator is zero keeps its input row.
MembershipField apply_spatial(const MembershipField& field, const SpatialField& spatial, double p,
                              double q);

double fcm_objective(const Image& image, const MembershipField& field,
                     const ClusterCenters& centers, double m);

/// Runs the full loop from init_centers(image, cfg). NumericalErrors carry
/// the iteration index (0 for initialization).
ChangeResult run_sfcm(const Image& image, const SfcmConfig& cfg);

/// Same, from the given initial centers; cfg.init is ignored.
ChangeResult run_sfcm(const Image& image, const SfcmConfig& cfg, const ClusterCenters& initial);

struct SweepPoint {
  double value = 0.0;
  std::size_t changed_count = 0;
};

/// One run per ratio with p = ratio * cfg.q, all from the same initial
/// centers. Ratios must be non-empty and >= 1.
std::vector<SweepPoint> sweep_pq(const Image& image, const SfcmConfig& cfg,
                                 const std::vector<double>& ratios);

/// One run per fuzzification exponent (each > 1), all from the same
/// initial centers.
std::vector<SweepPoint> sweep_m(const Image& image, const SfcmConfig& cfg,
                                const std::vector<double>& m_values);

/// CSV with header `iter,max_delta,objective`.
void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& trace);

/// CSV with header `value,changed_count`.
void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points);

}  // namespace sfcd
