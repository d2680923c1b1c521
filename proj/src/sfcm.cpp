#include "sfcd/sfcm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "sfcd/errors.hpp"
#include "sfcd/format.hpp"

namespace sfcd {

namespace {

constexpr int kKmeansMaxIterations = 1000;

// Linear-interpolation quantile of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double prob) {
  const double pos = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<double> centered_quantiles(const std::vector<double>& sorted, std::size_t c) {
  std::vector<double> out(c);
  for (std::size_t k = 0; k < c; ++k) {
    out[k] = quantile_sorted(sorted, (static_cast<double>(k) + 0.5) / static_cast<double>(c));
  }
  return out;
}

bool strictly_increasing(const std::vector<double>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

std::vector<double> percentile_centers(const std::vector<double>& sorted,
                                       const std::vector<double>& distinct, std::size_t c) {
  auto centers = centered_quantiles(sorted, c);
  if (!strictly_increasing(centers)) centers = centered_quantiles(distinct, c);
  return centers;
}

// Lloyd iterations on sorted 1-D data. With sorted centers each cluster owns a
// contiguous run of the data, bounded by the midpoints between neighbours;
// a value exactly on a midpoint goes to the lower cluster.
std::vector<double> kmeans_1d(const std::vector<double>& sorted, std::vector<double> centers) {
  const std::size_t c = centers.size();
  std::vector<double> prefix(sorted.size() + 1, 0.0);
  for (std::size_t i = 0; i < sorted.size(); ++i) prefix[i + 1] = prefix[i] + sorted[i];

  std::vector<std::size_t> bounds(c + 1, 0);
  bounds[c] = sorted.size();
  std::vector<std::size_t> previous;
  for (int iter = 0; iter < kKmeansMaxIterations; ++iter) {
    for (std::size_t k = 0; k + 1 < c; ++k) {
      const double mid = 0.5 * (centers[k] + centers[k + 1]);
      bounds[k + 1] = static_cast<std::size_t>(
          std::upper_bound(sorted.begin(), sorted.end(), mid) - sorted.begin());
    }
    if (bounds == previous) break;
    previous = bounds;
    for (std::size_t k = 0; k < c; ++k) {
      const std::size_t n = bounds[k + 1] - bounds[k];
      if (n > 0) centers[k] = (prefix[bounds[k + 1]] - prefix[bounds[k]]) / static_cast<double>(n);
    }
    std::sort(centers.begin(), centers.end());
  }
  return centers;
}

template <typename Fn>
auto at_iteration(int iteration, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const NumericalError& e) {
    if (e.iteration()) throw;
    throw NumericalError(e.what(), iteration);
  }
}

std::size_t check_same_pixels(const Image& image, const MembershipField& field) {
  if (image.width() != field.width() || image.height() != field.height()) {
    throw InputError("image and membership field shapes differ");
  }
  return image.size();
}

double max_abs_difference(const MembershipField& a, const MembershipField& b) {
  double worst = 0.0;
  auto va = a.values();
  auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) worst = std::max(worst, std::abs(va[i] - vb[i]));
  return worst;
}

}  // namespace

SpatialField::SpatialField(std::size_t width, std::size_t height, std::size_t clusters,
                           std::vector<double> values)
    : width_(width), height_(height), clusters_(clusters), values_(std::move(values)) {
  if (values_.size() != width_ * height_ * clusters_) {
    throw InputError("spatial field size does not match its shape");
  }
  for (double h : values_) {
    if (!std::isfinite(h) || h < 0.0) throw InputError("spatial field value negative or not finite");
  }
}

std::size_t ChangeResult::changed_count() const {
  std::size_t n = 0;
  for (double v : change_map.data()) n += v > 0.0 ? 1 : 0;
  return n;
}

ClusterCenters init_centers(const Image& image, const SfcmConfig& cfg) {
  const auto c = static_cast<std::size_t>(cfg.clusters);
  if (cfg.init == InitMethod::fixed) {
    if (cfg.fixed_centers.size() != c) throw InputError("fixed init needs exactly c centers");
    auto centers = ClusterCenters::sorted(cfg.fixed_centers);
    if (centers.has_duplicates()) throw InputError("fixed init centers must be distinct");
    return centers;
  }

  std::vector<double> sorted(image.data().begin(), image.data().end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct;
  std::unique_copy(sorted.begin(), sorted.end(), std::back_inserter(distinct));
  if (distinct.size() < c) {
    throw NumericalError("degenerate image for c clusters (" + std::to_string(distinct.size()) +
                         " distinct intensities, c = " + std::to_string(c) + ")");
  }

  auto centers = percentile_centers(sorted, distinct, c);
  if (cfg.init == InitMethod::kmeans_like) {
    auto refined = kmeans_1d(sorted, centers);
    if (strictly_increasing(refined)) centers = std::move(refined);
  }
  return ClusterCenters(std::move(centers));
}

MembershipField fcm_membership(const Image& image, const ClusterCenters& centers, double m) {
  if (!(m > 1.0)) throw InputError("fuzzification exponent m must be > 1");
  if (centers.has_duplicates()) {
    throw NumericalError("duplicate cluster centers, membership undefined");
  }
  const std::size_t c = centers.size();
  const double exponent = 2.0 / (m - 1.0);
  std::vector<double> values(image.size() * c, 0.0);
  std::vector<double> dist(c);

  for (std::size_t j = 0; j < image.size(); ++j) {
    double* row = values.data() + j * c;
    const double x = image[j];
    std::size_t nearest = 0;
    for (std::size_t k = 0; k < c; ++k) {
      dist[k] = std::abs(x - centers[k]);
      if (dist[k] < dist[nearest]) nearest = k;
    }
    if (dist[nearest] == 0.0) {
      row[nearest] = 1.0;
      continue;
    }
    // (d_i / d_k)^e summed over k equals (sum_k w_k) / w_i with
    // w_k = (d_min / d_k)^e in (0, 1], which cannot overflow.
    double total = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      row[k] = std::pow(dist[nearest] / dist[k], exponent);
      total += row[k];
    }
    for (std::size_t k = 0; k < c; ++k) row[k] /= total;
  }
  return MembershipField(image.width(), image.height(), c, std::move(values));
}

CenterUpdate update_centers(const Image& image, const MembershipField& field, double m) {
  const std::size_t n = check_same_pixels(image, field);
  const std::size_t c = field.clusters();
  std::vector<double> num(c, 0.0);
  std::vector<double> den(c, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < c; ++i) {
      const double w = std::pow(field(j, i), m);
      num[i] += w * image[j];
      den[i] += w;
    }
  }
  std::vector<double> raw(c);
  for (std::size_t i = 0; i < c; ++i) {
    if (!(den[i] > 0.0)) throw NumericalError("cluster collapsed (cluster " + std::to_string(i) + ")");
    raw[i] = num[i] / den[i];
  }

  std::vector<std::size_t> order(c);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });
  std::vector<double> sorted(c);
  for (std::size_t k = 0; k < c; ++k) sorted[k] = raw[order[k]];
  return CenterUpdate{ClusterCenters(std::move(sorted)), std::move(order)};
}

MembershipField permute_clusters(const MembershipField& field, const std::vector<std::size_t>& order) {
  const std::size_t c = field.clusters();
  if (order.size() != c) throw InputError("permutation size does not match cluster count");
  std::vector<double> values(field.values().size());
  for (std::size_t j = 0; j < field.pixels(); ++j) {
    for (std::size_t k = 0; k < c; ++k) values[j * c + k] = field(j, order[k]);
  }
  return MembershipField(field.width(), field.height(), c, std::move(values));
}

SpatialField spatial_neighbor(const MembershipField& field, int radius) {
  if (radius < 1) throw InputError("window radius must be >= 1");
  const auto w = static_cast<std::ptrdiff_t>(field.width());
  const auto h = static_cast<std::ptrdiff_t>(field.height());
  const std::size_t c = field.clusters();
  std::vector<double> out(field.values().size(), 0.0);

  for (std::ptrdiff_t y = 0; y < h; ++y) {
    const std::ptrdiff_t y0 = std::max<std::ptrdiff_t>(0, y - radius);
    const std::ptrdiff_t y1 = std::min<std::ptrdiff_t>(h - 1, y + radius);
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      const std::ptrdiff_t x0 = std::max<std::ptrdiff_t>(0, x - radius);
      const std::ptrdiff_t x1 = std::min<std::ptrdiff_t>(w - 1, x + radius);
      double* dst = out.data() + static_cast<std::size_t>(y * w + x) * c;
      for (std::ptrdiff_t yy = y0; yy <= y1; ++yy) {
        for (std::ptrdiff_t xx = x0; xx <= x1; ++xx) {
          const auto src = field.row(static_cast<std::size_t>(yy * w + xx));
          for (std::size_t i = 0; i < c; ++i) dst[i] += src[i];
        }
      }
    }
  }
  return SpatialField(field.width(), field.height(), c, std::move(out));
}

SpatialField spatial_intensity(const MembershipField& field, const Image& image, int levels) {
  const std::size_t n = check_same_pixels(image, field);
  if (levels < 1) throw InputError("intensity levels must be >= 1");
  const std::size_t c = field.clusters();
  const auto [lo_it, hi_it] = std::minmax_element(image.data().begin(), image.data().end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;

  std::vector<std::size_t> bin(n, 0);
  if (range > 0.0) {
    for (std::size_t j = 0; j < n; ++j) {
      const double scaled = std::floor((image[j] - lo) / range * levels);
      bin[j] = std::min(static_cast<std::size_t>(scaled), static_cast<std::size_t>(levels - 1));
    }
  }

  std::vector<double> sums(static_cast<std::size_t>(levels) * c, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < c; ++i) sums[bin[j] * c + i] += field(j, i);
  }
  std::vector<double> out(n * c);
  for (std::size_t j = 0; j < n; ++j) {
    std::copy_n(sums.begin() + static_cast<std::ptrdiff_t>(bin[j] * c), c,
                out.begin() + static_cast<std::ptrdiff_t>(j * c));
  }
  return SpatialField(field.width(), field.height(), c, std::move(out));
}

MembershipField apply_spatial(const MembershipField& field, const SpatialField& spatial, double p,
                              double q) {
  if (spatial.width() != field.width() || spatial.height() != field.height() ||
      spatial.clusters() != field.clusters()) {
    throw InputError("spatial field shape does not match membership field");
  }
  if (!(p >= 0.0) || !(q >= 0.0)) throw InputError("p and q must be non-negative");
  const std::size_t c = field.clusters();
  std::vector<double> values(field.values().begin(), field.values().end());
  std::vector<double> weight(c);

  for (std::size_t j = 0; j < field.pixels(); ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
      // std::pow(0, 0) == 1.
      weight[i] = std::pow(field(j, i), p) * std::pow(spatial(j, i), q);
      total += weight[i];
    }
    if (!(total > 0.0)) continue;
    for (std::size_t i = 0; i < c; ++i) values[j * c + i] = weight[i] / total;
  }
  return MembershipField(field.width(), field.height(), c, std::move(values));
}

double fcm_objective(const Image& image, const MembershipField& field,
                     const ClusterCenters& centers, double m) {
  const std::size_t n = check_same_pixels(image, field);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < field.clusters(); ++i) {
      const double d = image[j] - centers[i];
      total += std::pow(field(j, i), m) * d * d;
    }
  }
  return total;
}

ChangeResult run_sfcm(const Image& image, const SfcmConfig& cfg) {
  cfg.validate();
  auto initial = at_iteration(0, [&] { return init_centers(image, cfg); });
  return run_sfcm(image, cfg, initial);
}

ChangeResult run_sfcm(const Image& image, const SfcmConfig& cfg, const ClusterCenters& initial) {
  cfg.validate();
  const auto c = static_cast<std::size_t>(cfg.clusters);
  if (initial.size() != c) throw InputError("initial centers do not match c");

  ClusterCenters centers = initial;
  MembershipField previous(image.width(), image.height(), c,
                           std::vector<double>(image.size() * c, 1.0 / static_cast<double>(c)));
  std::vector<IterationRecord> trace;

  for (int t = 1; t <= cfg.max_iter; ++t) {
    auto [field, updated] = at_iteration(t, [&] {
      MembershipField u = fcm_membership(image, centers, cfg.m);
      if (cfg.spatial_variant == SpatialVariant::neighbor) {
        u = apply_spatial(u, spatial_neighbor(u, cfg.window_radius), cfg.p, cfg.q);
      } else if (cfg.spatial_variant == SpatialVariant::intensity) {
        u = apply_spatial(u, spatial_intensity(u, image, cfg.intensity_levels), cfg.p, cfg.q);
      }
      CenterUpdate update = update_centers(image, u, cfg.m);
      return std::pair{permute_clusters(u, update.order), std::move(update.centers)};
    });
    centers = std::move(updated);

    IterationRecord record;
    record.iteration = t;
    record.max_delta = max_abs_difference(field, previous);
    record.objective = fcm_objective(image, field, centers, cfg.m);
    trace.push_back(record);
    previous = std::move(field);
    if (record.max_delta < cfg.epsilon) break;
  }

  LabelMap labels = defuzzify(previous);
  const auto changed_label = static_cast<LabelMap::Label>(c - 1);
  std::vector<double> change(labels.size());
  for (std::size_t j = 0; j < labels.size(); ++j) change[j] = labels[j] == changed_label ? 1.0 : 0.0;

  const int iterations = static_cast<int>(trace.size());
  return ChangeResult{std::move(previous),
                      std::move(centers),
                      std::move(labels),
                      Image(image.width(), image.height(), std::move(change)),
                      iterations,
                      std::move(trace)};
}

std::vector<SweepPoint> sweep_pq(const Image& image, const SfcmConfig& cfg,
                                 const std::vector<double>& ratios) {
  if (ratios.empty()) throw InputError("empty sweep");
  for (double r : ratios) {
    if (!(r >= 1.0) || !std::isfinite(r)) throw InputError("p/q ratios must be >= 1");
  }
  cfg.validate();
  if (!(cfg.q > 0.0)) throw InputError("p/q sweep needs q > 0");
  const auto initial = at_iteration(0, [&] { return init_centers(image, cfg); });

  std::vector<SweepPoint> points;
  for (double r : ratios) {
    SfcmConfig run = cfg;
    run.p = r * cfg.q;
    points.push_back({r, run_sfcm(image, run, initial).changed_count()});
  }
  return points;
}

std::vector<SweepPoint> sweep_m(const Image& image, const SfcmConfig& cfg,
                                const std::vector<double>& m_values) {
  if (m_values.empty()) throw InputError("empty sweep");
  for (double m : m_values) {
    if (!(m > 1.0) || !std::isfinite(m)) throw InputError("every m must be > 1");
  }
  cfg.validate();
  const auto initial = at_iteration(0, [&] { return init_centers(image, cfg); });

  std::vector<SweepPoint> points;
  for (double m : m_values) {
    SfcmConfig run = cfg;
    run.m = m;
    points.push_back({m, run_sfcm(image, run, initial).changed_count()});
  }
  return points;
}

void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& trace) {
  out << "iter,max_delta,objective\n";
  for (const auto& r : trace) {
    out << r.iteration << ',' << format_number(r.max_delta) << ',' << format_number(r.objective)
        << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << "value,changed_count\n";
  for (const auto& p : points) out << format_number(p.value) << ',' << p.changed_count << '\n';
}

}  // namespace sfcd
