#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sfcd/config.hpp"
#include "sfcd/diff_image.hpp"
#include "sfcd/errors.hpp"
#include "sfcd/image_io.hpp"
#include "sfcd/sfcm.hpp"
#include "sfcd/synth.hpp"

namespace py = pybind11;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

sfcd::Image to_image(const DoubleArray& array) {
  if (array.ndim() != 2) throw sfcd::InputError("expected a 2-D array");
  const auto height = static_cast<std::size_t>(array.shape(0));
  const auto width = static_cast<std::size_t>(array.shape(1));
  return sfcd::Image(width, height, std::vector<double>(array.data(), array.data() + array.size()));
}

py::array_t<double> to_array(const sfcd::Image& image) {
  py::array_t<double> out({image.height(), image.width()});
  std::copy(image.data().begin(), image.data().end(), out.mutable_data());
  return out;
}

py::array_t<std::uint32_t> to_array(const sfcd::LabelMap& labels) {
  py::array_t<std::uint32_t> out({labels.height(), labels.width()});
  std::copy(labels.labels().begin(), labels.labels().end(), out.mutable_data());
  return out;
}

sfcd::LabelMap to_labels(const py::array_t<std::uint32_t, py::array::c_style | py::array::forcecast>& a,
                         std::size_t classes) {
  if (a.ndim() != 2) throw sfcd::InputError("expected a 2-D label array");
  return sfcd::LabelMap(static_cast<std::size_t>(a.shape(1)), static_cast<std::size_t>(a.shape(0)),
                        std::vector<std::uint32_t>(a.data(), a.data() + a.size()), classes);
}

// Memberships and spatial fields cross the boundary as (height, width, c).
template <typename Field>
py::array_t<double> field_to_array(const Field& field) {
  py::array_t<double> out({field.height(), field.width(), field.clusters()});
  std::copy(field.values().begin(), field.values().end(), out.mutable_data());
  return out;
}

template <typename Field>
Field array_to_field(const DoubleArray& a) {
  if (a.ndim() != 3) throw sfcd::InputError("expected a (height, width, clusters) array");
  return Field(static_cast<std::size_t>(a.shape(1)), static_cast<std::size_t>(a.shape(0)),
               static_cast<std::size_t>(a.shape(2)), std::vector<double>(a.data(), a.data() + a.size()));
}

py::dict metrics_dict(const sfcd::DetectionMetrics& m) {
  py::dict d;
  d["oa"] = m.overall_accuracy;
  d["kappa"] = m.kappa;
  d["fa"] = m.false_alarms;
  d["md"] = m.missed_detections;
  return d;
}

py::list sweep_list(const std::vector<sfcd::SweepPoint>& points) {
  py::list out;
  for (const auto& p : points) out.append(py::make_tuple(p.value, p.changed_count));
  return out;
}

}  // namespace

PYBIND11_MODULE(_sfcd, m) {
  m.doc() = "Spatial fuzzy c-means change detection";

  static py::exception<sfcd::InputError> input_error(m, "InputError", PyExc_ValueError);
  static py::exception<sfcd::NumericalError> numerical_error(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const sfcd::NumericalError& e) {
      numerical_error(e.what());
    } catch (const sfcd::InputError& e) {
      input_error(e.what());
    }
  });

  py::enum_<sfcd::InitMethod>(m, "InitMethod")
      .value("percentile", sfcd::InitMethod::percentile)
      .value("kmeans_like", sfcd::InitMethod::kmeans_like)
      .value("fixed", sfcd::InitMethod::fixed);
  py::enum_<sfcd::SpatialVariant>(m, "SpatialVariant")
      .value("none", sfcd::SpatialVariant::none)
      .value("neighbor", sfcd::SpatialVariant::neighbor)
      .value("intensity", sfcd::SpatialVariant::intensity);

  py::class_<sfcd::SfcmConfig>(m, "SfcmConfig")
      .def(py::init<>())
      .def_readwrite("c", &sfcd::SfcmConfig::clusters)
      .def_readwrite("m", &sfcd::SfcmConfig::m)
      .def_readwrite("p", &sfcd::SfcmConfig::p)
      .def_readwrite("q", &sfcd::SfcmConfig::q)
      .def_readwrite("window_radius", &sfcd::SfcmConfig::window_radius)
      .def_readwrite("epsilon", &sfcd::SfcmConfig::epsilon)
      .def_readwrite("max_iter", &sfcd::SfcmConfig::max_iter)
      .def_readwrite("init", &sfcd::SfcmConfig::init)
      .def_readwrite("fixed_centers", &sfcd::SfcmConfig::fixed_centers)
      .def_readwrite("spatial_variant", &sfcd::SfcmConfig::spatial_variant)
      .def_readwrite("intensity_levels", &sfcd::SfcmConfig::intensity_levels)
      .def_readwrite("seed", &sfcd::SfcmConfig::seed)
      .def("validate", &sfcd::SfcmConfig::validate)
      .def("__eq__", [](const sfcd::SfcmConfig& a, const sfcd::SfcmConfig& b) { return a == b; })
      .def("__repr__", [](const sfcd::SfcmConfig& c) { return sfcd::serialize_config(c); });

  m.def("parse_config", [](const std::string& text) { return sfcd::parse_config(text); });
  m.def("load_config", &sfcd::load_config, py::arg("path"));
  m.def("serialize_config", &sfcd::serialize_config);

  m.def("load_image", [](const std::filesystem::path& p) { return to_array(sfcd::load_image(p)); },
        py::arg("path"));
  m.def("save_image",
        [](const DoubleArray& a, const std::filesystem::path& p, int depth) {
          sfcd::save_image(to_image(a), p, depth);
        },
        py::arg("image"), py::arg("path"), py::arg("bit_depth") = 8);

  m.def("difference_image",
        [](const DoubleArray& a, const DoubleArray& b) {
          return to_array(sfcd::difference_image(to_image(a), to_image(b)));
        },
        py::arg("before"), py::arg("after"));
  m.def("quantize",
        [](const DoubleArray& a, int levels) { return to_array(sfcd::quantize(to_image(a), levels)); },
        py::arg("diff"), py::arg("levels"));

  m.def("init_centers",
        [](const DoubleArray& a, const sfcd::SfcmConfig& cfg) {
          const auto c = sfcd::init_centers(to_image(a), cfg);
          return std::vector<double>(c.values().begin(), c.values().end());
        },
        py::arg("image"), py::arg("config"));
  m.def("fcm_membership",
        [](const DoubleArray& a, std::vector<double> centers, double mexp) {
          return field_to_array(
              sfcd::fcm_membership(to_image(a), sfcd::ClusterCenters(std::move(centers)), mexp));
        },
        py::arg("image"), py::arg("centers"), py::arg("m"));
  m.def("spatial_neighbor",
        [](const DoubleArray& u, int radius) {
          return field_to_array(sfcd::spatial_neighbor(array_to_field<sfcd::MembershipField>(u), radius));
        },
        py::arg("membership"), py::arg("radius") = 1);
  m.def("spatial_intensity",
        [](const DoubleArray& u, const DoubleArray& img, int levels) {
          return field_to_array(
              sfcd::spatial_intensity(array_to_field<sfcd::MembershipField>(u), to_image(img), levels));
        },
        py::arg("membership"), py::arg("image"), py::arg("levels") = 256);
  m.def("apply_spatial",
        [](const DoubleArray& u, const DoubleArray& h, double p, double q) {
          return field_to_array(sfcd::apply_spatial(array_to_field<sfcd::MembershipField>(u),
                                                    array_to_field<sfcd::SpatialField>(h), p, q));
        },
        py::arg("membership"), py::arg("spatial"), py::arg("p") = 1.0, py::arg("q") = 1.0);

  m.def("run_sfcm",
        [](const DoubleArray& a, const sfcd::SfcmConfig& cfg) {
          const auto r = sfcd::run_sfcm(to_image(a), cfg);
          py::dict d;
          d["membership"] = field_to_array(r.membership);
          d["centers"] = std::vector<double>(r.centers.values().begin(), r.centers.values().end());
          d["labels"] = to_array(r.labels);
          d["change_map"] = to_array(r.change_map);
          d["iterations"] = r.iterations;
          py::list trace;
          for (const auto& t : r.trace) trace.append(py::make_tuple(t.iteration, t.max_delta, t.objective));
          d["trace"] = trace;
          d["changed_count"] = r.changed_count();
          return d;
        },
        py::arg("image"), py::arg("config"));
  m.def("sweep_pq",
        [](const DoubleArray& a, const sfcd::SfcmConfig& cfg, const std::vector<double>& ratios) {
          return sweep_list(sfcd::sweep_pq(to_image(a), cfg, ratios));
        },
        py::arg("image"), py::arg("config"), py::arg("ratios"));
  m.def("sweep_m",
        [](const DoubleArray& a, const sfcd::SfcmConfig& cfg, const std::vector<double>& ms) {
          return sweep_list(sfcd::sweep_m(to_image(a), cfg, ms));
        },
        py::arg("image"), py::arg("config"), py::arg("m_values"));

  m.def("add_speckle",
        [](const DoubleArray& a, int looks, std::uint64_t seed) {
          return to_array(sfcd::add_speckle(to_image(a), looks, seed));
        },
        py::arg("image"), py::arg("looks"), py::arg("seed"));
  m.def("standard_phantom", [](int looks, std::optional<std::uint64_t> seed) {
        auto ph = sfcd::standard_phantom();
        if (seed) ph = sfcd::speckle_phantom(ph, looks, *seed);
        return py::make_tuple(to_array(ph.before), to_array(ph.after), to_array(ph.truth));
      },
      py::arg("looks") = 4, py::arg("seed") = py::none(),
      "Returns (before, after, truth); speckled when a seed is given.");
  m.def("score",
        [](const py::array_t<std::uint32_t, py::array::c_style | py::array::forcecast>& pred,
           const py::array_t<std::uint32_t, py::array::c_style | py::array::forcecast>& truth) {
          return metrics_dict(sfcd::score(to_labels(pred, 2), to_labels(truth, 2)));
        },
        py::arg("predicted"), py::arg("truth"));
  m.def("run_bench",
        [](const sfcd::SfcmConfig& cfg, std::size_t seeds, std::uint64_t base_seed,
           const std::vector<int>& looks) {
          py::list rows;
          for (const auto& r : sfcd::run_bench(cfg, seeds, base_seed, looks)) {
            py::dict d = metrics_dict(r.metrics);
            d["seed"] = r.seed;
            d["looks"] = r.looks;
            d["variant"] = std::string(sfcd::to_string(r.variant));
            d["small_region_recall"] = r.small_region_recall;
            d["failure"] = r.failure ? py::cast(*r.failure) : py::none();
            rows.append(d);
          }
          return rows;
        },
        py::arg("config"), py::arg("seeds") = 1, py::arg("base_seed") = 0,
        py::arg("looks") = std::vector<int>{1, 4, 16});
}
