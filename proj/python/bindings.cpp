#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "agrieval/augment.hpp"
#include "agrieval/dataset.hpp"
#include "agrieval/eval.hpp"
#include "agrieval/image_io.hpp"
#include "agrieval/render.hpp"

namespace py = pybind11;
namespace ag = agrieval;

namespace {

using ImageArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

ag::ImageBuffer to_image(const ImageArray& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) {
    throw ag::ShapeMismatch("expected an H x W x 3 uint8 array");
  }
  const auto h = static_cast<std::uint32_t>(a.shape(0));
  const auto w = static_cast<std::uint32_t>(a.shape(1));
  return ag::ImageBuffer(w, h, std::vector<std::uint8_t>(a.data(), a.data() + a.size()));
}

ImageArray to_array(const ag::ImageBuffer& img) {
  ImageArray out({static_cast<py::ssize_t>(img.height()),
                  static_cast<py::ssize_t>(img.width()), py::ssize_t{3}});
  std::memcpy(out.mutable_data(), img.data().data(), img.data().size());
  return out;
}

ag::MatchConfig match_config(double iou, const std::string& kind) {
  const auto k = ag::parse_iou_kind(kind);
  if (!k) throw ag::InvalidParameter("iou_kind must be 'box' or 'mask'");
  ag::MatchConfig cfg{iou, *k};
  ag::validate(cfg);
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_agrieval, m) {
  m.doc() = "Noise augmentation and detection evaluation for truss/runner annotations";

  static py::exception<ag::Error> error(m, "Error");
  static py::exception<ag::Error> validation(m, "ValidationError", error.ptr());
  static py::exception<ag::Error> io(m, "IoError", error.ptr());
  static py::exception<ag::Error> parameter(m, "InvalidParameter", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ag::Error& e) {
      switch (e.category()) {
        case ag::ErrorCategory::kIo: py::set_error(io, e.what()); break;
        case ag::ErrorCategory::kParameter: py::set_error(parameter, e.what()); break;
        default: py::set_error(validation, e.what()); break;
      }
    }
  });

  m.def("gaussian_noise", [](const ImageArray& img, double sigma, std::uint64_t seed) {
    return to_array(ag::gaussian_noise(to_image(img), sigma, seed));
  }, py::arg("image"), py::arg("sigma") = 51.0, py::arg("seed") = 0);
  m.def("speckle_noise", [](const ImageArray& img, int severity, std::uint64_t seed) {
    return to_array(ag::speckle_noise(to_image(img), severity, seed));
  }, py::arg("image"), py::arg("severity") = 2, py::arg("seed") = 0);
  m.def("poisson_noise", [](const ImageArray& img, double peak, std::uint64_t seed) {
    return to_array(ag::poisson_noise(to_image(img), peak, seed));
  }, py::arg("image"), py::arg("peak") = 40.0, py::arg("seed") = 0);
  m.def("salt_pepper_noise", [](const ImageArray& img, double amount, std::uint64_t seed) {
    return to_array(ag::salt_pepper_noise(to_image(img), amount, seed));
  }, py::arg("image"), py::arg("amount") = 0.1, py::arg("seed") = 0);
  m.def("apply_noise",
        [](const ImageArray& img, const std::string& noise, std::optional<double> param,
           std::uint64_t seed) {
          return to_array(ag::apply_noise(to_image(img), ag::make_noise_spec(noise, param, seed)));
        },
        py::arg("image"), py::arg("noise"), py::arg("param") = py::none(),
        py::arg("seed") = 0);

  m.def("read_png", [](const std::filesystem::path& p) { return to_array(ag::read_png(p)); });
  m.def("write_png", [](const ImageArray& img, const std::filesystem::path& p) {
    ag::write_png(to_image(img), p);
  });

  m.def("polygon_to_mask",
        [](const std::vector<std::pair<double, double>>& pts, std::uint32_t w,
           std::uint32_t h) {
          std::vector<ag::Point> v;
          for (const auto& [x, y] : pts) v.push_back({x, y});
          return ag::polygon_to_mask(ag::Polygon(std::move(v)), w, h).runs();
        },
        py::arg("points"), py::arg("width"), py::arg("height"),
        "Rasterises a polygon; returns RLE runs (zero run first).");
  m.def("rle_encode", [](py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> a) {
    if (a.ndim() != 2) throw ag::ShapeMismatch("expected an H x W array");
    std::vector<std::uint8_t> bits(a.data(), a.data() + a.size());
    for (auto& b : bits) b = b ? 1 : 0;
    return ag::rle_encode(bits, static_cast<std::uint32_t>(a.shape(1)),
                          static_cast<std::uint32_t>(a.shape(0)))
        .runs();
  });
  m.def("rle_decode", [](const std::vector<std::uint32_t>& runs, std::uint32_t w,
                         std::uint32_t h) {
    const auto bits = ag::rle_decode(runs, w, h);
    py::array_t<std::uint8_t> out({static_cast<py::ssize_t>(h), static_cast<py::ssize_t>(w)});
    std::memcpy(out.mutable_data(), bits.data(), bits.size());
    return out;
  }, py::arg("runs"), py::arg("width"), py::arg("height"));
  m.def("iou_bbox", [](std::array<double, 4> a, std::array<double, 4> b) {
    return ag::iou_bbox(ag::BBox(a[0], a[1], a[2], a[3]), ag::BBox(b[0], b[1], b[2], b[3]));
  });

  m.def("recall", &ag::recall, py::arg("tp"), py::arg("fn"));
  m.def("precision", &ag::precision, py::arg("tp"), py::arg("fp"));
  m.def("f1", &ag::f1, py::arg("pr"), py::arg("re"));

  m.def("_dataset_stats", [](const std::filesystem::path& manifest) {
    const auto s = ag::dataset_stats(ag::load_manifest(manifest));
    py::dict d;
    d["n_total"] = s.n_total;
    d["n_train"] = s.n_train;
    d["n_test"] = s.n_test;
    d["frac_truss_only"] = s.frac_truss_only;
    d["frac_runner_only"] = s.frac_runner_only;
    d["frac_both"] = s.frac_both;
    d["frac_empty"] = s.frac_empty;
    return d;
  });
  m.def("_import_annotations", [](const std::filesystem::path& in_dir,
                                  const std::filesystem::path& out_manifest,
                                  const std::string& split) {
    const auto s = ag::parse_split(split);
    if (!s) throw ag::InvalidParameter("split must be 'train' or 'test'");
    const auto manifest = ag::import_polygon_annotations(in_dir, *s);
    ag::write_manifest(manifest, out_manifest);
    return manifest.entries.size();
  });
  m.def("_augment", [](const std::filesystem::path& manifest,
                       const std::filesystem::path& out_dir, const std::string& noise,
                       std::optional<double> param, std::uint64_t seed, unsigned threads) {
    const auto spec = ag::make_noise_spec(noise, param, seed);
    const auto out = ag::augment_dataset(ag::load_manifest(manifest), spec, out_dir, threads);
    const auto path = out_dir / "manifest.json";
    ag::write_manifest(out, path);
    return path;
  });
  m.def("_evaluate", [](const std::filesystem::path& manifest,
                        const std::filesystem::path& predictions, double iou,
                        const std::string& iou_kind) {
    const auto cfg = match_config(iou, iou_kind);
    const auto report = ag::evaluate(
        ag::load_manifest(manifest, {.check_image_headers = false}),
        ag::load_predictions(predictions), cfg);
    return py::make_tuple(ag::report_to_json(report), ag::report_to_table(report));
  });
  auto style = [](int thickness, bool labels) {
    ag::OverlayStyle st;
    st.thickness = thickness;
    st.draw_labels = labels;
    return st;
  };
  m.def("_render_ground_truth", [style](const std::filesystem::path& manifest,
                                        const std::filesystem::path& image_dir,
                                        const std::filesystem::path& out_dir,
                                        int thickness, bool labels) {
    return ag::render_ground_truth(ag::load_manifest(manifest), image_dir, out_dir,
                                   style(thickness, labels));
  });
  m.def("_render_predictions", [style](const std::filesystem::path& predictions,
                                       const std::filesystem::path& image_dir,
                                       const std::filesystem::path& out_dir,
                                       int thickness, bool labels) {
    return ag::render_predictions(ag::load_predictions(predictions), image_dir, out_dir,
                                  style(thickness, labels));
  });
}
