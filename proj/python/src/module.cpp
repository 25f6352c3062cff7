#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <memory>
#include <sstream>

#include "ssdaae/checkpoint.hpp"
#include "ssdaae/config.hpp"
#include "ssdaae/data.hpp"
#include "ssdaae/errors.hpp"
#include "ssdaae/harness.hpp"
#include "ssdaae/metrics.hpp"

namespace py = pybind11;
using namespace ssdaae;

namespace {

using F32Array = py::array_t<float, py::array::c_style | py::array::forcecast>;

F32Array to_array(const FTensor& t) {
  std::vector<py::ssize_t> shape(t.shape().begin(), t.shape().end());
  F32Array out(shape);
  std::copy(t.values().begin(), t.values().end(), out.mutable_data());
  return out;
}

FTensor to_tensor(const F32Array& a) {
  Shape shape(a.shape(), a.shape() + a.ndim());
  return FTensor(shape, std::vector<float>(a.data(), a.data() + a.size()));
}

ScoredSet scored_set(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw ContractError("scores and labels differ in length");
  ScoredSet s;
  s.scores = scores;
  s.labels = labels;
  return s;
}

RunConfig make_config(const std::optional<std::filesystem::path>& path, const std::vector<std::string>& overrides) {
  RunConfig config = path ? load_config(*path) : RunConfig{};
  for (const auto& o : overrides) apply_override(config, o);
  config.validate();
  return config;
}

py::dict dataset_dict(const Dataset& d) {
  py::list labels;
  for (const auto& l : d.labels) labels.append(l ? py::object(py::int_(*l)) : py::object(py::none()));
  py::dict out;
  out["ids"] = d.ids;
  out["labels"] = labels;
  out["images"] = to_array(d.images);
  return out;
}

py::dict report_dict(const MetricsReport& r) {
  py::list rows;
  for (const auto& p : r.rows) {
    py::dict row;
    row["target"] = p.target;
    row["threshold"] = p.threshold;
    row["sensitivity"] = p.sensitivity;
    row["specificity"] = p.specificity;
    rows.append(row);
  }
  py::dict out;
  out["rows"] = rows;
  out["auc"] = r.auc;
  return out;
}

void bind_data(py::module_& m) {
  m.def(
      "synth_generate",
      [](std::size_t n_per_class, std::uint64_t seed) {
        return dataset_dict(synth_generate(SynthSpec{n_per_class, seed}));
      },
      py::arg("n_per_class"), py::arg("seed") = 0,
      "Synthetic lesion corpus as a dict with ids, labels and images [N, 3, 64, 64].");

  m.def("read_tensor_file", [](const std::filesystem::path& p) { return to_array(read_tensor_file(p)); },
        py::arg("path"));
  m.def(
      "write_tensor_file",
      [](const std::filesystem::path& p, const F32Array& images) { write_tensor_file(p, to_tensor(images)); },
      py::arg("path"), py::arg("images"));

  m.def(
      "read_dataset_dir",
      [](const std::filesystem::path& dir) {
        const Splits s = read_dataset_dir(dir);
        py::dict out;
        out["unlabelled"] = dataset_dict(s.unlabelled);
        out["labelled_train"] = dataset_dict(s.labelled_train);
        out["val"] = dataset_dict(s.val);
        out["test"] = dataset_dict(s.test);
        return out;
      },
      py::arg("dir"));

  // Image in: float32 [3, H, W] in [0, 1].
  m.def(
      "remove_identifier_patch",
      [](const F32Array& pixels) {
        if (pixels.ndim() != 3 || pixels.shape(0) != 3) throw ShapeError("expected an array of shape [3, H, W]");
        Image img(static_cast<std::size_t>(pixels.shape(1)), static_cast<std::size_t>(pixels.shape(2)));
        std::copy(pixels.data(), pixels.data() + pixels.size(), img.data.begin());
        const PatchRemovalResult r = remove_identifier_patch(img);
        py::object crop = py::none();
        if (r.image) {
          F32Array a({py::ssize_t{3}, static_cast<py::ssize_t>(r.image->height),
                      static_cast<py::ssize_t>(r.image->width)});
          std::copy(r.image->data.begin(), r.image->data.end(), a.mutable_data());
          crop = a;
        }
        return py::make_tuple(crop, py::make_tuple(r.rect.top, r.rect.left, r.rect.height, r.rect.width),
                              r.rejection);
      },
      py::arg("image"), "Returns (crop or None, (top, left, height, width), rejection reason).");
}

void bind_metrics(py::module_& m) {
  m.attr("SENSITIVITY_TARGETS") = std::vector<double>(kSensitivityTargets.begin(), kSensitivityTargets.end());

  m.def(
      "specificity_at_sensitivity",
      [](const std::vector<double>& scores, const std::vector<int>& labels, double target) {
        const OperatingPoint p = specificity_at_sensitivity(scored_set(scores, labels), target);
        return py::make_tuple(p.threshold, p.sensitivity, p.specificity);
      },
      py::arg("scores"), py::arg("labels"), py::arg("target"),
      "Returns (threshold, sensitivity, specificity).");
  m.def(
      "roc_auc",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        return roc_auc(scored_set(scores, labels));
      },
      py::arg("scores"), py::arg("labels"));
  m.def(
      "metrics_report",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        return report_dict(make_report(scored_set(scores, labels)));
      },
      py::arg("scores"), py::arg("labels"));
}

void bind_model(py::module_& m) {
  py::class_<Model, std::unique_ptr<Model>>(m, "Model")
      .def_static(
          "load", [](const std::filesystem::path& dir) { return std::make_unique<Model>(load_model(dir)); },
          py::arg("checkpoint"))
      .def_property_readonly("variant", [](const Model& model) { return std::string(name_of(model.kind())); })
      .def(
          "predict",
          [](Model& model, const F32Array& images) {
            const FTensor t = to_tensor(images);
            py::gil_scoped_release release;
            return predict(model, t);
          },
          py::arg("images"), "P(malignant) for images [N, 3, 64, 64].")
      .def(
          "generate",
          [](Model& model, std::size_t n, const std::string& label, std::uint64_t seed) {
            GenerateLabel l = GenerateLabel::random;
            if (label == "0") l = GenerateLabel::zero;
            else if (label == "1") l = GenerateLabel::one;
            else if (label != "random") throw ConfigError("label must be 0, 1 or random");
            return to_array(generate(model, n, l, seed));
          },
          py::arg("n"), py::arg("label") = "random", py::arg("seed") = 0);
}

void bind_commands(py::module_& m) {
  m.def("variants", [] {
    std::vector<std::string> out;
    for (VariantKind k : kAllVariants) out.emplace_back(name_of(k));
    return out;
  });
  m.def("config_keys", &key_names);
  m.def(
      "resolve_config",
      [](std::optional<std::filesystem::path> path, const std::vector<std::string>& overrides) {
        return to_json(make_config(path, overrides)).dump();
      },
      py::arg("config") = py::none(), py::arg("overrides") = std::vector<std::string>{},
      "Resolved configuration as a JSON string.");

  m.def(
      "train",
      [](std::optional<std::filesystem::path> path, const std::vector<std::string>& overrides) {
        const RunConfig config = make_config(path, overrides);
        TrainOutcome o;
        {
          py::gil_scoped_release release;
          o = cmd_train(config);
        }
        py::dict out;
        out["run_dir"] = o.run_dir;
        out["step_log_sha256"] = o.step_log_sha256;
        out["config_hash"] = o.config_hash;
        out["test"] = report_dict(o.test);
        return out;
      },
      py::arg("config") = py::none(), py::arg("overrides") = std::vector<std::string>{},
      "Trains one model. Overrides are key=value strings.");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings for the ssdaae C++ core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<ProtocolError>(m, "ProtocolError", PyExc_RuntimeError);
  py::register_exception<IngestionError>(m, "IngestionError", PyExc_RuntimeError);

  bind_data(m);
  bind_metrics(m);
  bind_model(m);
  bind_commands(m);
}
