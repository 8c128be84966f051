/*
 * Copyright 2026 The orcafd Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "orca/bundle.hpp"
#include "orca/errors.hpp"
#include "orca/matrix.hpp"
#include "orca/metrics.hpp"
#include "orca/orca.hpp"
#include "orca/pipeline.hpp"
#include "orca/report.hpp"
#include "orca/scorers.hpp"
#include "orca/similarity.hpp"
#include "orca/synth.hpp"

namespace py = pybind11;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray =
    py::array_t<double, py::array::c_style | py::array::forcecast>;
using BoolArray = py::array_t<bool, py::array::c_style | py::array::forcecast>;

orca::EmbeddingMatrix to_matrix(const FloatArray& a, bool l2_normalized) {
  if (a.ndim() != 2) throw orca::ShapeError("expected a 2-D array");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  std::vector<float> data(a.data(), a.data() + rows * cols);
  return orca::EmbeddingMatrix(rows, cols, std::move(data), l2_normalized);
}

py::array_t<float> to_array(const orca::EmbeddingMatrix& m) {
  py::array_t<float> out({static_cast<py::ssize_t>(m.rows()),
                          static_cast<py::ssize_t>(m.cols())});
  std::memcpy(out.mutable_data(), m.data().data(),
              m.data().size() * sizeof(float));
  return out;
}

std::vector<double> to_vector(const DoubleArray& a) {
  if (a.ndim() != 1) throw orca::ShapeError("expected a 1-D array");
  return {a.data(), a.data() + a.size()};
}

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(double));
  return out;
}

std::vector<orca::ScoredOutcome> outcomes(const DoubleArray& confidence,
                                          const BoolArray& correct) {
  if (confidence.ndim() != 1 || correct.ndim() != 1 ||
      confidence.size() != correct.size()) {
    throw orca::ShapeError("confidence and correct must be 1-D and equal length");
  }
  std::vector<orca::ScoredOutcome> out(static_cast<std::size_t>(confidence.size()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = {confidence.data()[i], correct.data()[i]};
  }
  return out;
}

py::tuple decision(const orca::Decision& d) {
  return py::make_tuple(d.prediction, d.confidence);
}

py::object optional_float(const std::optional<double>& v) {
  if (!v) return py::float_(std::numeric_limits<double>::quiet_NaN());
  return py::float_(*v);
}

py::dict evaluate(const orca::DatasetBundle& bundle,
                  std::optional<std::vector<std::string>> methods,
                  std::optional<std::vector<std::string>> csfs,
                  std::optional<std::size_t> rank_depth,
                  const std::string& scheme, double odin_temperature,
                  double tau, unsigned workers) {
  orca::EvalOptions opts;
  opts.methods = orca::expand_methods(
      methods.value_or(orca::default_method_names(bundle)),
      csfs.value_or(orca::default_csf_names()));
  opts.rank_depth = rank_depth;
  opts.scheme = orca::parse_weight_scheme(scheme);
  opts.odin_temperature = odin_temperature;
  opts.tau = tau;
  opts.workers = workers;

  orca::EvalResults res;
  {
    py::gil_scoped_release release;
    res = orca::evaluate(bundle, opts);
  }
  py::dict out;
  for (const auto& m : res.methods) {
    const std::size_t n = m.records.size();
    py::array_t<std::int64_t> pred(static_cast<py::ssize_t>(n));
    py::array_t<double> conf(static_cast<py::ssize_t>(n));
    py::array_t<bool> correct(static_cast<py::ssize_t>(n));
    for (std::size_t i = 0; i < n; ++i) {
      pred.mutable_data()[i] =
          static_cast<std::int64_t>(m.records[i].predicted_category);
      conf.mutable_data()[i] = m.records[i].confidence;
      correct.mutable_data()[i] = m.records[i].correct;
    }
    py::dict row;
    row["auroc"] = optional_float(m.metrics.auroc);
    row["fpr95"] = optional_float(m.metrics.fpr_at_95tpr);
    row["acc"] = m.metrics.accuracy;
    row["n_correct"] = m.metrics.n_correct;
    row["n_incorrect"] = m.metrics.n_incorrect;
    row["detected"] = m.detected;
    row["predictions"] = pred;
    row["confidences"] = conf;
    row["correct"] = correct;
    out[py::str(m.method.tag())] = row;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_orcafd, m) {
  m.doc() = "Concept-ranking failure detection for vision-language classifiers";

  auto base = py::register_exception<orca::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<orca::InputError>(m, "InputError", base.ptr());
  py::register_exception<orca::IoError>(m, "IoError", PyExc_OSError);

  m.attr("LOGIT_SCALE") = orca::kLogitScale;
  m.attr("DEFAULT_ODIN_TEMPERATURE") = orca::kDefaultOdinTemperature;

  // Tensor files.
  m.def(
      "read_matrix",
      [](const std::filesystem::path& path) {
        const auto mat = orca::read_matrix(path);
        return py::make_tuple(to_array(mat), mat.l2_normalized());
      },
      py::arg("path"),
      "Read a tensor file; returns (float32 array, l2_normalized flag).");
  m.def(
      "write_matrix",
      [](const std::filesystem::path& path, const FloatArray& a,
         bool l2_normalized) {
        orca::write_matrix(to_matrix(a, l2_normalized), path);
      },
      py::arg("path"), py::arg("array"), py::arg("l2_normalized") = false);

  // Similarity and confidence functions.
  m.def(
      "l2_normalize",
      [](const DoubleArray& v) { return to_array(orca::l2_normalize(to_vector(v))); },
      py::arg("v"));
  m.def(
      "similarity_logits",
      [](const FloatArray& image, const FloatArray& text) {
        if (image.ndim() != 1) throw orca::ShapeError("image must be 1-D");
        const auto bank = to_matrix(text, false);
        return to_array(orca::similarity_logits(
            std::span<const float>(image.data(),
                                   static_cast<std::size_t>(image.size())),
            bank));
      },
      py::arg("image"), py::arg("text"));
  m.def(
      "softmax",
      [](const DoubleArray& s, double t) {
        return to_array(orca::softmax(to_vector(s), t));
      },
      py::arg("logits"), py::arg("temperature") = 1.0);
  m.def(
      "csf_msp", [](const DoubleArray& p) { return orca::csf_msp(to_vector(p)); },
      py::arg("probs"));
  m.def(
      "csf_odin",
      [](const DoubleArray& s, double t) { return orca::csf_odin(to_vector(s), t); },
      py::arg("logits"), py::arg("temperature") = orca::kDefaultOdinTemperature);
  m.def(
      "csf_doctor",
      [](const DoubleArray& p) { return orca::csf_doctor(to_vector(p)); },
      py::arg("probs"));

  // Concept ranking.
  m.def(
      "top_k_concepts",
      [](const DoubleArray& s, std::size_t concepts_per_category, std::size_t k) {
        py::list out;
        for (const auto& e :
             orca::top_k_concepts(to_vector(s), concepts_per_category, k)) {
          out.append(py::make_tuple(e.concept_index, e.category_index, e.score));
        }
        return out;
      },
      py::arg("concept_logits"), py::arg("concepts_per_category"), py::arg("k"),
      "Top-k concepts as (concept_index, category_index, score) tuples.");
  m.def(
      "rank_weights",
      [](std::size_t k, const std::string& scheme) {
        return to_array(
            orca::rank_weights(k, orca::parse_weight_scheme(scheme)).weights);
      },
      py::arg("k"), py::arg("scheme") = "logarithmic");
  m.def(
      "orca_b",
      [](const DoubleArray& s, std::size_t concepts_per_category,
         std::optional<std::size_t> k) {
        const auto logits = to_vector(s);
        const std::size_t depth = k.value_or(concepts_per_category);
        const std::size_t C = logits.size() / concepts_per_category;
        return decision(orca::orca_b(
            orca::top_k_concepts(logits, concepts_per_category, depth), C, depth));
      },
      py::arg("concept_logits"), py::arg("concepts_per_category"),
      py::arg("k") = py::none(), "Returns (prediction, confidence).");
  m.def(
      "orca_r",
      [](const DoubleArray& s, std::size_t concepts_per_category,
         std::optional<std::size_t> k, const std::string& scheme) {
        const auto logits = to_vector(s);
        const std::size_t depth = k.value_or(concepts_per_category);
        const std::size_t C = logits.size() / concepts_per_category;
        return decision(orca::orca_r(
            orca::top_k_concepts(logits, concepts_per_category, depth),
            orca::rank_weights(depth, orca::parse_weight_scheme(scheme)), C));
      },
      py::arg("concept_logits"), py::arg("concepts_per_category"),
      py::arg("k") = py::none(), py::arg("scheme") = "logarithmic",
      "Returns (prediction, confidence).");

  // Metrics.
  m.def(
      "auroc",
      [](const DoubleArray& c, const BoolArray& y) {
        return orca::auroc(outcomes(c, y));
      },
      py::arg("confidence"), py::arg("correct"));
  m.def(
      "fpr_at_tpr",
      [](const DoubleArray& c, const BoolArray& y, double level) {
        return orca::fpr_at_tpr(outcomes(c, y), level);
      },
      py::arg("confidence"), py::arg("correct"), py::arg("tpr_level") = 0.95);
  m.def(
      "gate",
      [](double confidence, double tau) {
        return orca::gate(confidence, tau) == orca::GateDecision::kAccept
                   ? "accept"
                   : "detect";
      },
      py::arg("confidence"), py::arg("tau"));

  // Bundles and evaluation.
  py::class_<orca::DatasetBundle>(m, "Bundle")
      .def_property_readonly("num_samples", &orca::DatasetBundle::num_samples)
      .def_property_readonly("num_categories",
                             &orca::DatasetBundle::num_categories)
      .def_property_readonly("concepts_per_category",
                             &orca::DatasetBundle::concepts_per_category)
      .def_readonly("category_names", &orca::DatasetBundle::category_names)
      .def_readonly("labels", &orca::DatasetBundle::labels)
      .def_readonly("dataset_id", &orca::DatasetBundle::dataset_id)
      .def_property_readonly(
          "images",
          [](const orca::DatasetBundle& b) { return to_array(b.image_embeddings); })
      .def_property_readonly("concept_text",
                             [](const orca::DatasetBundle& b) {
                               return to_array(b.concept_text_embeddings);
                             })
      .def_property_readonly("category_text", [](const orca::DatasetBundle& b) {
        return to_array(b.category_text_embeddings);
      });

  m.def("load_manifest", &orca::load_manifest, py::arg("path"));
  m.def(
      "write_bundle",
      [](const orca::DatasetBundle& b, const std::filesystem::path& dir) {
        return orca::write_bundle(b, dir);
      },
      py::arg("bundle"), py::arg("directory"),
      "Write a bundle and return the manifest path.");
  m.def("evaluate", &evaluate, py::arg("bundle"), py::arg("methods") = py::none(),
        py::arg("csfs") = py::none(), py::arg("rank_depth") = py::none(),
        py::arg("scheme") = "logarithmic",
        py::arg("odin_temperature") = orca::kDefaultOdinTemperature,
        py::arg("tau") = 0.5, py::arg("workers") = 0u,
        "Score every configured method; returns {method tag: results}.");
  m.def(
      "make_synthetic_bundle",
      [](std::size_t categories, std::size_t concepts, std::size_t pool_size,
         std::size_t samples, std::size_t train_samples, double failure_rate,
         std::size_t templates, std::uint64_t seed) {
        orca::SynthConfig cfg;
        cfg.categories = categories;
        cfg.concepts = concepts;
        cfg.pool_size = pool_size;
        cfg.samples = samples;
        cfg.train_samples = train_samples;
        cfg.failure_rate = failure_rate;
        cfg.templates = templates;
        cfg.seed = seed;
        auto s = orca::make_synthetic_bundle(cfg);
        return py::make_tuple(std::move(s.bundle), s.planted_failure);
      },
      py::arg("categories") = 10, py::arg("concepts") = 10,
      py::arg("pool_size") = 25, py::arg("samples") = 400,
      py::arg("train_samples") = 200, py::arg("failure_rate") = 0.3,
      py::arg("templates") = 2, py::arg("seed") = 0,
      "Returns (bundle, planted_failure list).");
}
