#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <optional>
#include <string>

#include "pinch/errors.hpp"
#include "pinch/hand_model.hpp"
#include "pinch/kinematics.hpp"
#include "pinch/pipeline.hpp"
#include "pinch/reporting.hpp"
#include "pinch/workspace.hpp"

namespace py = pybind11;
using namespace pinch;

namespace {

py::array_t<double> as_array(const std::vector<Vec3>& points) {
  py::array_t<double> out({static_cast<py::ssize_t>(points.size()), py::ssize_t{3}});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (int k = 0; k < 3; ++k) view(i, k) = points[i][k];
  }
  return out;
}

HandModel load_model(int case_number, const std::optional<std::string>& hand) {
  if (hand) {
    HandConfig config = load_hand_config(*hand);
    config.case_id = case_from_number(case_number);
    return build_model(config);
  }
  return build_case(case_from_number(case_number), HandParameters{});
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pinch-capability evaluation for five-finger hand models";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_RuntimeError);
  py::register_exception<DegenerateGeometry>(m, "DegenerateGeometry", PyExc_ArithmeticError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<HandModel>(m, "HandModel")
      .def(py::init(&load_model), py::arg("case"), py::arg("hand") = std::nullopt)
      .def_property_readonly("case", [](const HandModel& h) { return case_number(h.case_id); })
      .def_property_readonly("fingerprint", &HandModel::fingerprint)
      .def("joint_ranges",
           [](const HandModel& h, const std::string& finger) {
             std::vector<std::pair<double, double>> out;
             for (const JointRange& r : h.joint_ranges(finger_from_string(finger))) out.emplace_back(r.min, r.max);
             return out;
           },
           py::arg("finger"))
      .def("dof", [](const HandModel& h, const std::string& f) { return h.chain(finger_from_string(f)).actuated_count; },
           py::arg("finger"))
      .def("frames",
           [](const HandModel& h, const std::string& finger, const std::vector<double>& q) {
             std::vector<Eigen::Matrix4d> out;
             for (const Transform4& t : forward_kinematics(h.chain(finger_from_string(finger)), q)) out.push_back(t.matrix());
             return out;
           },
           py::arg("finger"), py::arg("q"), "Base-frame transform after each DH row")
      .def("fingertip",
           [](const HandModel& h, const std::string& finger, const std::vector<double>& q) {
             const FingertipSample s = fingertip_sample(h.chain(finger_from_string(finger)), q);
             py::dict d;
             d["tip"] = Eigen::Vector3d(s.tip);
             d["distal_joint"] = Eigen::Vector3d(s.distal_joint);
             d["direction"] = Eigen::Vector3d(s.direction);
             d["phalanx_points"] = as_array(s.phalanx_points);
             return d;
           },
           py::arg("finger"), py::arg("q"))
      .def("grid_size",
           [](const HandModel& h, const std::string& finger, int res, const std::string& sampling) {
             return grid(h.joint_ranges(finger_from_string(finger)),
                         ResolutionPolicy::named(resolution_from_number(res), sampling_from_string(sampling)))
                 .size();
           },
           py::arg("finger"), py::arg("res") = 1, py::arg("sampling") = "min-inclusive")
      .def("cloud",
           [](const HandModel& h, const std::string& finger, int res, const std::string& sampling, unsigned workers) {
             const FingerId f = finger_from_string(finger);
             const ConfigurationGrid g =
                 grid(h.joint_ranges(f), ResolutionPolicy::named(resolution_from_number(res), sampling_from_string(sampling)));
             SampleSet s;
             {
               py::gil_scoped_release release;
               s = enumerate_samples(h, f, g, {workers, false});
             }
             return as_array(reachable_cloud(s));
           },
           py::arg("finger"), py::arg("res") = 1, py::arg("sampling") = "min-inclusive", py::arg("workers") = 1,
           "Fingertip positions of every grid configuration, shape (N, 3)");

  m.def(
      "run_json",
      [](const HandModel& h, const std::string& detector, int res, double epsilon, const std::string& delta,
         const std::string& sampling, const std::string& strategy, unsigned workers,
         std::optional<std::vector<double>> spans) {
        RunSpec spec;
        spec.detector = detector_from_string(detector);
        spec.resolution = resolution_from_number(res);
        if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
        spec.epsilon = epsilon;
        apply_delta(spec, delta);
        spec.sampling = sampling_from_string(sampling);
        spec.strategy = strategy_from_string(strategy);
        spec.workers = std::max(1u, workers);
        spec.spans = std::move(spans);
        std::string json;
        {
          py::gil_scoped_release release;
          SampleCache cache(std::nullopt, spec.workers);
          json = to_json(summarize(h.case_id, spec, run_detection(h, spec, cache)));
        }
        return json;
      },
      py::arg("model"), py::arg("detector"), py::arg("res") = 1, py::arg("epsilon") = 1e-5, py::arg("delta") = "bucket",
      py::arg("sampling") = "min-inclusive", py::arg("strategy") = "binned", py::arg("workers") = 1,
      py::arg("spans") = std::nullopt, "Runs one detector and returns the report as JSON text");

  m.def(
      "summary_csv",
      [](const std::vector<std::string>& reports) {
        std::vector<DetectionReport> parsed;
        for (const std::string& r : reports) parsed.push_back(report_from_json(r));
        std::ostringstream out;
        write_summary_csv(out, parsed);
        return out.str();
      },
      py::arg("reports"), "Summary CSV for report JSON texts");

  m.def("format_ratio_pct", &format_ratio_pct, py::arg("detected"), py::arg("evaluated"));

  m.def("reference_values", [] {
    py::list out;
    for (const ReferenceValue& r : reference_values()) {
      py::dict d;
      d["quantity"] = std::string(to_string(r.quantity));
      d["case"] = case_number(r.case_id);
      d["finger"] = r.finger ? py::object(py::str(std::string(to_string(*r.finger)))) : py::object(py::none());
      d["epsilon"] = r.epsilon;
      d["value"] = r.value;
      out.append(d);
    }
    return out;
  });
}
