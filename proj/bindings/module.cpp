#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "csg/environments.hpp"
#include "csg/geometry.hpp"
#include "csg/harness.hpp"
#include "csg/spanner.hpp"

namespace py = pybind11;

namespace {

csg::Context resolve_context(const csg::GameInstance& inst,
                             const py::object& ctx) {
  if (py::isinstance<py::str>(ctx)) {
    const std::string label = ctx.cast<std::string>();
    for (const auto& z : inst.context_space.contexts)
      if (z.label == label) return z;
    throw std::runtime_error("unknown context label: " + label);
  }
  csg::Context z;
  z.vec = ctx.cast<std::vector<double>>();
  return z;
}

csg::MixedStrategy make_strategy(const std::vector<double>& probs) {
  csg::MixedStrategy x{probs};
  if (!x.valid(1e-6)) throw std::runtime_error("invalid mixed strategy");
  return x;
}

}  // namespace

PYBIND11_MODULE(_csg, m) {
  m.doc() = "Online Stackelberg learning with side information";

  py::class_<csg::GameInstance>(m, "GameInstance")
      .def_readonly("leader_actions", &csg::GameInstance::num_leader_actions)
      .def_readonly("follower_actions",
                    &csg::GameInstance::num_follower_actions)
      .def_readonly("num_types", &csg::GameInstance::num_types)
      .def_property_readonly("context_labels",
                             [](const csg::GameInstance& inst) {
                               std::vector<std::string> labels;
                               for (const auto& z :
                                    inst.context_space.contexts)
                                 labels.push_back(z.label);
                               return labels;
                             })
      .def("to_json", &csg::instance_to_json);

  m.def("load_instance", &csg::load_instance, py::arg("path"));
  m.def("parse_instance", &csg::parse_instance, py::arg("json_text"));
  m.def("build_olt_instance", &csg::build_olt_instance);
  m.def("scenario_names", [] { return csg::scenario_names(); });

  m.def(
      "follower_best_response",
      [](const csg::GameInstance& inst, int type_idx, const py::object& ctx,
         const std::vector<double>& probs) {
        return csg::follower_best_response(inst, type_idx,
                                           resolve_context(inst, ctx),
                                           make_strategy(probs));
      },
      py::arg("instance"), py::arg("type_idx"), py::arg("context"),
      py::arg("strategy"));

  m.def(
      "expected_leader_utility",
      [](const csg::GameInstance& inst, const py::object& ctx,
         const std::vector<double>& probs, int a_f) {
        return csg::expected_leader_utility(inst, resolve_context(inst, ctx),
                                            make_strategy(probs), a_f);
      },
      py::arg("instance"), py::arg("context"), py::arg("strategy"),
      py::arg("follower_action"));

  m.def(
      "extreme_points",
      [](const csg::GameInstance& inst, const py::object& ctx, double delta) {
        const auto E =
            csg::approx_extreme_points(inst, resolve_context(inst, ctx), delta);
        py::list out;
        for (const auto& p : E.points)
          out.append(py::make_tuple(p.x.probs, p.sigma));
        return out;
      },
      py::arg("instance"), py::arg("context"), py::arg("delta") = 1e-3);

  m.def(
      "barycentric_spanner",
      [](const csg::GameInstance& inst, double delta) {
        const auto spanner =
            csg::barycentric_spanner(csg::indicator_set(inst, delta));
        py::list elements;
        for (const auto& e : spanner.elements())
          elements.append(py::make_tuple(e.bits, e.realizer_x.probs,
                                         e.realizer_action));
        return py::make_tuple(spanner.rank(), elements);
      },
      py::arg("instance"), py::arg("delta") = 1e-3);

  m.def(
      "region_report",
      [](const csg::GameInstance& inst, const py::object& ctx, double delta) {
        return csg::region_report(inst, resolve_context(inst, ctx), delta);
      },
      py::arg("instance"), py::arg("context"), py::arg("delta") = 1e-3);

  m.def(
      "run_experiment",
      [](const csg::GameInstance& inst, const std::string& scenario,
         const std::string& alg, int T, int seeds, std::uint64_t base_seed,
         double delta, const std::string& out_dir) {
        csg::RunConfig cfg;
        cfg.instance = inst;
        cfg.instance_loaded = true;
        cfg.scenario = scenario;
        cfg.alg = alg;
        cfg.T = T;
        cfg.num_seeds = seeds;
        cfg.base_seed = base_seed;
        cfg.delta = delta;
        cfg.out_dir = out_dir;
        const csg::RunResult res = csg::run_experiment(cfg);
        py::dict out;
        out["mean_regret"] = res.aggregate.mean_regret;
        out["std_regret"] = res.aggregate.std_regret;
        out["mean_avg_regret"] = res.aggregate.mean_avg_regret;
        return out;
      },
      py::arg("instance"), py::arg("scenario"), py::arg("alg"), py::arg("T"),
      py::arg("seeds") = 1, py::arg("base_seed") = 1, py::arg("delta") = 0.0,
      py::arg("out_dir") = "");
}
