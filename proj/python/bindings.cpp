#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mgems/analysis.hpp"
#include "mgems/artifacts.hpp"
#include "mgems/emulator.hpp"
#include "mgems/errors.hpp"
#include "mgems/lp_model.hpp"
#include "mgems/presets.hpp"
#include "mgems/scenario.hpp"
#include "mgems/tariff.hpp"

namespace py = pybind11;
using namespace mgems;

PYBIND11_MODULE(_mgems, m) {
  m.doc() = "Microgrid day-ahead scheduling and battery emulation";
  m.attr("__version__") = tool_version();

  // Later registrations are tried first, so subclasses follow their base.
  auto& error = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", error);
  py::register_exception<ValidationError>(m, "ValidationError", error);
  py::register_exception<LengthMismatchError>(m, "LengthMismatchError", error);
  py::register_exception<ArtifactMismatchError>(m, "ArtifactMismatchError", error);
  py::register_exception<ModelError>(m, "ModelError", error);
  static py::handle infeasible =
      py::register_exception<InfeasibleError>(m, "InfeasibleError", error).ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InfeasibleError& e) {
      // The binding class travels as the message prefix.
      const std::string msg = std::string(to_string(e.binding_class())) + ": " + e.what();
      PyErr_SetString(infeasible.ptr(), msg.c_str());
    }
  });

  py::class_<Scenario>(m, "Scenario")
      .def_static("from_files", &load_scenario_files, py::arg("config_path"),
                  py::arg("pv_path") = std::nullopt, py::arg("load_path") = std::nullopt)
      .def_static("from_text", &load_scenario, py::arg("config"), py::arg("pv_csv"),
                  py::arg("load_csv"))
      .def_static(
          "preset",
          [](const std::string& name) {
            auto s = presets::by_name(name);
            if (!s) throw ValidationError("preset", "unknown preset '" + name + "'");
            return *s;
          },
          py::arg("name"))
      .def_readonly("name", &Scenario::name)
      .def_property_readonly("n_steps", [](const Scenario& s) { return s.time.n_steps; })
      .def_property_readonly("step_hours", [](const Scenario& s) { return s.time.step_hours; })
      .def_property_readonly("pv_kw", [](const Scenario& s) { return s.pv.values; })
      .def_property_readonly("load_kw", [](const Scenario& s) { return s.load.values; })
      .def_property_readonly("soe_init", [](const Scenario& s) { return s.battery.soe_init; })
      .def_property_readonly("e_nom_kwh", [](const Scenario& s) { return s.battery.e_nom; })
      .def_property_readonly("c_st", &Scenario::c_st)
      .def("buy_price", [](const Scenario& s, std::size_t t) { return buy_price(s.tariff, t, s.time); })
      .def_property_readonly("sell_price", [](const Scenario& s) { return s.tariff.sell; })
      .def("digest", &scenario_digest)
      .def("to_text",
           [](const Scenario& s) {
             const auto t = serialize_scenario(s);
             return py::make_tuple(t.config, t.pv_csv, t.load_csv);
           })
      .def("__repr__", [](const Scenario& s) {
        return "<Scenario '" + s.name + "' " + std::to_string(s.time.n_steps) + " steps>";
      });

  py::class_<Schedule>(m, "Schedule")
      .def_readonly("p_g_buy_kw", &Schedule::p_g_buy)
      .def_readonly("p_g_sell_kw", &Schedule::p_g_sell)
      .def_readonly("p_st_dis_kw", &Schedule::p_st_dis)
      .def_readonly("p_st_ch_kw", &Schedule::p_st_ch)
      .def_readonly("p_batt_kw", &Schedule::p_batt)
      .def_readonly("soe_plan", &Schedule::soe_plan)
      .def_readonly("planned_cost", &Schedule::planned_cost)
      .def_property_readonly("n_steps", &Schedule::n_steps)
      .def("to_json", &schedule_to_json, py::arg("scenario_digest"))
      .def("to_csv", &schedule_to_csv)
      .def_static(
          "from_json",
          [](const std::string& text) {
            auto a = schedule_from_json(text);
            return py::make_tuple(a.schedule, a.scenario_digest);
          },
          py::arg("text"));

  py::class_<ElectricalBatteryModel>(m, "BatteryModel")
      .def(py::init<>())
      .def_static("vrla", [](const Scenario& s) { return ElectricalBatteryModel::vrla(s.battery); })
      .def_static("ideal", [](const Scenario& s) { return ElectricalBatteryModel::ideal(s.battery); })
      .def("with_overrides",
           [](const ElectricalBatteryModel& base, const std::string& json_text) {
             return model_from_json(json_text, base);
           })
      .def_readwrite("ocv_at_empty", &ElectricalBatteryModel::ocv_at_empty)
      .def_readwrite("ocv_at_full", &ElectricalBatteryModel::ocv_at_full)
      .def_readwrite("r_internal", &ElectricalBatteryModel::r_internal)
      .def_readwrite("v_max", &ElectricalBatteryModel::v_max)
      .def_readwrite("v_min", &ElectricalBatteryModel::v_min)
      .def_readwrite("i_charge_max", &ElectricalBatteryModel::i_charge_max)
      .def_readwrite("i_discharge_max", &ElectricalBatteryModel::i_discharge_max)
      .def_readwrite("true_state", &ElectricalBatteryModel::true_state)
      .def("validate", &ElectricalBatteryModel::validate);

  py::class_<EmulationTrace>(m, "EmulationTrace")
      .def_readonly("substeps_per_step", &EmulationTrace::substeps_per_step)
      .def_readonly("dt_hours", &EmulationTrace::dt_hours)
      .def_readonly("time_h", &EmulationTrace::time_h)
      .def_readonly("p_batt_kw", &EmulationTrace::p_batt_kw)
      .def_readonly("i_batt_a", &EmulationTrace::i_batt_a)
      .def_readonly("v_batt_v", &EmulationTrace::v_batt_v)
      .def_readonly("soc_est", &EmulationTrace::soc_est)
      .def_readonly("soe_est", &EmulationTrace::soe_est)
      .def_readonly("true_state", &EmulationTrace::true_state)
      .def_readonly("p_st_kw", &EmulationTrace::p_st_kw)
      .def_readonly("p_grid_kw", &EmulationTrace::p_grid_kw)
      .def_readonly("cv_limited", &EmulationTrace::cv_limited)
      .def_readonly("boundary_soe_est", &EmulationTrace::boundary_soe_est)
      .def_readonly("boundary_soc_est", &EmulationTrace::boundary_soc_est)
      .def_property_readonly("violation_count",
                             [](const EmulationTrace& t) { return t.violations.size(); })
      .def("__len__", &EmulationTrace::size)
      .def("to_csv", &trace_to_csv);

  py::class_<DiscrepancyReport>(m, "DiscrepancyReport")
      .def_readonly("planned_cost", &DiscrepancyReport::planned_cost)
      .def_readonly("realized_cost", &DiscrepancyReport::realized_cost)
      .def_readonly("cost_error_pct", &DiscrepancyReport::cost_error_pct)
      .def_readonly("soe_plan_final", &DiscrepancyReport::soe_plan_final)
      .def_readonly("soe_est_final", &DiscrepancyReport::soe_est_final)
      .def_readonly("soc_est_final", &DiscrepancyReport::soc_est_final)
      .def_readonly("soe_deviation_pct", &DiscrepancyReport::soe_deviation_pct)
      .def_readonly("max_soe_deviation_pct", &DiscrepancyReport::max_soe_deviation_pct)
      .def_readonly("cv_limited_hours", &DiscrepancyReport::cv_limited_hours)
      .def_readonly("violation_count", &DiscrepancyReport::violation_count)
      .def_readonly("planned_charge_kwh", &DiscrepancyReport::planned_charge_kwh)
      .def_readonly("realized_charge_kwh", &DiscrepancyReport::realized_charge_kwh)
      .def_readonly("planned_discharge_kwh", &DiscrepancyReport::planned_discharge_kwh)
      .def_readonly("realized_discharge_kwh", &DiscrepancyReport::realized_discharge_kwh)
      .def_readonly("planned_onpeak_purchase_kwh", &DiscrepancyReport::planned_onpeak_purchase_kwh)
      .def_readonly("realized_onpeak_purchase_kwh",
                    &DiscrepancyReport::realized_onpeak_purchase_kwh)
      .def("to_json", &report_to_json, py::arg("scenario_digest"))
      .def("__str__", &format_report);

  m.def("solve_day_ahead", [](const Scenario& s) { return solve_day_ahead(s); }, py::arg("scenario"),
        py::call_guard<py::gil_scoped_release>());
  m.def("emulate", &emulate, py::arg("scenario"), py::arg("schedule"), py::arg("model"),
        py::arg("substeps_per_step") = 60, py::call_guard<py::gil_scoped_release>());
  m.def("compare", &compare, py::arg("scenario"), py::arg("schedule"), py::arg("trace"));
  m.def("cost_error_pct", &cost_error_pct, py::arg("planned"), py::arg("realized"));
  m.def(
      "ageing_unit_cost",
      [](double c_batt, double n_cycles, double dod, double e_nom) {
        return ageing_unit_cost(AgeingParams{c_batt, n_cycles, dod, std::nullopt}, e_nom);
      },
      py::arg("c_batt_per_kwh") = AgeingParams{}.c_batt_per_kwh,
      py::arg("n_cycles") = AgeingParams{}.n_cycles, py::arg("dod") = AgeingParams{}.dod,
      py::arg("e_nom_kwh") = BatteryParams{}.e_nom);
  m.def("sha256_hex", [](const std::string& s) { return sha256_hex(s); });
}
