#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <variant>

#include "upfair/errors.hpp"
#include "upfair/messages.hpp"
#include "upfair/scenario_io.hpp"
#include "upfair/simulator.hpp"
#include "upfair/solvers.hpp"
#include "upfair/utility.hpp"

namespace py = pybind11;
using namespace upfair;

namespace {

py::dict message_dict(const Message& m) {
  py::dict d;
  std::visit(
      [&](const auto& msg) {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, HelloMessage>) {
          d["t"] = "hello";
          d["id"] = msg.user_id;
        } else if constexpr (std::is_same_v<T, BidMessage>) {
          d["t"] = "bid";
          d["id"] = msg.user_id;
          d["n"] = msg.n;
          d["w"] = msg.w;
        } else if constexpr (std::is_same_v<T, PriceMessage>) {
          d["t"] = "price";
          d["n"] = msg.n;
          d["p"] = msg.p;
        } else {
          d["t"] = "stop";
          d["n"] = msg.n;
          d["p"] = msg.p;
        }
      },
      m);
  return d;
}

}  // namespace

PYBIND11_MODULE(_upfair, m) {
  m.doc() = "Sigmoidal-utility power allocation: solvers, agents and simulator";

  py::register_exception<DegenerateChannelError>(m, "DegenerateChannelError", PyExc_RuntimeError);
  py::register_exception<BracketOverflowError>(m, "BracketOverflowError", PyExc_RuntimeError);
  py::register_exception<SingularityError>(m, "SingularityError", PyExc_RuntimeError);
  py::register_exception<DegenerateBidsError>(m, "DegenerateBidsError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<UtilityParams>(m, "UtilityParams")
      .def(py::init<double, double>(), py::arg("a"), py::arg("b"))
      .def_property_readonly("a", &UtilityParams::a)
      .def_property_readonly("b", &UtilityParams::b)
      .def_property_readonly("c", &UtilityParams::c)
      .def_property_readonly("d", &UtilityParams::d)
      .def("__eq__", [](const UtilityParams& x, const UtilityParams& y) { return x == y; })
      .def("__repr__", [](const UtilityParams& u) {
        return "UtilityParams(a=" + py::repr(py::float_(u.a())).cast<std::string>() +
               ", b=" + py::repr(py::float_(u.b())).cast<std::string>() + ")";
      });

  m.def("utility_value", &utility_value, py::arg("params"), py::arg("power"));
  m.def("log_utility", &log_utility, py::arg("params"), py::arg("power"));
  m.def("slope", &slope, py::arg("params"), py::arg("power"));
  m.def("slope_derivative", &slope_derivative, py::arg("params"), py::arg("power"));
  m.def("inflection_power", &inflection_power, py::arg("params"));

  m.def(
      "best_response",
      [](const UtilityParams& u, double price, double tol) {
        BestResponseConfig cfg;
        cfg.power_tolerance = tol;
        return best_response(u, price, cfg);
      },
      py::arg("params"), py::arg("price"), py::arg("power_tolerance") = BestResponseConfig{}.power_tolerance);

  py::class_<OracleResult>(m, "OracleResult")
      .def_readonly("powers", &OracleResult::powers)
      .def_readonly("shadow_price", &OracleResult::shadow_price)
      .def_readonly("kkt_residual", &OracleResult::kkt_residual);
  m.def(
      "oracle_allocate",
      [](const std::vector<UtilityParams>& users, double total) { return oracle_allocate(users, total); },
      py::arg("users"), py::arg("total_power"));

  py::enum_<DecayKind>(m, "DecayKind")
      .value("none", DecayKind::none)
      .value("exponential", DecayKind::exponential)
      .value("rational", DecayKind::rational);
  py::class_<DecayPolicy>(m, "DecayPolicy")
      .def(py::init<>())
      .def_static("none", &DecayPolicy::none)
      .def_static("exponential", &DecayPolicy::exponential, py::arg("l1"), py::arg("l2"))
      .def_static("rational", &DecayPolicy::rational, py::arg("l3"))
      .def_readonly("kind", &DecayPolicy::kind)
      .def_readonly("l1", &DecayPolicy::l1)
      .def_readonly("l2", &DecayPolicy::l2)
      .def_readonly("l3", &DecayPolicy::l3);
  m.def("decay_value", &decay_value, py::arg("policy"), py::arg("n"));

  py::class_<Scenario>(m, "Scenario")
      .def(py::init([](std::vector<UtilityParams> users, double total, double delta, DecayPolicy decay,
                       std::int64_t decay_start, std::vector<double> initial_bids, std::int64_t max_iterations) {
             Scenario s;
             s.users = std::move(users);
             s.total_power = total;
             s.delta = delta;
             s.decay = decay;
             s.decay_start = decay_start;
             s.initial_bids = std::move(initial_bids);
             s.max_iterations = max_iterations;
             s.validate();
             return s;
           }),
           py::arg("users"), py::arg("total_power"), py::arg("delta") = Scenario::kDefaultDelta,
           py::arg("decay") = DecayPolicy{}, py::arg("decay_start") = 1,
           py::arg("initial_bids") = std::vector<double>{},
           py::arg("max_iterations") = Scenario::kDefaultMaxIterations)
      .def_readwrite("users", &Scenario::users)
      .def_readwrite("total_power", &Scenario::total_power)
      .def_readwrite("delta", &Scenario::delta)
      .def_readwrite("decay", &Scenario::decay)
      .def_readwrite("decay_start", &Scenario::decay_start)
      .def_readwrite("initial_bids", &Scenario::initial_bids)
      .def_readwrite("max_iterations", &Scenario::max_iterations)
      .def("validate", &Scenario::validate);

  m.def("reference_users", &reference_users);
  m.def(
      "parse_scenario", [](const std::string& text) { return parse_scenario(text, Scenario{}); },
      py::arg("text"));
  m.def(
      "load_scenario", [](const std::string& path) { return load_scenario(path, Scenario{}); }, py::arg("path"));

  py::enum_<RunStatus>(m, "RunStatus")
      .value("converged", RunStatus::converged)
      .value("max_iterations_reached", RunStatus::max_iterations_reached);
  py::class_<IterationTrace>(m, "IterationTrace")
      .def_readonly("n", &IterationTrace::n)
      .def_readonly("price", &IterationTrace::price)
      .def_readonly("bids", &IterationTrace::bids)
      .def_readonly("powers", &IterationTrace::powers)
      .def_readonly("max_bid_step", &IterationTrace::max_bid_step);
  py::class_<AllocationResult>(m, "AllocationResult")
      .def_readonly("status", &AllocationResult::status)
      .def_readonly("final_powers", &AllocationResult::final_powers)
      .def_readonly("final_price", &AllocationResult::final_price)
      .def_readonly("iterations", &AllocationResult::iterations)
      .def_readonly("trace", &AllocationResult::trace)
      .def_readonly("oracle_gap", &AllocationResult::oracle_gap)
      .def_readonly("oracle", &AllocationResult::oracle);
  m.def("run", &run, py::arg("scenario"), py::call_guard<py::gil_scoped_release>());

  py::enum_<Regime>(m, "Regime")
      .value("convergent", Regime::convergent)
      .value("fluctuation_risk", Regime::fluctuation_risk);
  m.def("classify_regime", &classify_regime, py::arg("scenario"));
  m.def(
      "detect_fluctuation",
      [](const std::vector<IterationTrace>& trace, std::size_t window) { return detect_fluctuation(trace, window); },
      py::arg("trace"), py::arg("window") = kDefaultFluctuationWindow);
  m.def(
      "steady_price_bound", [](const std::vector<UtilityParams>& users) { return steady_price_bound(users); },
      py::arg("users"));
  m.def("critical_price", &critical_price, py::arg("params"));

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("total_power", &SweepRow::total_power)
      .def_readonly("status", &SweepRow::status)
      .def_readonly("iterations", &SweepRow::iterations)
      .def_readonly("price", &SweepRow::price)
      .def_readonly("power_sum", &SweepRow::power_sum)
      .def_readonly("powers", &SweepRow::powers)
      .def_readonly("bids", &SweepRow::bids)
      .def_readonly("oracle_powers", &SweepRow::oracle_powers);
  m.def("sweep_defaults", &sweep_defaults, py::arg("users"));
  m.def(
      "sweep",
      [](const Scenario& base, const std::vector<double>& totals) { return sweep(base, totals); },
      py::arg("base"), py::arg("total_powers"), py::call_guard<py::gil_scoped_release>());

  m.def(
      "encode_bid", [](std::int64_t id, std::int64_t n, double w) { return encode(BidMessage{id, n, w}); },
      py::arg("user_id"), py::arg("n"), py::arg("w"));
  m.def(
      "encode_price", [](std::int64_t n, double p) { return encode(PriceMessage{n, p}); }, py::arg("n"),
      py::arg("p"));
  m.def(
      "encode_stop", [](std::int64_t n, double p) { return encode(StopMessage{n, p}); }, py::arg("n"), py::arg("p"));
  m.def(
      "decode", [](const std::string& line) { return message_dict(decode(line)); }, py::arg("line"));
}
