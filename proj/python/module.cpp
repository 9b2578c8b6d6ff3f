#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cdp/belief.hpp"
#include "cdp/causal_graph.hpp"
#include "cdp/harness.hpp"

namespace py = pybind11;
using namespace cdp;

PYBIND11_MODULE(cdp_core, m) {
    m.doc() = "Cyber-defense scenario simulator and causal tree-search planner";

    py::enum_<IntrusionLevel>(m, "IntrusionLevel")
        .value("UNKNOWN", IntrusionLevel::Unknown)
        .value("KNOWN", IntrusionLevel::Known)
        .value("SCANNED", IntrusionLevel::Scanned)
        .value("COMPROMISED", IntrusionLevel::Compromised)
        .value("ROOT", IntrusionLevel::Root);

    py::enum_<AttackerTag>(m, "AttackerTag")
        .value("BLINE", AttackerTag::BLine)
        .value("MEANDER", AttackerTag::Meander);

    py::enum_<DefenderMethod>(m, "DefenderMethod")
        .value("CPOMCP", DefenderMethod::CPomcp)
        .value("POMCP", DefenderMethod::Pomcp)
        .value("NOOP", DefenderMethod::Noop)
        .value("RANDOM", DefenderMethod::Random);

    py::class_<Intervention>(m, "Intervention")
        .def_static("none", &Intervention::none)
        .def_static("analyze", &Intervention::analyze, py::arg("node"))
        .def_static("decoy", &Intervention::start_decoy, py::arg("node"), py::arg("slot"))
        .def_static("remove", &Intervention::remove, py::arg("node"))
        .def_static("restore", &Intervention::restore, py::arg("node"))
        .def("__repr__", [](const Intervention& iv) { return to_string(iv); })
        .def("__eq__", [](const Intervention& a, const Intervention& b) { return a == b; });

    py::class_<Observation>(m, "Observation")
        .def_property_readonly("client_count", [](const Observation& o) { return o.client_count; })
        .def_property_readonly("activity",
                               [](const Observation& o) {
                                   std::vector<int> out;
                                   for (auto z : o.activity) out.push_back(static_cast<int>(z));
                                   return out;
                               })
        .def_property_readonly("service", [](const Observation& o) { return o.service; });

    py::class_<WorldState>(m, "WorldState")
        .def_property_readonly("client_count", [](const WorldState& w) { return w.client_count; })
        .def_property_readonly("intrusion",
                               [](const WorldState& w) {
                                   std::vector<int> out;
                                   for (const auto& n : w.nodes)
                                       out.push_back(static_cast<int>(n.intrusion));
                                   return out;
                               })
        .def("key", &WorldState::key);

    py::class_<Scenario>(m, "Scenario")
        .def_static("default_instance", &Scenario::default_instance)
        .def_static("from_json", &Scenario::from_json, py::arg("text"))
        .def_static("load_file", &Scenario::load_file, py::arg("path"))
        .def("to_json", &Scenario::to_json)
        .def_property_readonly("horizon", [](const Scenario& s) { return s.horizon; })
        .def_property_readonly("node_count", [](const Scenario& s) { return s.topology.size(); });

    py::class_<Rng>(m, "Rng").def(py::init<std::uint64_t>(), py::arg("seed"));

    py::class_<StepResult>(m, "StepResult")
        .def_readonly("state", &StepResult::state)
        .def_readonly("obs", &StepResult::obs)
        .def_readonly("reward", &StepResult::reward);

    py::class_<CyberEnv>(m, "CyberEnv")
        .def(py::init<Scenario>(), py::arg("scenario"))
        .def("initial_state", [](const CyberEnv& e, Rng& rng) { return e.initial_state(rng); },
             py::arg("rng"))
        .def("initial_observation", &CyberEnv::initial_observation)
        .def("step", &CyberEnv::step, py::arg("state"), py::arg("intervention"), py::arg("rng"))
        .def("reward", &CyberEnv::reward, py::arg("state"), py::arg("intervention"))
        .def_property_readonly("node_count", &CyberEnv::node_count);

    py::class_<SearchConfig>(m, "SearchConfig")
        .def(py::init<>())
        .def_readwrite("exploration_c", &SearchConfig::exploration_c)
        .def_readwrite("budget_sims", &SearchConfig::budget_sims)
        .def_readwrite("budget_seconds", &SearchConfig::budget_seconds)
        .def_readwrite("rollout_depth", &SearchConfig::rollout_depth)
        .def_readwrite("max_depth", &SearchConfig::max_depth)
        .def_readwrite("gamma", &SearchConfig::gamma)
        .def_readwrite("particles", &SearchConfig::particles);

    py::class_<StepRecord>(m, "StepRecord")
        .def_readonly("step", &StepRecord::step)
        .def_readonly("intervention", &StepRecord::intervention)
        .def_readonly("reward", &StepRecord::reward)
        .def_readonly("cum_discounted", &StepRecord::cum_discounted)
        .def_readonly("search_ms", &StepRecord::search_ms)
        .def_readonly("tree_nodes", &StepRecord::tree_nodes)
        .def_readonly("full_size", &StepRecord::full_size)
        .def_readonly("pruned_size", &StepRecord::pruned_size)
        .def_readonly("pruned_fraction", &StepRecord::pruned_fraction);

    py::class_<EpisodeResult>(m, "EpisodeResult")
        .def_readonly("steps", &EpisodeResult::steps)
        .def_readonly("discounted_return", &EpisodeResult::discounted_return)
        .def_readonly("seed", &EpisodeResult::seed)
        .def_property_readonly("attacker",
                               [](const EpisodeResult& e) { return to_string(e.tag); });

    m.def("run_episode",
          [](const CyberEnv& env, const SearchConfig& cfg, DefenderMethod method,
             std::uint64_t seed) { return run_episode(env, cfg, method, seed); },
          py::arg("env"), py::arg("config"), py::arg("method"), py::arg("seed"));

    m.def("scenario_for_run", &scenario_for_run, py::arg("base"), py::arg("scenario_id"),
          py::arg("horizon"), py::arg("seed"));

    m.def("prune_factor", py::overload_cast<double, int>(&prune_factor), py::arg("ratio"),
          py::arg("depth"));

    m.def(
        "d_separated",
        [](const std::string& edge_list, const std::vector<std::string>& a,
           const std::vector<std::string>& b, const std::vector<std::string>& given) {
            CausalGraph g = CausalGraph::from_edge_list(edge_list);
            auto ids = [](const std::vector<std::string>& names) {
                std::vector<VariableId> out;
                for (const auto& n : names) out.push_back(parse_variable(n));
                return out;
            };
            auto av = ids(a), bv = ids(b), gv = ids(given);
            return g.d_separated(av, bv, gv);
        },
        py::arg("edge_list"), py::arg("a"), py::arg("b"), py::arg("given"),
        "d-separation on a graph given as a plain-text edge list");

    m.def(
        "pomis_markovian",
        [](const std::string& edge_list, const std::string& target) {
            CausalGraph g = CausalGraph::from_edge_list(edge_list);
            std::vector<std::vector<std::string>> out;
            for (const auto& set : g.pomis_markovian(parse_variable(target))) {
                std::vector<std::string> names;
                for (const auto& v : set) names.push_back(to_string(v));
                out.push_back(names);
            }
            return out;
        },
        py::arg("edge_list"), py::arg("target"));
}
