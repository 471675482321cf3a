#pragma once

// JSON surfaces: scheme files, certificates, balance specs, pulse files
// (JSON-lines, one pulse per line under a header line), and reports.

#include <nlohmann/json.hpp>
#include <string>

#include "ggc/circuit.hpp"
#include "ggc/refocus.hpp"
#include "ggc/scheme.hpp"
#include "ggc/shift.hpp"
#include "ggc/simulate.hpp"

namespace ggc {

using json = nlohmann::ordered_json;

json model_to_json(const GroupModel& model);
GroupModel model_from_json(const json& j);

json point_to_json(const Point& p);
Point point_from_json(const json& j);

/// Window object: {"lo": [...], "hi": [...]} or {"full_modular": true}.
Domain domain_from_json(const GroupModel& model, const json& j);

json scheme_to_json(const Scheme& scheme);
/// Scheme object with model/window plus either explicit workspace points or a
/// residue-class generator {"moduli": [...], "residue": [...], "exclude": [...]}.
Scheme scheme_from_json(const json& j);

/// Named schemes used throughout the test surface: "z14", "z-139",
/// "zs-lifted" (dim via `s`), "euclid-s2", "shiftable-chain".
Scheme make_builtin_scheme(const std::string& name, int s = 2);

json certificate_to_json(const AddressCertificate& cert);

BalanceFunction balance_from_json(const json& j, std::size_t n);
json balance_spec_echo(const json& j);

json pulse_to_json(const Pulse& p);
Pulse pulse_from_json(const json& j);

/// Flat pulse file: header line then one pulse per line.
void write_pulse_file(const std::string& path, const PulseSequence& seq, const Scheme& scheme,
                      const json& balance_spec, std::uint64_t flat_cap = 5'000'000);
struct LoadedPulses {
    json header;
    std::vector<Pulse> pulses;
    Scheme scheme;
    TargetDescriptor target;
};
LoadedPulses read_pulse_file(const std::string& path);

/// Structured sequence document for trees too long to flatten.
json sequence_tree_to_json(const PulseSequence& seq);

json budget_trace_to_json(const BudgetTrace& trace);
json sim_report_to_json(const SimReport& rep);
json lemma_report_to_json(const LemmaReport& rep);
json proposition_report_to_json(const PropositionReport& rep);
json sweep_report_to_json(const SweepReport& rep);
std::string sweep_report_to_csv(const SweepReport& rep);
json shift_validation_to_json(const ShiftValidation& v);
json refocus_plan_to_json(const RefocusPlan& plan);

json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

TargetDescriptor target_from_json(const json& j);

} // namespace ggc
