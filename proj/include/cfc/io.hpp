#pragma once

// JSON schemas (schema_version 1) and CSV output.
//
// Transfer functions:   {"re": {"num": [...], "den": [...]}, "im": {...}}, ascending powers.
//   Accepted shorthands: a number; {"num", "den"} for a real function; an
//   optional "rotate": phi multiplying the result by e^{j*phi}.
// Controllers:          {"type": "static", eta, alpha, phi, v_star, p_star, q_star, omega0}
//                       {"type": "dynamic", t, t_v, v_feedback: "local" | "pcc"}
// Networks:             {nodes, branches: [{from, to, y_re, y_im}], shunts: [{node, y_re, y_im}],
//                        converter_nodes, pcc_node?, phi_z?}
// Reduced networks:     {y_net: {re, im}, phi_z, l_net, kept_nodes, ...}

#include "cfc/aggregation.hpp"
#include "cfc/network.hpp"
#include "cfc/sim.hpp"
#include "cfc/stability.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace cfc {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// "%.15g"
std::string format_number(double x);

Json read_json_file(const std::string& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_text_atomic(const std::string& path, const std::string& text);

enum class DocumentKind { Network, ReducedNetwork, Controllers, Design, Scenario, Unknown };
DocumentKind classify(const Json& doc);

ComplexRationalTF tf_from_json(const Json& j);
Json tf_to_json(const ComplexRationalTF& t);

/// Fills the controller part of a converter setup.
ConverterSetup controller_from_json(const Json& j);
Json controller_to_json(const ConverterSetup& c);
Json controller_to_json(const DynamicControllerSpec& spec);

std::vector<ConverterSetup> controllers_from_json(const Json& doc);
Json controllers_to_json(const std::vector<DynamicControllerSpec>& specs);

/// A network file with its node identifiers.
struct NetworkDocument {
    NetworkModel model;
    /// External id of each 0-based node.
    std::vector<int> ids;
    std::optional<int> pcc_node;
    std::optional<double> phi_z;
};

NetworkDocument network_from_json(const Json& j);

/// A reduced network together with the ids of its rows and the PCC shares.
struct LoadedNetwork {
    ReducedNetwork reduced;
    std::vector<int> kept_ids;
    std::vector<int> interior_ids;
    std::vector<Complex> pcc_distribution;
};

/// Accepts either a full network (reduced on load) or a reduced network.
LoadedNetwork load_network(const Json& j);
Json reduced_to_json(const LoadedNetwork& net);

/// The embedded or referenced network must already be resolved; controllers
/// given in a separate document replace those of the scenario when non-empty.
Scenario scenario_from_json(const Json& j, const std::vector<ConverterSetup>& controllers = {});

struct DesignInput {
    DesiredBehavior desired;
    ParticipationSet participation;
    VoltageFeedback feedback = VoltageFeedback::Pcc;
};

DesignInput design_from_json(const Json& j);

Json report_to_json(const CertificateReport& r);
Json aggregation_to_json(const AggregationReport& r, const ParticipationCheck& p,
                         const std::vector<DynamicControllerSpec>& specs);

/// Header: t, then d_eps_k, d_omega_k, d_rho_k, d_sigma_k, d_v_k per converter, then pcc_d_eps, pcc_d_omega.
std::string time_series_csv(const TimeSeries& ts);

}  // namespace cfc
