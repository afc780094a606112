#include "cfc/io.hpp"

#include "cfc/errors.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace cfc {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& what) {
    throw InputError(what);
}

double number(const Json& j, const char* key, double fallback) {
    if (!j.contains(key) || j[key].is_null()) return fallback;
    if (!j[key].is_number()) fail(std::string("field '") + key + "' must be a number");
    return j[key].get<double>();
}

double required_number(const Json& j, const char* key) {
    if (!j.contains(key)) fail(std::string("missing field '") + key + "'");
    return number(j, key, 0.0);
}

int integer(const Json& j, const char* what) {
    if (!j.is_number_integer()) fail(std::string(what) + " must be an integer");
    return j.get<int>();
}

Complex coefficient(const Json& c) {
    if (c.is_number()) return {c.get<double>(), 0.0};
    if (c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number()) {
        return {c[0].get<double>(), c[1].get<double>()};
    }
    if (c.is_object()) return {number(c, "re", 0.0), number(c, "im", 0.0)};
    fail("coefficient must be a number, [re, im] or {re, im}");
}

std::vector<Complex> coefficients(const Json& j, const char* key, std::vector<Complex> fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_array()) fail(std::string("'") + key + "' must be an array of coefficients");
    std::vector<Complex> out;
    for (const auto& c : j[key]) out.push_back(coefficient(c));
    return out;
}

ComplexRationalTF part_from_json(const Json& j) {
    if (j.is_number()) return ComplexRationalTF::constant(j.get<double>());
    if (!j.is_object()) fail("transfer function part must be a number or {num, den}");
    return ComplexRationalTF(Polynomial(coefficients(j, "num", {})), Polynomial(coefficients(j, "den", {1.0})));
}

Json real_tf_to_json(const RealRationalTF& t) {
    Json j;
    j["num"] = t.num();
    j["den"] = t.den();
    return j;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols, const char* what) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) fail(std::string(what) + ": wrong row count");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            fail(std::string(what) + ": wrong column count");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            const Json& v = row[static_cast<std::size_t>(c)];
            if (!v.is_number()) fail(std::string(what) + ": entries must be numbers");
            m(r, c) = v.get<double>();
        }
    }
    return m;
}

Json complex_matrix_to_json(const ComplexMatrix& m) {
    return Json{{"re", matrix_to_json(m.real())}, {"im", matrix_to_json(m.imag())}};
}

ComplexMatrix complex_matrix_from_json(const Json& j, const char* what) {
    if (!j.is_object() || !j.contains("re")) fail(std::string(what) + " must be {re: [[...]], im: [[...]]}");
    const Json& re = j["re"];
    if (!re.is_array() || re.empty() || !re[0].is_array()) fail(std::string(what) + ": malformed matrix");
    const auto rows = static_cast<Eigen::Index>(re.size());
    const auto cols = static_cast<Eigen::Index>(re[0].size());
    ComplexMatrix m(rows, cols);
    m.real() = matrix_from_json(re, rows, cols, what);
    m.imag() = j.contains("im") ? matrix_from_json(j["im"], rows, cols, what) : Eigen::MatrixXd::Zero(rows, cols);
    return m;
}

Complex admittance(const Json& b, const char* what) {
    const bool has_y = b.contains("y_re") || b.contains("y_im");
    const bool has_z = b.contains("z_re") || b.contains("z_im");
    if (has_y == has_z) fail(std::string(what) + " needs either y_re/y_im or z_re/z_im");
    if (has_y) return {number(b, "y_re", 0.0), number(b, "y_im", 0.0)};
    const Complex z{number(b, "z_re", 0.0), number(b, "z_im", 0.0)};
    if (z == 0.0) fail(std::string(what) + " has zero impedance");
    return 1.0 / z;
}

VoltageFeedback feedback_from_json(const Json& j) {
    if (!j.is_string()) fail("v_feedback must be \"local\" or \"pcc\"");
    const auto s = j.get<std::string>();
    if (s == "local") return VoltageFeedback::Local;
    if (s == "pcc") return VoltageFeedback::Pcc;
    fail("v_feedback must be \"local\" or \"pcc\", got \"" + s + "\"");
}

const char* feedback_name(VoltageFeedback f) {
    return f == VoltageFeedback::Pcc ? "pcc" : "local";
}

bool has_coupling(const ComplexMatrix& y) {
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
        for (Eigen::Index c = 0; c < y.cols(); ++c) {
            if (r != c && y(r, c) != 0.0) return true;
        }
    }
    return false;
}

void apply_phi_override(ReducedNetwork& net, const std::optional<double>& phi) {
    if (!phi) return;
    if (has_coupling(net.y_net)) {
        if (net.phi_z && std::abs(std::remainder(*net.phi_z - *phi, 2.0 * kPi)) > 1e-6) {
            fail("phi_z given in the file disagrees with the network's impedance angle");
        }
        return;
    }
    net.phi_z = *phi;
    net.l_net = magnitude_laplacian(net.y_net, *phi);
}

template <class F>
auto guarded(const char* what, F&& f) {
    try {
        return f();
    } catch (const Error&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string(what) + ": " + e.what());
    }
}

}  // namespace

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open input file '" + path + "'");
    try {
        return Json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        fail("malformed JSON in '" + path + "': " + e.what());
    }
}

void write_text_atomic(const std::string& path, const std::string& text) {
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out << text;
        out.flush();
        if (!out) throw Error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

DocumentKind classify(const Json& doc) {
    if (!doc.is_object()) return DocumentKind::Unknown;
    if (doc.contains("kind") && doc["kind"].is_string()) {
        static const std::map<std::string, DocumentKind> kinds = {
            {"network", DocumentKind::Network},         {"reduced_network", DocumentKind::ReducedNetwork},
            {"controllers", DocumentKind::Controllers}, {"controller", DocumentKind::Controllers},
            {"design", DocumentKind::Design},           {"scenario", DocumentKind::Scenario}};
        auto it = kinds.find(doc["kind"].get<std::string>());
        return it == kinds.end() ? DocumentKind::Unknown : it->second;
    }
    if (doc.contains("converters")) return DocumentKind::Scenario;
    if (doc.contains("desired")) return DocumentKind::Design;
    if (doc.contains("y_net")) return DocumentKind::ReducedNetwork;
    if (doc.contains("branches") || doc.contains("converter_nodes")) return DocumentKind::Network;
    if (doc.contains("controllers") || doc.contains("type")) return DocumentKind::Controllers;
    return DocumentKind::Unknown;
}

ComplexRationalTF tf_from_json(const Json& j) {
    return guarded("transfer function", [&] {
        ComplexRationalTF t;
        if (j.is_number()) {
            t = ComplexRationalTF::constant(j.get<double>());
        } else if (!j.is_object()) {
            fail("transfer function must be a number or an object");
        } else if (j.contains("re") || j.contains("im")) {
            const ComplexRationalTF re = j.contains("re") ? part_from_json(j["re"]) : ComplexRationalTF::zero();
            const ComplexRationalTF im = j.contains("im") ? part_from_json(j["im"]) : ComplexRationalTF::zero();
            t = re + Complex{0.0, 1.0} * im;
        } else if (j.contains("num")) {
            t = part_from_json(j);
        } else if (j.contains("gain") || j.contains("rotate")) {
            t = ComplexRationalTF::identity();
        } else {
            fail("transfer function object needs re/im or num/den");
        }
        if (j.is_object()) {
            if (j.contains("gain")) t = Complex{number(j, "gain", 1.0), 0.0} * t;
            if (j.contains("rotate")) t = std::polar(1.0, number(j, "rotate", 0.0)) * t;
        }
        return t;
    });
}

Json tf_to_json(const ComplexRationalTF& t) {
    return Json{{"re", real_tf_to_json(t.re_part())}, {"im", real_tf_to_json(t.im_part())}};
}

ConverterSetup controller_from_json(const Json& j) {
    return guarded("controller", [&] {
        if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
            fail("controller needs a \"type\" of \"static\" or \"dynamic\"");
        }
        ConverterSetup c;
        const auto type = j["type"].get<std::string>();
        if (type == "static") {
            StaticDroopParams p;
            p.eta = number(j, "eta", p.eta);
            p.alpha = number(j, "alpha", p.alpha);
            p.phi = number(j, "phi", p.phi);
            p.v_star = number(j, "v_star", p.v_star);
            p.p_star = number(j, "p_star", p.p_star);
            p.q_star = number(j, "q_star", p.q_star);
            p.omega0 = number(j, "omega0", p.omega0);
            try {
                p.validate();
            } catch (const ArgumentError& e) {
                fail(e.what());
            }
            c.static_params = p;
            c.v0 = p.v_star;
            c.initial_voltage = p.v_star;
        } else if (type == "dynamic") {
            DynamicControllerSpec s;
            if (!j.contains("t")) fail("dynamic controller needs \"t\"");
            s.t = tf_from_json(j["t"]);
            if (s.t.is_zero()) fail("dynamic controller T must be nonzero");
            if (j.contains("t_v")) s.t_v = tf_from_json(j["t_v"]);
            if (j.contains("v_feedback")) s.v_feedback = feedback_from_json(j["v_feedback"]);
            c.dynamic = s;
        } else {
            fail("unknown controller type \"" + type + "\"");
        }
        return c;
    });
}

Json controller_to_json(const DynamicControllerSpec& spec) {
    Json j;
    j["type"] = "dynamic";
    j["t"] = tf_to_json(spec.t);
    j["t_v"] = tf_to_json(spec.t_v);
    j["v_feedback"] = feedback_name(spec.v_feedback);
    return j;
}

Json controller_to_json(const ConverterSetup& c) {
    if (c.dynamic) return controller_to_json(*c.dynamic);
    if (!c.static_params) throw ArgumentError("converter has no controller");
    const StaticDroopParams& p = *c.static_params;
    Json j;
    j["type"] = "static";
    j["eta"] = p.eta;
    j["alpha"] = p.alpha;
    j["phi"] = p.phi;
    j["v_star"] = p.v_star;
    j["p_star"] = p.p_star;
    j["q_star"] = p.q_star;
    j["omega0"] = p.omega0;
    return j;
}

std::vector<ConverterSetup> controllers_from_json(const Json& doc) {
    return guarded("controllers", [&] {
        std::vector<ConverterSetup> out;
        if (doc.contains("controllers")) {
            if (!doc["controllers"].is_array() || doc["controllers"].empty()) {
                fail("\"controllers\" must be a nonempty array");
            }
            for (const auto& c : doc["controllers"]) out.push_back(controller_from_json(c));
        } else if (doc.contains("converters")) {
            for (const auto& c : doc["converters"]) {
                if (!c.contains("controller")) fail("scenario converter without a controller");
                out.push_back(controller_from_json(c["controller"]));
            }
        } else {
            out.push_back(controller_from_json(doc));
        }
        return out;
    });
}

Json controllers_to_json(const std::vector<DynamicControllerSpec>& specs) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "controllers";
    j["controllers"] = Json::array();
    for (const auto& s : specs) j["controllers"].push_back(controller_to_json(s));
    return j;
}

NetworkDocument network_from_json(const Json& j) {
    return guarded("network", [&] {
        NetworkDocument doc;
        std::vector<int> ids;
        if (j.contains("nodes")) {
            const Json& nodes = j["nodes"];
            if (nodes.is_number_integer()) {
                for (int i = 0; i < nodes.get<int>(); ++i) ids.push_back(i);
            } else if (nodes.is_array()) {
                for (const auto& n : nodes) {
                    ids.push_back(n.is_object() ? integer(n.at("id"), "node id") : integer(n, "node id"));
                }
            } else {
                fail("\"nodes\" must be a count or a list of ids");
            }
        } else {
            std::vector<int> seen;
            for (const auto& b : j.value("branches", Json::array())) {
                seen.push_back(integer(b.at("from"), "branch endpoint"));
                seen.push_back(integer(b.at("to"), "branch endpoint"));
            }
            for (const auto& c : j.value("converter_nodes", Json::array())) seen.push_back(integer(c, "converter node"));
            std::sort(seen.begin(), seen.end());
            seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
            ids = seen;
        }
        std::map<int, int> index;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (!index.emplace(ids[i], static_cast<int>(i)).second) fail("duplicate node id " + std::to_string(ids[i]));
        }
        auto lookup = [&](const Json& v, const char* what) {
            const int id = integer(v, what);
            auto it = index.find(id);
            if (it == index.end()) fail(std::string(what) + " refers to unknown node " + std::to_string(id));
            return it->second;
        };

        doc.ids = ids;
        doc.model.node_count = static_cast<int>(ids.size());
        for (const auto& b : j.value("branches", Json::array())) {
            doc.model.branches.push_back({lookup(b.at("from"), "branch 'from'"), lookup(b.at("to"), "branch 'to'"),
                                          admittance(b, "branch")});
        }
        for (const auto& s : j.value("shunts", Json::array())) {
            doc.model.shunts.push_back({lookup(s.at("node"), "shunt node"), admittance(s, "shunt")});
        }
        if (!j.contains("converter_nodes")) fail("network needs \"converter_nodes\"");
        for (const auto& c : j["converter_nodes"]) doc.model.converter_nodes.push_back(lookup(c, "converter node"));
        if (j.contains("pcc_node") && !j["pcc_node"].is_null()) doc.pcc_node = lookup(j["pcc_node"], "pcc_node");
        if (j.contains("phi_z") && !j["phi_z"].is_null()) doc.phi_z = number(j, "phi_z", 0.0);

        try {
            doc.model.validate();
        } catch (const DisconnectedNetworkError&) {
            throw;
        } catch (const ArgumentError& e) {
            fail(e.what());
        }
        return doc;
    });
}

LoadedNetwork load_network(const Json& j) {
    return guarded("network", [&] {
        LoadedNetwork out;
        if (classify(j) == DocumentKind::ReducedNetwork) {
            ComplexMatrix y = complex_matrix_from_json(j.at("y_net"), "y_net");
            if (y.rows() != y.cols()) fail("y_net must be square");
            out.reduced = make_reduced(std::move(y));
            const auto n = static_cast<std::size_t>(out.reduced.size());
            if (j.contains("kept_nodes")) {
                for (const auto& id : j["kept_nodes"]) out.kept_ids.push_back(integer(id, "kept node"));
                if (out.kept_ids.size() != n) fail("kept_nodes length does not match y_net");
            } else {
                for (std::size_t i = 0; i < n; ++i) out.kept_ids.push_back(static_cast<int>(i));
            }
            for (const auto& id : j.value("interior_nodes", Json::array())) {
                out.interior_ids.push_back(integer(id, "interior node"));
            }
            if (j.contains("interior_condition")) out.reduced.interior_condition = number(j, "interior_condition", 1.0);
            if (j.contains("pcc_distribution")) {
                const ComplexMatrix d = complex_matrix_from_json(j["pcc_distribution"], "pcc_distribution");
                if (static_cast<std::size_t>(d.size()) != n) fail("pcc_distribution length does not match y_net");
                for (Eigen::Index i = 0; i < d.size(); ++i) out.pcc_distribution.push_back(d(i));
            }
            std::optional<double> phi;
            if (j.contains("phi_z") && !j["phi_z"].is_null()) phi = number(j, "phi_z", 0.0);
            apply_phi_override(out.reduced, phi);
            return out;
        }

        const NetworkDocument doc = network_from_json(j);
        out.reduced = reduce_network(doc.model);
        for (int k : out.reduced.kept_nodes) out.kept_ids.push_back(doc.ids[static_cast<std::size_t>(k)]);
        for (int k : out.reduced.interior_nodes) out.interior_ids.push_back(doc.ids[static_cast<std::size_t>(k)]);
        apply_phi_override(out.reduced, doc.phi_z);

        if (doc.pcc_node) {
            const auto n = static_cast<std::size_t>(out.reduced.size());
            const auto& kept = out.reduced.kept_nodes;
            const auto& interior = out.reduced.interior_nodes;
            if (auto it = std::find(kept.begin(), kept.end(), *doc.pcc_node); it != kept.end()) {
                out.pcc_distribution.assign(n, Complex{});
                out.pcc_distribution[static_cast<std::size_t>(it - kept.begin())] = 1.0;
            } else {
                const auto col = std::find(interior.begin(), interior.end(), *doc.pcc_node) - interior.begin();
                for (std::size_t k = 0; k < n; ++k) {
                    out.pcc_distribution.push_back(out.reduced.distribution(static_cast<Eigen::Index>(k), col));
                }
            }
        }
        return out;
    });
}

Json reduced_to_json(const LoadedNetwork& net) {
    const ReducedNetwork& r = net.reduced;
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "reduced_network";
    j["kept_nodes"] = net.kept_ids;
    j["interior_nodes"] = net.interior_ids;
    j["y_net"] = complex_matrix_to_json(r.y_net);
    j["phi_z"] = r.phi_z ? Json(*r.phi_z) : Json(nullptr);
    j["l_net"] = r.l_net ? matrix_to_json(*r.l_net) : Json(nullptr);
    j["interior_condition"] = r.interior_condition;
    j["distribution"] = complex_matrix_to_json(r.distribution);
    if (!net.pcc_distribution.empty()) {
        ComplexMatrix d(static_cast<Eigen::Index>(net.pcc_distribution.size()), 1);
        for (std::size_t k = 0; k < net.pcc_distribution.size(); ++k) d(static_cast<Eigen::Index>(k), 0) = net.pcc_distribution[k];
        j["pcc_distribution"] = complex_matrix_to_json(d);
    }
    return j;
}

Scenario scenario_from_json(const Json& j, const std::vector<ConverterSetup>& controllers) {
    return guarded("scenario", [&] {
        Scenario sc;
        sc.name = j.value("name", std::string("scenario"));
        if (!j.contains("network")) fail("scenario needs a \"network\"");
        const LoadedNetwork net = load_network(j["network"]);
        sc.network = net.reduced;
        sc.pcc_distribution = net.pcc_distribution;
        sc.omega0 = number(j, "omega0", sc.omega0);
        sc.v_pcc0 = number(j, "v_pcc0", sc.v_pcc0);

        const Json converters = j.value("converters", Json::array());
        if (!controllers.empty()) {
            sc.converters = controllers;
        } else {
            for (const auto& c : converters) {
                if (!c.contains("controller")) fail("scenario converter without a controller");
                sc.converters.push_back(controller_from_json(c["controller"]));
            }
        }
        if (!converters.empty() && converters.size() != sc.converters.size()) {
            fail("scenario lists " + std::to_string(converters.size()) + " converters but " +
                 std::to_string(sc.converters.size()) + " controllers were supplied");
        }
        for (std::size_t k = 0; k < converters.size(); ++k) {
            const Json& c = converters[k];
            ConverterSetup& s = sc.converters[k];
            s.v0 = number(c, "v0", s.v0);
            if (c.contains("initial_voltage")) {
                s.initial_voltage = coefficient(c["initial_voltage"]);
            } else if (c.contains("v0")) {
                s.initial_voltage = s.v0;
            }
        }

        std::map<int, int> position;
        for (std::size_t k = 0; k < net.kept_ids.size(); ++k) position[net.kept_ids[k]] = static_cast<int>(k);
        for (const auto& d : j.value("disturbances", Json::array())) {
            Disturbance dist;
            const std::string shape = d.value("shape", std::string("step"));
            if (shape == "step") {
                dist.shape = DisturbanceShape::Step;
            } else if (shape == "ramp") {
                dist.shape = DisturbanceShape::Ramp;
                dist.duration = required_number(d, "duration");
            } else {
                fail("disturbance shape must be \"step\" or \"ramp\"");
            }
            if (!d.contains("at")) fail("disturbance needs \"at\": \"pcc\" or a converter node id");
            if (d["at"].is_string()) {
                if (d["at"].get<std::string>() != "pcc") fail("disturbance \"at\" must be \"pcc\" or a node id");
            } else {
                const int id = integer(d["at"], "disturbance node");
                auto it = position.find(id);
                if (it == position.end()) fail("disturbance node " + std::to_string(id) + " is not a converter node");
                dist.converter = it->second;
            }
            dist.t_start = number(d, "t_start", 0.0);
            dist.value = Complex{number(d, "d_rho", 0.0), -number(d, "d_sigma", 0.0)};
            sc.disturbances.push_back(dist);
        }

        const Json o = j.value("options", Json::object());
        sc.options.t_end = number(o, "t_end", sc.options.t_end);
        sc.options.dt = number(o, "dt", sc.options.dt);
        if (o.contains("mode")) {
            const auto mode = o["mode"].get<std::string>();
            if (mode == "linear") {
                sc.options.mode = SimMode::Linear;
            } else if (mode == "nonlinear") {
                sc.options.mode = SimMode::Nonlinear;
            } else {
                fail("mode must be \"linear\" or \"nonlinear\"");
            }
        }
        if (o.contains("voltage_feedback")) sc.options.voltage_feedback = feedback_from_json(o["voltage_feedback"]);
        if (o.contains("output_interval")) {
            const double every = number(o, "output_interval", 0.0) / sc.options.dt;
            if (!(every >= 0.5)) fail("output_interval must be at least dt");
            sc.options.output_every = static_cast<long>(every + 0.5);
        }
        try {
            sc.validate();
        } catch (const ArgumentError& e) {
            fail(e.what());
        }
        return sc;
    });
}

DesignInput design_from_json(const Json& j) {
    return guarded("design input", [&] {
        DesignInput in;
        if (!j.contains("desired") || !j["desired"].is_object()) fail("design input needs \"desired\"");
        const Json& des = j["desired"];
        if (!des.contains("t")) fail("desired behaviour needs \"t\"");
        in.desired.t_des = tf_from_json(des["t"]);
        if (des.contains("t_v")) in.desired.t_v_des = tf_from_json(des["t_v"]);
        if (j.contains("v_feedback")) in.feedback = feedback_from_json(j["v_feedback"]);
        if (!j.contains("participation") || !j["participation"].is_array() || j["participation"].empty()) {
            fail("design input needs a nonempty \"participation\" list");
        }
        for (const auto& p : j["participation"]) {
            if (!p.contains("m")) fail("participation entry needs \"m\"");
            const ComplexRationalTF m = tf_from_json(p["m"]);
            in.participation.m.push_back(m);
            in.participation.m_v.push_back(p.contains("m_v") ? tf_from_json(p["m_v"]) : m);
        }
        return in;
    });
}

Json report_to_json(const CertificateReport& r) {
    Json j;
    j["check"] = r.check;
    if (r.converter >= 0) j["converter"] = r.converter + 1;
    j["verdict"] = to_string(r.verdict);
    j["marginal"] = r.marginal;
    j["worst_frequency"] = r.worst_frequency ? Json(*r.worst_frequency) : Json(nullptr);
    j["worst_value"] = r.worst_value ? Json(*r.worst_value) : Json(nullptr);
    j["witness_pole"] = r.witness_pole ? Json{{"re", r.witness_pole->real()}, {"im", r.witness_pole->imag()}} : Json(nullptr);
    if (!r.note.empty()) j["note"] = r.note;
    if (!r.details.empty()) {
        j["details"] = Json::array();
        for (const auto& d : r.details) j["details"].push_back(report_to_json(d));
    }
    return j;
}

Json aggregation_to_json(const AggregationReport& r, const ParticipationCheck& p,
                         const std::vector<DynamicControllerSpec>& specs) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "design_report";
    j["pass"] = r.pass() && p.pass;
    j["tolerance"] = kCoefficientTolerance;
    j["participation"] = {{"pass", p.pass}, {"residual_m", p.residual_m}, {"residual_m_v", p.residual_m_v}};
    j["aggregation"] = {{"coefficient_residual_t", r.coefficient_residual_t},
                        {"coefficient_residual_t_v", r.coefficient_residual_t_v},
                        {"frequency_residual_t", r.frequency_residual_t},
                        {"frequency_residual_t_v", r.frequency_residual_t_v},
                        {"aggregate_t", tf_to_json(r.aggregate_t)},
                        {"aggregate_t_v", tf_to_json(r.aggregate_t_v)}};
    j["units"] = Json::array();
    for (std::size_t k = 0; k < specs.size(); ++k) {
        const UnitSummary u = summarize_unit(specs[k].t);
        Json poles = Json::array();
        for (const Complex& p : u.poles) poles.push_back(Json{{"re", p.real()}, {"im", p.imag()}});
        Json unit;
        unit["converter"] = k + 1;
        unit["dc_gain"] = u.dc_gain_finite ? Json{{"re", u.dc_gain.real()}, {"im", u.dc_gain.imag()}} : Json(nullptr);
        unit["bandwidth"] = u.bandwidth > 0.0 ? Json(u.bandwidth) : Json(nullptr);
        unit["proper"] = u.proper;
        unit["poles"] = poles;
        j["units"].push_back(unit);
    }
    return j;
}

std::string time_series_csv(const TimeSeries& ts) {
    std::string out = "t";
    for (std::size_t k = 1; k <= ts.converters.size(); ++k) {
        const std::string s = std::to_string(k);
        out += ",d_eps_" + s + ",d_omega_" + s + ",d_rho_" + s + ",d_sigma_" + s + ",d_v_" + s;
    }
    out += ",pcc_d_eps,pcc_d_omega\n";
    for (std::size_t i = 0; i < ts.size(); ++i) {
        out += format_number(ts.t[i]);
        for (const auto& c : ts.converters) {
            for (double v : {c.d_eps[i], c.d_omega[i], c.d_rho[i], c.d_sigma[i], c.d_v[i]}) {
                out += ',';
                out += format_number(v);
            }
        }
        out += ',';
        out += format_number(ts.pcc_d_varpi[i].real());
        out += ',';
        out += format_number(ts.pcc_d_varpi[i].imag());
        out += '\n';
    }
    return out;
}

}  // namespace cfc
