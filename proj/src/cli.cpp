#include "cfc/cli.hpp"

#include "cfc/aggregation.hpp"
#include "cfc/errors.hpp"
#include "cfc/io.hpp"
#include "cfc/sim.hpp"
#include "cfc/stability.hpp"
#include "cfc/svg.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <functional>
#include <ostream>
#include <sstream>

namespace cfc {

namespace {

namespace fs = std::filesystem;

struct Document {
    std::string path;
    Json json;
    DocumentKind kind;
};

std::vector<Document> load_inputs(const RunConfig& cfg) {
    if (cfg.inputs.empty()) throw InputError("no input files given (use --in)");
    std::vector<Document> docs;
    for (const auto& p : cfg.inputs) {
        Json j = read_json_file(p);
        if (j.contains("schema_version") && j["schema_version"] != kSchemaVersion) {
            throw InputError("'" + p + "' has unsupported schema_version " + j["schema_version"].dump());
        }
        const DocumentKind k = classify(j);
        if (k == DocumentKind::Unknown) throw InputError("cannot tell what kind of document '" + p + "' is");
        docs.push_back({p, std::move(j), k});
    }
    return docs;
}

const Document* find(const std::vector<Document>& docs, std::initializer_list<DocumentKind> kinds) {
    for (const auto& d : docs) {
        for (DocumentKind k : kinds) {
            if (d.kind == k) return &d;
        }
    }
    return nullptr;
}

// Writes `text` to <out_dir>/<name>, or to `out` when no directory was given.
void emit(const RunConfig& cfg, const std::string& name, const std::string& text, std::ostream& out,
          bool to_stdout = true) {
    if (cfg.out_dir.empty()) {
        if (to_stdout) out << text;
        return;
    }
    fs::create_directories(cfg.out_dir);
    write_text_atomic((fs::path(cfg.out_dir) / name).string(), text);
}

std::string dump(const Json& j) {
    return j.dump(2) + "\n";
}

int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const SingularInteriorError& e) {
        err << "error: " << e.what() << " (condition number " << format_number(e.condition()) << ")\n";
        return kExitInput;
    } catch (const SimulationAbort& e) {
        err << "error: " << e.what() << "; last valid time " << format_number(e.last_valid_time()) << " s\n";
        return kExitRuntime;
    } catch (const UnstableConfigurationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const DisconnectedNetworkError& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ImproperTransferFunctionError& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ArgumentError& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const DomainError& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int verdict_exit(Verdict v) {
    switch (v) {
        case Verdict::Pass: return kExitOk;
        case Verdict::Fail: return kExitFail;
        case Verdict::Inconclusive: return kExitInconclusive;
    }
    return kExitInconclusive;
}

std::string design_text(const AggregationReport& r, const ParticipationCheck& p,
                        const std::vector<DynamicControllerSpec>& specs) {
    std::ostringstream s;
    s << "controller design report\n";
    s << "converters: " << specs.size() << "\n";
    s << "participation sum residual: m " << format_number(p.residual_m) << ", m_v " << format_number(p.residual_m_v)
      << (p.pass ? " (ok)" : " (FAIL)") << "\n";
    s << "aggregate T coefficient residual: " << format_number(r.coefficient_residual_t) << "\n";
    s << "aggregate T_v coefficient residual: " << format_number(r.coefficient_residual_t_v) << "\n";
    s << "aggregate T frequency mismatch: " << format_number(r.frequency_residual_t) << "\n";
    s << "aggregate T_v frequency mismatch: " << format_number(r.frequency_residual_t_v) << "\n";
    for (std::size_t k = 0; k < specs.size(); ++k) {
        const UnitSummary u = summarize_unit(specs[k].t);
        s << "unit " << k + 1 << ": dc gain ";
        if (u.dc_gain_finite) {
            s << format_number(u.dc_gain.real()) << (u.dc_gain.imag() < 0 ? " - j" : " + j")
              << format_number(std::abs(u.dc_gain.imag()));
        } else {
            s << "infinite";
        }
        s << ", bandwidth ";
        s << (u.bandwidth > 0.0 ? format_number(u.bandwidth) + " rad/s" : std::string("n/a"));
        s << ", poles";
        for (const Complex& q : u.poles) s << " (" << format_number(q.real()) << ", " << format_number(q.imag()) << ")";
        s << (u.proper ? "" : ", improper") << "\n";
    }
    s << "result: " << (r.pass() && p.pass ? "pass" : "fail") << "\n";
    return s.str();
}

}  // namespace

int cmd_reduce(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto docs = load_inputs(cfg);
        const Document* d = find(docs, {DocumentKind::Network, DocumentKind::ReducedNetwork});
        if (!d) throw InputError("reduce needs a network file");
        const LoadedNetwork net = load_network(d->json);
        emit(cfg, "reduced_network.json", dump(reduced_to_json(net)), out);
        return static_cast<int>(kExitOk);
    });
}

int cmd_design(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto docs = load_inputs(cfg);
        const Document* d = find(docs, {DocumentKind::Design});
        if (!d) throw InputError("design needs a design input file with \"desired\" and \"participation\"");
        const DesignInput in = design_from_json(d->json);
        const ParticipationCheck pc = verify_participation(in.participation);
        if (!pc.pass) {
            throw InputError("participation factors do not sum to one (residual " + format_number(pc.residual()) + ")");
        }
        const auto specs = disaggregate(in.desired, in.participation, in.feedback);
        const AggregationReport rep = verify_aggregation(specs, in.desired);

        const std::string text = design_text(rep, pc, specs);
        if (cfg.out_dir.empty()) {
            out << dump(controllers_to_json(specs));
        } else {
            emit(cfg, "controllers.json", dump(controllers_to_json(specs)), out);
            emit(cfg, "design_report.json", dump(aggregation_to_json(rep, pc, specs)), out);
            emit(cfg, "design_report.txt", text, out);
        }
        err << text;
        return static_cast<int>(rep.pass() ? kExitOk : kExitFail);
    });
}

int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto docs = load_inputs(cfg);
        const Document* ctl = find(docs, {DocumentKind::Controllers});
        const Document* scen = find(docs, {DocumentKind::Scenario});
        const Document* netdoc = find(docs, {DocumentKind::Network, DocumentKind::ReducedNetwork});
        if (!ctl) ctl = scen;
        if (!ctl) throw InputError("check needs a controllers file (or a scenario)");
        const Json* net_json = netdoc ? &netdoc->json : nullptr;
        if (!net_json && scen && scen->json.contains("network")) net_json = &scen->json["network"];
        if (!net_json) throw InputError("check needs a network file (or a scenario)");

        const std::vector<ConverterSetup> setups = controllers_from_json(ctl->json);
        const LoadedNetwork net = load_network(*net_json);
        if (static_cast<Eigen::Index>(setups.size()) != net.reduced.size()) {
            throw InputError(std::to_string(setups.size()) + " controllers for a network with " +
                             std::to_string(net.reduced.size()) + " converter nodes");
        }
        std::vector<DynamicControllerSpec> specs;
        std::vector<double> v0;
        bool all_pcc = true;
        for (const auto& s : setups) {
            specs.push_back(s.linear_spec());
            v0.push_back(s.v0);
            all_pcc &= s.dynamic && specs.back().v_feedback == VoltageFeedback::Pcc;
        }
        FeedbackMode mode = all_pcc ? FeedbackMode::PccVoltage : FeedbackMode::LocalVoltage;
        if (cfg.mode == "pcc") {
            mode = FeedbackMode::PccVoltage;
        } else if (cfg.mode == "local") {
            mode = FeedbackMode::LocalVoltage;
        } else if (!cfg.mode.empty()) {
            throw InputError("--mode must be \"pcc\" or \"local\"");
        }

        const SweepGrid grid = SweepGrid::symmetric_log(cfg.grid_points, 1e-4, 1e6, cfg.margin);
        const CertificateReport rep = certify_closed_loop(specs, net.reduced, grid, mode, v0);

        Json j;
        j["schema_version"] = kSchemaVersion;
        j["kind"] = "certificate";
        j["mode"] = mode == FeedbackMode::PccVoltage ? "pcc" : "local";
        j["phi_z"] = net.reduced.phi_z ? Json(*net.reduced.phi_z) : Json(nullptr);
        j["grid_points_per_sign"] = cfg.grid_points;
        j["margin"] = cfg.margin;
        j["report"] = report_to_json(rep);
        if (cfg.out_dir.empty()) {
            out << dump(j);
        } else {
            emit(cfg, "certificate.json", dump(j), out);
            out << "certificate: " << to_string(rep.verdict) << (rep.marginal ? " (marginal)" : "") << "\n";
        }
        return verdict_exit(rep.verdict);
    });
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto docs = load_inputs(cfg);
        const Document* scen = find(docs, {DocumentKind::Scenario});
        if (!scen) throw InputError("simulate needs a scenario file");
        const Document* ctl = nullptr;
        for (const auto& d : docs) {
            if (d.kind == DocumentKind::Controllers) ctl = &d;
        }
        if (cfg.plot && cfg.out_dir.empty()) throw InputError("--plot needs --out");

        Json sj = scen->json;
        if (cfg.dt) sj["options"]["dt"] = *cfg.dt;
        if (cfg.t_end) sj["options"]["t_end"] = *cfg.t_end;
        const std::vector<ConverterSetup> controllers = ctl ? controllers_from_json(ctl->json) : std::vector<ConverterSetup>{};
        const Scenario sc = scenario_from_json(sj, controllers);
        const TimeSeries ts = simulate(sc);

        const std::string stem = fs::path(scen->path).stem().string();
        emit(cfg, stem + ".csv", time_series_csv(ts), out);
        if (cfg.plot) emit(cfg, stem + ".svg", render_svg(ts, sc.name), out);
        if (!cfg.out_dir.empty()) out << "wrote " << ts.size() << " samples for '" << sc.name << "'\n";
        return static_cast<int>(kExitOk);
    });
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Complex-frequency grid-forming control toolkit", "cfc"};
    app.require_subcommand(1);
    RunConfig cfg;
    double dt = 0.0, t_end = 0.0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--in", cfg.inputs, "Input JSON file (repeatable)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", cfg.out_dir, "Output directory (stdout when omitted)");
        sub->add_flag("--plot", cfg.plot, "Also write SVG plots (simulate)");
        sub->add_option("--dt", dt, "Override the integration step [s]")->check(CLI::PositiveNumber);
        sub->add_option("--t-end", t_end, "Override the horizon [s]")->check(CLI::PositiveNumber);
        sub->add_option("--grid-points", cfg.grid_points, "Sweep points per frequency sign")->check(CLI::Range(1, 1000000));
        sub->add_option("--margin", cfg.margin, "Required real-part margin of the sweep")->check(CLI::NonNegativeNumber);
        sub->add_option("--mode", cfg.mode, "Voltage feedback mode for check: pcc or local")
            ->check(CLI::IsMember({"pcc", "local"}));
    };
    CLI::App* reduce = app.add_subcommand("reduce", "Kron-reduce a network onto its converter nodes");
    CLI::App* design = app.add_subcommand("design", "Disaggregate a desired behaviour into unit controllers");
    CLI::App* check = app.add_subcommand("check", "Certify closed-loop small-signal stability");
    CLI::App* simulate = app.add_subcommand("simulate", "Simulate a scenario, writing CSV and optional SVG");
    for (CLI::App* s : {reduce, design, check, simulate}) common(s);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitInput;
    }

    for (CLI::App* s : {reduce, design, check, simulate}) {
        if (s->parsed()) {
            if (s->count("--dt")) cfg.dt = dt;
            if (s->count("--t-end")) cfg.t_end = t_end;
            cfg.subcommand = s->get_name();
        }
    }
    if (cfg.subcommand == "reduce") return cmd_reduce(cfg, out, err);
    if (cfg.subcommand == "design") return cmd_design(cfg, out, err);
    if (cfg.subcommand == "check") return cmd_check(cfg, out, err);
    return cmd_simulate(cfg, out, err);
}

}  // namespace cfc
