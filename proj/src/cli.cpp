#include "nfnls/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nfnls/dynamics.hpp"
#include "nfnls/errors.hpp"
#include "nfnls/normal_form.hpp"
#include "nfnls/plot.hpp"
#include "nfnls/solver.hpp"
#include "nfnls/trees.hpp"
#include "nfnls/verify.hpp"

#ifndef NFNLS_VERSION
#define NFNLS_VERSION "dev"
#endif

namespace nfnls::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::pair<const char*, const char*> kSubcommands[] = {
    {"trees", "enumerate ordered trees of a given generation count"},
    {"simulate", "integrate the truncated equation directly"},
    {"solve-nfe", "solve the truncated normal form equation by Picard iteration"},
    {"compare", "distance between the normal form solution and the direct integrator"},
    {"bounds", "sampled operator norm ratios against the predicted shape"},
    {"error-decay", "sup norm of the remainder operators over generations"},
    {"stability", "solutions for a sequence of truncated data"},
    {"plot", "SVG line plot of CSV columns"},
};

void add_model(Settings& s) {
    s["renormalization"] = "renormalized";
    s["nonlinearity_sign"] = "1";
}

void add_data(Settings& s) {
    s["u0"] = "";
    s["u0_file"] = "";
    s["amplitude"] = "0.2";
    s["rate"] = "0.5";
    s["support"] = "-1";
}

void add_modulation(Settings& s) {
    s["p"] = "2";
    s["K"] = "1";
    s["eps"] = "auto";
    s["theta"] = "auto";
    s["cutoff_override"] = "";
}

void add_solver(Settings& s) {
    add_model(s);
    add_data(s);
    add_modulation(s);
    s["n_max"] = "8";
    s["J_max"] = "1";
    s["T"] = "0.1";
    s["time_grid_size"] = "101";
    s["picard_tol"] = "1e-10";
    s["picard_max_iter"] = "100";
    s["quadrature"] = "trapezoid";
    s["auto_K"] = "true";
    s["safety_constant"] = "1";
}

std::string fmt(double x) { return format_double(x); }

struct Run {
    fs::path out_dir;
    std::vector<std::string> outputs;
    json summary = json::object();

    void write(const std::string& name, const std::string& content) {
        const fs::path path = out_dir / name;
        write_file_atomic(path.string(), content);
        outputs.push_back(path.string());
    }
};

std::string trajectory_text(const Trajectory& traj) {
    std::ostringstream os;
    write_trajectory_jsonl(os, traj);
    return os.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void run_trees(const Settings& s, Run& run, std::ostream& out) {
    const int J = get_int(s, "generations");
    json trees = json::array();
    std::uint64_t count = 0;
    for_each_tree(J, [&](const OrderedTree& t) {
        trees.push_back(to_json(t));
        ++count;
    });
    const json doc = {{"J", J}, {"count", count}, {"trees", std::move(trees)}};
    const std::string text = dump(doc);
    run.write("trees.json", text);
    out << text;
}

void run_simulate(const Settings& s, Run& run) {
    const int n_max = get_int(s, "n_max");
    const ModeVector u0 = initial_data_from(s, n_max);
    const ModelSpec model = model_from(s);
    const double T = get_double(s, "T"), dt = get_double(s, "dt");
    const int stride = get_int(s, "record_stride");
    const std::string method = get(s, "method");
    Trajectory traj;
    if (method == "rk4") {
        traj = integrate_reference(u0, T, dt, model, stride);
    } else if (method == "split_step") {
        traj = integrate_split_step(u0, T, dt, model, stride);
    } else {
        throw DomainError("method must be rk4 or split_step, got '" + method + "'", "invalid_config");
    }
    run.write("trajectory.jsonl", trajectory_text(traj));
    run.summary = {{"records", traj.size()},
                   {"mass_initial", mass(traj.states.front())},
                   {"mass_final", mass(traj.states.back())}};
}

json report_json(const SolveReport& r, const SolverConfig& cfg) {
    return {{"iterations", r.iterations},
            {"final_update_norm", r.final_update_norm},
            {"K_used", r.K_used},
            {"contraction_estimate", r.contraction_estimate},
            {"update_norms", r.update_norms},
            {"tail_estimate", r.tail_estimate},
            {"J_max", cfg.J_max},
            {"n_max", cfg.n_max},
            {"T", cfg.T},
            {"time_grid_size", cfg.time_grid_size},
            {"final_state", to_json(r.trajectory.states.back())}};
}

void run_solve(const Settings& s, Run& run) {
    const SolverConfig cfg = solver_config_from(s);
    const ModeVector u0 = initial_data_from(s, cfg.n_max);
    const SolveReport report = solve_normal_form(u0, cfg);
    run.write("solve_report.json", dump(report_json(report, cfg)));
    run.write("trajectory.jsonl", trajectory_text(report.trajectory));
    run.summary = {{"iterations", report.iterations}, {"final_update_norm", report.final_update_norm},
                   {"K_used", report.K_used}};
}

void run_compare(const Settings& s, Run& run) {
    const SolverConfig cfg = solver_config_from(s);
    const ModeVector u0 = initial_data_from(s, cfg.n_max);
    const CompareTable table = compare_solutions(u0, cfg, get_double(s, "dt_ref"));
    std::string csv = csv_line({"t", "distance"});
    for (const auto& row : table.rows) csv += csv_line({fmt(row.t), fmt(row.distance)});
    run.write("compare.csv", csv);
    run.summary = {{"max_distance", table.max_distance}, {"iterations", table.report.iterations},
                   {"K_used", table.report.K_used}};
}

void run_bounds(const Settings& s, Run& run) {
    const int n_max = get_int(s, "n_max");
    const int trials = get_int(s, "trials");
    const std::uint64_t seed = get_u64(s, "seed");
    const double K = get_double(s, "K");
    const auto overrides = parse_cutoff_override(get(s, "cutoff_override"));
    const auto ps = parse_double_list(get(s, "p_values"));
    if (ps.empty()) throw DomainError("p_values is empty", "invalid_config");
    std::string csv = csv_line({"kind", "j", "p", "K", "n_max", "trials", "max_ratio", "predicted_bound"});
    double worst = 0.0;
    for (const auto& item : split(get(s, "kinds"), ',')) {
        const auto parts = split(item, ':');
        if (parts.size() != 2) throw DomainError("kinds entries must be KIND:j, got '" + item + "'", "invalid_config");
        const OperatorKind kind = operator_kind_from_string(parts[0]);
        Settings tmp{{"j", parts[1]}};
        const int j = get_int(tmp, "j");
        for (double p : ps) {
            EvalContext ctx;
            ctx.mod = ModulationConfig::from_exponent(p, K);
            ctx.mod.cutoff_override = overrides;
            ctx.sign = get_int(s, "nonlinearity_sign");
            const double ratio = operator_bound_ratio(kind, j, p, trials, seed, ctx, n_max);
            worst = std::max(worst, ratio);
            csv += csv_line({to_string(kind), std::to_string(j), fmt(p), fmt(K), std::to_string(n_max),
                             std::to_string(trials), fmt(ratio), fmt(predicted_bound(kind, j, ctx.mod))});
        }
    }
    run.write("bounds.csv", csv);
    run.summary = {{"max_ratio", worst}};
}

void run_error_decay(const Settings& s, Run& run) {
    const int n_max = get_int(s, "n_max");
    const ModeVector u = initial_data_from(s, n_max);
    EvalContext ctx;
    ctx.mod = modulation_from(s);
    ctx.sign = model_from(s).sign;
    const int samples = get_int(s, "t_samples");
    if (samples < 1) throw DomainError("t_samples must be >= 1", "invalid_config");
    const double T = get_double(s, "T");
    std::vector<double> ts;
    for (int k = 0; k < samples; ++k) ts.push_back(samples == 1 ? 0.0 : T * k / (samples - 1));
    const auto rows = remainder_decay_study(u, get_int(s, "J_min"), get_int(s, "J_max"), ts, ctx);
    std::string csv = csv_line({"J", "sup_fl_inf", "envelope"});
    for (const auto& r : rows) csv += csv_line({std::to_string(r.J), fmt(r.sup_fl_inf), fmt(r.envelope)});
    run.write("decay.csv", csv);
    run.summary = {{"rows", rows.size()}};
}

void run_stability(const Settings& s, Run& run) {
    const SolverConfig cfg = solver_config_from(s);
    const ModeVector u0 = initial_data_from(s, cfg.n_max);
    const auto table = approximation_stability(u0, parse_int_list(get(s, "m_range")), cfg, get_int(s, "probes"),
                                               get_u64(s, "seed"));
    std::string csv = csv_line({"m", "data_distance", "solution_distance", "bound"});
    for (const auto& r : table.rows) {
        csv += csv_line({std::to_string(r.m), fmt(r.data_distance), fmt(r.solution_distance), fmt(r.bound)});
    }
    run.write("stability.csv", csv);
    const json summary = {{"lipschitz", table.lipschitz}, {"within_bound", table.within_bound},
                          {"monotone", table.monotone}};
    run.write("stability.json", dump(summary));
    run.summary = summary;
}

void run_plot(const Settings& s, Run& run) {
    const std::string csv = get(s, "csv");
    if (csv.empty()) throw DomainError("plot needs csv=<path>", "invalid_config");
    const CsvTable table = read_csv(csv);
    PlotOptions opts;
    opts.log_x = get_bool(s, "log_x");
    opts.log_y = get_bool(s, "log_y");
    opts.title = get(s, "title");
    const std::string svg = render_svg(table, get(s, "x"), split(get(s, "y"), ','), opts);
    run.write(get(s, "out"), svg);
}

using Runner = std::function<void(const Settings&, Run&, std::ostream&)>;

Runner runner_for(const std::string& sub) {
    auto wrap = [](void (*f)(const Settings&, Run&)) {
        return [f](const Settings& s, Run& r, std::ostream&) { f(s, r); };
    };
    if (sub == "trees") return run_trees;
    if (sub == "simulate") return wrap(run_simulate);
    if (sub == "solve-nfe") return wrap(run_solve);
    if (sub == "compare") return wrap(run_compare);
    if (sub == "bounds") return wrap(run_bounds);
    if (sub == "error-decay") return wrap(run_error_decay);
    if (sub == "stability") return wrap(run_stability);
    return wrap(run_plot);
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& message) {
    err << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

json read_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open manifest: " + path, "file_not_found");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DomainError("manifest is not valid JSON: " + std::string(e.what()), "invalid_manifest");
    }
}

struct SubOptions {
    std::string config, from_manifest, out_dir = ".";
    std::vector<std::string> sets;
    std::map<std::string, std::string> flags;
    std::map<std::string, CLI::Option*> flag_opts;
};

}  // namespace

Settings default_settings(const std::string& sub) {
    Settings s;
    if (sub == "trees") {
        s["generations"] = "3";
    } else if (sub == "simulate") {
        add_model(s);
        add_data(s);
        s["n_max"] = "8";
        s["T"] = "1";
        s["dt"] = "0.001";
        s["record_stride"] = "10";
        s["method"] = "rk4";
    } else if (sub == "solve-nfe") {
        add_solver(s);
    } else if (sub == "compare") {
        add_solver(s);
        s["dt_ref"] = "0.001";
    } else if (sub == "bounds") {
        s["nonlinearity_sign"] = "1";
        s["kinds"] = "R:1,R2:1,N0:2,N1:2,N2:1";
        s["p_values"] = "1,1.5,2,4,10";
        s["trials"] = "100";
        s["seed"] = "1";
        s["n_max"] = "4";
        s["K"] = "1";
        s["cutoff_override"] = "1:4,2:8";
    } else if (sub == "error-decay") {
        add_model(s);
        add_data(s);
        add_modulation(s);
        s["n_max"] = "3";
        s["amplitude"] = "0.1";
        s["cutoff_override"] = "1:2,2:2,3:2";
        s["J_min"] = "1";
        s["J_max"] = "3";
        s["T"] = "0.2";
        s["t_samples"] = "5";
    } else if (sub == "stability") {
        add_solver(s);
        s["n_max"] = "4";
        s["m_range"] = "";
        s["probes"] = "2";
        s["seed"] = "1";
    } else if (sub == "plot") {
        s["csv"] = "";
        s["x"] = "J";
        s["y"] = "sup_fl_inf";
        s["log_x"] = "false";
        s["log_y"] = "false";
        s["title"] = "";
        s["out"] = "plot.svg";
    }
    return s;
}

void resolve_settings(const std::string& sub, Settings& s) {
    (void)sub;
    if (s.count("p") && s.count("eps")) {
        const double p = get_double(s, "p");
        if (s["eps"] == "auto") s["eps"] = format_double(ModulationConfig::default_eps(p));
        if (s["theta"] == "auto") s["theta"] = format_double(ModulationConfig::default_theta(p, get_double(s, "eps")));
    }
    if (s.count("support") && get_int(s, "support") < 0) s["support"] = s["n_max"];
    if (s.count("m_range") && s["m_range"].empty()) {
        std::string r;
        for (int m = 0; m <= get_int(s, "n_max"); ++m) r += (m ? "," : "") + std::to_string(m);
        s["m_range"] = r;
    }
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DomainError("cannot write " + tmp.string(), "io_error");
        out << content;
        out.flush();
        if (!out) throw DomainError("write failed for " + tmp.string(), "io_error");
    }
    fs::rename(tmp, target);
}

int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Normal form reduction toolkit for the periodic cubic NLS", "nfnls"};
    app.set_version_flag("--version", NFNLS_VERSION);
    app.require_subcommand(1);

    std::map<std::string, SubOptions> opts;
    for (const auto& [name, description] : kSubcommands) {
        auto* sub = app.add_subcommand(name, description);
        auto& o = opts[name];
        sub->add_option("--config", o.config, "key = value settings file");
        sub->add_option("--set", o.sets, "KEY=VALUE override (repeatable)");
        sub->add_option("--out-dir", o.out_dir, "directory for outputs and the manifest");
        sub->add_option("--from-manifest", o.from_manifest, "rerun the configuration recorded in a manifest");
        for (const auto& [key, value] : default_settings(name)) {
            std::string names = "--" + key;
            if (key.find('_') != std::string::npos) {
                std::string dashed = key;
                std::replace(dashed.begin(), dashed.end(), '_', '-');
                names += ",--" + dashed;
            }
            o.flag_opts[key] = sub->add_option(names, o.flags[key], "default: " + (value.empty() ? "\"\"" : value));
        }
    }

    if (args.empty()) {
        err << app.help();
        return 2;
    }
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << NFNLS_VERSION << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << app.help();
        return 2;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    auto& o = opts[name];
    try {
        const auto start = std::chrono::steady_clock::now();
        Settings s = default_settings(name);
        if (!o.from_manifest.empty()) {
            const json m = read_manifest(o.from_manifest);
            if (m.value("subcommand", "") != name) {
                throw DomainError("manifest was written by '" + m.value("subcommand", "") + "', not '" + name + "'",
                                  "invalid_manifest");
            }
            Settings recorded;
            for (const auto& [k, v] : m.at("config").items()) recorded[k] = v.get<std::string>();
            merge_known(s, recorded, "manifest");
        }
        if (!o.config.empty()) merge_known(s, load_config_file(o.config), o.config);
        Settings sets;
        for (const auto& kv : o.sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw DomainError("--set expects KEY=VALUE, got '" + kv + "'", "invalid_config");
            sets[kv.substr(0, eq)] = kv.substr(eq + 1);
        }
        merge_known(s, sets, "--set");
        for (const auto& [key, opt] : o.flag_opts) {
            if (opt->count() > 0) s[key] = o.flags[key];
        }
        resolve_settings(name, s);

        Run run;
        run.out_dir = o.out_dir;
        runner_for(name)(s, run, out);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        json manifest = {{"subcommand", name},
                         {"config", s},
                         {"outputs", run.outputs},
                         {"duration_seconds", seconds},
                         {"version", NFNLS_VERSION}};
        write_file_atomic((run.out_dir / (name + ".manifest.json")).string(), dump(manifest));
        if (name != "trees") {
            run.summary["outputs"] = run.outputs;
            out << run.summary.dump() << "\n";
        }
        return 0;
    } catch (const DomainError& e) {
        emit_error(err, e.kind(), e.what());
    } catch (const json::exception& e) {
        emit_error(err, "invalid_manifest", e.what());
    } catch (const fs::filesystem_error& e) {
        emit_error(err, "io_error", e.what());
    } catch (const std::bad_alloc&) {
        emit_error(err, "out_of_memory", "allocation failed");
    }
    return 1;
}

int dispatch(std::span<const std::string> args) { return dispatch(args, std::cout, std::cerr); }

}  // namespace nfnls::cli
