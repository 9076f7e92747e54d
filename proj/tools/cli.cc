// Copyright 2026 The macroent Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "macroent/correlation.h"
#include "macroent/observables.h"
#include "macroent/oracle.h"
#include "macroent/scaling.h"
#include "macroent/states.h"

namespace macroent::cli {

namespace {

using nlohmann::json;

constexpr int kDefaultN = 6;

const std::vector<std::string> kCommands = {"index", "sweep", "mermin", "chsh", "conditions", "convert", "verify"};

struct ConfigKey {
    std::string key;
    CLI::Option *option;
    std::function<void(const json &)> assign;
};

// Builds the option set; config-file keys mirror the long flag names with '-' replaced by '_'.
struct Parser {
    CLI::App app{"macroent: macroscopic entanglement indices of finite spin-1/2 systems"};
    RunConfig cfg;
    std::string config_path;
    std::vector<ConfigKey> keys;

    template <typename T>
    void add(const std::string &flag, T &target, const std::string &help) {
        CLI::Option *opt = app.add_option("--" + flag, target, help);
        std::string key = flag;
        std::replace(key.begin(), key.end(), '-', '_');
        keys.push_back({key, opt, [&target](const json &v) { target = v.get<T>(); }});
    }

    Parser() {
        app.require_subcommand(1, 1);
        app.fallthrough();
        add("state", cfg.state, "state family, optionally with a parameter: ex2prime(0.3), product(5)");
        add("w", cfg.w, "mixing weight for ex2prime / ex3prime");
        add("state-seed", cfg.state_seed, "seed for seeded families (product, ex3random)");
        add("state-file", cfg.state_file, "pure state amplitudes, one 're im' pair per line");
        add("n", cfg.n, "number of sites: N, a:b:step, or a comma list");
        add("mode", cfg.mode, "sweep mode: optimized, canonical, variance");
        add("restarts", cfg.optimizer.restarts, "optimizer restarts");
        add("max-iters", cfg.optimizer.max_iters, "iterations per restart");
        add("step-init", cfg.optimizer.step_init, "initial ascent step");
        add("step-shrink", cfg.optimizer.step_shrink, "step factor after a rejected step");
        add("grad-tol", cfg.optimizer.grad_tol, "convergence tolerance");
        add("seed", cfg.optimizer.seed, "optimizer seed");
        add("jobs", cfg.optimizer.jobs, "worker threads for restarts");
        add("output", cfg.output, "output path (default: stdout)");
        add("format", cfg.format, "csv or json");
        add("site", cfg.site, "site measured by convert (1-based)");
        add("threshold-exponent", cfg.threshold_exponent, "conditions: macroscopic if Var >= N^exponent");
        add("choice", cfg.choice, "chsh observable choice: canonical or commuting");
        app.add_option("--config", config_path, "JSON file with flat keys mirroring the flags");
        app.add_subcommand("index", "canonical, optimized and effective <C> for one N");
        app.add_subcommand("sweep", "sweep over N and fit the scaling index");
        app.add_subcommand("mermin", "Mermin correlation and its LHV ratio");
        app.add_subcommand("chsh", "largest eigenvalue of the macroscopic CHSH operator");
        app.add_subcommand("conditions", "check the sufficient condition on an ensemble");
        app.add_subcommand("convert", "single-site measurement converting psi1-like states");
        app.add_subcommand("verify", "run the oracle suite");
    }

    void merge_config_file() {
        if (config_path.empty()) {
            return;
        }
        std::ifstream in(config_path);
        if (!in) {
            throw CliError(kInvalidArgument, "cannot read config file '" + config_path + "'");
        }
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::exception &ex) {
            throw CliError(kInvalidArgument, "config file '" + config_path + "' is not valid JSON: " + ex.what());
        }
        if (!doc.is_object()) {
            throw CliError(kInvalidArgument, "config file must hold a JSON object");
        }
        for (const auto &[key, value] : doc.items()) {
            auto it = std::find_if(keys.begin(), keys.end(), [&](const ConfigKey &k) { return k.key == key; });
            if (it == keys.end()) {
                throw CliError(kInvalidArgument, "unknown config key '" + key + "'");
            }
            if (it->option->count() > 0) {
                continue;
            }
            try {
                if (key == "n" && value.is_number_integer()) {
                    cfg.n = std::to_string(value.get<int>());
                } else {
                    it->assign(value);
                }
            } catch (const json::exception &) {
                throw CliError(kInvalidArgument, "config key '" + key + "' has the wrong type");
            }
        }
    }
};

std::string default_format(const std::string &command) {
    return command == "sweep" ? "csv" : "json";
}

std::vector<int> default_sweep_grid(const StateFamily &f) {
    if (f.name == "ex3" || f.name == "ex3random" || f.name == "ex3prime") return {6, 9, 12, 15, 18};
    if (f.is_pure()) return {6, 8, 10, 12, 14, 16};
    if (f.name == "random") return {4, 6, 8, 10, 12};
    return {6, 8, 10, 12, 14, 16, 18};
}

StateFamily resolve_family(const RunConfig &cfg) {
    std::string name = cfg.state.substr(0, cfg.state.find('('));
    const auto &names = family_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        std::string known;
        for (const auto &k : names) {
            known += (known.empty() ? "" : ", ") + k;
        }
        throw CliError(kUnknownState, "unknown state '" + name + "' (known: " + known + ")");
    }
    return parse_family(cfg.state, cfg.w, cfg.state_seed);
}

std::vector<int> n_values(const RunConfig &cfg) {
    return parse_n_range(cfg.n);
}

int single_n(const RunConfig &cfg) {
    if (cfg.n.empty()) {
        return kDefaultN;
    }
    auto ns = n_values(cfg);
    if (ns.size() != 1) {
        throw std::invalid_argument("command '" + cfg.command + "' takes a single --n");
    }
    return ns.front();
}

std::optional<PureState> file_state(const RunConfig &cfg) {
    if (cfg.state_file.empty()) {
        return std::nullopt;
    }
    std::ifstream in(cfg.state_file);
    if (!in) {
        throw std::invalid_argument("cannot read state file '" + cfg.state_file + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_amplitudes(buf.str());
}

json config_object(const RunConfig &cfg) {
    // The output path and thread count do not affect results, so they stay out of the record.
    const auto &o = cfg.optimizer;
    json j = {
        {"command", cfg.command},
        {"state", cfg.state},
        {"w", cfg.w},
        {"state_seed", cfg.state_seed},
        {"state_file", cfg.state_file},
        {"n", cfg.n},
        {"mode", cfg.mode},
        {"restarts", o.restarts},
        {"max_iters", o.max_iters},
        {"step_init", o.step_init},
        {"step_shrink", o.step_shrink},
        {"grad_tol", o.grad_tol},
        {"seed", o.seed},
        {"format", cfg.format},
        {"site", cfg.site},
        {"threshold_exponent", cfg.threshold_exponent},
        {"choice", cfg.choice},
    };
    return j;
}

json envelope(const RunConfig &cfg) {
    return json{{"schema_version", kSchemaVersion}, {"config", config_object(cfg)}};
}

void csv_preamble(std::ostream &out, const RunConfig &cfg) {
    out << "# schema_version=" << kSchemaVersion << '\n';
    out << "# config=" << config_object(cfg).dump() << '\n';
}

json coefficients_json(const AdditiveObservable &a) {
    json arr = json::array();
    for (const auto &c : a.locals()) {
        arr.push_back({c[0], c[1], c[2]});
    }
    return arr;
}

json complex_json(Complex z) {
    return json::array({z.real(), z.imag()});
}

json nullable(double x) {
    return std::isfinite(x) ? json(x) : json(nullptr);
}

MixedState make_state(const RunConfig &cfg, int n) {
    if (auto pure = file_state(cfg)) {
        if (pure->n_sites() != n) {
            throw std::invalid_argument(
                fmt::format("state file has {} sites but --n is {}", pure->n_sites(), n));
        }
        return *pure;
    }
    return resolve_family(cfg).make(n);
}

int file_or_single_n(const RunConfig &cfg) {
    if (auto pure = file_state(cfg); pure && cfg.n.empty()) {
        return pure->n_sites();
    }
    return single_n(cfg);
}

void cmd_index(const RunConfig &cfg, std::ostream &out) {
    int n = file_or_single_n(cfg);
    MixedState s = make_state(cfg, n);
    double canonical = canonical_value(s);
    Optimum opt = maximize_c(s, cfg.optimizer);
    CorrelationResult res = eta_optimal(opt.observable, s);
    double effective = std::max(opt.value, static_cast<double>(n));
    if (cfg.format == "csv") {
        out << "# schema_version=" << kSchemaVersion << '\n';
        out << "# config=" << config_object(cfg).dump() << '\n';
        out << "n,value_canonical,value_optimized,value_effective,eta_rank\n";
        out << n << ',' << format_number(canonical) << ',' << format_number(opt.value) << ','
            << format_number(effective) << ',' << res.eta_rank() << '\n';
        return;
    }
    json doc = envelope(cfg);
    doc["n"] = n;
    doc["value_canonical"] = canonical;
    doc["value_optimized"] = opt.value;
    doc["value_effective"] = effective;
    doc["k_spectrum"] = res.k_spectrum;
    doc["eta_rank"] = res.eta_rank();
    doc["observable_coefficients"] = coefficients_json(opt.observable);
    doc["optimizer"] = {{"restart_index", opt.restart_index},
                        {"iterations", opt.iterations},
                        {"converged", opt.converged},
                        {"on_boundary", opt.on_boundary}};
    out << doc.dump(2) << '\n';
}

json fit_summary(const RunConfig &cfg, const std::vector<SweepPoint> &points, std::ostream &err) {
    json summary = envelope(cfg);
    std::optional<double> expected;
    if (cfg.state_file.empty()) {
        expected = resolve_family(cfg).expected_index();
    }
    summary["expected_index"] = expected ? json(*expected) : json(nullptr);
    json failures = json::array();
    for (const auto &p : points) {
        if (!p.ok()) {
            failures.push_back({{"n", p.n}, {"error", p.error}});
            err << fmt::format("warning: N={} failed: {}\n", p.n, p.error);
        }
    }
    summary["failures"] = failures;
    try {
        IndexFit fit = fit_index(points);
        summary["fit"] = {{"slope", fit.slope},
                          {"intercept", fit.intercept},
                          {"r_squared", fit.r_squared},
                          {"terminal_secant", fit.terminal_secant}};
        summary["secant_slopes"] = secant_slopes(points);
        bool tension = expected && std::abs(fit.slope - *expected) > 0.25;
        summary["tension"] = tension;
        if (tension) {
            std::string msg = fmt::format(
                "measured slope {:.3f} (terminal secant {:.3f}) differs from the literature index {} for '{}'",
                fit.slope, fit.terminal_secant, *expected, cfg.state);
            summary["tension_message"] = msg;
            err << "note: " << msg << '\n';
        }
    } catch (const std::invalid_argument &ex) {
        summary["fit"] = nullptr;
        summary["fit_error"] = ex.what();
        err << "warning: " << ex.what() << '\n';
    }
    return summary;
}

void cmd_sweep(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
    if (!cfg.state_file.empty()) {
        throw std::invalid_argument("sweep needs a state family, not a state file");
    }
    StateFamily family = resolve_family(cfg);
    std::vector<int> ns = cfg.n.empty() ? default_sweep_grid(family) : n_values(cfg);
    SweepMode mode = parse_sweep_mode(cfg.mode);
    auto points = sweep(family, ns, cfg.optimizer, mode);
    json summary = fit_summary(cfg, points, err);
    if (cfg.format == "csv") {
        csv_preamble(out, cfg);
        write_sweep_csv(out, points, cfg.optimizer.seed, cfg.optimizer.restarts);
        if (!cfg.output.empty()) {
            std::string path = cfg.output + ".summary.json";
            std::ofstream f(path);
            if (!f) {
                throw CliError(kUnwritableOutput, "cannot write summary file '" + path + "'");
            }
            f << summary.dump(2) << '\n';
        }
        return;
    }
    json pts = json::array();
    auto running = running_slopes(points);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto &p = points[i];
        json jp = {{"n", p.n},
                   {"raw_value", nullable(p.raw_value)},
                   {"effective_value", nullable(p.effective_value)},
                   {"slope_running", nullable(running[i])},
                   {"wall_time_s", p.wall_time}};
        if (p.optimum) {
            jp["observable_coefficients"] = coefficients_json(p.optimum->observable);
            jp["restart_index"] = p.optimum->restart_index;
            jp["converged"] = p.optimum->converged;
        }
        if (!p.ok()) {
            jp["error"] = p.error;
        }
        pts.push_back(jp);
    }
    summary["points"] = pts;
    out << summary.dump(2) << '\n';
}

void cmd_mermin(const RunConfig &cfg, std::ostream &out) {
    std::vector<MerminReport> reports;
    std::vector<int> ns;
    for (int n : cfg.n.empty() ? std::vector<int>{file_or_single_n(cfg)} : n_values(cfg)) {
        std::string name = cfg.state.substr(0, cfg.state.find('('));
        if (cfg.state_file.empty() && name == "cat") {
            reports.push_back(mermin_score(TwoBranchState::cat(n)));
        } else if (cfg.state_file.empty() && name == "psi1") {
            reports.push_back(mermin_score(TwoBranchState::psi1(n)));
        } else {
            reports.push_back(mermin_score(make_state(cfg, n)));
        }
        ns.push_back(n);
    }
    if (cfg.format == "csv") {
        csv_preamble(out, cfg);
        out << "n,raw,lhv_bound,ratio,even_n\n";
        for (std::size_t i = 0; i < ns.size(); ++i) {
            const auto &r = reports[i];
            out << ns[i] << ',' << format_number(r.raw) << ',' << format_number(r.lhv_bound) << ','
                << format_number(r.ratio) << ',' << (r.even_n ? 1 : 0) << '\n';
        }
        return;
    }
    json doc = envelope(cfg);
    json rows = json::array();
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const auto &r = reports[i];
        rows.push_back({{"n", ns[i]}, {"raw", r.raw}, {"lhv_bound", r.lhv_bound}, {"ratio", r.ratio}, {"even_n", r.even_n}});
    }
    doc["results"] = rows;
    out << doc.dump(2) << '\n';
}

void cmd_chsh(const RunConfig &cfg, std::ostream &out) {
    std::vector<int> ns = n_values(cfg);
    std::vector<double> values;
    for (int n : ns) {
        ChshChoice choice = [&] {
            if (cfg.choice == "canonical") return canonical_chsh_choice(n);
            if (cfg.choice == "commuting") return commuting_chsh_choice(n);
            throw std::invalid_argument("unknown CHSH choice '" + cfg.choice + "' (canonical, commuting)");
        }();
        values.push_back(macro_chsh_lambda_max(n, choice));
    }
    if (cfg.format == "csv") {
        csv_preamble(out, cfg);
        out << "n,lambda_max\n";
        for (std::size_t i = 0; i < ns.size(); ++i) {
            out << ns[i] << ',' << format_number(values[i]) << '\n';
        }
        return;
    }
    json doc = envelope(cfg);
    json rows = json::array();
    for (std::size_t i = 0; i < ns.size(); ++i) {
        rows.push_back({{"n", ns[i]}, {"lambda_max", values[i]}});
    }
    doc["results"] = rows;
    doc["classical_bound"] = 2.0;
    doc["quantum_bound"] = 2 * std::sqrt(2.0);
    out << doc.dump(2) << '\n';
}

json pair_json(const std::optional<std::pair<int, int>> &p) {
    return p ? json::array({p->first, p->second}) : json(nullptr);
}

void cmd_conditions(const RunConfig &cfg, std::ostream &out) {
    int n = single_n(cfg);
    MixedState s = make_state(cfg, n);
    if (s.is_dense()) {
        throw std::invalid_argument("conditions needs an ensemble state, '" + cfg.state + "' is dense");
    }
    auto r = check_sufficient_condition(s, AdditiveObservable::magnetization(n), cfg.threshold_exponent);
    json doc = envelope(cfg);
    doc["n"] = n;
    doc["observable"] = "magnetization_z";
    doc["max_overlap_error"] = r.max_overlap_error;
    doc["orthonormal"] = r.orthonormal;
    doc["max_offdiagonal"] = r.max_offdiagonal;
    doc["offdiagonal_vanishes"] = r.offdiagonal_vanishes;
    doc["variances"] = r.variances;
    doc["macroscopic"] = r.macroscopic;
    doc["variance_threshold"] = r.variance_threshold;
    doc["macroscopic_count"] = r.macroscopic_count;
    doc["macroscopic_weight"] = r.macroscopic_weight;
    doc["sufficient"] = r.sufficient;
    doc["first_overlap_violation"] = pair_json(r.first_overlap_violation);
    doc["first_offdiagonal_violation"] = pair_json(r.first_offdiagonal_violation);
    if (cfg.format == "csv") {
        throw std::invalid_argument("conditions supports --format json only");
    }
    out << doc.dump(2) << '\n';
}

void cmd_convert(const RunConfig &cfg, std::ostream &out) {
    int n = file_or_single_n(cfg);
    std::string name = cfg.state.substr(0, cfg.state.find('('));
    TwoBranchState two = [&] {
        if (cfg.state_file.empty() && name == "psi1") return TwoBranchState::psi1(n);
        if (cfg.state_file.empty() && name == "cat") return TwoBranchState::cat(n);
        auto pure = make_state(cfg, n).as_pure();
        if (!pure) {
            throw std::invalid_argument("convert needs a pure two-branch state");
        }
        return TwoBranchState::from_pure(*pure);
    }();
    ConversionResult r = single_site_conversion(two, cfg.site);
    if (cfg.format == "csv") {
        csv_preamble(out, cfg);
        out << "n,site,success_prob,alpha,beta\n";
        out << n << ',' << r.site << ',' << format_number(r.success_prob) << ',' << format_number(r.alpha) << ','
            << format_number(r.beta) << '\n';
        return;
    }
    json doc = envelope(cfg);
    doc["n"] = n;
    doc["site"] = r.site;
    doc["success_prob"] = r.success_prob;
    doc["alpha"] = r.alpha;
    doc["beta"] = r.beta;
    doc["post_state"] = {{"n_sites", r.post_state.n_sites},
                         {"amp1", complex_json(r.post_state.amp1)},
                         {"amp2", complex_json(r.post_state.amp2)},
                         {"weight1", std::norm(r.post_state.amp1)},
                         {"weight2", std::norm(r.post_state.amp2)}};
    out << doc.dump(2) << '\n';
}

bool cmd_verify(const RunConfig &cfg, std::ostream &out) {
    auto reports = oracle::run_oracle_suite();
    bool all = std::all_of(reports.begin(), reports.end(), [](const auto &r) { return r.passed; });
    if (cfg.format == "csv") {
        csv_preamble(out, cfg);
        out << "name,max_deviation,tolerance,trials,passed\n";
        for (const auto &r : reports) {
            out << r.name << ',' << format_number(r.max_deviation) << ',' << format_number(r.tolerance) << ','
                << r.trials << ',' << (r.passed ? 1 : 0) << '\n';
        }
        return all;
    }
    json doc = envelope(cfg);
    json rows = json::array();
    for (const auto &r : reports) {
        rows.push_back({{"name", r.name},
                        {"max_deviation", r.max_deviation},
                        {"tolerance", r.tolerance},
                        {"trials", r.trials},
                        {"passed", r.passed}});
    }
    doc["reports"] = rows;
    doc["all_passed"] = all;
    out << doc.dump(2) << '\n';
    return all;
}

}  // namespace

RunConfig parse_args(int argc, const char *const *argv) {
    Parser p;
    try {
        p.app.parse(argc, argv);
    } catch (const CLI::ParseError &ex) {
        throw CliError(kInvalidArgument, ex.what());
    }
    p.merge_config_file();
    for (auto *sub : p.app.get_subcommands()) {
        p.cfg.command = sub->get_name();
    }
    if (p.cfg.format.empty()) {
        p.cfg.format = default_format(p.cfg.command);
    }
    return p.cfg;
}

std::string config_json(const RunConfig &cfg) {
    return config_object(cfg).dump();
}

int run(const RunConfig &cfg_in, std::ostream &out, std::ostream &err) {
    RunConfig cfg = cfg_in;
    if (cfg.format.empty()) {
        cfg.format = default_format(cfg.command);
    }
    if (cfg.format != "csv" && cfg.format != "json") {
        throw CliError(kInvalidArgument, "unknown format '" + cfg.format + "' (csv, json)");
    }
    if (std::find(kCommands.begin(), kCommands.end(), cfg.command) == kCommands.end()) {
        throw CliError(kInvalidArgument, "unknown command '" + cfg.command + "'");
    }
    try {
        cfg.optimizer.validate();
    } catch (const std::invalid_argument &ex) {
        throw CliError(kInvalidArgument, ex.what());
    }
    std::unique_ptr<std::ofstream> file;
    if (!cfg.output.empty()) {
        file = std::make_unique<std::ofstream>(cfg.output);
        if (!*file) {
            throw CliError(kUnwritableOutput, "cannot write output file '" + cfg.output + "'");
        }
    }
    std::ostringstream doc;
    bool ok = true;
    try {
        if (cfg.command != "verify" && cfg.command != "chsh" && cfg.state_file.empty()) {
            resolve_family(cfg);
        }
        if (cfg.command == "index") {
            cmd_index(cfg, doc);
        } else if (cfg.command == "sweep") {
            cmd_sweep(cfg, doc, err);
        } else if (cfg.command == "mermin") {
            cmd_mermin(cfg, doc);
        } else if (cfg.command == "chsh") {
            if (cfg.n.empty()) {
                cfg.n = "4:12:2";
            }
            cmd_chsh(cfg, doc);
        } else if (cfg.command == "conditions") {
            cmd_conditions(cfg, doc);
        } else if (cfg.command == "convert") {
            cmd_convert(cfg, doc);
        } else {
            ok = cmd_verify(cfg, doc);
        }
    } catch (const CliError &) {
        throw;
    } catch (const CapacityError &ex) {
        throw CliError(kCapacityExceeded, std::string("capacity exceeded: ") + ex.what());
    } catch (const std::invalid_argument &ex) {
        throw CliError(kInvalidArgument, ex.what());
    }
    if (file) {
        *file << doc.str();
        file->flush();
        if (!*file) {
            throw CliError(kUnwritableOutput, "failed writing output file '" + cfg.output + "'");
        }
    } else {
        out << doc.str();
    }
    if (!ok) {
        err << "error: oracle verification failed\n";
        return kVerificationFailed;
    }
    return kOk;
}

int main_entry(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    try {
        Parser help_probe;
        try {
            help_probe.app.parse(argc, argv);
        } catch (const CLI::CallForHelp &) {
            out << help_probe.app.help();
            return kOk;
        } catch (const CLI::CallForAllHelp &) {
            out << help_probe.app.help("", CLI::AppFormatMode::All);
            return kOk;
        } catch (const CLI::ParseError &) {
        }
        return run(parse_args(argc, argv), out, err);
    } catch (const CliError &ex) {
        err << "error: " << ex.what() << '\n';
        return ex.code();
    } catch (const std::exception &ex) {
        err << "error: " << ex.what() << '\n';
        return kInvalidArgument;
    }
}

}  // namespace macroent::cli
