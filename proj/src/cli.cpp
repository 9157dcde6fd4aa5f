#include "impstab/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "impstab/error.hpp"
#include "impstab/io.hpp"

namespace impstab {
namespace {

struct Options {
    std::string config_path;
    std::string num;
    std::string den;
    std::string kind;
    bool force_orientation = false;
    int ppd = 0;
    double fmin = 0.0;
    double fmax = 0.0;
    double tol_deg = 0.0;
    std::vector<std::string> criteria;
    double gm_db = 6.0;
    double pm_deg = 30.0;
    int scenario = 0;
    std::string out;
    std::string svg;
};

int verdict_exit(Verdict v) {
    switch (v) {
        case Verdict::stable: return exit_stable;
        case Verdict::unstable: return exit_unstable;
        case Verdict::marginal:
        case Verdict::indeterminate: return exit_undecided;
    }
    return exit_undecided;
}

// Settings come from the config file first; flags given on the command line win.
AnalysisConfig effective_config(const Options& o, const CLI::App& sub) {
    AnalysisConfig cfg = o.config_path.empty() ? AnalysisConfig{} : load_config(o.config_path);
    auto given = [&](const char* flag) {
        const CLI::Option* opt = sub.get_option_no_throw(flag);
        return opt != nullptr && opt->count() > 0;
    };
    if (given("--num")) cfg.num_path = o.num;
    if (given("--den")) cfg.den_path = o.den;
    if (given("--kind")) cfg.kind = parse_response_kind(o.kind);
    if (given("--force-orientation")) cfg.force_orientation = "num";
    if (given("--ppd")) cfg.points_per_decade = o.ppd;
    if (given("--fmin")) cfg.f_min = o.fmin;
    if (given("--fmax")) cfg.f_max = o.fmax;
    if (given("--tol-deg")) cfg.tol_deg = o.tol_deg;
    if (given("--scenario")) {
        cfg.scenario = o.scenario;
        cfg.params.scenario = o.scenario == 1 ? Scenario::I : Scenario::II;
    }
    if (given("--criterion")) {
        cfg.criteria.clear();
        for (const std::string& c : o.criteria) {
            ForbiddenRegionSpec s;
            s.kind = parse_criterion_kind(c);
            s.GM_db = o.gm_db;
            s.PM_deg = o.pm_deg;
            s.tol_deg = cfg.tol_deg;
            cfg.criteria.push_back(s);
        }
    } else if (given("--gm-db") || given("--pm-deg")) {
        for (ForbiddenRegionSpec& s : cfg.criteria) {
            if (given("--gm-db")) s.GM_db = o.gm_db;
            if (given("--pm-deg")) s.PM_deg = o.pm_deg;
        }
    }
    cfg.validate();
    return cfg;
}

// "tf:..." is an exact model, anything else a CSV file.
SubsystemModel load_side(const std::string& src, ResponseKind kind, const std::string& id) {
    if (src.empty()) throw Error(ErrorCode::invalid_argument, "missing input for " + id);
    if (src.rfind("tf:", 0) == 0) return SubsystemModel::from_exact(parse_transfer_function(src), kind, src);
    return SubsystemModel::from_sampled(load_response_csv(src, CsvFormat::detect, kind), kind, src);
}

struct Pair {
    SubsystemModel a;
    SubsystemModel b;
};

Pair load_pair(const AnalysisConfig& cfg) {
    if (cfg.scenario) {
        ScenarioSpec spec = cfg.params;
        spec.scenario = *cfg.scenario == 1 ? Scenario::I : Scenario::II;
        ScenarioModels m = build_scenario(spec);
        return {std::move(m.y_to1), std::move(m.y_to2)};
    }
    return {load_side(cfg.num_path, cfg.kind, "num"), load_side(cfg.den_path, cfg.kind, "den")};
}

// Both sides on one grid: a measured grid if there is one, else the configured sweep.
std::pair<SampledResponse, SampledResponse> responses(const SubsystemModel& m1, const SubsystemModel& m2,
                                                      const AnalysisConfig& cfg) {
    std::vector<double> f = m1.sampled ? m1.sampled->f : m2.sampled ? m2.sampled->f : cfg.grid().frequencies();
    auto on = [&](const SubsystemModel& m) {
        if (m.sampled) {
            if (m.sampled->f != f) throw Error(ErrorCode::grid_mismatch, "the two CSV inputs use different grids");
            return *m.sampled;
        }
        return evaluate_response(*m.exact, f, m.kind, cfg.axis_tol);
    };
    return {on(m1), on(m2)};
}

// Orders the pair as numerator, denominator.
std::pair<const SubsystemModel*, const SubsystemModel*> oriented(const Pair& p, const AnalysisConfig& cfg) {
    bool a_top = true;
    if (cfg.force_orientation == "den") a_top = false;
    else if (cfg.force_orientation.empty()) a_top = select_proper_ratio(p.a, p.b, cfg.grid()).a_is_numerator;
    return a_top ? std::pair{&p.a, &p.b} : std::pair{&p.b, &p.a};
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
    if (o.out.empty() || o.out == "-") out << text;
    else write_text(o.out, text);
}

void summarize(const StabilityReport& r, std::ostream& out) {
    out << "ratio      " << r.orientation.numerator_id << " / " << r.orientation.denominator_id << " ("
        << to_string(r.orientation.basis) << ")\n";
    out << "P          " << r.P_open_loop << '\n';
    out << "crossings  " << r.crossings.size() << " (N_CC " << r.encirclements.N_CC << ", N_ACC "
        << r.encirclements.N_ACC << ")\n";
    for (const Crossing& c : r.crossings)
        out << "  " << to_string(c.kind) << (c.at_zero ? " at w = 0" : " at " + std::to_string(c.f) + " Hz") << '\n';
    out << "N          " << r.encirclements.N << '\n';
    for (const auto& [name, v] : r.cross_checks) out << "check      " << name << ": " << to_string(v) << '\n';
    for (const std::string& n : r.evidence_notes) out << "note       " << n << '\n';
    out << "verdict    " << to_string(r.verdict) << '\n';
}

int cmd_assess(const AnalysisConfig& cfg, const Options& o, std::ostream& out) {
    const Pair p = load_pair(cfg);
    const StabilityReport r = assess_stability(p.a, p.b, cfg.assess_options());
    summarize(r, out);
    if (!o.out.empty()) write_text(o.out, report_json(r));
    return verdict_exit(r.verdict);
}

int cmd_bode(const AnalysisConfig& cfg, const Options& o, std::ostream& out) {
    const Pair p = load_pair(cfg);
    const auto [m1, m2] = oriented(p, cfg);
    const auto [r1, r2] = responses(*m1, *m2, cfg);
    const BodeSeries b1 = bode(r1);
    const BodeSeries b2 = bode(r2);
    std::ostringstream csv;
    write_bode_csv(csv, b1, b2);
    emit(o, csv.str(), out);
    if (!o.svg.empty()) {
        std::ostringstream svg;
        write_bode_svg(svg, b1, b2, exterior_regions(b1, b2, 1e-9), m1->id + " / " + m2->id);
        write_text(o.svg, svg.str());
    }
    return 0;
}

int cmd_nyquist(const AnalysisConfig& cfg, const Options& o, std::ostream& out) {
    const Pair p = load_pair(cfg);
    const auto [m1, m2] = oriented(p, cfg);
    const auto [r1, r2] = responses(*m1, *m2, cfg);
    std::ostringstream csv;
    write_nyquist_csv(csv, r1, r2);
    emit(o, csv.str(), out);
    return 0;
}

int cmd_margins(const AnalysisConfig& cfg, const Options& o, std::ostream& out) {
    const Pair p = load_pair(cfg);
    const StabilityReport rep = assess_stability(p.a, p.b, cfg.assess_options());
    const bool a_top = rep.orientation.a_is_numerator;
    const auto [r1, r2] = responses(a_top ? p.a : p.b, a_top ? p.b : p.a, cfg);
    const Margins m = compute_margins(bode(r1), bode(r2), rep.P_open_loop);
    out << "GM " << m.GM_db << " dB, PM " << m.PM_deg << " deg\n";
    if (!o.out.empty()) write_text(o.out, report_json(m));
    return 0;
}

int cmd_criteria(const AnalysisConfig& cfg, const Options& o, std::ostream& out) {
    if (cfg.criteria.empty()) throw Error(ErrorCode::invalid_spec, "no criterion selected (--criterion or config)");
    const Pair p = load_pair(cfg);
    const StabilityReport rep = assess_stability(p.a, p.b, cfg.assess_options());
    const bool a_top = rep.orientation.a_is_numerator;
    const auto [r1, r2] = responses(a_top ? p.a : p.b, a_top ? p.b : p.a, cfg);
    const BodeSeries b1 = bode(r1);
    const BodeSeries b2 = bode(r2);
    std::vector<CriterionReport> reports;
    bool all = true;
    for (const ForbiddenRegionSpec& s : cfg.criteria) {
        reports.push_back(check_criterion(s, b1, b2, rep.P_open_loop));
        all = all && reports.back().pass;
        out << to_string(s.kind) << ": " << (reports.back().pass ? "pass" : "fail") << " ("
            << reports.back().violations.size() << " violation intervals)\n";
    }
    if (!o.out.empty()) write_text(o.out, report_json(reports));
    return all ? 0 : 1;
}

int cmd_identify(const AnalysisConfig& cfg, const Options& o, std::ostream& out) {
    const SubsystemModel m = load_side(cfg.num_path, cfg.kind, "num");
    const RhpCensus c = m.exact ? census(*m.exact, cfg.axis_tol) : census(bode(*m.sampled));
    out << "source " << to_string(c.source) << ", RHP poles " << c.rhp_poles << ", RHP zeros " << c.rhp_zeros
        << (c.determined ? "" : " (undetermined)") << '\n';
    for (const BreakPoint& b : c.breaks)
        out << "  " << b.f_b << " Hz " << to_string(b.kind) << ' ' << to_string(b.half_plane) << '\n';
    if (!o.out.empty()) write_text(o.out, report_json(c));
    return c.determined ? 0 : exit_undecided;
}

void setup_logging(std::ostream& err) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
    auto logger = std::make_shared<spdlog::logger>("impstab", sink);
    logger->set_pattern("[%l] %v");
    const char* level = std::getenv("STAB_LOG");
    logger->set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
    spdlog::set_default_logger(logger);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    setup_logging(err);
    Options o;
    CLI::App app{"Impedance-ratio stability analysis", std::string(tool_name)};
    app.set_version_flag("--version", std::string(tool_version));
    app.require_subcommand(1);

    auto inputs = [&](CLI::App* s, bool two) {
        s->add_option("--num", o.num, "first input: CSV file or tf:n0,n1,..;d0,d1,..");
        if (two) s->add_option("--den", o.den, "second input, same forms");
        s->add_option("--kind", o.kind, "impedance or admittance")->check(CLI::IsMember({"impedance", "admittance"}));
        s->add_option("--scenario", o.scenario, "built-in case study instead of inputs")->check(CLI::Range(1, 2));
        s->add_option("--config", o.config_path, "settings file")->check(CLI::ExistingFile);
        s->add_option("--ppd", o.ppd, "points per decade")->check(CLI::PositiveNumber);
        s->add_option("--fmin", o.fmin, "lowest frequency, Hz")->check(CLI::PositiveNumber);
        s->add_option("--fmax", o.fmax, "highest frequency, Hz")->check(CLI::PositiveNumber);
        s->add_option("--tol-deg", o.tol_deg, "phase tolerance, degrees")->check(CLI::PositiveNumber);
        s->add_option("--out", o.out, "machine-readable output path");
        if (two) s->add_flag("--force-orientation", o.force_orientation, "keep --num as the ratio numerator");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "stability verdict for two subsystems");
    inputs(analyze, true);
    CLI::App* bode_cmd = app.add_subcommand("bode", "Bode series CSV with ERs and crossing boundaries");
    inputs(bode_cmd, true);
    bode_cmd->add_option("--svg", o.svg, "also draw a static Bode picture");
    CLI::App* nyq = app.add_subcommand("nyquist", "ratio trajectory CSV");
    inputs(nyq, true);
    CLI::App* margins = app.add_subcommand("margins", "gain and phase margins of the ratio");
    inputs(margins, true);
    CLI::App* crit = app.add_subcommand("criteria", "forbidden-region checks");
    inputs(crit, true);
    crit->add_option("--criterion", o.criteria, "middlebrook, small_gain, gmpm, opac, nssc or mpc");
    crit->add_option("--gm-db", o.gm_db, "gain margin, dB");
    crit->add_option("--pm-deg", o.pm_deg, "phase margin, degrees");
    CLI::App* ident = app.add_subcommand("identify-rhp", "RHP pole and zero census of one input");
    inputs(ident, false);
    CLI::App* cs = app.add_subcommand("case-study", "built-in two-inverter scenarios");
    inputs(cs, false);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n\n" << app.help();
        return exit_usage;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        const AnalysisConfig cfg = effective_config(o, *sub);
        spdlog::debug("running {}", sub->get_name());
        if (sub == analyze) return cmd_assess(cfg, o, out);
        if (sub == cs) {
            if (!cfg.scenario) throw Error(ErrorCode::invalid_argument, "case-study needs --scenario 1 or 2");
            return cmd_assess(cfg, o, out);
        }
        if (sub == bode_cmd) return cmd_bode(cfg, o, out);
        if (sub == nyq) return cmd_nyquist(cfg, o, out);
        if (sub == margins) return cmd_margins(cfg, o, out);
        if (sub == crit) return cmd_criteria(cfg, o, out);
        if (sub == ident) return cmd_identify(cfg, o, out);
    } catch (const Error& e) {
        spdlog::error("{} ({})", e.what(), to_string(e.code()));
        switch (e.code()) {
            case ErrorCode::parse_error:
            case ErrorCode::non_monotone_frequency:
            case ErrorCode::non_finite:
            case ErrorCode::io_error:
            case ErrorCode::invalid_argument:
            case ErrorCode::invalid_spec:
            case ErrorCode::divisor_zero:
            case ErrorCode::grid_mismatch:
                return exit_usage;
            default:
                return exit_undecided;  // the analysis itself could not reach a verdict
        }
    }
    return exit_usage;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace impstab
