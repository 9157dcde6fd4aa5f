#include "impstab/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "impstab/error.hpp"

namespace impstab {
namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
    throw Error(ErrorCode::parse_error, "line " + std::to_string(line) + ": " + what);
}

double to_number(const std::string& cell, int line) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = first + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec == std::errc::result_out_of_range)
        throw Error(ErrorCode::non_finite, "line " + std::to_string(line) + ": value out of range '" + cell + "'");
    if (ec != std::errc() || ptr != last) parse_fail(line, "not a number '" + cell + "'");
    // from_chars accepts "inf" and "nan"
    if (!std::isfinite(v)) throw Error(ErrorCode::non_finite, "line " + std::to_string(line) + ": non-finite value");
    return v;
}

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvFormat header_format(const std::vector<std::string>& cols) {
    std::vector<std::string> c;
    for (const std::string& s : cols) c.push_back(lower(s));
    if (c == std::vector<std::string>{"f_hz", "re", "im"}) return CsvFormat::complex;
    if (c == std::vector<std::string>{"f_hz", "mag_db", "phase_deg"}) return CsvFormat::polar;
    parse_fail(1, "header must be 'f_hz,re,im' or 'f_hz,mag_db,phase_deg'");
}

}  // namespace

SampledResponse parse_response_csv(std::istream& in, CsvFormat fmt, ResponseKind kind, std::string label) {
    std::string line;
    int lineno = 0;
    // header row is mandatory; a UTF-8 byte order mark is tolerated
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) parse_fail(lineno == 0 ? 1 : lineno, "missing header row");
    const CsvFormat found = header_format(split_commas(trim(line)));
    if (fmt != CsvFormat::detect && fmt != found) parse_fail(lineno, "header does not match the requested format");

    std::vector<double> f;
    std::vector<double> a;
    std::vector<double> b;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        const std::vector<std::string> cells = split_commas(t);
        if (cells.size() != 3) parse_fail(lineno, "expected 3 columns, found " + std::to_string(cells.size()));
        const double fv = to_number(cells[0], lineno);
        if (!(fv > 0.0)) parse_fail(lineno, "frequency must be positive");
        if (!f.empty() && !(fv > f.back()))
            throw Error(ErrorCode::non_monotone_frequency,
                        "line " + std::to_string(lineno) + ": frequencies must be strictly increasing");
        f.push_back(fv);
        a.push_back(to_number(cells[1], lineno));
        b.push_back(to_number(cells[2], lineno));
    }
    if (f.empty()) parse_fail(lineno, "no data rows");

    std::vector<cplx> v(f.size());
    if (found == CsvFormat::complex) {
        for (std::size_t i = 0; i < f.size(); ++i) v[i] = {a[i], b[i]};
    } else {
        // the stored phase may be wrapped or not; the complex value does not care and
        // bode() unwraps again on the way out
        for (std::size_t i = 0; i < f.size(); ++i) v[i] = std::polar(std::pow(10.0, a[i] / 20.0), b[i] / rad2deg);
    }
    return SampledResponse(std::move(f), std::move(v), std::move(label), kind);
}

SampledResponse load_response_csv(const std::string& path, CsvFormat fmt, ResponseKind kind) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path + "'");
    return parse_response_csv(in, fmt, kind, path);
}

void write_response_csv(std::ostream& out, const SampledResponse& r, CsvFormat fmt) {
    if (fmt == CsvFormat::polar) {
        const BodeSeries b = bode(r);
        out << "f_hz,mag_db,phase_deg\n";
        for (std::size_t i = 0; i < r.size(); ++i)
            out << g17(r.f[i]) << ',' << g17(b.mag_db[i]) << ',' << g17(b.phase_deg[i]) << '\n';
        return;
    }
    out << "f_hz,re,im\n";
    for (std::size_t i = 0; i < r.size(); ++i)
        out << g17(r.f[i]) << ',' << g17(r.value[i].real()) << ',' << g17(r.value[i].imag()) << '\n';
}

void save_response_csv(const std::string& path, const SampledResponse& r, CsvFormat fmt) {
    std::ostringstream ss;
    write_response_csv(ss, r, fmt);
    write_text(path, ss.str());
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::io_error, "cannot write '" + path + "'");
    out << text;
    if (!out) throw Error(ErrorCode::io_error, "write failed for '" + path + "'");
}

RationalFunction parse_transfer_function(std::string_view text) {
    std::string s = trim(text);
    if (s.rfind("tf:", 0) != 0) throw Error(ErrorCode::parse_error, "transfer function must start with 'tf:'");
    s.erase(0, 3);
    const std::size_t semi = s.find(';');
    if (semi == std::string::npos) throw Error(ErrorCode::parse_error, "transfer function needs 'num;den'");
    auto coeffs = [](const std::string& part) {
        std::vector<double> c;
        for (const std::string& cell : split_commas(part)) c.push_back(to_number(cell, 1));
        if (c.empty()) throw Error(ErrorCode::parse_error, "empty coefficient list");
        return Polynomial(std::move(c));
    };
    Polynomial den = coeffs(s.substr(semi + 1));
    if (den.is_zero()) throw Error(ErrorCode::divisor_zero, "denominator is the zero polynomial");
    return {coeffs(s.substr(0, semi)), std::move(den)};
}

// ---- configuration ----

void AnalysisConfig::validate() const {
    auto bad = [](const std::string& what) { throw Error(ErrorCode::invalid_spec, what); };
    if (!(tol_deg > 0)) bad("tol_deg must be positive");
    if (!(axis_tol > 0)) bad("axis_tol must be positive");
    if (points_per_decade <= 0) bad("points_per_decade must be positive");
    if (!(f_min > 0) || !(f_min < f_max) || !std::isfinite(f_max)) bad("need 0 < f_min < f_max");
    if (scenario && *scenario != 1 && *scenario != 2) bad("scenario must be 1 or 2");
    if (!force_orientation.empty() && force_orientation != "num" && force_orientation != "den")
        bad("force_orientation must be 'num' or 'den'");
    for (const ForbiddenRegionSpec& c : criteria) c.validate();
}

FrequencyGrid AnalysisConfig::grid() const { return {f_min, f_max, points_per_decade, {}}; }

AssessOptions AnalysisConfig::assess_options() const {
    AssessOptions o;
    o.grid = grid();
    o.tol_deg = tol_deg;
    o.axis_tol = axis_tol;
    if (force_orientation == "num") o.force_a_numerator = true;
    if (force_orientation == "den") o.force_a_numerator = false;
    return o;
}

namespace {

namespace pt = boost::property_tree;

// One table drives both reading and writing so the two cannot drift apart.
template <class Visit>
void visit_params(ScenarioSpec& s, Visit&& visit) {
    for (auto [name, inv] : {std::pair{"inverter1", &s.inv1}, std::pair{"inverter2", &s.inv2}}) {
        visit(name, "L1", inv->L1);
        visit(name, "L2", inv->L2);
        visit(name, "Cf", inv->Cf);
        visit(name, "Kp", inv->Kp);
        visit(name, "Kr", inv->Kr);
        visit(name, "omega1", inv->omega1);
        visit(name, "omega_c", inv->omega_c);
        visit(name, "fs", inv->fs);
        visit(name, "Vdc", inv->Vdc);
    }
    visit("grid", "Lg", s.grid.Lg);
    visit("grid", "Cg", s.grid.Cg);
    visit("grid", "Vgrms_ll", s.grid.Vgrms_ll);
    visit("load", "Rd", s.load.Rd);
    visit("load", "Ld", s.load.Ld);
}

template <class Visit>
void visit_analysis(AnalysisConfig& c, Visit&& visit) {
    visit("analysis", "tol_deg", c.tol_deg);
    visit("analysis", "axis_tol", c.axis_tol);
    visit("analysis", "f_min", c.f_min);
    visit("analysis", "f_max", c.f_max);
}

double get_number(const pt::ptree& node, const std::string& key) {
    const std::string raw = node.get_value<std::string>();
    try {
        return to_number(trim(raw), 0);
    } catch (const Error&) {
        throw Error(ErrorCode::parse_error, "key '" + key + "': not a number '" + raw + "'");
    }
}

}  // namespace

AnalysisConfig parse_config(std::istream& in) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(ErrorCode::parse_error, "line " + std::to_string(e.line()) + ": " + e.message());
    }

    AnalysisConfig cfg;
    std::set<std::string> known;
    auto read = [&](const char* sec, const char* key, double& dst) {
        const std::string path = std::string(sec) + "." + key;
        known.insert(path);
        if (auto node = tree.get_child_optional(pt::ptree::path_type(path, '.'))) dst = get_number(*node, path);
    };
    visit_analysis(cfg, read);
    visit_params(cfg.params, read);

    auto text = [&](const char* sec, const char* key) -> std::optional<std::string> {
        const std::string path = std::string(sec) + "." + key;
        known.insert(path);
        if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return trim(*v);
        return std::nullopt;
    };
    double ppd = cfg.points_per_decade;
    read("analysis", "points_per_decade", ppd);
    if (ppd != std::floor(ppd) || ppd > 1e6) throw Error(ErrorCode::parse_error, "points_per_decade must be an integer");
    cfg.points_per_decade = static_cast<int>(ppd);
    if (auto v = text("analysis", "force_orientation")) cfg.force_orientation = *v;
    if (auto v = text("input", "scenario"); v && !v->empty()) {
        const double sc = get_number(pt::ptree(*v), "input.scenario");
        if (sc != 1.0 && sc != 2.0) throw Error(ErrorCode::invalid_spec, "scenario must be 1 or 2");
        cfg.scenario = static_cast<int>(sc);
        cfg.params.scenario = sc == 1.0 ? Scenario::I : Scenario::II;
    }
    if (auto v = text("input", "num")) cfg.num_path = *v;
    if (auto v = text("input", "den")) cfg.den_path = *v;
    if (auto v = text("input", "kind")) cfg.kind = parse_response_kind(*v);

    // criteria live in numbered sections: [criterion1], [criterion2], ...
    for (int k = 1;; ++k) {
        const std::string sec = "criterion" + std::to_string(k);
        if (!tree.get_child_optional(sec)) break;
        ForbiddenRegionSpec s;
        auto kind = text(sec.c_str(), "kind");
        if (!kind) throw Error(ErrorCode::parse_error, "[" + sec + "] needs a kind");
        s.kind = parse_criterion_kind(*kind);
        read(sec.c_str(), "gm_db", s.GM_db);
        read(sec.c_str(), "pm_deg", s.PM_deg);
        read(sec.c_str(), "ms", s.Ms);
        read(sec.c_str(), "tol_deg", s.tol_deg);
        cfg.criteria.push_back(s);
    }

    for (const auto& [sec, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw Error(ErrorCode::parse_error, "key '" + sec + "' outside a section");
        for (const auto& [key, _] : body)
            if (!known.count(sec + "." + key)) throw Error(ErrorCode::parse_error, "unknown key '" + sec + "." + key + "'");
    }
    cfg.validate();
    return cfg;
}

AnalysisConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path + "'");
    return parse_config(in);
}

void write_config(std::ostream& out, const AnalysisConfig& cfg) {
    out << "[input]\n";
    if (cfg.scenario) out << "scenario = " << *cfg.scenario << '\n';
    if (!cfg.num_path.empty()) out << "num = " << cfg.num_path << '\n';
    if (!cfg.den_path.empty()) out << "den = " << cfg.den_path << '\n';
    out << "kind = " << to_string(cfg.kind) << '\n';

    std::string current;
    auto write = [&](const char* sec, const char* key, const double& v) {
        if (current != sec) {
            current = sec;
            out << "\n[" << sec << "]\n";
        }
        out << key << " = " << g17(v) << '\n';
    };
    AnalysisConfig copy = cfg;
    visit_analysis(copy, write);
    out << "points_per_decade = " << cfg.points_per_decade << '\n';
    if (!cfg.force_orientation.empty()) out << "force_orientation = " << cfg.force_orientation << '\n';
    visit_params(copy.params, write);

    for (std::size_t k = 0; k < cfg.criteria.size(); ++k) {
        const ForbiddenRegionSpec& s = cfg.criteria[k];
        out << "\n[criterion" << k + 1 << "]\nkind = " << to_string(s.kind) << '\n';
        out << "gm_db = " << g17(s.GM_db) << "\npm_deg = " << g17(s.PM_deg) << "\nms = " << g17(s.Ms)
            << "\ntol_deg = " << g17(s.tol_deg) << '\n';
    }
}

}  // namespace impstab
