#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "impstab/criteria.hpp"
#include "impstab/freq.hpp"
#include "impstab/models.hpp"
#include "impstab/rhp_id.hpp"
#include "impstab/verdict.hpp"

namespace impstab {

inline constexpr std::string_view tool_name = "impstab";
inline constexpr std::string_view tool_version = "0.1.0";

// complex: f_hz,re,im   polar: f_hz,mag_db,phase_deg   detect: read the header
enum class CsvFormat { complex, polar, detect };

// Throws ParseError, NonMonotoneFrequency and NonFinite, each naming the line.
[[nodiscard]] SampledResponse parse_response_csv(std::istream& in, CsvFormat fmt = CsvFormat::detect,
                                                 ResponseKind kind = ResponseKind::generic, std::string label = {});
[[nodiscard]] SampledResponse load_response_csv(const std::string& path, CsvFormat fmt = CsvFormat::detect,
                                                ResponseKind kind = ResponseKind::generic);
void write_response_csv(std::ostream& out, const SampledResponse& r, CsvFormat fmt = CsvFormat::complex);
void save_response_csv(const std::string& path, const SampledResponse& r, CsvFormat fmt = CsvFormat::complex);

// "tf:n0,n1,...;d0,d1,..." with ascending coefficients.
[[nodiscard]] RationalFunction parse_transfer_function(std::string_view text);

// Everything a run needs; every field has a default so a bare case-study works.
struct AnalysisConfig {
    std::optional<int> scenario;  // 1 or 2
    std::string num_path;
    std::string den_path;
    ResponseKind kind = ResponseKind::impedance;
    std::string force_orientation;  // "", "num" (first input on top) or "den"
    double tol_deg = 1.0;
    double axis_tol = default_axis_tol;
    int points_per_decade = 400;
    double f_min = 1.0;
    double f_max = 1e5;
    std::vector<ForbiddenRegionSpec> criteria;
    ScenarioSpec params;

    void validate() const;
    [[nodiscard]] AssessOptions assess_options() const;
    [[nodiscard]] FrequencyGrid grid() const;
};

// Flat key = value text with [section] headers. Throws ParseError / IoError.
[[nodiscard]] AnalysisConfig parse_config(std::istream& in);
[[nodiscard]] AnalysisConfig load_config(const std::string& path);
void write_config(std::ostream& out, const AnalysisConfig& cfg);

// JSON text with a fixed key order; non-finite numbers become null.
[[nodiscard]] std::string report_json(const StabilityReport& r);
[[nodiscard]] std::string report_json(const std::vector<CriterionReport>& reports);
[[nodiscard]] std::string report_json(const Margins& m);
[[nodiscard]] std::string report_json(const RhpCensus& c);
// Writes text to path; throws IoError.
void write_text(const std::string& path, const std::string& text);

// Bode CSV for two responses on one grid: magnitudes, phases, ER flag, and the
// crossing boundaries arg Z1 +- 180.
void write_bode_csv(std::ostream& out, const BodeSeries& b1, const BodeSeries& b2);
// Ratio trajectory Z1/Z2 for plotting only.
void write_nyquist_csv(std::ostream& out, const SampledResponse& z1, const SampledResponse& z2);
// Static two-panel Bode picture with shaded ERs and CB overlays.
void write_bode_svg(std::ostream& out, const BodeSeries& b1, const BodeSeries& b2,
                    const std::vector<ExteriorRegion>& regions, std::string_view title);

}  // namespace impstab
