#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "exlab/diagnostics.hpp"
#include "exlab/laplace.hpp"
#include "exlab/limit.hpp"
#include "exlab/models.hpp"
#include "exlab/pointproc.hpp"
#include "exlab/tail_path.hpp"

namespace exlab {

inline constexpr const char* kCsvSchemaLine = "# exceedance-lab schema v1";

/// %.17g: enough digits to round-trip every double.
std::string format_double(double v);

/// RFC 4180 quoting: fields containing a comma, quote, CR or LF are quoted
/// and embedded quotes doubled.
std::string csv_escape(const std::string& field);

class CsvWriter {
  public:
    /// Writes the schema line and the config-hash line.
    CsvWriter(std::ostream& out, const std::string& config_hash);

    void row(const std::vector<std::string>& fields);

  private:
    std::ostream& out_;
};

/// Splits one RFC 4180 record (no embedded newlines).
std::vector<std::string> csv_split(const std::string& line);

void write_series_csv(std::ostream& out, const SpatioTemporalSeries& series, const std::string& hash);

/// Columns: t, time_index, site, x_<site>..., mark, cluster.
void write_pattern_csv(std::ostream& out, const PointPattern& pattern, const std::string& hash);

nlohmann::json pattern_to_json(const PointPattern& pattern);
PointPattern pattern_from_json(const nlohmann::json& j);

/// Lag-major rows: path, lag, normalization, y_<site>...
void write_tail_paths_csv(std::ostream& out, const std::vector<TailPath>& paths,
                          const std::vector<std::string>& sites, const std::string& hash);

nlohmann::json laplace_to_json(const LaplaceEstimate& est);
void write_laplace_csv(std::ostream& out, const std::vector<LaplaceEstimate>& rows, const std::string& hash);

nlohmann::json lemma1_to_json(const Lemma1Result& r);
void write_lemma1_csv(std::ostream& out, const std::vector<Lemma1Result>& rows, const std::string& hash);

nlohmann::json report_to_json(const ConditionReport& report);
void write_report_csv(std::ostream& out, const ConditionReport& report, const std::string& hash);

/// Sorted keys, two-space indent, trailing newline.
std::string dump_json(const nlohmann::json& j);

}  // namespace exlab
