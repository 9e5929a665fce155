#include "exlab/io.hpp"

#include <cstdio>
#include <ostream>

#include "exlab/error.hpp"

namespace exlab {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

CsvWriter::CsvWriter(std::ostream& out, const std::string& config_hash) : out_(out) {
    out_ << kCsvSchemaLine << "\n# config-hash: " << config_hash << "\n";
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << csv_escape(fields[i]);
    out_ << "\n";
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

void write_series_csv(std::ostream& out, const SpatioTemporalSeries& series, const std::string& hash) {
    CsvWriter w(out, hash);
    std::vector<std::string> header{"t"};
    for (const auto& s : series.sites) header.push_back(s);
    w.row(header);
    for (std::size_t t = 0; t < series.length; ++t) {
        std::vector<std::string> row{std::to_string(t + 1)};
        for (double v : series.row(t)) row.push_back(format_double(v));
        w.row(row);
    }
}

void write_pattern_csv(std::ostream& out, const PointPattern& pattern, const std::string& hash) {
    CsvWriter w(out, hash);
    std::vector<std::string> header{"t", "time_index", "site"};
    for (const auto& s : pattern.sites) header.push_back("x_" + s);
    header.push_back("mark");
    header.push_back("cluster");
    w.row(header);
    for (const auto& p : pattern.points) {
        std::vector<std::string> row{format_double(p.t), std::to_string(p.time_index), pattern.sites.at(p.site)};
        for (double v : p.x) row.push_back(format_double(v));
        row.push_back(p.mark ? format_double(*p.mark) : "");
        row.push_back(p.cluster ? std::to_string(*p.cluster) : "");
        w.row(row);
    }
}

nlohmann::json pattern_to_json(const PointPattern& pattern) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : pattern.points) {
        nlohmann::json jp;
        jp["t"] = p.t;
        jp["time_index"] = p.time_index;
        jp["site"] = p.site;
        jp["x"] = p.x;
        jp["mark"] = p.mark ? nlohmann::json(*p.mark) : nlohmann::json(nullptr);
        jp["cluster"] = p.cluster ? nlohmann::json(*p.cluster) : nlohmann::json(nullptr);
        points.push_back(std::move(jp));
    }
    nlohmann::json j;
    j["sites"] = pattern.sites;
    j["u"] = pattern.u;
    j["n"] = pattern.n;
    j["a_n"] = pattern.a_n;
    j["points"] = std::move(points);
    return j;
}

PointPattern pattern_from_json(const nlohmann::json& j) {
    try {
        PointPattern pattern;
        pattern.sites = j.at("sites").get<std::vector<std::string>>();
        pattern.u = j.at("u").get<double>();
        pattern.n = j.at("n").get<std::size_t>();
        pattern.a_n = j.at("a_n").get<double>();
        for (const auto& jp : j.at("points")) {
            Point p;
            p.t = jp.at("t").get<double>();
            p.time_index = jp.at("time_index").get<std::size_t>();
            p.site = jp.at("site").get<std::size_t>();
            p.x = jp.at("x").get<std::vector<double>>();
            if (!jp.at("mark").is_null()) p.mark = jp.at("mark").get<double>();
            if (!jp.at("cluster").is_null()) p.cluster = jp.at("cluster").get<std::size_t>();
            pattern.points.push_back(std::move(p));
        }
        return pattern;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("pattern json: ") + e.what());
    }
}

void write_tail_paths_csv(std::ostream& out, const std::vector<TailPath>& paths,
                          const std::vector<std::string>& sites, const std::string& hash) {
    CsvWriter w(out, hash);
    std::vector<std::string> header{"path", "lag", "normalization"};
    for (const auto& s : sites) header.push_back("y_" + s);
    w.row(header);
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const auto& path = paths[i];
        const char* norm = path.normalization() == Normalization::Tail ? "tail" : "spectral";
        for (int j = -path.window(); j <= path.window(); ++j) {
            std::vector<std::string> row{std::to_string(i), std::to_string(j), norm};
            for (double v : path.at(j)) row.push_back(format_double(v));
            w.row(row);
        }
    }
}

nlohmann::json laplace_to_json(const LaplaceEstimate& est) {
    nlohmann::json j;
    j["provenance"] = to_string(est.provenance);
    j["variant"] = est.variant;
    j["test_function"] = est.test_function;
    j["value"] = est.value;
    j["se"] = est.std_error;
    j["reps"] = est.reps;
    j["n"] = est.n;
    j["window"] = est.window;
    return j;
}

void write_laplace_csv(std::ostream& out, const std::vector<LaplaceEstimate>& rows, const std::string& hash) {
    CsvWriter w(out, hash);
    w.row({"test_function", "provenance", "variant", "value", "se", "reps", "n", "window"});
    for (const auto& e : rows)
        w.row({e.test_function, to_string(e.provenance), e.variant, format_double(e.value),
               format_double(e.std_error), std::to_string(e.reps), std::to_string(e.n), std::to_string(e.window)});
}

nlohmann::json lemma1_to_json(const Lemma1Result& r) {
    nlohmann::json j;
    j["v"] = r.at.v;
    j["t"] = r.at.t;
    j["left"] = laplace_to_json(r.left);
    j["right"] = laplace_to_json(r.right);
    j["difference"] = r.difference;
    j["combined_se"] = r.combined_std_error;
    j["conditioning_events"] = r.conditioning_events;
    j["r_n"] = r.r_n;
    j["a_n"] = r.a_n;
    j["theta"] = r.theta;
    return j;
}

void write_lemma1_csv(std::ostream& out, const std::vector<Lemma1Result>& rows, const std::string& hash) {
    CsvWriter w(out, hash);
    w.row({"v", "t", "left", "left_se", "right", "right_se", "difference", "combined_se", "conditioning_events",
           "r_n", "a_n", "theta"});
    for (const auto& r : rows)
        w.row({format_double(r.at.v), format_double(r.at.t), format_double(r.left.value),
               format_double(r.left.std_error), format_double(r.right.value), format_double(r.right.std_error),
               format_double(r.difference), format_double(r.combined_std_error),
               std::to_string(r.conditioning_events), std::to_string(r.r_n), format_double(r.a_n),
               format_double(r.theta)});
}

nlohmann::json report_to_json(const ConditionReport& report) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : report.cells) {
        nlohmann::json jc;
        jc["n"] = c.n;
        jc["r_n"] = c.r_n;
        jc["a_n"] = c.a_n;
        jc["estimate"] = c.estimate;
        jc["se"] = c.std_error;
        if (report.condition == Condition::MixingM) {
            jc["c_n"] = c.c_n;
            jc["c_n_se"] = c.c_n_se;
            jc["d_n"] = c.d_n;
            jc["d_n_se"] = c.d_n_se;
            jc["blocks"] = c.blocks;
        } else {
            jc["m"] = c.m;
            jc["anchors"] = c.anchors;
            jc["anchor_groups"] = c.anchor_groups;
        }
        cells.push_back(std::move(jc));
    }
    nlohmann::json j;
    j["condition"] = to_string(report.condition);
    j["cells"] = std::move(cells);
    j["verdict"] = report.verdict;
    j["verdict_rule"] = report.verdict_rule;
    j["note"] = report.note;
    return j;
}

void write_report_csv(std::ostream& out, const ConditionReport& report, const std::string& hash) {
    CsvWriter w(out, hash);
    if (report.condition == Condition::MixingM) {
        w.row({"n", "r_n", "a_n", "blocks", "c_n", "c_n_se", "d_n", "d_n_se", "difference", "se"});
        for (const auto& c : report.cells)
            w.row({std::to_string(c.n), std::to_string(c.r_n), format_double(c.a_n), std::to_string(c.blocks),
                   format_double(c.c_n), format_double(c.c_n_se), format_double(c.d_n), format_double(c.d_n_se),
                   format_double(c.estimate), format_double(c.std_error)});
    } else {
        w.row({"n", "m", "r_n", "a_n", "estimate", "se", "anchors", "anchor_groups"});
        for (const auto& c : report.cells)
            w.row({std::to_string(c.n), std::to_string(c.m), std::to_string(c.r_n), format_double(c.a_n),
                   format_double(c.estimate), format_double(c.std_error), std::to_string(c.anchors),
                   std::to_string(c.anchor_groups)});
    }
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace exlab
