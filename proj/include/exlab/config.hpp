#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "exlab/models.hpp"

namespace exlab {

/// Resolved experiment configuration. Every field has a default; the config
/// file and flag overrides replace individual keys.
struct ExperimentConfig {
    ModelSpec model;
    std::string risk{"sup"};
    std::string mark{"risk"};
    double u{1.0};
    std::size_t n{10000};
    std::vector<std::size_t> n_grid{1000, 10000, 100000};
    double r_exponent{0.6};
    std::vector<std::string> test_functions{"step", "step-bump", "ramp", "ramp-bump", "weighted"};
    std::size_t reps{10000};
    /// Series replications for finite-n estimators.
    std::size_t series_reps{1000};
    /// Window m; 0 selects the certified window.
    int window{0};
    std::vector<std::size_t> m_grid{1, 2, 3, 5, 10, 20};
    std::vector<double> v_grid{0.5, 1.0};
    std::vector<double> t_grid{0.25, 0.75};
    std::size_t anchors{2000};
    std::string scaling{"analytic"};
    std::string output{"out"};
    unsigned workers{0};
};

/// Parses "key = value" lines; "[section]" headers prefix later keys with
/// "section."; '#' starts a comment outside quotes. Values keep their raw
/// text with surrounding quotes removed.
std::map<std::string, std::string> parse_config_text(const std::string& text);

/// Reads and parses a file; throws ValidationError when it cannot be read.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Applies one raw key/value; throws ValidationError naming the field.
void apply_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

/// "a=0.5,alpha=1" style shorthand for model.* keys.
void apply_model_shorthand(ExperimentConfig& config, const std::string& text);

/// Checks cross-field constraints and resolvability of names.
void validate_config(const ExperimentConfig& config);

/// Canonical key=value form of every field that affects results
/// (output and workers excluded).
std::map<std::string, std::string> canonical_config(const ExperimentConfig& config);

/// 16 hex digits of FNV-1a over the sorted canonical lines.
std::string config_hash(const ExperimentConfig& config);

}  // namespace exlab
