#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctgof/gauss_paths.hpp"
#include "ctgof/monte_carlo.hpp"
#include "ctgof/point_process.hpp"
#include "ctgof/statistics.hpp"

namespace ctgof {

// Malformed input data (parse errors, broken invariants of a file).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using MetaFields = std::vector<std::pair<std::string, std::string>>;

// Shortest round-trip decimal form; output is byte-stable across runs.
std::string format_double(double value);
// Whole-string parse; throws DataError naming `what`.
double parse_double(std::string_view text, std::string_view what);

// "# key=value,key=value"
std::string meta_line(const MetaFields& fields);
MetaFields parse_meta_line(std::string_view line);

// Header "# T=...,tau=...,n=..." (tau and n optional) then one event time per line.
void write_events_csv(std::ostream& out, const EventRecord& record);
EventRecord read_events_csv(std::istream& in);

// Two columns t,x with uniformly spaced t starting at 0. A non-numeric first
// line is taken as a column header; lines starting with '#' are skipped.
void write_path_csv(std::ostream& out, const SampledPath& path);
SampledPath read_path_csv(std::istream& in);

// Meta line, then kind,alpha,horizon,threshold,standard_error,n_replicates,resolution.
void write_calibration_csv(std::ostream& out, const CalibrationTable& table, const MetaFields& meta);
CalibrationTable read_calibration_csv(std::istream& in);

// Meta line, then kind,alpha,provenance,rho,beta,standard_error.
void write_power_csv(std::ostream& out, const std::vector<PowerCurve>& curves, const MetaFields& meta);

// kind,value,scale_note,label
void write_stat_header(std::ostream& out);
void write_stat_row(std::ostream& out, const StatResult& result);

// Quotes a field if it contains a comma, quote or newline.
std::string csv_field(std::string_view text);

}  // namespace ctgof
