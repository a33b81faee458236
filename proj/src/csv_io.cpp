#include "ctgof/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace ctgof {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::size_t parse_count(std::string_view text, std::string_view what) {
  std::size_t v = 0;
  const auto t = trim(text);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw DataError("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
  return v;
}

bool is_comment(std::string_view line) { return !line.empty() && line.front() == '#'; }

const std::string* meta_value(const MetaFields& meta, std::string_view key) {
  for (const auto& [k, v] : meta) {
    if (k == key) return &v;
  }
  return nullptr;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::string_view what) {
  const auto t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw DataError("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
  return v;
}

std::string meta_line(const MetaFields& fields) {
  std::string s = "#";
  for (std::size_t i = 0; i < fields.size(); ++i) {
    s += (i ? "," : " ") + fields[i].first + "=" + fields[i].second;
  }
  return s;
}

MetaFields parse_meta_line(std::string_view line) {
  line = trim(line);
  if (!is_comment(line)) throw DataError("expected a '# key=value,...' header line");
  line.remove_prefix(1);
  MetaFields out;
  if (trim(line).empty()) return out;
  for (const auto part : split(line, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) throw DataError("header field '" + std::string(part) + "' lacks '='");
    out.emplace_back(std::string(trim(part.substr(0, eq))), std::string(trim(part.substr(eq + 1))));
  }
  return out;
}

void write_events_csv(std::ostream& out, const EventRecord& record) {
  MetaFields meta{{"T", format_double(record.horizon)}};
  if (record.layout) {
    meta.emplace_back("tau", format_double(record.layout->period));
    meta.emplace_back("n", std::to_string(record.layout->n_periods));
  }
  out << meta_line(meta) << '\n';
  for (const double t : record.events) out << format_double(t) << '\n';
}

EventRecord read_events_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("event file is empty");
  const MetaFields meta = parse_meta_line(line);
  const auto* T = meta_value(meta, "T");
  const auto* tau = meta_value(meta, "tau");
  const auto* n = meta_value(meta, "n");
  if (!T) throw DataError("event file header lacks T");
  for (const auto& [k, v] : meta) {
    if (k != "T" && k != "tau" && k != "n") throw DataError("unknown event header field '" + k + "'");
  }
  if (static_cast<bool>(tau) != static_cast<bool>(n)) throw DataError("event header needs both tau and n or neither");

  EventRecord rec;
  rec.horizon = parse_double(*T, "T");
  if (tau) rec.layout = PeriodicLayout{parse_double(*tau, "tau"), parse_count(*n, "n")};
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || is_comment(t)) continue;
    rec.events.push_back(parse_double(t, "event time on line " + std::to_string(line_no)));
  }
  try {
    rec.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  return rec;
}

void write_path_csv(std::ostream& out, const SampledPath& path) {
  out << "t,x\n";
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    out << format_double(path.grid.time(i)) << ',' << format_double(path.values[i]) << '\n';
  }
}

SampledPath read_path_csv(std::istream& in) {
  std::vector<double> ts, xs;
  std::string line;
  std::size_t line_no = 0;
  bool first_data = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || is_comment(t)) continue;
    const auto cols = split(t, ',');
    if (first_data && cols.size() == 2 && !cols[0].empty() &&
        !(std::isdigit(static_cast<unsigned char>(cols[0].front())) || cols[0].front() == '-' ||
          cols[0].front() == '.' || cols[0].front() == '+')) {
      first_data = false;
      continue;  // column header
    }
    first_data = false;
    if (cols.size() != 2) throw DataError("path line " + std::to_string(line_no) + " must have two columns t,x");
    ts.push_back(parse_double(cols[0], "t on line " + std::to_string(line_no)));
    xs.push_back(parse_double(cols[1], "x on line " + std::to_string(line_no)));
  }
  if (ts.size() < 3) throw DataError("path file needs at least three samples");
  if (std::abs(ts.front()) > 1e-12) throw DataError("path times must start at 0");
  const double horizon = ts.back();
  const std::size_t n = ts.size() - 1;
  if (!(horizon > 0.0)) throw DataError("path horizon must be positive");
  const double step = horizon / static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) {
    if (std::abs(ts[i] - step * static_cast<double>(i)) > 1e-6 * step) {
      throw DataError("path times are not uniformly spaced (line for t=" + format_double(ts[i]) + ")");
    }
  }
  return SampledPath(Grid(n, horizon), std::move(xs));
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
  std::string s = "\"";
  for (const char c : text) {
    if (c == '"') s += '"';
    s += c;
  }
  return s + "\"";
}

void write_calibration_csv(std::ostream& out, const CalibrationTable& table, const MetaFields& meta) {
  out << meta_line(meta) << '\n';
  out << "kind,alpha,horizon,threshold,standard_error,n_replicates,resolution\n";
  for (const auto& e : table.entries) {
    out << e.kind << ',' << format_double(e.alpha) << ',' << e.horizon << ',' << format_double(e.threshold) << ','
        << format_double(e.standard_error) << ',' << e.n_replicates << ',' << e.resolution << '\n';
  }
}

CalibrationTable read_calibration_csv(std::istream& in) {
  std::string line;
  CalibrationTable table;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (is_comment(t)) {
      for (const auto& [k, v] : parse_meta_line(t)) {
        if (k == "master_seed") table.master_seed = parse_count(v, "master_seed");
      }
      continue;
    }
    if (!header_seen) {
      if (t != "kind,alpha,horizon,threshold,standard_error,n_replicates,resolution") {
        throw DataError("calibration file has an unexpected column header");
      }
      header_seen = true;
      continue;
    }
    const auto cols = split(t, ',');
    if (cols.size() != 7) throw DataError("calibration line " + std::to_string(line_no) + " must have 7 columns");
    table.entries.push_back({std::string(cols[0]), parse_double(cols[1], "alpha"), std::string(cols[2]),
                             parse_double(cols[3], "threshold"), parse_double(cols[4], "standard_error"),
                             parse_count(cols[5], "n_replicates"), std::string(cols[6])});
  }
  if (!header_seen) throw DataError("calibration file has no column header");
  return table;
}

void write_power_csv(std::ostream& out, const std::vector<PowerCurve>& curves, const MetaFields& meta) {
  out << meta_line(meta) << '\n';
  out << "kind,alpha,provenance,rho,beta,standard_error\n";
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      out << c.kind << ',' << format_double(c.alpha) << ',' << c.provenance << ',' << format_double(p.rho) << ','
          << format_double(p.beta) << ',' << format_double(p.standard_error) << '\n';
    }
  }
}

void write_stat_header(std::ostream& out) { out << "kind,value,scale_note,label\n"; }

void write_stat_row(std::ostream& out, const StatResult& result) {
  out << to_string(result.kind) << ',' << format_double(result.value) << ',' << csv_field(result.scale_note) << ','
      << csv_field(result.label) << '\n';
}

}  // namespace ctgof
