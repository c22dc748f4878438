#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "scenbound/core_types.hpp"
#include "scenbound/error.hpp"

namespace scenbound::hub {

/// Header names used to locate each field. Hub rounds rename columns, so
/// the names can be overridden from a small JSON mapping file.
struct ColumnMap {
  std::string model_id = "model_id";
  std::string scenario_id = "scenario_id";
  std::string target = "target";
  std::string location = "location";
  std::string type = "type";
  std::string quantile = "quantile";
  std::string value = "value";
  std::string horizon = "horizon";
  std::string target_week_end_date = "target_week_end_date";

  static ColumnMap from_json(const nlohmann::json& j) {
    ColumnMap m;
    auto take = [&](const char* key, std::string& field) {
      if (j.contains(key)) field = j.at(key).get<std::string>();
    };
    take("model_id", m.model_id);
    take("scenario_id", m.scenario_id);
    take("target", m.target);
    take("location", m.location);
    take("type", m.type);
    take("quantile", m.quantile);
    take("value", m.value);
    take("horizon", m.horizon);
    take("target_week_end_date", m.target_week_end_date);
    return m;
  }
};

enum class RowType { Quantile, Point };

struct SubmissionRecord {
  std::string model_id;
  std::string scenario_id;
  std::string target;
  int horizon_week = 0;  // 1 is the first projected week
  std::string location;
  RowType row_type = RowType::Quantile;
  std::optional<double> quantile;
  double value = 0.0;
  std::string target_week_end_date;  // empty when the file has no date column
  std::size_t line = 0;              // 1-based source line, 0 if synthesized

  auto key() const {
    return std::tie(model_id, scenario_id, target, location, horizon_week, row_type, quantile,
                    value);
  }
  friend bool operator==(const SubmissionRecord& a, const SubmissionRecord& b) {
    return a.key() == b.key() && a.target_week_end_date == b.target_week_end_date;
  }
};

struct ParseIssue {
  std::size_t line = 0;
  std::string message;
};

struct ParseOptions {
  ColumnMap columns;
  bool lenient = false;           // skip malformed rows instead of throwing
  std::string default_model;      // used when the file has no model column
};

struct ParseResult {
  std::vector<SubmissionRecord> records;
  std::vector<ParseIssue> skipped;
  std::size_t point_rows = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// RFC 4180 style: commas separate, double quotes protect commas and "".
inline std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

inline std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<int> parse_int(std::string_view s) {
  s = trim(s);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc{} && ptr == s.data() + s.size()) return v;
  // horizons are sometimes written as 1.0
  if (const auto r = parse_real(s); r && *r == static_cast<int>(*r)) return static_cast<int>(*r);
  return std::nullopt;
}

inline bool is_missing(std::string_view s) {
  s = trim(s);
  return s.empty() || lower(s) == "na" || lower(s) == "nan";
}

inline std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

}  // namespace detail

/// Shortest decimal text that reads back to exactly the same double.
inline std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline ParseResult parse_submission(std::istream& in, const ParseOptions& opts = {}) {
  ParseResult out;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (detail::trim(line).empty() || line.front() == '#') continue;
    header = detail::split_csv(line);
    break;
  }
  if (header.empty()) throw Error(ErrorCode::EmptyFile, "no header row");

  auto find = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (detail::trim(header[i]) == name) return i;
    }
    return std::nullopt;
  };
  const auto& c = opts.columns;
  auto require = [&](const std::string& name) {
    const auto idx = find(name);
    if (!idx) throw Error(ErrorCode::MissingColumn, name);
    return *idx;
  };
  const std::size_t col_scenario = require(c.scenario_id);
  const std::size_t col_target = require(c.target);
  const std::size_t col_location = require(c.location);
  const std::size_t col_type = require(c.type);
  const std::size_t col_quantile = require(c.quantile);
  const std::size_t col_value = require(c.value);
  const auto col_horizon = find(c.horizon);
  const auto col_date = find(c.target_week_end_date);
  const auto col_model = find(c.model_id);
  if (!col_horizon && !col_date) {
    throw Error(ErrorCode::MissingColumn, c.horizon + " or " + c.target_week_end_date);
  }

  auto fail = [&](std::size_t at, const std::string& msg) {
    if (!opts.lenient) {
      throw Error(ErrorCode::BadNumber, "line " + std::to_string(at) + ": " + msg);
    }
    out.skipped.push_back({at, msg});
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty() || line.front() == '#') continue;
    const auto f = detail::split_csv(line);
    if (f.size() < header.size()) {
      fail(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                        std::to_string(f.size()));
      continue;
    }
    SubmissionRecord r;
    r.line = line_no;
    r.model_id = col_model ? std::string(detail::trim(f[*col_model])) : opts.default_model;
    r.scenario_id = std::string(detail::trim(f[col_scenario]));
    r.target = std::string(detail::trim(f[col_target]));
    r.location = std::string(detail::trim(f[col_location]));
    if (col_date) r.target_week_end_date = std::string(detail::trim(f[*col_date]));

    const std::string type = detail::lower(detail::trim(f[col_type]));
    if (type == "quantile") {
      r.row_type = RowType::Quantile;
    } else if (type == "point") {
      r.row_type = RowType::Point;
    } else {
      fail(line_no, "unknown row type '" + type + "'");
      continue;
    }

    if (r.row_type == RowType::Quantile || !detail::is_missing(f[col_quantile])) {
      const auto q = detail::parse_real(f[col_quantile]);
      if (!q || !(*q > 0.0 && *q < 1.0)) {
        fail(line_no, "quantile '" + f[col_quantile] + "' is not a probability in (0, 1)");
        continue;
      }
      r.quantile = *q;
    }
    const auto v = detail::parse_real(f[col_value]);
    if (!v || !std::isfinite(*v)) {
      fail(line_no, "value '" + f[col_value] + "' is not a finite number");
      continue;
    }
    r.value = *v;

    if (col_horizon && !detail::is_missing(f[*col_horizon])) {
      const auto h = detail::parse_int(f[*col_horizon]);
      if (!h || *h < 1) {
        fail(line_no, "horizon '" + f[*col_horizon] + "' is not a positive integer");
        continue;
      }
      r.horizon_week = *h;
    } else if (!col_date || r.target_week_end_date.empty()) {
      fail(line_no, "row has neither a horizon nor a target week end date");
      continue;
    }
    if (r.row_type == RowType::Point) ++out.point_rows;
    out.records.push_back(std::move(r));
  }

  // Rows that carry only a date get the rank of that date among all dates
  // of the same model, so the two scenarios stay aligned week by week.
  std::map<std::string, std::set<std::string>> dates;
  for (const auto& r : out.records) {
    if (r.horizon_week == 0) dates[r.model_id].insert(r.target_week_end_date);
  }
  for (auto& r : out.records) {
    if (r.horizon_week != 0) continue;
    const auto& ds = dates[r.model_id];
    r.horizon_week = static_cast<int>(std::distance(ds.begin(), ds.find(r.target_week_end_date))) + 1;
  }
  return out;
}

inline ParseResult parse_submission_file(const std::string& path, ParseOptions opts = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  if (opts.default_model.empty()) {
    const auto slash = path.find_last_of('/');
    std::string stem = slash == std::string::npos ? path : path.substr(slash + 1);
    if (const auto dot = stem.rfind('.'); dot != std::string::npos && dot > 0) stem.resize(dot);
    opts.default_model = stem;
  }
  return parse_submission(in, opts);
}

/// Writes records in the dialect `parse_submission` reads with the default
/// column names. `comment`, when given, becomes a leading '#' line.
inline void emit_submission(std::ostream& out, const std::vector<SubmissionRecord>& records,
                            const std::string& comment = {}) {
  const bool with_dates = std::any_of(records.begin(), records.end(), [](const auto& r) {
    return !r.target_week_end_date.empty();
  });
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "model_id,scenario_id,target,location,type,quantile,horizon,value";
  if (with_dates) out << ",target_week_end_date";
  out << '\n';
  for (const auto& r : records) {
    out << detail::quote_csv(r.model_id) << ',' << detail::quote_csv(r.scenario_id) << ','
        << detail::quote_csv(r.target) << ',' << detail::quote_csv(r.location) << ','
        << (r.row_type == RowType::Quantile ? "quantile" : "point") << ','
        << (r.quantile ? format_real(*r.quantile) : std::string("NA")) << ',' << r.horizon_week
        << ',' << format_real(r.value);
    if (with_dates) out << ',' << detail::quote_csv(r.target_week_end_date);
    out << '\n';
  }
}

/// Quantile rows for one pair; weeks are written as horizon = week + 1.
inline std::vector<SubmissionRecord> pair_records(const ScenarioPair& pair,
                                                  const std::string& scenario_x,
                                                  const std::string& scenario_y) {
  std::vector<SubmissionRecord> out;
  for (const auto& [scenario, series] :
       {std::pair{scenario_x, &pair.x()}, std::pair{scenario_y, &pair.y()}}) {
    for (std::size_t i = 0; i < series->size(); ++i) {
      SubmissionRecord r;
      r.model_id = pair.meta().model;
      r.scenario_id = scenario;
      r.target = pair.meta().target;
      r.location = pair.meta().location;
      r.horizon_week = pair.meta().week + 1;
      r.row_type = RowType::Quantile;
      r.quantile = series->level(i);
      r.value = series->value(i);
      out.push_back(std::move(r));
    }
  }
  return out;
}

/// True when `id` names `wanted` exactly or `wanted` is the part of `id`
/// before the first '-' (so "B" selects "B-2021-11-09").
inline bool scenario_matches(std::string_view id, std::string_view wanted) {
  if (id == wanted) return true;
  const auto dash = id.find('-');
  return dash != std::string_view::npos && id.substr(0, dash) == wanted;
}

struct AssembleRequest {
  std::string model;  // empty: the records must hold exactly one model
  std::string scenario_x;
  std::string scenario_y;
  std::string target;
  std::string location;
  int t_app = 0;
  std::optional<QuantileLabels> labels;  // default: union of the levels seen
};

struct ExcludedWeek {
  int week = 0;
  std::size_t found_x = 0;
  std::size_t found_y = 0;
  std::size_t expected = 0;
  std::string reason;
};

struct AssembleResult {
  std::vector<ScenarioPair> pairs;  // ordered by week
  std::vector<ExcludedWeek> excluded;
  std::optional<QuantileLabels> labels;
};

inline std::vector<std::string> list_models(const std::vector<SubmissionRecord>& records) {
  std::set<std::string> ids;
  for (const auto& r : records) ids.insert(r.model_id);
  return {ids.begin(), ids.end()};
}

inline AssembleResult assemble_pairs(const std::vector<SubmissionRecord>& records,
                                     const AssembleRequest& req) {
  std::string model = req.model;
  if (model.empty()) {
    const auto models = list_models(records);
    if (models.size() != 1) {
      throw Error(ErrorCode::InvalidArgument,
                  "records hold " + std::to_string(models.size()) + " models; pick one");
    }
    model = models.front();
  }

  // week -> level -> value, per scenario role
  using WeekLevels = std::map<int, std::map<double, double>>;
  WeekLevels by_role[2];
  bool seen[2] = {false, false};
  std::set<double> all_levels;
  for (const auto& r : records) {
    if (r.model_id != model || r.target != req.target || r.location != req.location) continue;
    if (r.row_type != RowType::Quantile) continue;
    for (int role = 0; role < 2; ++role) {
      const auto& wanted = role == 0 ? req.scenario_x : req.scenario_y;
      if (!scenario_matches(r.scenario_id, wanted)) continue;
      seen[role] = true;
      by_role[role][r.horizon_week - 1][*r.quantile] = r.value;
      all_levels.insert(*r.quantile);
    }
  }
  for (int role = 0; role < 2; ++role) {
    if (!seen[role]) {
      throw Error(ErrorCode::ScenarioMissing,
                  "no quantile rows for scenario '" +
                      (role == 0 ? req.scenario_x : req.scenario_y) + "' (model " + model +
                      ", target " + req.target + ", location " + req.location + ")");
    }
  }

  AssembleResult out;
  out.labels = req.labels ? *req.labels
                          : QuantileLabels(std::vector<double>(all_levels.begin(), all_levels.end()));
  const auto& declared = *out.labels;

  std::set<int> weeks;
  for (const auto& w : by_role[0]) weeks.insert(w.first);
  for (const auto& w : by_role[1]) weeks.insert(w.first);

  auto extract = [&](const std::map<double, double>& levels) -> std::optional<std::vector<double>> {
    if (levels.size() != declared.size()) return std::nullopt;
    std::vector<double> values;
    for (const double q : declared) {
      const auto it = levels.find(q);
      if (it == levels.end()) return std::nullopt;
      values.push_back(it->second);
    }
    return values;
  };

  for (const int week : weeks) {
    static const std::map<double, double> none;
    const auto itx = by_role[0].find(week);
    const auto ity = by_role[1].find(week);
    const auto& lx = itx == by_role[0].end() ? none : itx->second;
    const auto& ly = ity == by_role[1].end() ? none : ity->second;
    const auto vx = extract(lx);
    const auto vy = extract(ly);
    ExcludedWeek ex{week, lx.size(), ly.size(), declared.size(), {}};
    if (!vx || !vy) {
      ex.reason = "IncompleteQuantileSet";
      out.excluded.push_back(ex);
      continue;
    }
    try {
      PairMeta meta{model, req.target, req.location, week, req.t_app};
      out.pairs.emplace_back(validate_series(declared, *vx), validate_series(declared, *vy),
                             std::move(meta));
    } catch (const Error& e) {
      ex.reason = std::string(to_string(e.code()));
      out.excluded.push_back(ex);
    }
  }
  return out;
}

inline nlohmann::json series_to_json(const QuantileSeries& s) {
  return nlohmann::json{{"labels", std::vector<double>(s.labels().begin(), s.labels().end())},
                        {"values", std::vector<double>(s.values().begin(), s.values().end())},
                        {"ties", s.has_ties()}};
}

inline nlohmann::json pairs_to_json(const AssembleResult& result) {
  nlohmann::json j;
  j["pairs"] = nlohmann::json::array();
  for (const auto& p : result.pairs) {
    j["pairs"].push_back({{"model", p.meta().model},
                          {"target", p.meta().target},
                          {"location", p.meta().location},
                          {"week", p.meta().week},
                          {"t_app", p.meta().t_app},
                          {"x", series_to_json(p.x())},
                          {"y", series_to_json(p.y())}});
  }
  j["excluded"] = nlohmann::json::array();
  for (const auto& e : result.excluded) {
    j["excluded"].push_back({{"week", e.week},
                             {"found_x", e.found_x},
                             {"found_y", e.found_y},
                             {"expected", e.expected},
                             {"reason", e.reason}});
  }
  return j;
}

}  // namespace scenbound::hub
