#include "uekit/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "uekit/errors.hpp"
#include "uekit/text.hpp"

namespace uekit {

using ojson = nlohmann::ordered_json;

std::string format_number(double v) { return ojson(v).dump(); }

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
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
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void write_report_csv(const std::vector<ReportRow>& rows, std::ostream& out) {
  out << "method,cal_set,metric,mean,sd,seed_count\n";
  for (const auto& r : rows)
    out << csv_field(r.method) << ',' << csv_field(r.cal_set) << ',' << csv_field(r.metric) << ',' << format_number(r.mean)
        << ',' << format_number(r.sd) << ',' << r.seed_count << '\n';
}

void write_report_jsonl(const std::vector<ReportRow>& rows, std::ostream& out) {
  for (const auto& r : rows) {
    ojson j;
    j["method"] = r.method;
    j["cal_set"] = r.cal_set;
    j["metric"] = r.metric;
    j["mean"] = r.mean;
    j["sd"] = r.sd;
    j["seed_count"] = r.seed_count;
    out << j.dump() << '\n';
  }
}

std::vector<ReportRow> read_report_jsonl(std::istream& in) {
  std::vector<ReportRow> rows;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty()) continue;
    try {
      auto j = ojson::parse(line);
      rows.push_back({j.at("method").get<std::string>(), j.at("cal_set").get<std::string>(),
                      j.at("metric").get<std::string>(), j.at("mean").get<double>(), j.at("sd").get<double>(),
                      j.at("seed_count").get<int>()});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad report row: ") + e.what(), n);
    }
  }
  return rows;
}

std::vector<ReportRow> read_report_csv(std::istream& in) {
  std::vector<ReportRow> rows;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (n == 1 || text::trim(line).empty()) continue;
    auto f = csv_split(line);
    if (f.size() != 6) throw ParseError("report row needs 6 columns", n);
    try {
      rows.push_back({f[0], f[1], f[2], std::stod(f[3]), std::stod(f[4]), std::stoi(f[5])});
    } catch (const std::exception&) {
      throw ParseError("bad number in report row", n);
    }
  }
  return rows;
}

void write_report_table(const std::vector<ReportRow>& rows, std::ostream& out) {
  std::size_t w0 = 6, w1 = 7, w2 = 6;
  for (const auto& r : rows) {
    w0 = std::max(w0, r.method.size());
    w1 = std::max(w1, r.cal_set.size());
    w2 = std::max(w2, r.metric.size());
  }
  auto line = [&](const std::string& a, const std::string& b, const std::string& c, const std::string& d,
                  const std::string& e, const std::string& f) {
    out << std::left << std::setw(static_cast<int>(w0)) << a << "  " << std::setw(static_cast<int>(w1)) << b << "  "
        << std::setw(static_cast<int>(w2)) << c << "  " << std::right << std::setw(10) << d << "  " << std::setw(10) << e
        << "  " << std::setw(5) << f << '\n';
  };
  line("method", "cal_set", "metric", "mean", "sd", "seeds");
  for (const auto& r : rows) {
    std::ostringstream m, s;
    m << std::fixed << std::setprecision(4) << r.mean;
    s << std::fixed << std::setprecision(4) << r.sd;
    line(r.method, r.cal_set, r.metric, m.str(), s.str(), std::to_string(r.seed_count));
  }
}

void save_report(const std::vector<ReportRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  if (ends_with(path, ".csv"))
    write_report_csv(rows, out);
  else
    write_report_jsonl(rows, out);
}

std::vector<ReportRow> load_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return ends_with(path, ".csv") ? read_report_csv(in) : read_report_jsonl(in);
}

std::vector<ReportRow> to_report(const std::vector<EnsembleStudyRow>& rows) {
  std::vector<ReportRow> out;
  for (const auto& r : rows) out.push_back({r.combiner, r.preprocessor, "prr", r.prr, 0.0, 1});
  return out;
}

std::vector<ReportRow> to_report(const std::vector<ClaimEvalRow>& rows, const std::string& scorer) {
  std::vector<ReportRow> out;
  for (const auto& r : rows) out.push_back({scorer + "/" + r.strategy + "/" + r.aggregation, "claims", "prr", r.prr, 0.0, 1});
  return out;
}

void write_curve_csv(const std::vector<double>& precision, std::ostream& out) {
  out << "rejection_fraction,precision\n";
  const double n = static_cast<double>(precision.size() - 1);
  for (std::size_t r = 0; r < precision.size(); ++r)
    out << format_number(static_cast<double>(r) / n) << ',' << format_number(precision[r]) << '\n';
}

}  // namespace uekit
