#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "uekit/ensemble.hpp"
#include "uekit/longform.hpp"
#include "uekit/metrics.hpp"

namespace uekit {

/// Columns: method,cal_set,metric,mean,sd,seed_count. Numbers use the
/// shortest text that round-trips.
void write_report_csv(const std::vector<ReportRow>& rows, std::ostream& out);
void write_report_jsonl(const std::vector<ReportRow>& rows, std::ostream& out);
std::vector<ReportRow> read_report_jsonl(std::istream& in);
std::vector<ReportRow> read_report_csv(std::istream& in);
/// Aligned plain-text table.
void write_report_table(const std::vector<ReportRow>& rows, std::ostream& out);

/// Writes `rows` to `path`, choosing CSV for *.csv and JSONL otherwise.
void save_report(const std::vector<ReportRow>& rows, const std::string& path);
std::vector<ReportRow> load_report(const std::string& path);

std::vector<ReportRow> to_report(const std::vector<EnsembleStudyRow>& rows);
std::vector<ReportRow> to_report(const std::vector<ClaimEvalRow>& rows, const std::string& scorer = "lns");

/// "rejection_fraction,precision" rows for external plotting.
void write_curve_csv(const std::vector<double>& precision, std::ostream& out);

std::string format_number(double v);

}  // namespace uekit
