// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "restcov/metrics.hpp"

namespace restcov {

/// Report method spelling and order: get, post, put, delete, patch, head,
/// options, then anything else alphabetically.
std::string report_method(std::string_view method);
int method_rank(std::string_view method);

/// stats.json content: one {raw, rate} object per metric, then TCL and tclCapped.
nlohmann::ordered_json stats_document(const CoverageReport& report);

/// "<metricName>.json" content with the documentedAndTested,
/// documentedAndNotTested and notDocumentedAndTested sections.
nlohmann::ordered_json detail_document(const MetricResult& result);

/// Serialized form used for every report file (4-space indent, trailing newline).
std::string render_json(const nlohmann::ordered_json& document);

/// Both throw ReportWriteError. Files are written via a temporary and renamed.
std::filesystem::path write_stats_report(const CoverageReport& report,
                                         const std::filesystem::path& out_dir);
std::vector<std::filesystem::path> write_detail_reports(const CoverageReport& report,
                                                        const std::filesystem::path& out_dir);

}  // namespace restcov
