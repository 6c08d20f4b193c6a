#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "clusterucb/bandit.hpp"
#include "clusterucb/clustering.hpp"
#include "clusterucb/evaluation.hpp"
#include "clusterucb/gradient_matrix.hpp"
#include "clusterucb/selection.hpp"

namespace cucb::io {

// GRDM gradient matrix container:
//   magic "GRDM" | u16 version = 1 | u64 rows | u64 cols |
//   rows * cols float32 scalars, row-major
// all little-endian. Sample ids (and subtask labels for validation files)
// live in a JSON sidecar at "<path>.json":
//   { "ids": [...], "subtask_labels": [...]? }
inline std::filesystem::path sidecar_path(const std::filesystem::path& path) {
    std::filesystem::path p = path;
    p += ".json";
    return p;
}

void write_grdm(const std::filesystem::path& path, const GradientMatrix& m,
                const std::vector<std::string>* subtask_labels = nullptr);
GradientMatrix read_grdm(const std::filesystem::path& path);
// Reads a GRDM file whose sidecar carries subtask labels.
ValidationSet read_validation(const std::filesystem::path& path);
// Labels from a sidecar, if present.
std::vector<std::string> read_subtask_labels(const std::filesystem::path& path);

// Clustering JSON: { "k", "assignments", "sizes", "centroid_file" } with the
// centroid matrix stored as GRDM next to the JSON file.
void write_clustering(const std::filesystem::path& json_path, const Clustering& c);
Clustering read_clustering(const std::filesystem::path& json_path);

// Draw log as JSON lines, one record per round:
//   {"round": r, "cluster": c, "sample_id": "...", "reward": x}
void write_drawlog(const std::filesystem::path& jsonl_path, const DrawLog& log,
                   const std::vector<std::string>& ids);
// Summary JSON with per-cluster draw counts and a config echo.
void write_drawlog_summary(const std::filesystem::path& path, const DrawLog& log,
                           const BanditConfig& config);

void write_selection(const std::filesystem::path& path, const SelectionResult& sel);

struct ReportMetadata {
    BanditConfig config;
    std::size_t pool_size = 0;
    std::size_t k = 0;
    bool has_recall = false;
};

void write_report(const std::filesystem::path& path, const EvalReport& report,
                  const ReportMetadata& meta);

}  // namespace cucb::io
