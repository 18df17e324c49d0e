// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

// Filesystem store:
//
//   <root>/artifacts/<hh>/<sha256>        content-addressed blobs
//   <root>/runs/<run_id>/manifest.json    canonical run manifest
//   <root>/reports/<run_id>/<metric>.json evaluation reports (+ .csv)
//
// Every file is written to a temporary name, synced, then renamed into
// place, so readers see either the previous or the new version.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "coig/run.hpp"
#include "coig/scene.hpp"

namespace coig {

class RunStore {
public:
    explicit RunStore(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }

    /// Idempotent; returns the reference to record in manifests.
    ArtifactRef put_artifact(const ImageArtifact& artifact);
    bool has_artifact(const std::string& id) const;
    /// Verifies the blob hash; corrupt_manifest on mismatch, not_found if absent.
    ImageArtifact load_artifact(const ArtifactRef& ref) const;
    /// Raw bytes by id, hash-checked.
    Bytes load_blob(const std::string& id) const;

    /// integrity_error when the manifest references a blob that is not stored.
    std::string save_run(const ChainRun& run);
    /// not_found for unknown ids; corrupt_manifest when the manifest does
    /// not parse or any referenced blob is missing or fails its hash.
    ChainRun load_run(const std::string& run_id) const;
    bool has_run(const std::string& run_id) const;
    /// Newest first; ties broken by run id.
    std::vector<RunSummary> list_runs(std::optional<RunStatus> filter = std::nullopt) const;

    void save_report(const std::string& run_id, const std::string& metric, const json& report,
                     const std::optional<std::string>& csv = std::nullopt);
    json load_report(const std::string& run_id, const std::string& metric) const;

    std::filesystem::path manifest_path(const std::string& run_id) const;
    std::filesystem::path blob_path(const std::string& id) const;

private:
    std::filesystem::path root_;
};

/// temp file + fsync + rename + directory fsync.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace coig
