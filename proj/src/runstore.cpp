// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#include "coig/runstore.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <fcntl.h>
#include <unistd.h>

#include "coig/error.hpp"

namespace fs = std::filesystem;

namespace coig {

namespace {

bool safe_component(const std::string& s) {
    return !s.empty() && s.size() <= 128 && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
    });
}

void require_safe(const std::string& s, const char* what) {
    if (!safe_component(s)) throw Error(Errc::not_found, std::string("invalid ") + what + " '" + s + "'");
}

void fsync_dir(const fs::path& dir) {
    const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
    if (fd >= 0) {
        ::fsync(fd);
        ::close(fd);
    }
}

}  // namespace

void write_file_atomic(const fs::path& target, std::string_view contents) {
    static std::atomic<std::uint64_t> counter{0};
    const auto path = target.has_parent_path() ? target : fs::path(".") / target;
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(Errc::io_error, "cannot create " + path.parent_path().string() + ": " + ec.message());

    std::ostringstream tmp_name;
    tmp_name << path.filename().string() << ".tmp." << ::getpid() << '.'
             << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '.' << counter++;
    const auto tmp = path.parent_path() / tmp_name.str();

    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd < 0) throw Error(Errc::io_error, "cannot open " + tmp.string());
    std::size_t written = 0;
    while (written < contents.size()) {
        const auto n = ::write(fd, contents.data() + written, contents.size() - written);
        if (n < 0) {
            ::close(fd);
            ::unlink(tmp.c_str());
            throw Error(Errc::io_error, "write failed for " + tmp.string());
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0 || ::close(fd) != 0) {
        ::unlink(tmp.c_str());
        throw Error(Errc::io_error, "sync failed for " + tmp.string());
    }
    if (::rename(tmp.c_str(), path.c_str()) != 0) {
        ::unlink(tmp.c_str());
        throw Error(Errc::io_error, "rename failed for " + path.string());
    }
    fsync_dir(path.parent_path());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::not_found, "cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

RunStore::RunStore(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    for (const auto* sub : {"artifacts", "runs", "reports"}) {
        fs::create_directories(root_ / sub, ec);
        if (ec) throw Error(Errc::io_error, "cannot create store at " + root_.string() + ": " + ec.message());
    }
}

fs::path RunStore::manifest_path(const std::string& run_id) const { return root_ / "runs" / run_id / "manifest.json"; }

fs::path RunStore::blob_path(const std::string& id) const {
    return root_ / "artifacts" / id.substr(0, 2) / id;
}

ArtifactRef RunStore::put_artifact(const ImageArtifact& artifact) {
    if (artifact.id != sha256_hex(artifact.bytes)) {
        throw Error(Errc::integrity_error, "artifact id does not match its payload");
    }
    if (!has_artifact(artifact.id)) {
        write_file_atomic(blob_path(artifact.id), to_string(artifact.bytes));
    }
    return ref_of(artifact);
}

bool RunStore::has_artifact(const std::string& id) const {
    return safe_component(id) && id.size() > 2 && fs::exists(blob_path(id));
}

Bytes RunStore::load_blob(const std::string& id) const {
    if (!has_artifact(id)) throw Error(Errc::not_found, "no artifact " + id);
    auto bytes = to_bytes(read_file(blob_path(id)));
    if (sha256_hex(bytes) != id) throw Error(Errc::corrupt_manifest, "artifact " + id + " fails its hash check");
    return bytes;
}

ImageArtifact RunStore::load_artifact(const ArtifactRef& ref) const {
    ImageArtifact a;
    a.id = ref.id;
    a.kind = ref.kind;
    a.width = ref.width;
    a.height = ref.height;
    a.bytes = load_blob(ref.id);
    return a;
}

namespace {

std::vector<std::string> referenced_blobs(const ChainRun& run) {
    std::vector<std::string> ids;
    for (const auto& r : run.steps) {
        if (r.image) ids.push_back(r.image->id);
        if (r.parent) ids.push_back(*r.parent);
    }
    return ids;
}

}  // namespace

std::string RunStore::save_run(const ChainRun& run) {
    require_safe(run.run_id, "run id");
    for (const auto& id : referenced_blobs(run)) {
        if (!has_artifact(id)) throw Error(Errc::integrity_error, "manifest references missing artifact " + id);
    }
    write_file_atomic(manifest_path(run.run_id), serialize_run(run) + "\n");
    return run.run_id;
}

bool RunStore::has_run(const std::string& run_id) const {
    return safe_component(run_id) && fs::exists(manifest_path(run_id));
}

ChainRun RunStore::load_run(const std::string& run_id) const {
    if (!has_run(run_id)) throw Error(Errc::not_found, "no run " + run_id);
    ChainRun run;
    try {
        run = parse_run(read_file(manifest_path(run_id)));
    } catch (const Error& e) {
        throw Error(Errc::corrupt_manifest, "run " + run_id + ": " + e.what());
    }
    for (const auto& id : referenced_blobs(run)) {
        try {
            load_blob(id);
        } catch (const Error& e) {
            throw Error(Errc::corrupt_manifest, "run " + run_id + ": " + e.what());
        }
    }
    return run;
}

std::vector<RunSummary> RunStore::list_runs(std::optional<RunStatus> filter) const {
    std::vector<RunSummary> out;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(root_ / "runs", ec)) {
        const auto manifest = entry.path() / "manifest.json";
        if (!fs::exists(manifest)) continue;
        json j;
        try {
            j = json::parse(read_file(manifest));
        } catch (const std::exception&) {
            continue;
        }
        RunSummary s;
        try {
            s.run_id = j.at("run_id").get<std::string>();
            s.status = parse_run_status(j.at("status").get<std::string>());
            s.created_at = j.at("created_at").get<Timestamp>();
            s.original_prompt = j.at("plan").at("original_prompt").get<std::string>();
            s.backend_profile = j.at("backend_profile").get<std::string>();
            s.step_count = j.at("plan").at("steps").size();
        } catch (const std::exception&) {
            continue;
        }
        if (filter && s.status != *filter) continue;
        out.push_back(std::move(s));
    }
    if (ec) throw Error(Errc::io_error, "cannot list runs: " + ec.message());
    std::sort(out.begin(), out.end(), [](const RunSummary& a, const RunSummary& b) {
        if (a.created_at != b.created_at) return a.created_at > b.created_at;
        return a.run_id < b.run_id;
    });
    return out;
}

void RunStore::save_report(const std::string& run_id, const std::string& metric, const json& report,
                           const std::optional<std::string>& csv) {
    require_safe(run_id, "run id");
    require_safe(metric, "metric");
    const auto dir = root_ / "reports" / run_id;
    write_file_atomic(dir / (metric + ".json"), canonical_dump(report) + "\n");
    if (csv) write_file_atomic(dir / (metric + ".csv"), *csv);
}

json RunStore::load_report(const std::string& run_id, const std::string& metric) const {
    require_safe(run_id, "run id");
    require_safe(metric, "metric");
    const auto path = root_ / "reports" / run_id / (metric + ".json");
    if (!fs::exists(path)) throw Error(Errc::not_found, "no " + metric + " report for run " + run_id);
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& ex) {
        throw Error(Errc::corrupt_manifest, std::string("report: ") + ex.what());
    }
}

}  // namespace coig
