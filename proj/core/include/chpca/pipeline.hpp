#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chpca/config.hpp"

namespace chpca {

enum class Stage { Synth, Ingest, Chpca, Rrs, Hodge, Project, Report };

std::string_view to_string(Stage s);
std::optional<Stage> parse_stage(std::string_view text);

/// Runs one stage against the artifacts in config.out_dir. Each stage writes
/// a <stage>.stamp file recording its parameters and the hashes of the
/// artifacts it consumed; a downstream stage refuses missing or stale inputs
/// with a StageError that names the stage to (re)run.
void run_stage(Stage stage, const RunConfig& config);

/// Input stage (ingest when `input` is set, else import of `panel`, else
/// synth), then chpca, rrs, hodge, project (when events and profiles are
/// available and some mode is significant) and report.
void run_pipeline(const RunConfig& config);

/// Artifact files listed in the manifest: everything in `dir` except the
/// manifest and stamps, sorted by name.
std::vector<std::filesystem::path> list_artifacts(const std::filesystem::path& dir);

/// Parameter lines ("key = value") of a manifest, in file order.
std::vector<std::pair<std::string, std::string>> manifest_parameters(const std::filesystem::path& manifest);

} // namespace chpca
