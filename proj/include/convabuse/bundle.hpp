#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "convabuse/fusion.hpp"
#include "json.hpp"

namespace convabuse {

inline constexpr std::string_view kBundleSchema = "convabuse.pipeline/1";

/// 64-bit FNV-1a over the names joined by '\n', as 16 hex digits.
std::string manifest_hash(const std::vector<std::string>& names);

nlohmann::json pipeline_to_json(const fusion::TrainedPipeline& p);
/// Throws VersionError on a schema tag or manifest mismatch, ParseError on a
/// malformed document.
fusion::TrainedPipeline pipeline_from_json(const nlohmann::json& doc);

/// Canonical text form. Doubles round-trip exactly, so equal pipelines give
/// equal strings.
std::string dump_bundle(const fusion::TrainedPipeline& p);
void save_bundle(const std::filesystem::path& path, const fusion::TrainedPipeline& p);
fusion::TrainedPipeline load_bundle(const std::filesystem::path& path);

}  // namespace convabuse
