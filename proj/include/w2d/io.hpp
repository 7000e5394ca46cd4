#pragma once

#include "w2d/estimates.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace w2d {

using json = nlohmann::ordered_json;

// stable shortest-round-trip float formatting for byte-identical replays
std::string fmt_double(double v);

json domain_to_json(const GraphDomain& dom);
std::shared_ptr<const GraphDomain> domain_from_json(const json& j);

// cover CSV: one record per cube (level, corner ints, dist bounds, layer id)
void save_cover_csv(const WhitneyCover& cover, const std::filesystem::path& path,
                    double quarter_radius);
WhitneyCover load_cover_csv(std::shared_ptr<const GraphDomain> domain,
                            const std::filesystem::path& path);

// grid function CSV (node coords, value) + JSON sidecar (h, domain, lambda, Lambda)
void save_grid_function(const GridFunction& u, const std::filesystem::path& csv_path,
                        const std::filesystem::path& sidecar_path, double lambda,
                        double Lambda);

void save_membership_csv(const MembershipReport& rep, const CutCellGrid& grid,
                         const std::filesystem::path& path);

void save_report_json(const EstimateReport& rep, const std::filesystem::path& path);
void save_report_cubes_csv(const EstimateReport& rep, const std::filesystem::path& path);
void save_report_levels_csv(const EstimateReport& rep, const std::filesystem::path& path);
void save_report_summary_csv(const EstimateReport& rep, const std::filesystem::path& path);

// FNV-1a hash of the canonical config dump, recorded in every manifest
std::uint64_t config_hash(const json& config);

void write_manifest(const std::filesystem::path& dir, const json& config,
                    const std::string& subcommand, double wall_seconds);

}  // namespace w2d
