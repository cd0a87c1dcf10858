#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "equisplit/field.hpp"
#include "equisplit/group.hpp"
#include "equisplit/level_family.hpp"
#include "equisplit/representation.hpp"

namespace equisplit {

inline constexpr const char* report_schema = "equisplit-report/1";
inline constexpr const char* fixture_schema = "equisplit-fixture/1";

enum class CampaignKind { SupportProjection, Resolution, Splitting, Retraction, Fuzz };

CampaignKind parse_campaign_kind(const std::string& name);
std::string campaign_name(CampaignKind kind);

struct Caps {
    std::size_t max_vertices = 64;
    std::size_t max_group_order = 5000;
    std::size_t max_rep_dim = 60;
    std::size_t max_subcomplexes = 200;
    std::size_t max_extension_dim = 24;
    std::size_t max_fixtures = 5;
};

/// Parsed and validated campaign configuration. Every parse error is a
/// ConfigError naming the offending field.
struct CampaignConfig {
    nlohmann::json raw;  // as given, with overrides applied
    std::optional<CampaignKind> campaign;
    std::uint64_t seed = 0;
    FieldSpec field;
    std::size_t trials = 20;
    std::size_t workers = 1;
    bool expect_bad_characteristic = false;
    Caps caps;
    /// Directory that relative file references are resolved against.
    std::string base_dir = ".";

    static CampaignConfig parse(const nlohmann::json& j, const std::string& base_dir = ".");
    static CampaignConfig load(const std::string& path);
    /// Re-parse after changing raw fields (used for CLI overrides).
    CampaignConfig with_overrides(std::optional<std::uint64_t> seed, std::optional<std::size_t> trials,
                                  std::optional<bool> expect_bad) const;
};

/// Everything a campaign needs: complex, group, action, representation and
/// level family, built deterministically from the config.
struct Instance {
    ComplexPtr complex;
    GroupPtr group;
    std::shared_ptr<const CellAction> action;
    RepPtr rep;
    std::shared_ptr<const LevelFamily> family;
    bool tree = true;
};

Instance build_instance(const CampaignConfig& config);

struct CampaignResult {
    nlohmann::json report;
    /// (file name, fixture) pairs to archive next to the report.
    std::vector<std::pair<std::string, nlohmann::json>> fixtures;
    /// 0 when every mandatory check passed, 1 otherwise.
    int exit_code = 0;
};

CampaignResult run_campaign(const CampaignConfig& config, CampaignKind kind);

/// Replays a support-projection fixture and greedily removes cells while it
/// keeps failing. A passing fixture comes back unchanged.
nlohmann::json shrink_fixture(const nlohmann::json& fixture, const std::string& base_dir = ".");
/// Re-runs the verification stored in a fixture; true when the recorded
/// outcome is reproduced exactly.
bool replay_fixture(const nlohmann::json& fixture, const std::string& base_dir = ".");

/// Human-readable summary of a report.
std::string render_summary(const nlohmann::json& report);

/// Runs fn(0..n-1) on up to `workers` threads; results are the caller's to
/// store by index.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn fn);

}  // namespace equisplit

#include "equisplit/detail/parallel.hpp"
