// equisplit command-line runner.
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "equisplit/campaign.hpp"
#include "equisplit/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_json(const fs::path& path, const json& j) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw equisplit::ConfigError("cannot write '" + path.string() + "'");
    out << j.dump(2) << "\n";
}

fs::path output_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("EQUISPLIT_OUT")) return env;
    return "equisplit-out";
}

int run(const std::string& verb, const std::string& config_path, std::optional<std::uint64_t> seed,
        std::optional<std::size_t> trials, bool expect_bad, const std::string& out_flag) {
    using namespace equisplit;
    const CampaignKind kind = parse_campaign_kind(verb);
    const CampaignConfig config = CampaignConfig::load(config_path)
                                      .with_overrides(seed, trials, expect_bad ? std::optional<bool>(true)
                                                                                : std::nullopt);
    if (config.campaign && *config.campaign != kind)
        throw ConfigError("config field 'campaign': config is for '" + campaign_name(*config.campaign) +
                          "' but the verb runs '" + campaign_name(kind) + "'");
    const auto start = std::chrono::steady_clock::now();
    const CampaignResult result = run_campaign(config, kind);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const fs::path dir = output_dir(out_flag);
    write_json(dir / "report.json", result.report);
    write_json(dir / "timing.json", {{"campaign", campaign_name(kind)}, {"seconds", seconds},
                                     {"workers", config.workers}});
    for (const auto& [name, fixture] : result.fixtures) write_json(dir / name, fixture);
    std::cout << render_summary(result.report) << "report     " << (dir / "report.json").string() << "\n";
    return result.exit_code;
}

int shrink(const std::string& fixture_path, const std::string& out_flag) {
    std::ifstream in(fixture_path);
    if (!in) throw equisplit::ConfigError("cannot read fixture '" + fixture_path + "'");
    json fixture;
    try {
        fixture = json::parse(in);
    } catch (const json::parse_error& e) {
        throw equisplit::ConfigError("fixture '" + fixture_path + "' is not valid JSON: " + e.what());
    }
    const auto base = fs::path(fixture_path).parent_path();
    const json small = equisplit::shrink_fixture(fixture, base.empty() ? "." : base.string());
    const fs::path dir = output_dir(out_flag);
    const fs::path target = dir / ("shrunk-" + fs::path(fixture_path).filename().string());
    write_json(target, small);
    const auto before = fixture.at("subcomplex").at("cells").size();
    const auto after = small.at("subcomplex").at("cells").size();
    std::cout << "cells      " << before << " -> " << after << (small == fixture ? " (unchanged)" : "") << "\n"
              << "fixture    " << target.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"equisplit: exact verification campaigns for support projections and equivariant splittings"};
    app.require_subcommand(1);

    std::string config_path, out_dir, fixture_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    bool expect_bad = false;

    const std::vector<std::pair<std::string, std::string>> verbs = {
        {"verify-support-projection", "check u_Sigma identities on convex subcomplexes"},
        {"run-resolution", "alpha/pi identities, telescoping and pi-bar independence"},
        {"run-splitting", "equivariant sections of random extensions"},
        {"run-retraction", "equivariant retractions of random extensions"},
        {"fuzz", "search non-convex subcomplexes for failing identities"}};
    for (const auto& [name, help] : verbs) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "campaign config (JSON)")->required();
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--out", out_dir, "output directory (default $EQUISPLIT_OUT or ./equisplit-out)");
        sub->add_option("--trials", trials, "override the trial count")->check(CLI::PositiveNumber);
        sub->add_flag("--expect-bad-characteristic", expect_bad, "BadCharacteristic is the expected outcome");
    }
    CLI::App* shrink_cmd = app.add_subcommand("shrink", "minimize a failing fixture");
    shrink_cmd->add_option("--fixture", fixture_path, "fixture file")->required()->check(CLI::ExistingFile);
    shrink_cmd->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        CLI::App* chosen = app.get_subcommands().front();
        if (chosen == shrink_cmd) return shrink(fixture_path, out_dir);
        return run(chosen->get_name(), config_path, seed, trials, expect_bad, out_dir);
    } catch (const equisplit::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const equisplit::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
