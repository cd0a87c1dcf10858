// Acceptance runner: one PASS/FAIL line per criterion, exit 0 iff all pass.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "equisplit/campaign.hpp"
#include "equisplit/complex.hpp"
#include "equisplit/errors.hpp"
#include "equisplit/idempotent_system.hpp"
#include "equisplit/matrix_io.hpp"
#include "equisplit/resolution.hpp"
#include "equisplit/splitting.hpp"
#include "equisplit/subspace.hpp"

using namespace equisplit;
using nlohmann::json;

namespace {

json tree_config(std::size_t q, std::size_t r, const std::string& group, const std::string& field,
                 std::vector<std::string> kinds, bool conjugate, std::uint64_t seed, std::size_t trials) {
    return {{"seed", seed},
            {"field", field},
            {"complex", {{"tree", {{"q", q}, {"r", r}}}}},
            {"group", group},
            {"levels", {{"depth", "exhaustive"}, {"radius_offset", 1}}},
            {"representation", {{"kinds", kinds}, {"conjugate", conjugate}}},
            {"trials", trials}};
}

struct Run {
    json config;
    CampaignKind kind;
    CampaignResult result;
};

// Every campaign run is recorded so criterion 8 can rerun it.
std::vector<Run> runs;

const CampaignResult& run(const json& config, CampaignKind kind) {
    runs.push_back({config, kind, run_campaign(CampaignConfig::parse(config), kind)});
    return runs.back().result;
}

std::map<int, std::vector<std::string>> reasons;

void fail(int criterion, const std::string& why) { reasons[criterion].push_back(why); }

// Instances of the support projection suite: q in {2,3}, r <= 2, rational
// and coprime finite fields.
std::vector<json> suite_instances() {
    return {
        tree_config(2, 1, "automorphisms", "Q", {"permutation-cells"}, false, 101, 40),
        tree_config(2, 1, "automorphisms", "F5", {"regular", "sign"}, true, 102, 40),
        tree_config(2, 2, "automorphisms", "Q", {"permutation-cells"}, true, 103, 50),
        tree_config(2, 2, "automorphisms", "F5", {"permutation-vertices", "permutation-edges"}, false, 104, 40),
        tree_config(2, 2, "rotations", "F7", {"sign-cells"}, false, 105, 30),
        tree_config(3, 1, "automorphisms", "Q", {"permutation-cells", "trivial"}, false, 106, 40),
        tree_config(3, 1, "automorphisms", "F5", {"regular"}, true, 107, 30),
        tree_config(3, 2, "rotations", "Q", {"permutation-cells"}, false, 108, 40),
        tree_config(3, 2, "rotations", "F5", {"permutation-vertices", "sign"}, true, 109, 40),
    };
}

void criterion1() {
    std::size_t instances = 0;
    for (const json& cfg : suite_instances()) {
        const auto& r = run(cfg, CampaignKind::SupportProjection);
        const json& rep = r.report;
        if (rep.at("instance").at("representation_dim").get<std::size_t>() > 60) fail(1, "dimension above 60");
        if (r.exit_code != 0) fail(1, "campaign failed: " + cfg.dump());
        // Independent oracle: the recorded dimensions are recomputed here
        // from the vertex images and coimages, without u_Sigma.
        const CampaignConfig parsed = CampaignConfig::parse(cfg);
        const Instance inst = build_instance(parsed);
        const auto systems = level_systems(*inst.action, *inst.rep, *inst.family);
        for (const json& t : rep.at("trials")) {
            ++instances;
            if (!t.at("passed").get<bool>() || t.at("convex") != true) fail(1, "trial failed");
            const Subcomplex s = Subcomplex::from_json(inst.complex, {{"parent", inst.complex->hash()},
                                                                      {"cells", t.at("subcomplex")}});
            const IdempotentSystem& sys = systems.at(t.at("level").get<std::size_t>());
            Subspace images(parsed.field, sys.dim());
            Subspace rows(parsed.field, sys.dim());
            for (std::size_t x : s.vertices()) {
                images = sum(images, sys.vertex_image(x));
                rows = sum(rows, sys.vertex_coimage(x));
            }
            const Matrix u = support_projection(sys, s);
            if (u * u != u || Subspace::column_space(u) != images ||
                t.at("rank").get<std::size_t>() != images.dim() ||
                t.at("kernel_meet_dim").get<std::size_t>() != sys.dim() - rows.dim() ||
                Subspace::row_space(u) != rows)
                fail(1, "oracle disagrees on trial " + t.at("trial").dump());
        }
    }
    if (instances < 300) fail(1, "only " + std::to_string(instances) + " instances");
    std::printf("  criterion 1: %zu instances\n", instances);
}

void criterion2() {
    json cfg = tree_config(2, 2, "automorphisms", "Q", {"permutation-cells"}, false, 201, 40);
    cfg["caps"] = {{"max_fixtures", 2}};
    const auto& r = run(cfg, CampaignKind::Fuzz);
    if (r.exit_code != 0) fail(2, "fuzz campaign failed its convex controls");
    if (r.report.at("counterexamples").get<std::size_t>() == 0) fail(2, "no counterexample found");
    if (r.fixtures.empty()) fail(2, "nothing archived");
    const Instance inst = build_instance(CampaignConfig::parse(cfg));
    const auto systems = level_systems(*inst.action, *inst.rep, *inst.family);
    for (const auto& [name, fixture] : r.fixtures) {
        if (!replay_fixture(fixture) || !replay_fixture(fixture)) fail(2, name + " does not replay");
        if (shrink_fixture(fixture) != fixture) fail(2, name + " is not a shrink fixpoint");
        // Oracle: the minimized subcomplex misses part of its own geodesic
        // hull, and removing any further cell makes every identity hold.
        const Subcomplex s = Subcomplex::from_json(inst.complex, fixture.at("subcomplex"));
        const IdempotentSystem& sys = systems.at(fixture.at("level").get<std::size_t>());
        if (convex_hull_tree(inst.complex, s.vertices()).size() <= s.size()) fail(2, name + " has no gap");
        if (verify_support_projection(sys, s).all()) fail(2, name + " does not fail");
        for (std::size_t c : s.cells()) {
            const Subcomplex smaller = s.without(c);
            if (!smaller.empty() && !verify_support_projection(sys, smaller).all())
                fail(2, name + " is not minimal");
        }
    }
    std::printf("  criterion 2: %zu counterexamples, %zu archived\n",
                r.report.at("counterexamples").get<std::size_t>(), r.fixtures.size());
}

std::vector<const CampaignResult*> resolution_results;

void criterion3() {
    for (json cfg : suite_instances()) {
        cfg["trials"] = 6;
        const auto& r = run(cfg, CampaignKind::Resolution);
        resolution_results.push_back(&r);
        const json& rep = r.report;
        const bool small = rep.at("instance").at("group_order").get<std::size_t>() <= 48;
        for (const json& level : rep.at("levels")) {
            for (const char* key : {"q_idempotent", "image_identity", "matches_support_projection",
                                    "f_action_valid", "alpha_equivariant", "pi_equivariant"})
                if (!level.at(key).get<bool>()) fail(3, std::string(key) + " fails on " + cfg.dump());
        }
        if (small && equivariance_elements(*build_instance(CampaignConfig::parse(cfg)).group).size() !=
                         rep.at("instance").at("group_order").get<std::size_t>())
            fail(3, "equivariance not exhaustive for a small group");
    }
    std::printf("  criterion 3: %zu instances\n", resolution_results.size());
}

void criterion4() {
    std::size_t families = 0;
    for (const CampaignResult* r : resolution_results) {
        const json& tele = r->report.at("telescoping");
        if (tele.contains("skipped")) continue;
        ++families;
        for (const char* key : {"increasing", "pi_alpha_identity", "projectors_idempotent", "projectors_orthogonal",
                                "projectors_sum_identity", "rank_sum_equals_dim"})
            if (!tele.at(key).get<bool>()) fail(4, std::string(key) + " fails");
    }
    // Oracle: q_n taken as the support projection of the whole ball, not
    // as pi alpha.
    for (const json& cfg : suite_instances()) {
        const CampaignConfig parsed = CampaignConfig::parse(cfg);
        const Instance inst = build_instance(parsed);
        const auto systems = level_systems(*inst.action, *inst.rep, *inst.family);
        const std::size_t d = inst.rep->dim();
        Matrix prev(parsed.field, d, d), total(parsed.field, d, d);
        std::vector<Matrix> p;
        for (const auto& sys : systems) {
            const Matrix q = support_projection(sys, Subcomplex::whole(inst.complex));
            if (q * prev != prev || prev * q != prev) fail(4, "oracle: levels not increasing");
            p.push_back(q - prev);
            total += p.back();
            prev = q;
        }
        if (!prev.is_identity() || !total.is_identity()) fail(4, "oracle: top level not exhaustive");
        for (std::size_t a = 0; a < p.size(); ++a)
            for (std::size_t b = 0; b < p.size(); ++b)
                if (p[a] * p[b] != (a == b ? p[a] : Matrix(parsed.field, d, d))) fail(4, "oracle: p_n not orthogonal");
    }
    if (families == 0) fail(4, "no exhaustive family exercised");
    std::printf("  criterion 4: %zu exhaustive families\n", families);
}

void criterion5() {
    std::size_t pairs = 0, trials = 0;
    for (const CampaignResult* r : resolution_results) {
        const bool small = r->report.at("instance").at("group_order").get<std::size_t>() <= 48;
        for (const json& t : r->report.at("trials")) {
            ++trials;
            pairs += t.at("pairs_checked").get<std::size_t>();
            if (!t.at("passed").get<bool>()) fail(5, "pi-bar trial failed");
            if (small && !t.at("exhaustive_pairs").get<bool>()) fail(5, "pairs not exhaustive for small G");
        }
    }
    std::printf("  criterion 5: %zu samples, %zu subgroup pairs\n", trials, pairs);
}

// Oracle for a certificate: rebuild the extension from its seed and check
// the splitting identity and equivariance against every group element.
bool certificate_holds(const Instance& inst, FieldSpec field, const json& trial, bool section) {
    const Extension ext = random_extension(*inst.action, field, trial.at("extension_seed").get<std::uint64_t>(),
                                           ExtensionOptions{});
    if (ext.hash() != trial.at("extension_hash")) return false;
    const Matrix m = matrix_from_json(trial.at("certificate").at("map"));
    if (!(section ? ext.p * m : m * ext.i).is_identity()) return false;
    for (std::size_t g = 0; g < inst.group->order(); ++g) {
        const bool eq = section ? ext.middle->rho(g) * m == m * ext.quotient->rho(g)
                                : ext.sub->rho(g) * m == m * ext.middle->rho(g);
        if (!eq) return false;
    }
    return true;
}

void criterion6() {
    const std::vector<json> configs = {
        tree_config(2, 1, "automorphisms", "Q", {"trivial"}, false, 601, 30),
        tree_config(2, 2, "automorphisms", "Q", {"trivial"}, false, 602, 35),
        tree_config(3, 1, "automorphisms", "Q", {"trivial"}, false, 603, 35),
    };
    std::size_t sections = 0, retractions = 0;
    for (const json& cfg : configs) {
        const CampaignConfig parsed = CampaignConfig::parse(cfg);
        const Instance inst = build_instance(parsed);
        for (bool section : {true, false}) {
            const auto& r = run(cfg, section ? CampaignKind::Splitting : CampaignKind::Retraction);
            if (r.exit_code != 0) fail(6, "campaign failed: " + cfg.dump());
            for (const json& t : r.report.at("trials")) {
                if (!t.contains("certificate") || !certificate_holds(inst, parsed.field, t, section))
                    fail(6, "oracle rejects trial " + t.at("trial").dump());
                ++(section ? sections : retractions);
            }
        }
    }
    if (sections < 100 || retractions < 100) fail(6, "fewer than 100 extensions per direction");
    std::printf("  criterion 6: %zu sections, %zu retractions\n", sections, retractions);
}

void criterion7() {
    std::size_t configs = 0, raised = 0;
    std::uint64_t seed = 700;
    const std::vector<std::tuple<std::size_t, std::size_t, std::string>> balls = {
        {2, 1, "automorphisms"}, {2, 2, "automorphisms"}, {3, 1, "automorphisms"}, {3, 2, "rotations"}};
    for (const auto& [q, r, group] : balls)
        for (const std::string field : {"F2", "F3"})
            for (int variant = 0; variant < 3; ++variant) {
                json cfg = tree_config(q, r, group, field, {"trivial"}, false, ++seed, 2);
                cfg["expect_bad_characteristic"] = true;
                const CampaignKind kind = variant == 1 ? CampaignKind::Retraction : CampaignKind::Splitting;
                const auto& res = run(cfg, kind);
                ++configs;
                if (res.exit_code != 0) fail(7, "bad configuration did not fail cleanly: " + cfg.dump());
                for (const json& t : res.report.at("trials")) {
                    if (t.contains("certificate")) {
                        fail(7, "certificate produced over " + field);
                        continue;
                    }
                    const json& b = t.at("bad_characteristic");
                    const auto order = b.at("order").get<std::size_t>();
                    const auto ell = b.at("characteristic").get<std::size_t>();
                    // Oracle: the named subgroup really has that order.
                    if (b.at("elements").size() != order || order % ell != 0)
                        fail(7, "named subgroup does not witness the characteristic");
                    ++raised;
                }
            }
    if (configs < 20) fail(7, "fewer than 20 bad configurations");
    std::printf("  criterion 7: %zu configurations, %zu BadCharacteristic reports\n", configs, raised);
}

void criterion8() {
    std::size_t compared = 0;
    const std::size_t n = runs.size();
    for (std::size_t k = 0; k < n; ++k) {
        const CampaignResult again = run_campaign(CampaignConfig::parse(runs[k].config), runs[k].kind);
        ++compared;
        if (again.report.dump() != runs[k].result.report.dump()) fail(8, "report differs: " + runs[k].config.dump());
        for (std::size_t f = 0; f < again.fixtures.size(); ++f)
            if (again.fixtures[f].second.dump() != runs[k].result.fixtures.at(f).second.dump())
                fail(8, "fixture differs");
    }
    std::printf("  criterion 8: %zu reports rerun\n", compared);
}

}  // namespace

int main() {
    runs.reserve(256);
    const std::vector<std::pair<int, std::function<void()>>> criteria = {
        {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
        {5, criterion5}, {6, criterion6}, {7, criterion7}, {8, criterion8}};
    const std::map<int, std::string> names = {
        {1, "support projection identities on convex subcomplexes"},
        {2, "non-convex counterexample found, minimized and replayed"},
        {3, "alpha/pi identities and equivariance"},
        {4, "telescoping over exhaustive level families"},
        {5, "pi-bar independence of the averaging subgroup"},
        {6, "global sections and retractions over Q"},
        {7, "bad characteristic raises BadCharacteristic"},
        {8, "byte-identical reports on rerun"}};
    bool all = true;
    for (const auto& [id, body] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        try {
            body();
        } catch (const std::exception& e) {
            fail(id, std::string("exception: ") + e.what());
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool ok = reasons[id].empty();
        all = all && ok;
        std::printf("%s criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", id, names.at(id).c_str(), s);
        for (std::size_t k = 0; k < reasons[id].size() && k < 5; ++k)
            std::printf("    %s\n", reasons[id][k].c_str());
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
