#include "equisplit/campaign.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "equisplit/errors.hpp"
#include "equisplit/idempotent_system.hpp"
#include "equisplit/matrix_io.hpp"
#include "equisplit/resolution.hpp"
#include "equisplit/rng.hpp"
#include "equisplit/splitting.hpp"

namespace equisplit {

using nlohmann::json;

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& msg) {
    throw ConfigError("config field '" + field + "': " + msg);
}

std::uint64_t get_uint(const json& j, const std::string& field) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0))
        bad_field(field, "expected a non-negative integer");
    return j.get<std::uint64_t>();
}

std::size_t get_positive(const json& j, const std::string& field) {
    const std::uint64_t v = get_uint(j, field);
    if (v == 0) bad_field(field, "must be positive");
    return static_cast<std::size_t>(v);
}

bool get_bool(const json& j, const std::string& field) {
    if (!j.is_boolean()) bad_field(field, "expected true or false");
    return j.get<bool>();
}

std::string get_string(const json& j, const std::string& field) {
    if (!j.is_string()) bad_field(field, "expected a string");
    return j.get<std::string>();
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) bad_field(where, "expected an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) bad_field(where.empty() ? key : where + "." + key, "unknown field");
    }
}

const std::vector<std::string> rep_kinds = {"trivial",          "sign",          "regular", "permutation-cells",
                                            "permutation-vertices", "permutation-edges", "sign-cells"};

void validate_structure(const json& j) {
    check_keys(j, "", {"campaign", "seed", "field", "complex", "group", "levels", "representation", "trials",
                       "workers", "caps", "expect_bad_characteristic"});
    if (!j.contains("seed")) bad_field("seed", "missing (every campaign is randomized)");
    if (!j.contains("complex")) bad_field("complex", "missing");
    const json& c = j.at("complex");
    check_keys(c, "complex", {"tree", "file", "assume_convex"});
    if (c.contains("tree") == c.contains("file")) bad_field("complex", "give exactly one of 'tree' or 'file'");
    if (c.contains("tree")) {
        check_keys(c.at("tree"), "complex.tree", {"q", "r"});
        if (!c.at("tree").contains("q") || !c.at("tree").contains("r")) bad_field("complex.tree", "needs q and r");
        if (get_uint(c.at("tree").at("q"), "complex.tree.q") < 2) bad_field("complex.tree.q", "must be at least 2");
        get_uint(c.at("tree").at("r"), "complex.tree.r");
    } else {
        get_string(c.at("file"), "complex.file");
    }
    if (c.contains("assume_convex")) get_bool(c.at("assume_convex"), "complex.assume_convex");

    if (j.contains("group")) {
        const json& g = j.at("group");
        if (g.is_string()) {
            const std::string s = g.get<std::string>();
            if (s != "automorphisms" && s != "rotations")
                bad_field("group", "expected 'automorphisms', 'rotations' or {\"generators\": [...]}");
        } else {
            check_keys(g, "group", {"generators"});
            if (!g.contains("generators") || !g.at("generators").is_array())
                bad_field("group.generators", "expected a list of cycle strings");
            for (const auto& s : g.at("generators")) get_string(s, "group.generators");
        }
    }
    if (j.contains("levels")) {
        const json& l = j.at("levels");
        check_keys(l, "levels", {"depth", "radius_offset", "explicit"});
        if (l.contains("depth") && l.contains("explicit")) bad_field("levels", "give either 'depth' or 'explicit'");
        if (l.contains("depth") && !(l.at("depth").is_string() && l.at("depth") == "exhaustive"))
            get_uint(l.at("depth"), "levels.depth");
        if (l.contains("radius_offset")) get_uint(l.at("radius_offset"), "levels.radius_offset");
        if (l.contains("explicit") && !l.at("explicit").is_array())
            bad_field("levels.explicit", "expected [level][vertex] lists of element indices");
    }
    if (j.contains("representation")) {
        const json& r = j.at("representation");
        check_keys(r, "representation", {"kinds", "conjugate", "explicit"});
        if (r.contains("kinds") == r.contains("explicit"))
            bad_field("representation", "give exactly one of 'kinds' or 'explicit'");
        if (r.contains("kinds")) {
            if (!r.at("kinds").is_array() || r.at("kinds").empty())
                bad_field("representation.kinds", "expected a non-empty list");
            for (const auto& k : r.at("kinds"))
                if (std::find(rep_kinds.begin(), rep_kinds.end(), get_string(k, "representation.kinds")) ==
                    rep_kinds.end())
                    bad_field("representation.kinds", "unknown kind '" + k.get<std::string>() + "'");
        }
        if (r.contains("conjugate")) get_bool(r.at("conjugate"), "representation.conjugate");
    }
    if (j.contains("caps"))
        check_keys(j.at("caps"), "caps",
                   {"max_vertices", "max_group_order", "max_rep_dim", "max_subcomplexes", "max_extension_dim",
                    "max_fixtures"});
}

json bad_characteristic_json(const BadCharacteristic& e) {
    return {{"subgroup", e.subgroup_label()},
            {"order", e.subgroup_order()},
            {"characteristic", e.characteristic()},
            {"characteristic_divides_order", e.characteristic() != 0 && e.subgroup_order() % e.characteristic() == 0},
            {"elements", e.elements()}};
}

std::string rep_hash(const LinearRep& rep) {
    json gens = json::array();
    for (const auto& m : rep.generator_images()) gens.push_back(to_json(m));
    return fnv1a_hex(gens.dump());
}

std::vector<std::size_t> cells_of_dim(const Complex& c, std::optional<std::size_t> dim) {
    std::vector<std::size_t> out;
    for (std::size_t x = 0; x < c.size(); ++x)
        if (!dim || c.dim(x) == *dim) out.push_back(x);
    return out;
}

LinearRep build_kind(const std::string& kind, const CellAction& action, FieldSpec field, const Caps& caps) {
    const GroupPtr& g = action.group_ptr();
    const Complex& c = action.complex();
    if (kind == "trivial") return LinearRep::trivial(g, field);
    if (kind == "sign") return LinearRep::sign(g, field);
    if (kind == "regular") {
        if (g->order() > caps.max_rep_dim)
            bad_field("representation.kinds", "regular representation exceeds caps.max_rep_dim");
        return LinearRep::regular(g, field);
    }
    if (kind == "permutation-cells") return LinearRep::permutation(action, field, cells_of_dim(c, std::nullopt));
    if (kind == "permutation-vertices") return LinearRep::permutation(action, field, cells_of_dim(c, 0));
    if (kind == "permutation-edges") return LinearRep::permutation(action, field, cells_of_dim(c, 1));
    // sign-cells
    return LinearRep::tensor(LinearRep::sign(g, field), LinearRep::permutation(action, field, cells_of_dim(c, std::nullopt)));
}

std::vector<std::string> standing_notes(CampaignKind kind, const Instance& inst) {
    std::vector<std::string> notes;
    if (!inst.tree) notes.push_back("convexity of subcomplexes is asserted by the configuration, not verified");
    if (kind == CampaignKind::Resolution || kind == CampaignKind::Splitting || kind == CampaignKind::Retraction) {
        notes.push_back(
            "finite model: F^n, I^n and the smooth completion coincide because every function on a finite complex "
            "has finite support; the identities are verified, the infinite-dimensional statements are not");
        notes.push_back(
            "cuspidality is replaced by its finite-support surrogate, which every representation of a finite group "
            "satisfies; the exhaustive-level precondition is what stands in for it");
    }
    if (kind == CampaignKind::Splitting || kind == CampaignKind::Retraction) {
        notes.push_back(
            "compact-mod-centre and compact splittings coincide for finite groups; run-splitting and run-retraction "
            "share one engine");
        notes.push_back(
            "canonical choices are made by this tool: pivot-column linear splittings and minimal-index coset "
            "representatives");
    }
    return notes;
}

json base_report(const CampaignConfig& cfg, CampaignKind kind, const Instance& inst) {
    json r;
    r["schema"] = report_schema;
    r["campaign"] = campaign_name(kind);
    r["config"] = cfg.raw;
    r["hashes"] = {{"config", fnv1a_hex(cfg.raw.dump())},
                   {"complex", inst.complex->hash()},
                   {"representation", rep_hash(*inst.rep)}};
    r["instance"] = {{"vertices", inst.complex->num_vertices()},
                     {"cells", inst.complex->size()},
                     {"group_order", inst.group->order()},
                     {"representation_dim", inst.rep->dim()},
                     {"field", cfg.field.tag()},
                     {"levels", inst.family->num_levels()},
                     {"exhaustive", inst.family->exhaustive()}};
    r["notes"] = standing_notes(kind, inst);
    return r;
}

void finish(CampaignResult& result, std::size_t passed, std::size_t failed, std::vector<std::string> problems) {
    json& r = result.report;
    r["summary"] = {{"trials", passed + failed}, {"passed", passed}, {"failed", failed}, {"problems", problems}};
    const bool ok = failed == 0 && problems.empty();
    r["status"] = ok ? "pass" : "fail";
    result.exit_code = ok ? 0 : 1;
}

// Handles BadCharacteristic raised while building the level systems.
bool bad_characteristic_outcome(const CampaignConfig& cfg, const BadCharacteristic& e, CampaignResult& result) {
    result.report["bad_characteristic"] = bad_characteristic_json(e);
    std::vector<std::string> problems;
    if (!cfg.expect_bad_characteristic)
        problems.push_back("BadCharacteristic for " + e.subgroup_label() + " in a campaign not expecting it");
    else if (e.subgroup_order() % e.characteristic() != 0)
        problems.push_back("BadCharacteristic names a subgroup whose order the characteristic does not divide");
    finish(result, 0, 0, problems);
    return true;
}

std::vector<IdempotentSystem> systems_for(const Instance& inst) {
    return level_systems(*inst.action, *inst.rep, *inst.family);
}

std::vector<Subcomplex> candidate_subcomplexes(const Instance& inst, const Caps& caps) {
    if (inst.tree) return enumerate_convex_subcomplexes(inst.complex, caps.max_subcomplexes);
    std::vector<Subcomplex> out{Subcomplex::whole(inst.complex)};
    for (std::size_t c = 0; c < inst.complex->size(); ++c) out.push_back(Subcomplex::closure(inst.complex, {c}));
    return out;
}

json support_trial_json(std::size_t t, std::size_t level, const Subcomplex& s, const SupportVerification& rec) {
    json j = rec.to_json();
    j["trial"] = t;
    j["level"] = level;
    j["subcomplex"] = s.cells();
    return j;
}

// ---------------------------------------------------------------- campaigns

CampaignResult support_projection_campaign(const CampaignConfig& cfg, const Instance& inst) {
    CampaignResult result;
    result.report = base_report(cfg, CampaignKind::SupportProjection, inst);
    std::vector<IdempotentSystem> systems;
    try {
        systems = systems_for(inst);
    } catch (const BadCharacteristic& e) {
        bad_characteristic_outcome(cfg, e, result);
        return result;
    }
    std::vector<std::string> problems;
    if (cfg.expect_bad_characteristic) problems.push_back("expected BadCharacteristic, none was raised");
    json consistency = json::array();
    for (auto& sys : systems) {
        sys.check_path_condition();
        consistency.push_back(sys.consistency().to_json());
    }
    result.report["consistency"] = consistency;

    const auto candidates = candidate_subcomplexes(inst, cfg.caps);
    const std::size_t levels = systems.size();
    const FiniteGroup& g = *inst.group;
    std::vector<json> trials(cfg.trials);
    parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
        std::mt19937_64 rng = trial_rng(cfg.seed, t);
        const std::size_t n = t % levels, idx = t / levels;
        const Subcomplex s = idx < candidates.size() || !inst.tree ? candidates[idx % candidates.size()]
                                                                    : random_convex_subcomplex(inst.complex, rng);
        const IdempotentSystem& sys = systems[n];
        const SupportVerification rec = verify_support_projection(sys, s);
        json j = support_trial_json(t, n, s, rec);
        j["convexity"] = inst.tree ? "verified" : "asserted";
        // Equivariance under one sampled element.
        const std::size_t h = g.order() > 1 ? 1 + uniform_below(rng, g.order() - 1) : 0;
        const Matrix u = alternating_sum(sys, s);
        const Subcomplex moved(inst.complex, inst.action->act_on(h, s.cells()));
        const bool equivariant = inst.rep->rho(h) * u == alternating_sum(sys, moved) * inst.rep->rho(h);
        j["equivariance_element"] = h;
        j["equivariant"] = equivariant;
        j["passed"] = rec.all() && equivariant && (!inst.tree || rec.convex == true);
        trials[t] = std::move(j);
    });
    std::size_t passed = 0;
    for (const auto& j : trials) passed += j.at("passed").get<bool>();
    result.report["trials"] = trials;
    finish(result, passed, trials.size() - passed, problems);
    return result;
}

CampaignResult resolution_campaign(const CampaignConfig& cfg, const Instance& inst) {
    CampaignResult result;
    result.report = base_report(cfg, CampaignKind::Resolution, inst);
    std::vector<IdempotentSystem> systems;
    try {
        systems = systems_for(inst);
    } catch (const BadCharacteristic& e) {
        bad_characteristic_outcome(cfg, e, result);
        return result;
    }
    std::vector<std::string> problems;
    if (cfg.expect_bad_characteristic) problems.push_back("expected BadCharacteristic, none was raised");
    result.report["cuspidal_surrogate"] = true;

    const FiniteGroup& g = *inst.group;
    json levels = json::array();
    std::vector<LevelMaps> maps;
    for (std::size_t n = 0; n < systems.size(); ++n) {
        const auto rec = verify_alpha_pi(systems[n], *inst.action, *inst.rep);
        json j = rec.to_json();
        j["level"] = n;
        levels.push_back(j);
        if (!rec.all()) problems.push_back("alpha/pi identities fail at level " + std::to_string(n));
        maps.push_back(build_level_maps(systems[n]));
    }
    result.report["levels"] = levels;

    json tele;
    if (inst.family->exhaustive()) {
        try {
            const MultiLevel ml = multi_level_alpha(maps);
            const std::size_t d = inst.rep->dim();
            Matrix total(cfg.field, d, d);
            bool idempotent = true, orthogonal = true;
            std::vector<std::size_t> ranks;
            for (std::size_t n = 0; n < ml.projectors.size(); ++n) {
                const Matrix& p = ml.projectors[n];
                idempotent = idempotent && is_idempotent(p);
                ranks.push_back(p.rank());
                total += p;
                for (std::size_t m = 0; m < ml.projectors.size(); ++m)
                    if (m != n) orthogonal = orthogonal && (p * ml.projectors[m]).is_zero();
            }
            std::size_t rank_sum = 0;
            for (auto r : ranks) rank_sum += r;
            tele = {{"increasing", true},
                    {"pi_alpha_identity", (ml.pi * ml.alpha).is_identity()},
                    {"projectors_idempotent", idempotent},
                    {"projectors_orthogonal", orthogonal},
                    {"projectors_sum_identity", total.is_identity()},
                    {"projector_ranks", ranks},
                    {"rank_sum_equals_dim", rank_sum == d}};
            for (const char* key : {"pi_alpha_identity", "projectors_idempotent", "projectors_orthogonal",
                                    "projectors_sum_identity", "rank_sum_equals_dim"})
                if (!tele.at(key).get<bool>()) problems.push_back(std::string("telescoping check failed: ") + key);
        } catch (const NotIncreasing& e) {
            tele = {{"increasing", false}, {"level", e.level()}};
            problems.push_back(e.what());
        } catch (const NotExhaustive& e) {
            tele = {{"exhaustive", false}};
            problems.push_back(e.what());
        }
    } else {
        tele = {{"skipped", "level family is not exhaustive"}};
    }
    result.report["telescoping"] = tele;

    // pi_bar independence over comparable normal pairs.
    std::vector<Subgroup> subgroups;
    bool exhaustive_pairs = g.order() <= 48;
    if (g.order() <= 96) {
        subgroups = all_subgroups(g);
    } else {
        std::set<std::vector<std::size_t>> seen;
        auto add = [&](Subgroup u) {
            if (seen.insert(u.elements).second) subgroups.push_back(std::move(u));
        };
        add(trivial_subgroup(g));
        for (std::size_t n = 0; n < inst.family->num_levels(); ++n)
            for (std::size_t x = 0; x < inst.family->num_vertices(); ++x) add(inst.family->at(n, x));
        for (std::size_t c = 0; c < inst.complex->size(); ++c) add(inst.action->cell_stabilizer(c));
        std::sort(subgroups.begin(), subgroups.end(), [](const Subgroup& a, const Subgroup& b) {
            return a.order() != b.order() ? a.order() < b.order() : a.elements < b.elements;
        });
        exhaustive_pairs = false;
    }
    std::vector<Subgroup> good;
    for (const auto& u : subgroups)
        if (!cfg.field.kills(u.order())) good.push_back(u);
    std::vector<std::vector<std::size_t>> generators;
    for (const auto& u : good) generators.push_back(subgroup_generators(g, u));

    std::vector<std::unique_ptr<BlockSpace>> spaces;
    std::vector<std::unique_ptr<FAction>> actions;
    for (const auto& sys : systems) {
        spaces.push_back(std::make_unique<BlockSpace>(sys));
        actions.push_back(std::make_unique<FAction>(*inst.action, *inst.rep, *spaces.back()));
    }
    std::vector<json> trials(cfg.trials);
    parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
        std::mt19937_64 rng = trial_rng(cfg.seed, t);
        const std::size_t n = t % systems.size();
        const BlockSpace& space = *spaces[n];
        const FAction& f = *actions[n];
        Matrix raw(cfg.field, space.dim(), 1);
        for (std::size_t i = 0; i < space.dim(); ++i) raw.set(i, 0, uniform_int(rng, -3, 3));
        const Subgroup& w = good[uniform_below(rng, good.size())];
        Matrix psi(cfg.field, space.dim(), 1);
        for (std::size_t x : w.elements) psi += f.apply(x, raw);
        psi = psi.scaled(Scalar(cfg.field, 1, static_cast<long>(w.order())));

        std::vector<std::size_t> fixing;
        for (std::size_t k = 0; k < good.size(); ++k) {
            bool fixes = true;
            for (std::size_t s : generators[k]) fixes = fixes && f.apply(s, psi) == psi;
            if (fixes) fixing.push_back(k);
        }
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t a : fixing)
            for (std::size_t b : fixing)
                if (good[a].is_subset_of(good[b]) && is_normal_in(g, good[a], good[b])) pairs.emplace_back(a, b);
        if (!exhaustive_pairs && pairs.size() > 12) {
            std::vector<std::pair<std::size_t, std::size_t>> sample;
            for (std::size_t k = 0; k < 12; ++k) sample.push_back(pairs[uniform_below(rng, pairs.size())]);
            pairs = std::move(sample);
        }
        const Matrix pi_psi = build_pi(space) * psi;
        bool equal = true;
        for (const auto& [a, b] : pairs) {
            const Matrix lo = pi_bar(f, good[a], psi);
            equal = equal && lo == pi_psi && pi_bar(f, good[b], psi) == lo &&
                    pi_bar_via_cosets(f, good[a], good[b], psi) == lo;
        }
        trials[t] = {{"trial", t},
                     {"level", n},
                     {"averaged_over_order", w.order()},
                     {"fixing_subgroups", fixing.size()},
                     {"pairs_checked", pairs.size()},
                     {"exhaustive_pairs", exhaustive_pairs},
                     {"psi_hash", fnv1a_hex(to_json(psi).dump())},
                     {"passed", equal && !pairs.empty()}};
    });
    std::size_t passed = 0;
    for (const auto& j : trials) passed += j.at("passed").get<bool>();
    result.report["trials"] = trials;
    finish(result, passed, trials.size() - passed, problems);
    return result;
}

CampaignResult splitting_campaign(const CampaignConfig& cfg, const Instance& inst, bool section) {
    const CampaignKind kind = section ? CampaignKind::Splitting : CampaignKind::Retraction;
    CampaignResult result;
    result.report = base_report(cfg, kind, inst);
    std::vector<json> trials(cfg.trials);
    const ExtensionOptions options{cfg.caps.max_extension_dim, cfg.expect_bad_characteristic};
    const bool compare_single = !section && inst.family->num_levels() > 1;
    parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
        std::mt19937_64 rng = trial_rng(cfg.seed, t);
        const std::uint64_t ext_seed = rng();
        json j{{"trial", t}, {"extension_seed", ext_seed}};
        try {
            const Extension ext = random_extension(*inst.action, cfg.field, ext_seed, options);
            j["dims"] = {ext.sub->dim(), ext.middle->dim(), ext.quotient->dim()};
            j["extension_hash"] = ext.hash();
            const SplittingCertificate cert = section ? construct_global_section(ext, *inst.action, *inst.family)
                                                      : construct_global_retraction(ext, *inst.action, *inst.family);
            j["certificate"] = cert.to_json();
            bool ok = cert.all_passed();
            if (compare_single) {
                // Level-wise pieces against a single-shot retraction built on
                // the exhaustive top level alone: both restrict to p_n on W'.
                std::vector<std::vector<Subgroup>> top;
                top.emplace_back();
                for (std::size_t x = 0; x < inst.family->num_vertices(); ++x)
                    top.back().push_back(inst.family->at(inst.family->num_levels() - 1, x));
                const auto single = construct_global_retraction(ext, *inst.action, LevelFamily(*inst.action, top));
                bool agrees = single.all_passed();
                for (const Matrix& r_n : retraction_pieces(ext, *inst.action, *inst.family)) {
                    const Matrix p_n = r_n * ext.i;
                    agrees = agrees && p_n * single.map * ext.i == p_n;
                }
                j["levelwise_agrees_with_single_shot"] = agrees;
                ok = ok && agrees;
            }
            if (cfg.expect_bad_characteristic) j["problem"] = "expected BadCharacteristic, got a certificate";
            j["passed"] = ok && !cfg.expect_bad_characteristic;
        } catch (const BadCharacteristic& e) {
            j["bad_characteristic"] = bad_characteristic_json(e);
            j["passed"] = cfg.expect_bad_characteristic && e.subgroup_order() % e.characteristic() == 0;
        } catch (const NotExhaustive& e) {
            j["error"] = e.what();
            j["passed"] = false;
        } catch (const NotIncreasing& e) {
            j["error"] = e.what();
            j["passed"] = false;
        }
        trials[t] = std::move(j);
    });
    std::size_t passed = 0;
    for (const auto& j : trials) passed += j.at("passed").get<bool>();
    result.report["trials"] = trials;
    finish(result, passed, trials.size() - passed, {});
    return result;
}

json make_fixture(const CampaignConfig& cfg, std::size_t trial, std::size_t level, const Subcomplex& original,
                  const Subcomplex& minimized, const SupportVerification& rec) {
    return {{"schema", fixture_schema},
            {"kind", "support-projection"},
            {"config", cfg.raw},
            {"trial", trial},
            {"level", level},
            {"original", original.to_json()},
            {"subcomplex", minimized.to_json()},
            {"record", rec.to_json()}};
}

CampaignResult fuzz_campaign(const CampaignConfig& cfg, const Instance& inst) {
    CampaignResult result;
    result.report = base_report(cfg, CampaignKind::Fuzz, inst);
    if (!inst.tree) throw ConfigError("config field 'complex': the fuzz campaign needs a tree");
    std::vector<IdempotentSystem> systems;
    try {
        systems = systems_for(inst);
    } catch (const BadCharacteristic& e) {
        bad_characteristic_outcome(cfg, e, result);
        return result;
    }
    std::vector<std::string> problems;
    if (cfg.expect_bad_characteristic) problems.push_back("expected BadCharacteristic, none was raised");
    const Complex& c = *inst.complex;
    std::vector<json> trials(cfg.trials);
    std::vector<std::optional<Subcomplex>> failing(cfg.trials);
    parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
        std::mt19937_64 rng = trial_rng(cfg.seed, t);
        const std::size_t n = t % systems.size();
        std::vector<std::size_t> cells;
        for (std::size_t v = 0; v < c.num_vertices(); ++v)
            if (uniform_below(rng, 3) == 0) cells.push_back(v);
        while (cells.size() < 2) {
            const std::size_t v = uniform_below(rng, c.num_vertices());
            if (std::find(cells.begin(), cells.end(), v) == cells.end()) cells.push_back(v);
        }
        std::sort(cells.begin(), cells.end());
        for (std::size_t e = c.num_vertices(); e < c.size(); ++e) {
            const auto& vs = c.vertices(e);
            const bool inside = std::all_of(vs.begin(), vs.end(), [&](std::size_t v) {
                return std::binary_search(cells.begin(), cells.end(), v);
            });
            if (inside && uniform_below(rng, 2) == 0) cells.push_back(e);
        }
        // Every fourth trial is a convex control.
        const Subcomplex s = t % 4 == 3 ? random_convex_subcomplex(inst.complex, rng)
                                        : Subcomplex::closure(inst.complex, cells);
        const auto rec = verify_support_projection(systems[n], s);
        json j = support_trial_json(t, n, s, rec);
        const bool convex = rec.convex == true;
        // Convex draws are controls and must pass; non-convex failures are data.
        j["passed"] = !convex || rec.all();
        j["control"] = convex;
        j["counterexample"] = !convex && !rec.all();
        if (!convex && !rec.all()) failing[t] = s;
        trials[t] = std::move(j);
    });

    json fixtures = json::array();
    std::size_t counterexamples = 0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        if (!failing[t]) continue;
        ++counterexamples;
        if (fixtures.size() >= cfg.caps.max_fixtures) continue;
        const std::size_t n = t % systems.size();
        const IdempotentSystem& sys = systems[n];
        const Subcomplex small = shrink_subcomplex(
            *failing[t], [&](const Subcomplex& x) { return !verify_support_projection(sys, x).all(); });
        const json fixture = make_fixture(cfg, t, n, *failing[t], small, verify_support_projection(sys, small));
        const bool replays = replay_fixture(fixture, cfg.base_dir);
        if (!replays) problems.push_back("fixture for trial " + std::to_string(t) + " does not replay");
        const std::string name = "fixtures/fuzz-" + std::to_string(t) + ".json";
        fixtures.push_back({{"file", name},
                            {"trial", t},
                            {"original_cells", failing[t]->size()},
                            {"minimized_cells", small.cells()},
                            {"replays", replays}});
        result.fixtures.emplace_back(name, fixture);
    }
    result.report["counterexamples"] = counterexamples;
    result.report["fixtures"] = fixtures;
    result.report["trials"] = trials;
    std::size_t passed = 0;
    for (const auto& j : trials) passed += j.at("passed").get<bool>();
    finish(result, passed, trials.size() - passed, problems);
    return result;
}

struct FixtureContext {
    CampaignConfig cfg;
    Instance inst;
    std::vector<IdempotentSystem> systems;
    std::size_t level = 0;
};

FixtureContext load_fixture(const json& fixture, const std::string& base_dir) {
    if (!fixture.is_object() || fixture.value("schema", "") != fixture_schema)
        throw ParseError("not a fixture (schema '" + std::string(fixture_schema) + "' expected)");
    if (fixture.value("kind", "") != "support-projection") throw ParseError("unsupported fixture kind");
    FixtureContext ctx{CampaignConfig::parse(fixture.at("config"), base_dir), {}, {}, 0};
    ctx.inst = build_instance(ctx.cfg);
    ctx.systems = systems_for(ctx.inst);
    ctx.level = fixture.at("level").get<std::size_t>();
    if (ctx.level >= ctx.systems.size()) throw ParseError("fixture level out of range");
    return ctx;
}

}  // namespace

// ------------------------------------------------------------------- config

CampaignKind parse_campaign_kind(const std::string& name) {
    if (name == "support-projection" || name == "verify-support-projection") return CampaignKind::SupportProjection;
    if (name == "resolution" || name == "run-resolution") return CampaignKind::Resolution;
    if (name == "splitting" || name == "run-splitting") return CampaignKind::Splitting;
    if (name == "retraction" || name == "run-retraction") return CampaignKind::Retraction;
    if (name == "fuzz") return CampaignKind::Fuzz;
    throw ConfigError("config field 'campaign': unknown campaign '" + name + "'");
}

std::string campaign_name(CampaignKind kind) {
    switch (kind) {
        case CampaignKind::SupportProjection: return "support-projection";
        case CampaignKind::Resolution: return "resolution";
        case CampaignKind::Splitting: return "splitting";
        case CampaignKind::Retraction: return "retraction";
        case CampaignKind::Fuzz: return "fuzz";
    }
    return "?";
}

CampaignConfig CampaignConfig::parse(const json& j, const std::string& base_dir) {
    validate_structure(j);
    CampaignConfig cfg;
    cfg.raw = j;
    cfg.base_dir = base_dir;
    if (j.contains("campaign")) cfg.campaign = parse_campaign_kind(get_string(j.at("campaign"), "campaign"));
    cfg.seed = get_uint(j.at("seed"), "seed");
    try {
        cfg.field = FieldSpec::parse(j.contains("field") ? get_string(j.at("field"), "field") : "Q");
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        bad_field("field", e.what());
    }
    if (j.contains("trials")) cfg.trials = get_positive(j.at("trials"), "trials");
    if (j.contains("workers")) cfg.workers = get_positive(j.at("workers"), "workers");
    if (j.contains("expect_bad_characteristic"))
        cfg.expect_bad_characteristic = get_bool(j.at("expect_bad_characteristic"), "expect_bad_characteristic");
    if (j.contains("caps")) {
        const json& c = j.at("caps");
        auto cap = [&](const char* key, std::size_t& slot) {
            if (c.contains(key)) slot = get_positive(c.at(key), std::string("caps.") + key);
        };
        cap("max_vertices", cfg.caps.max_vertices);
        cap("max_group_order", cfg.caps.max_group_order);
        cap("max_rep_dim", cfg.caps.max_rep_dim);
        cap("max_subcomplexes", cfg.caps.max_subcomplexes);
        cap("max_extension_dim", cfg.caps.max_extension_dim);
        cap("max_fixtures", cfg.caps.max_fixtures);
    }
    return cfg;
}

CampaignConfig CampaignConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    const auto dir = std::filesystem::path(path).parent_path();
    return parse(j, dir.empty() ? "." : dir.string());
}

CampaignConfig CampaignConfig::with_overrides(std::optional<std::uint64_t> seed, std::optional<std::size_t> trials,
                                              std::optional<bool> expect_bad) const {
    json j = raw;
    if (seed) j["seed"] = *seed;
    if (trials) j["trials"] = *trials;
    if (expect_bad) j["expect_bad_characteristic"] = *expect_bad;
    return parse(j, base_dir);
}

Instance build_instance(const CampaignConfig& cfg) {
    const json& j = cfg.raw;
    Instance inst;
    const json& cj = j.at("complex");
    try {
        if (cj.contains("tree")) {
            const auto q = cj.at("tree").at("q").get<std::size_t>(), r = cj.at("tree").at("r").get<std::size_t>();
            inst.complex = std::make_shared<const Complex>(build_regular_tree_ball(q, r, cfg.caps.max_vertices));
        } else {
            const auto path = std::filesystem::path(cfg.base_dir) / cj.at("file").get<std::string>();
            std::ifstream in(path);
            if (!in) bad_field("complex.file", "cannot read '" + path.string() + "'");
            inst.complex = std::make_shared<const Complex>(Complex::from_json(json::parse(in)));
            if (inst.complex->num_vertices() > cfg.caps.max_vertices)
                bad_field("complex.file", "vertex count exceeds caps.max_vertices");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        bad_field("complex", e.what());
    }
    inst.tree = inst.complex->is_tree();
    if (!inst.tree && !cj.value("assume_convex", false))
        bad_field("complex.assume_convex", "must be true for a complex that is not a tree");

    try {
        std::vector<Permutation> gens;
        const json g = j.value("group", json("automorphisms"));
        if (g.is_string()) {
            if (!inst.tree) bad_field("group", "automorphism generators are only available for trees");
            gens = g == "rotations" ? tree_rotation_generators(*inst.complex)
                                    : tree_automorphism_generators(*inst.complex);
        } else {
            for (const auto& s : g.at("generators"))
                gens.push_back(parse_cycles(s.get<std::string>(), inst.complex->num_vertices()));
        }
        inst.group = std::make_shared<const FiniteGroup>(
            FiniteGroup::from_permutations(inst.complex->num_vertices(), gens, cfg.caps.max_group_order));
        inst.action = std::make_shared<const CellAction>(CellAction::from_permutation_group(inst.group, inst.complex));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        bad_field("group", e.what());
    }

    try {
        const json r = j.value("representation", json{{"kinds", {"permutation-cells"}}});
        std::optional<LinearRep> rep;
        if (r.contains("explicit")) {
            const json& ex = r.at("explicit");
            std::vector<Matrix> images;
            for (const auto& m : ex.at("generator_images")) images.push_back(matrix_from_json(m));
            rep = LinearRep::from_generator_images(inst.group, cfg.field, ex.at("dim").get<std::size_t>(), images);
        } else {
            for (const auto& k : r.at("kinds")) {
                LinearRep part = build_kind(k.get<std::string>(), *inst.action, cfg.field, cfg.caps);
                rep = rep ? LinearRep::direct_sum(*rep, part) : part;
                if (rep->dim() > cfg.caps.max_rep_dim)
                    bad_field("representation", "dimension exceeds caps.max_rep_dim");
            }
            if (r.value("conjugate", false)) {
                std::mt19937_64 rng = trial_rng(cfg.seed, ~std::uint64_t{0});
                rep = LinearRep::conjugated(*rep, random_unimodular(cfg.field, rep->dim(), rng));
            }
        }
        if (rep->dim() > cfg.caps.max_rep_dim) bad_field("representation", "dimension exceeds caps.max_rep_dim");
        inst.rep = std::make_shared<const LinearRep>(std::move(*rep));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        bad_field("representation", e.what());
    }

    try {
        const json l = j.value("levels", json{{"depth", "exhaustive"}});
        const std::size_t offset = l.value("radius_offset", std::size_t{1});
        if (l.contains("explicit")) {
            std::vector<std::vector<Subgroup>> subgroups;
            for (const auto& level : l.at("explicit")) {
                subgroups.emplace_back();
                for (const auto& elems : level) {
                    Subgroup u{elems.get<std::vector<std::size_t>>(), ""};
                    std::sort(u.elements.begin(), u.elements.end());
                    for (std::size_t e : u.elements)
                        if (e >= inst.group->order()) bad_field("levels.explicit", "element index out of range");
                    u.label = "U[" + std::to_string(subgroups.size() - 1) + "][" +
                              std::to_string(subgroups.back().size()) + "]";
                    subgroups.back().push_back(std::move(u));
                }
            }
            inst.family = std::make_shared<const LevelFamily>(*inst.action, std::move(subgroups));
        } else if (!inst.tree) {
            bad_field("levels", "ball-stabilizer levels need a tree; give 'explicit' levels");
        } else if (!l.contains("depth") || l.at("depth").is_string()) {
            inst.family = std::make_shared<const LevelFamily>(
                LevelFamily::exhaustive_ball_stabilizers(*inst.action, offset));
        } else {
            inst.family = std::make_shared<const LevelFamily>(
                LevelFamily::ball_stabilizers(*inst.action, l.at("depth").get<std::size_t>(), offset));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        bad_field("levels", e.what());
    }
    return inst;
}

CampaignResult run_campaign(const CampaignConfig& config, CampaignKind kind) {
    const Instance inst = build_instance(config);
    switch (kind) {
        case CampaignKind::SupportProjection: return support_projection_campaign(config, inst);
        case CampaignKind::Resolution: return resolution_campaign(config, inst);
        case CampaignKind::Splitting: return splitting_campaign(config, inst, true);
        case CampaignKind::Retraction: return splitting_campaign(config, inst, false);
        case CampaignKind::Fuzz: return fuzz_campaign(config, inst);
    }
    throw ConfigError("unknown campaign");
}

bool replay_fixture(const json& fixture, const std::string& base_dir) {
    const FixtureContext ctx = load_fixture(fixture, base_dir);
    const Subcomplex s = Subcomplex::from_json(ctx.inst.complex, fixture.at("subcomplex"));
    return verify_support_projection(ctx.systems[ctx.level], s).to_json() == fixture.at("record");
}

json shrink_fixture(const json& fixture, const std::string& base_dir) {
    const FixtureContext ctx = load_fixture(fixture, base_dir);
    const IdempotentSystem& sys = ctx.systems[ctx.level];
    const Subcomplex s = Subcomplex::from_json(ctx.inst.complex, fixture.at("subcomplex"));
    if (verify_support_projection(sys, s).all()) return fixture;
    const Subcomplex small =
        shrink_subcomplex(s, [&](const Subcomplex& x) { return !verify_support_projection(sys, x).all(); });
    json out = fixture;
    out["subcomplex"] = small.to_json();
    out["record"] = verify_support_projection(sys, small).to_json();
    return out;
}

std::string render_summary(const json& report) {
    std::ostringstream out;
    out << "campaign   " << report.value("campaign", "?") << "\n";
    if (report.contains("instance")) {
        const json& i = report.at("instance");
        out << "instance   " << i.at("vertices") << " vertices, " << i.at("cells") << " cells, |G| = "
            << i.at("group_order") << ", dim V = " << i.at("representation_dim") << ", field "
            << i.at("field").get<std::string>() << ", " << i.at("levels") << " level(s)"
            << (i.at("exhaustive").get<bool>() ? " (exhaustive)" : "") << "\n";
    }
    if (report.contains("summary")) {
        const json& s = report.at("summary");
        out << "trials     " << s.at("trials") << " run, " << s.at("passed") << " passed, " << s.at("failed")
            << " failed\n";
        for (const auto& p : s.at("problems")) out << "problem    " << p.get<std::string>() << "\n";
    }
    if (report.contains("bad_characteristic")) {
        const json& b = report.at("bad_characteristic");
        out << "bad field  " << b.at("subgroup").get<std::string>() << " has order " << b.at("order")
            << ", divisible by " << b.at("characteristic") << "\n";
    }
    if (report.contains("counterexamples"))
        out << "found      " << report.at("counterexamples") << " non-convex counterexample(s), "
            << report.at("fixtures").size() << " archived\n";
    for (const auto& n : report.value("notes", json::array())) out << "note       " << n.get<std::string>() << "\n";
    out << "status     " << report.value("status", "?") << "\n";
    return out.str();
}

}  // namespace equisplit
