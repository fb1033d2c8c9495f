#pragma once

// Seed manifest for coupling simulations: a JSON list of
//   {"model": {"kind": "hypergeometric", "N": 4, "m": 2, "n": 2},
//    "j": 0, "seed": 42, "trials": 1000000}
// Occupancy models use {"kind": "occupancy", "n": ..., "m": ...}.

#include "tailbound/dependent_models.hpp"

#include <json.hpp>  // vendored nlohmann/json

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace tailbound {

struct SeedEntry {
    DependentModel model;
    std::size_t j = 0;
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;
};

inline DependentModel model_from_json(const nlohmann::json& obj) {
    const std::string kind = obj.at("kind").get<std::string>();
    if (kind == "hypergeometric") {
        Hypergeometric h{obj.at("N").get<int>(), obj.at("m").get<int>(), obj.at("n").get<int>()};
        validate(h);
        return h;
    }
    if (kind == "occupancy") {
        Occupancy o{obj.at("n").get<int>(), obj.at("m").get<int>()};
        validate(o);
        return o;
    }
    if (kind == "conditioned-binomial") {
        ConditionedBinomial c{obj.at("n").get<int>(), parse_rational(obj.at("p").get<std::string>()), obj.at("k").get<int>()};
        validate(c);
        return c;
    }
    if (kind == "barbour") return Barbour{};
    throw std::invalid_argument("unknown model kind '" + kind + "'");
}

inline nlohmann::ordered_json model_to_json(const DependentModel& model) {
    return std::visit(
        [](const auto& m) -> nlohmann::ordered_json {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, Hypergeometric>)
                return {{"kind", "hypergeometric"}, {"N", m.N}, {"m", m.m}, {"n", m.n}};
            else if constexpr (std::is_same_v<M, Occupancy>)
                return {{"kind", "occupancy"}, {"n", m.n}, {"m", m.m}};
            else if constexpr (std::is_same_v<M, ConditionedBinomial>)
                return {{"kind", "conditioned-binomial"}, {"n", m.n}, {"p", m.p.str()}, {"k", m.k}};
            else
                return {{"kind", "barbour"}};
        },
        model);
}

inline std::vector<SeedEntry> parse_seed_manifest(const nlohmann::json& doc) {
    if (!doc.is_array()) throw std::invalid_argument("seed manifest must be a JSON array");
    std::vector<SeedEntry> out;
    for (const auto& item : doc) {
        SeedEntry e{model_from_json(item.at("model")), item.at("j").get<std::size_t>(),
                    item.at("seed").get<std::uint64_t>(), item.at("trials").get<std::uint64_t>()};
        if (e.j >= static_cast<std::size_t>(indicator_count(e.model)))
            throw std::invalid_argument("seed manifest: j out of range for " + describe(e.model));
        out.push_back(std::move(e));
    }
    return out;
}

inline std::vector<SeedEntry> load_seed_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open seed manifest '" + path + "'");
    return parse_seed_manifest(nlohmann::json::parse(in));
}

inline nlohmann::ordered_json to_json(const SeedEntry& e) {
    return {{"model", model_to_json(e.model)}, {"j", e.j}, {"seed", e.seed}, {"trials", e.trials}};
}

}  // namespace tailbound
