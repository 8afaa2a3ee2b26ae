// Copyright 2026 The aibomgen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "aibomgen/link.hpp"

#include "aibomgen/errors.hpp"

namespace aibomgen {

Json LinkFile::to_json() const
{
    Json mats = Json::object();
    for (const auto& [name, digest] : materials) mats[name] = digest.to_json();
    Json prods = Json::object();
    for (const auto& [name, digest] : products) prods[name] = digest.to_json();
    Json cmd = Json::array();
    for (const auto& part : command) cmd.push_back(part);
    return Json{{"step_name", step_name},
                {"command", cmd},
                {"materials", mats},
                {"products", prods},
                {"byproducts",
                 Json{{"return_code", return_code},
                      {"duration_seconds", duration_seconds}}},
                {"environment", environment.to_json()}};
}

LinkFile LinkFile::from_json(const Json& j)
{
    auto violations = validate_link_schema(j);
    if (!violations.empty())
        throw Error(Errc::MalformedDocument, "link: " + violations.front());
    LinkFile link;
    link.step_name = j["step_name"].get<std::string>();
    for (const auto& part : j["command"])
        link.command.push_back(part.get<std::string>());
    for (auto it = j["materials"].begin(); it != j["materials"].end(); ++it)
        link.materials[it.key()] = Digest::from_json(it.value());
    for (auto it = j["products"].begin(); it != j["products"].end(); ++it)
        link.products[it.key()] = Digest::from_json(it.value());
    link.return_code = j["byproducts"]["return_code"].get<int64_t>();
    link.duration_seconds =
        j["byproducts"]["duration_seconds"].get<std::string>();
    link.environment = EnvironmentSnapshot::from_json(j["environment"]);
    return link;
}

std::string LinkFile::job_id_from_command() const
{
    for (size_t i = 0; i + 1 < command.size(); ++i)
        if (command[i] == "--job") return command[i + 1];
    return "";
}

std::vector<std::string> validate_link_schema(const Json& doc)
{
    std::vector<std::string> out;
    if (!doc.is_object()) {
        out.push_back("document is not an object");
        return out;
    }
    auto require = [&](const char* key, Json::value_t kind) -> const Json* {
        if (!doc.contains(key)) {
            out.push_back(std::string("missing field: ") + key);
            return nullptr;
        }
        if (doc[key].type() != kind) {
            out.push_back(std::string("wrong type: ") + key);
            return nullptr;
        }
        return &doc[key];
    };

    if (const Json* step = require("step_name", Json::value_t::string)) {
        if (step->get<std::string>() != "train")
            out.push_back("step_name must be \"train\"");
    }
    if (const Json* cmd = require("command", Json::value_t::array)) {
        for (const auto& part : *cmd)
            if (!part.is_string()) {
                out.push_back("command entries must be strings");
                break;
            }
    }
    auto check_digest_map = [&](const char* key) {
        if (!doc.contains(key) || !doc[key].is_object()) {
            out.push_back(std::string("missing digest map: ") + key);
            return;
        }
        for (auto it = doc[key].begin(); it != doc[key].end(); ++it) {
            if (!valid_artifact_name(it.key())) {
                out.push_back(std::string(key) + ": bad artifact name " + it.key());
                continue;
            }
            try {
                Digest::from_json(it.value());
            } catch (const Error&) {
                out.push_back(std::string(key) + ": bad digest for " + it.key());
            }
        }
    };
    check_digest_map("materials");
    check_digest_map("products");

    if (doc.contains("materials") && doc.contains("products") &&
        doc["materials"].is_object() && doc["products"].is_object()) {
        for (auto it = doc["materials"].begin(); it != doc["materials"].end(); ++it)
            if (doc["products"].contains(it.key()))
                out.push_back("name in both materials and products: " + it.key());
    }

    if (const Json* by = require("byproducts", Json::value_t::object)) {
        if (!by->contains("return_code") || !(*by)["return_code"].is_number_integer())
            out.push_back("byproducts.return_code must be an integer");
        if (!by->contains("duration_seconds") ||
            !(*by)["duration_seconds"].is_string() ||
            !string_to_double((*by)["duration_seconds"].get<std::string>()))
            out.push_back("byproducts.duration_seconds must be a decimal string");
    }
    if (doc.contains("environment")) {
        try {
            EnvironmentSnapshot::from_json(doc["environment"]);
        } catch (const Error& e) {
            out.push_back(std::string("environment: ") + e.what());
        }
    } else {
        out.push_back("missing field: environment");
    }
    return out;
}

LinkFile create_link(const JobRecord& job, const EnvironmentSnapshot& env,
                     const std::vector<ArtifactRef>& materials,
                     const std::vector<ArtifactRef>& products)
{
    if (job.state != JobState::Running)
        throw Error(Errc::IllegalTransition, "link requires a RUNNING job");
    if (products.empty())
        throw Error(Errc::MissingProduct, "a completed job must yield outputs");

    LinkFile link;
    link.step_name = "train";
    link.command = {"reftrainer", "train", "--job", job.job_id};
    link.environment = env;
    link.return_code = 0;

    auto start = parse_rfc3339(env.wall_clock_start);
    auto end = parse_rfc3339(env.wall_clock_end);
    double duration = 0;
    if (start && end)
        duration = std::chrono::duration<double>(*end - *start).count();
    link.duration_seconds = double_to_string(duration);

    auto insert_all = [](std::map<std::string, Digest>& into,
                         const std::vector<ArtifactRef>& refs,
                         const char* side) {
        for (const auto& ref : refs) {
            if (!ref.digest.valid())
                throw Error(Errc::MissingDigest,
                            std::string(side) + " lacks digest: " + ref.name);
            if (!valid_artifact_name(ref.name))
                throw Error(Errc::ValidationFailed, "bad artifact name",
                            {ref.name});
            auto [it, inserted] = into.emplace(ref.name, ref.digest);
            if (!inserted)
                throw Error(Errc::DuplicateArtifact,
                            std::string(side) + " repeats name: " + ref.name);
        }
    };
    insert_all(link.materials, materials, "materials");
    insert_all(link.products, products, "products");
    for (const auto& [name, digest] : link.materials)
        if (link.products.count(name))
            throw Error(Errc::DuplicateArtifact,
                        "name in both materials and products: " + name);
    return link;
}

MatchResult verify_artifact_against_link(const LinkFile& link,
                                         const std::string& name,
                                         std::string_view bytes)
{
    MatchResult result;
    result.name = name;
    const Digest* recorded = nullptr;
    if (auto it = link.materials.find(name); it != link.materials.end())
        recorded = &it->second;
    else if (auto jt = link.products.find(name); jt != link.products.end())
        recorded = &jt->second;
    if (recorded == nullptr) {
        result.status = MatchStatus::UnknownName;
        return result;
    }
    Digest actual = compute_digest(bytes);
    result.expected = *recorded;
    result.actual = actual;
    result.status =
        actual == *recorded ? MatchStatus::Match : MatchStatus::Mismatch;
    return result;
}

}  // namespace aibomgen
