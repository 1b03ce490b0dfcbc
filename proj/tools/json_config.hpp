#pragma once

#include <CLI11.hpp>
#include <istream>
#include <json.hpp>
#include <string>
#include <vector>

// Reads a flat JSON object of option values. Keys are option long names
// (underscores and dashes are interchangeable); arrays become repeated values.
inline std::vector<CLI::ConfigItem> read_json_config(std::istream& input) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(input);
    } catch (const nlohmann::json::parse_error& e) {
        throw CLI::ConversionError("config", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw CLI::ConversionError("config", "top-level JSON value must be an object");

    auto scalar = [](const std::string& key, const nlohmann::json& value) -> std::string {
        if (value.is_string()) return value.get<std::string>();
        if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
        if (value.is_number()) return value.dump();
        throw CLI::ConversionError(key, "config values must be strings, numbers, booleans or arrays of them");
    };
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : doc.items()) {
        CLI::ConfigItem item;
        item.name = key;
        for (auto& c : item.name)
            if (c == '_') c = '-';
        if (value.is_array()) {
            for (const auto& element : value) item.inputs.push_back(scalar(key, element));
        } else {
            item.inputs.push_back(scalar(key, value));
        }
        items.push_back(std::move(item));
    }
    return items;
}
