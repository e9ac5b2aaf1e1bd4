#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace relu::testing {

// Validator for the JSON-Schema subset the shipped schemas use: type,
// properties, required, items, enum, const and local $ref. Returns the list
// of violations (empty means valid).
class SchemaChecker {
 public:
  explicit SchemaChecker(nlohmann::json schema) : root_(std::move(schema)) {}

  std::vector<std::string> validate(const nlohmann::json& value) const {
    std::vector<std::string> errors;
    check(root_, value, "$", errors);
    return errors;
  }

 private:
  nlohmann::json root_;

  const nlohmann::json& resolve(const nlohmann::json& schema) const {
    if (schema.contains("$ref")) {
      std::string ref = schema["$ref"].get<std::string>();
      const nlohmann::json* node = &root_;
      // local refs only: "#/a/b"
      std::size_t pos = 2;
      while (pos < ref.size()) {
        std::size_t next = ref.find('/', pos);
        if (next == std::string::npos) next = ref.size();
        node = &(*node)[ref.substr(pos, next - pos)];
        pos = next + 1;
      }
      return *node;
    }
    return schema;
  }

  static bool type_matches(const std::string& type, const nlohmann::json& value) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "boolean") return value.is_boolean();
    if (type == "number") return value.is_number();
    if (type == "integer") return value.is_number_integer() || value.is_number_unsigned();
    if (type == "null") return value.is_null();
    return false;
  }

  void check(const nlohmann::json& raw_schema, const nlohmann::json& value,
             const std::string& path, std::vector<std::string>& errors) const {
    const nlohmann::json& schema = resolve(raw_schema);
    if (schema.contains("const") && value != schema["const"]) {
      errors.push_back(path + ": expected constant " + schema["const"].dump());
      return;
    }
    if (schema.contains("enum")) {
      bool found = false;
      for (const auto& option : schema["enum"]) found = found || option == value;
      if (!found) errors.push_back(path + ": value " + value.dump() + " not in enum");
      return;
    }
    if (schema.contains("type") &&
        !type_matches(schema["type"].get<std::string>(), value)) {
      errors.push_back(path + ": expected type " + schema["type"].get<std::string>());
      return;
    }
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!value.contains(key.get<std::string>())) {
          errors.push_back(path + ": missing required field " + key.get<std::string>());
        }
      }
    }
    if (schema.contains("properties") && value.is_object()) {
      for (const auto& [key, sub] : schema["properties"].items()) {
        if (value.contains(key)) check(sub, value[key], path + "." + key, errors);
      }
    }
    if (schema.contains("items") && value.is_array()) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        check(schema["items"], value[i], path + "[" + std::to_string(i) + "]", errors);
      }
    }
  }
};

}  // namespace relu::testing
