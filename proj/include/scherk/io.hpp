#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "scherk/domains.hpp"
#include "scherk/fatou.hpp"
#include "scherk/solver.hpp"

namespace scherk {

using Json = nlohmann::ordered_json;

// Compact JSON with numbers printed as %.17g, keys in insertion order and
// non-finite numbers as null. Output ends with a newline.
std::string canonical_json(const Json& value);

std::string format_number(double v);

Json to_json(const ScherkPolygon& polygon);
// Throws DomainError on malformed or invalid input.
ScherkPolygon polygon_from_json(const Json& j);
ScherkPolygon read_domain(const std::string& path);

Json to_json(const AdmissibilityReport& report);
Json manifest_json(const ExampleStep& step);
Json to_json(const SolveInfo& info);
Json to_json(const HypothesisReport& report);
Json to_json(const FatouReport& report);

// x,y,u,ux,uy per node.
std::string field_csv(const Field& field);

struct CsvSample {
    Vec2 p;
    double u = 0.0;
    Vec2 grad;
};

// Throws DomainError on malformed input.
std::vector<CsvSample> parse_field_csv(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace scherk
