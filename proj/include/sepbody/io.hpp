#pragma once

#include "sepbody/directional.hpp"
#include "sepbody/geometry.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace sepbody {

/// Body text: JSON {"vertices": [[x,y(,z)], ...]}, a bare JSON array of
/// vertices, or plain text with one vertex per line (commas or blanks
/// between coordinates, '#' starts a comment).
VPolytope parse_body(std::string_view text);
VPolytope load_body(const std::filesystem::path& path);
nlohmann::ordered_json body_to_json(const VPolytope& body);

/// Presets "axes2d", "axes3d", "sigma2d:<order>", "sigma3d:<order>",
/// "facets:<bodyfile>"; anything else is read as a distribution file
/// {"kind", "atoms": [{"u": [...], "w": ...}], "order"?}. Atom weights in a
/// file are totals for the pair {u, -u}.
DirectionalDistribution parse_phi(const std::string& spec);
DirectionalDistribution phi_from_json(const nlohmann::json& j);
nlohmann::ordered_json phi_to_json(const DirectionalDistribution& phi);

/// {"u": [...], "tau": t, "orientation": "<=" or ">="}.
nlohmann::ordered_json halfspace_to_json(const Halfspace& h);
Halfspace halfspace_from_json(const nlohmann::json& j);
nlohmann::ordered_json hpolytope_to_json(const HPolytope& p);

/// "x,y[,z]".
Vector parse_point(std::string_view text);

/// Shortest decimal form that reads back to the same double.
std::string format_number(double x);

}  // namespace sepbody
