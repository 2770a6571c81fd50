#include "sepbody/io.hpp"

#include "sepbody/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace sepbody {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Vector vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorKind::InvalidArgument, "expected a coordinate array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorKind::InvalidArgument, "coordinates must be numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

std::vector<double> to_std(const Vector& v) {
  std::vector<double> out(v.data(), v.data() + v.size());
  for (double& x : out) x += 0.0;  // no negative zeros in output
  return out;
}

std::vector<Vector> parse_text_vertices(std::string_view text) {
  std::vector<Vector> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& c : line)
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    std::istringstream ls(line);
    std::vector<double> coords;
    std::string tok;
    while (ls >> tok) {
      double x = 0.0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
      if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw Error(ErrorKind::InvalidArgument, "bad number '" + tok + "' in body text");
      coords.push_back(x);
    }
    if (coords.empty()) continue;
    out.push_back(Eigen::Map<Vector>(coords.data(), static_cast<Eigen::Index>(coords.size())));
  }
  return out;
}

}  // namespace

VPolytope parse_body(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) throw Error(ErrorKind::InvalidBody, "empty body description");
  std::vector<Vector> vertices;
  if (text[first] == '{' || text[first] == '[') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::InvalidArgument, std::string("body JSON: ") + e.what());
    }
    const nlohmann::json& list = j.is_object() ? j.at("vertices") : j;
    if (!list.is_array()) throw Error(ErrorKind::InvalidArgument, "vertices must be an array");
    for (const auto& v : list) vertices.push_back(vector_from_json(v));
  } else {
    vertices = parse_text_vertices(text);
  }
  return VPolytope(std::move(vertices));
}

VPolytope load_body(const std::filesystem::path& path) { return parse_body(read_file(path)); }

nlohmann::ordered_json body_to_json(const VPolytope& body) {
  nlohmann::ordered_json j;
  j["vertices"] = nlohmann::ordered_json::array();
  for (const auto& v : body.vertices()) j["vertices"].push_back(to_std(v));
  return j;
}

DirectionalDistribution parse_phi(const std::string& spec) {
  if (spec == "axes2d") return make_axes(2);
  if (spec == "axes3d") return make_axes(3);
  for (const char* prefix : {"sigma2d:", "sigma3d:"}) {
    const std::string_view p(prefix);
    if (spec.starts_with(p)) {
      int order = 0;
      const char* begin = spec.data() + p.size();
      const char* end = spec.data() + spec.size();
      const auto [ptr, ec] = std::from_chars(begin, end, order);
      if (ec != std::errc() || ptr != end || begin == end)
        throw Error(ErrorKind::InvalidArgument, "bad quadrature order in '" + spec + "'");
      return make_sigma(p[5] == '2' ? 2 : 3, order);
    }
  }
  if (spec.starts_with("facets:")) return make_facet_measure(load_body(spec.substr(7)));
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(spec));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::InvalidArgument, "distribution file " + spec + ": " + e.what());
  }
  return phi_from_json(j);
}

DirectionalDistribution phi_from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.value("kind", "discrete");
    if (kind == "sigma" && !j.contains("atoms"))
      return make_sigma(j.at("dim").get<std::size_t>(), j.at("order").get<int>());
    std::vector<std::pair<Vector, double>> pairs;
    for (const auto& a : j.at("atoms")) pairs.emplace_back(vector_from_json(a.at("u")), a.at("w").get<double>());
    return make_discrete(pairs);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("distribution JSON: ") + e.what());
  }
}

nlohmann::ordered_json phi_to_json(const DirectionalDistribution& phi) {
  nlohmann::ordered_json j;
  switch (phi.kind()) {
    case DirectionalDistribution::Kind::Discrete: j["kind"] = "discrete"; break;
    case DirectionalDistribution::Kind::Sigma: j["kind"] = "sigma"; break;
    case DirectionalDistribution::Kind::FacetMeasure: j["kind"] = "facets"; break;
  }
  if (phi.order() > 0) j["order"] = phi.order();
  j["dim"] = phi.dim();
  j["atoms"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < phi.size(); ++i) {
    nlohmann::ordered_json a;
    a["u"] = to_std(phi.atom(i));
    a["w"] = 2.0 * phi.weights()(static_cast<Eigen::Index>(i));
    j["atoms"].push_back(std::move(a));
  }
  return j;
}

nlohmann::ordered_json halfspace_to_json(const Halfspace& h) {
  nlohmann::ordered_json j;
  j["u"] = to_std(h.u);
  j["tau"] = h.tau + 0.0;
  j["orientation"] = h.orientation == Orientation::LessEqual ? "<=" : ">=";
  return j;
}

Halfspace halfspace_from_json(const nlohmann::json& j) {
  try {
    const std::string o = j.value("orientation", "<=");
    if (o != "<=" && o != ">=") throw Error(ErrorKind::InvalidArgument, "orientation must be <= or >=");
    return Halfspace(vector_from_json(j.at("u")), j.at("tau").get<double>(),
                     o == "<=" ? Orientation::LessEqual : Orientation::GreaterEqual);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("halfspace JSON: ") + e.what());
  }
}

nlohmann::ordered_json hpolytope_to_json(const HPolytope& p) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& h : p.halfspaces) j.push_back(halfspace_to_json(h));
  return j;
}

Vector parse_point(std::string_view text) {
  std::vector<double> coords;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view tok = text.substr(pos, end - pos);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
      throw Error(ErrorKind::InvalidArgument, "bad coordinate list '" + std::string(text) + "'");
    coords.push_back(x);
    pos = end + 1;
  }
  return Eigen::Map<Vector>(coords.data(), static_cast<Eigen::Index>(coords.size()));
}

std::string format_number(double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x + 0.0);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace sepbody
