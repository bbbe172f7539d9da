#include "soccerseq/fmaca_classifier.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace soccerseq::fmaca {

using json = nlohmann::ordered_json;

namespace {

json state_to_json(const State& s) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < s.size(); ++i) arr.push_back(s(i));
  return arr;
}

State state_from_json(const json& j) {
  State s(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) s(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return s;
}

json node_to_json(const Node& n) {
  if (n.leaf) return json{{"kind", "leaf"}, {"label", n.label}, {"impure", n.impure}, {"size", n.size}};
  json centroids = json::array();
  for (const auto& c : n.centroids) centroids.push_back(state_to_json(c));
  json children = json::array();
  for (const auto& c : n.children) children.push_back(node_to_json(c));
  return json{{"kind", "internal"},   {"label", n.label},         {"size", n.size},
              {"rules", fca::rule_numbers(n.rules)}, {"k", n.k}, {"centroids", centroids},
              {"children", children}};
}

Node node_from_json(const json& j, std::size_t dimension) {
  Node n;
  const auto kind = j.at("kind").get<std::string>();
  n.label = j.at("label").get<int>();
  n.size = j.at("size").get<std::size_t>();
  if (kind == "leaf") {
    n.impure = j.at("impure").get<bool>();
    return n;
  }
  if (kind != "internal") throw std::runtime_error("unknown tree node kind '" + kind + "'");
  n.leaf = false;
  n.rules = fca::make_rules(j.at("rules").get<std::vector<int>>());
  n.k = j.at("k").get<int>();
  for (const auto& c : j.at("centroids")) n.centroids.push_back(state_from_json(c));
  for (const auto& c : j.at("children")) n.children.push_back(node_from_json(c, dimension));
  if (n.rules.size() != dimension) throw std::runtime_error("node rule vector does not match tree dimension");
  if (n.centroids.size() != n.children.size() || n.children.empty())
    throw std::runtime_error("internal node needs one centroid per child");
  return n;
}

}  // namespace

std::string tree_to_json(const FmacaTree& tree) {
  json classes = json::object();
  for (const auto& [id, name] : tree.class_names) classes[std::to_string(id)] = name;
  json j{{"schema_version", kTreeSchemaVersion},
         {"feature_map_version", tree.feature_map_version},
         {"dimension", tree.dimension},
         {"num_classes", tree.num_classes},
         {"window", tree.window},
         {"goal_class", tree.goal_class},
         {"class_names", classes},
         {"root", node_to_json(tree.root)}};
  return j.dump(2);
}

FmacaTree tree_from_json(std::string_view text) {
  const json j = json::parse(text);
  if (j.value("schema_version", -1) != kTreeSchemaVersion)
    throw std::runtime_error("tree schema_version missing or mismatched");
  FmacaTree tree;
  tree.feature_map_version = j.at("feature_map_version").get<int>();
  tree.dimension = j.at("dimension").get<std::size_t>();
  tree.num_classes = j.at("num_classes").get<int>();
  tree.window = j.at("window").get<std::size_t>();
  tree.goal_class = j.at("goal_class").get<int>();
  for (const auto& [key, value] : j.at("class_names").items()) tree.class_names[std::stoi(key)] = value.get<std::string>();
  tree.root = node_from_json(j.at("root"), tree.dimension);
  return tree;
}

void save_tree(const std::filesystem::path& path, const FmacaTree& tree) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << tree_to_json(tree) << '\n';
}

FmacaTree load_tree(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return tree_from_json(buffer.str());
}

}  // namespace soccerseq::fmaca
