#include "groupsim/hierarchy.hpp"

#include "groupsim/errors.hpp"
#include "groupsim/json_io.hpp"
#include "groupsim/oracle.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace groupsim {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

struct ParsedLine {
    std::string name;
    std::int64_t population = 0;
    std::optional<Characteristic> characteristic;
};

// Strips a trailing "(word)" annotation and returns it.
std::optional<Characteristic> take_suffix(std::string_view& s, std::size_t line) {
    s = trim(s);
    if (s.empty() || s.back() != ')') return std::nullopt;
    const auto open = s.rfind('(');
    if (open == std::string_view::npos) throw MalformedTree(line, "unbalanced parenthesis");
    const auto word = lower(trim(s.substr(open + 1, s.size() - open - 2)));
    auto c = parse_characteristic(word);
    if (!c) throw MalformedTree(line, "unknown characteristic '" + word + "'");
    s = trim(s.substr(0, open));
    return c;
}

std::int64_t parse_population(std::string_view s, std::size_t line) {
    s = trim(s);
    if (s.empty()) throw MalformedTree(line, "missing population");
    std::int64_t value = 0;
    bool any_digit = false;
    char prev = ',';
    for (char ch : s) {
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            if (value > (INT64_MAX - 9) / 10) throw MalformedTree(line, "population overflows");
            value = value * 10 + (ch - '0');
            any_digit = true;
        } else if ((ch == ',' || ch == '_') && std::isdigit(static_cast<unsigned char>(prev))) {
            // separator between digits only
        } else {
            throw MalformedTree(line, "bad population '" + std::string(s) + "'");
        }
        prev = ch;
    }
    if (!any_digit || !std::isdigit(static_cast<unsigned char>(prev))) {
        throw MalformedTree(line, "bad population '" + std::string(s) + "'");
    }
    return value;
}

// "Name: 1,234" with an optional "(characteristic)" suffix.
ParsedLine parse_name_count(std::string_view body, std::size_t line,
                            std::optional<Characteristic> outer) {
    auto c = take_suffix(body, line);
    const auto colon = body.rfind(':');
    if (colon == std::string_view::npos) throw MalformedTree(line, "missing ':'");
    ParsedLine out;
    out.name = std::string(trim(body.substr(0, colon)));
    if (out.name.empty()) throw MalformedTree(line, "empty group name");
    out.population = parse_population(body.substr(colon + 1), line);
    out.characteristic = c ? c : outer;
    return out;
}

// Returns the layer and the text after the marker, or nullopt for an unknown marker.
std::optional<std::pair<int, ParsedLine>> parse_outline_line(std::string_view l, std::size_t line) {
    if (l.rfind("##", 0) == 0) {
        if (l.rfind("###", 0) == 0) return std::nullopt;
        return std::pair{1, parse_name_count(l.substr(2), line, std::nullopt)};
    }
    if (l.rfind("- ", 0) == 0 || l.rfind("* ", 0) == 0) {
        return std::pair{3, parse_name_count(l.substr(2), line, std::nullopt)};
    }
    std::size_t i = 0;
    while (i < l.size() && std::isdigit(static_cast<unsigned char>(l[i]))) ++i;
    if (i == 0 || i >= l.size() || l[i] != '.') return std::nullopt;
    auto rest = trim(l.substr(i + 1));
    if (rest.rfind("**", 0) == 0) {
        const auto close = rest.find("**", 2);
        if (close == std::string_view::npos) throw MalformedTree(line, "unterminated '**'");
        auto after = rest.substr(close + 2);
        auto outer = take_suffix(after, line);
        if (!after.empty()) throw MalformedTree(line, "text after group");
        return std::pair{2, parse_name_count(rest.substr(2, close - 2), line, outer)};
    }
    return std::pair{2, parse_name_count(rest, line, std::nullopt)};
}

std::string with_commas(std::int64_t n) {
    auto digits = std::to_string(n);
    std::string out;
    const auto len = digits.size();
    for (std::size_t i = 0; i < len; ++i) {
        if (i > 0 && (len - i) % 3 == 0) out.push_back(',');
        out.push_back(digits[i]);
    }
    return out;
}

std::string suffix(const GroupSpec& s) {
    return s.characteristic ? " (" + std::string(to_string(*s.characteristic)) + ")" : "";
}

std::string file_stem(const std::string& country, Domain domain) {
    return country + "_" + std::string(to_string(domain));
}

}  // namespace

std::size_t GroupTree::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return n.children.empty(); }));
}

GroupTree parse_group_tree(std::string_view document, std::string country, Domain domain) {
    GroupTree tree;
    tree.country = std::move(country);
    tree.domain = domain;

    std::array<std::optional<std::size_t>, kMaxTreeDepth + 1> open{};
    std::set<std::string> names;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= document.size()) {
        auto end = document.find('\n', start);
        if (end == std::string_view::npos) end = document.size();
        const auto l = trim(document.substr(start, end - start));
        start = end + 1;
        ++line_no;
        if (l.empty()) continue;

        auto parsed = parse_outline_line(l, line_no);
        if (!parsed) throw MalformedTree(line_no, "unknown marker");
        auto& [layer, item] = *parsed;

        std::optional<std::string> parent_name;
        if (layer > 1) {
            const auto parent = open[layer - 1];
            if (!parent) {
                throw MalformedTree(line_no, "layer-" + std::to_string(layer) +
                                                 " group without a parent");
            }
            parent_name = tree.nodes[*parent].spec.name;
        }
        if (!names.insert(item.name).second) {
            throw MalformedTree(line_no, "duplicate group name '" + item.name + "'");
        }
        const auto index = tree.nodes.size();
        tree.nodes.push_back({GroupSpec{item.name, item.population, item.characteristic, layer,
                                        parent_name},
                              {}});
        if (layer == 1) {
            tree.roots.push_back(index);
        } else {
            tree.nodes[*open[layer - 1]].children.push_back(index);
        }
        open[layer] = index;
        for (int deeper = layer + 1; deeper <= kMaxTreeDepth; ++deeper) open[deeper].reset();
        tree.depth = std::max(tree.depth, layer);
    }
    if (tree.roots.empty()) throw MalformedTree(0, "no layer-1 node");
    return tree;
}

std::string serialize_group_tree(const GroupTree& tree) {
    std::string out;
    for (auto root : tree.roots) {
        const auto& r = tree.nodes[root].spec;
        out += "## " + r.name + ": " + with_commas(r.population) + suffix(r) + "\n";
        int k = 0;
        for (auto mid : tree.nodes[root].children) {
            const auto& m = tree.nodes[mid].spec;
            out += "  " + std::to_string(++k) + ". **" + m.name + ": " + with_commas(m.population) +
                   "**" + suffix(m) + "\n";
            for (auto leaf : tree.nodes[mid].children) {
                const auto& f = tree.nodes[leaf].spec;
                out += "    - " + f.name + ": " + with_commas(f.population) + suffix(f) + "\n";
            }
        }
    }
    return out;
}

std::vector<PopulationMismatch> population_mismatches(const GroupTree& tree) {
    std::vector<PopulationMismatch> out;
    for (const auto& node : tree.nodes) {
        if (node.children.empty()) continue;
        std::int64_t sum = 0;
        for (auto c : node.children) sum += tree.nodes[c].spec.population;
        if (sum != node.spec.population) out.push_back({node.spec.name, node.spec.population, sum});
    }
    return out;
}

std::vector<GroupSpec> bfs_layer(const GroupTree& tree, int layer) {
    if (layer < 1 || layer > tree.depth) throw LayerOutOfRange(layer, tree.depth);
    std::vector<std::size_t> frontier = tree.roots;
    for (int l = 1; l < layer; ++l) {
        std::vector<std::size_t> next;
        for (auto i : frontier) {
            next.insert(next.end(), tree.nodes[i].children.begin(), tree.nodes[i].children.end());
        }
        frontier = std::move(next);
    }
    std::vector<GroupSpec> out;
    out.reserve(frontier.size());
    for (auto i : frontier) out.push_back(tree.nodes[i].spec);
    return out;
}

bool KnowledgeGraph::contains(const std::string& country, Domain domain) const {
    return entries_.count({country, domain}) > 0;
}

const KnowledgeGraph::Entry* KnowledgeGraph::find(const std::string& country, Domain domain) const {
    auto it = entries_.find({country, domain});
    return it == entries_.end() ? nullptr : &it->second;
}

void KnowledgeGraph::insert(GroupTree tree, std::string document) {
    GraphKey key{tree.country, tree.domain};
    entries_.insert_or_assign(std::move(key), Entry{std::move(tree), std::move(document)});
}

void KnowledgeGraph::save(const std::filesystem::path& dir) const {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    Json index = Json::array();
    for (const auto& [key, entry] : entries_) {
        const auto file = file_stem(key.first, key.second) + ".txt";
        std::ofstream out(dir / file, std::ios::binary);
        out << entry.document;
        if (!out) throw IoError("cannot write " + (dir / file).string());
        index.push_back(
            {{"country", key.first}, {"domain", std::string(to_string(key.second))}, {"file", file}});
    }
    std::ofstream out(dir / "index.json");
    out << index.dump(2) << "\n";
    if (!out) throw IoError("cannot write " + (dir / "index.json").string());
}

KnowledgeGraph KnowledgeGraph::load(const std::filesystem::path& dir) {
    std::ifstream in(dir / "index.json");
    if (!in) throw IoError("cannot read " + (dir / "index.json").string());
    Json index;
    try {
        index = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw IoError("index.json is not valid JSON: " + std::string(e.what()));
    }
    KnowledgeGraph graph;
    for (const auto& item : index) {
        std::string country;
        std::string domain_text;
        std::string file;
        try {
            country = item.at("country").get<std::string>();
            domain_text = item.at("domain").get<std::string>();
            file = item.at("file").get<std::string>();
        } catch (const Json::exception&) {
            throw IoError("index.json entry lacks country/domain/file");
        }
        auto domain = parse_domain(domain_text);
        if (!domain) throw ValidationError("index.json: unknown domain '" + domain_text + "'");
        std::ifstream doc_in(dir / file, std::ios::binary);
        if (!doc_in) throw IoError("cannot read " + (dir / file).string());
        std::ostringstream buf;
        buf << doc_in.rdbuf();
        auto document = buf.str();
        auto tree = parse_group_tree(document, country, *domain);
        graph.insert(std::move(tree), std::move(document));
    }
    return graph;
}

KnowledgeGraph merge_into_graph(KnowledgeGraph graph, GroupTree tree, std::string document) {
    graph.insert(std::move(tree), std::move(document));
    return graph;
}

std::vector<GroupSpec> retrieve_layer(const KnowledgeGraph& graph, const std::string& country,
                                      Domain domain, int layer) {
    const auto* entry = graph.find(country, domain);
    if (entry == nullptr) throw MissingEntry(country, std::string(to_string(domain)));
    return bfs_layer(entry->tree, layer);
}

std::vector<GroupAgent> instantiate_agents(const std::vector<GroupSpec>& specs,
                                           const std::string& country, std::uint64_t seed,
                                           OracleGateway& gateway, std::size_t memory_capacity) {
    std::int64_t total = 0;
    for (const auto& s : specs) {
        if (s.population < 0) throw ValidationError("negative population for " + s.name);
        total += s.population;
    }
    if (specs.empty() || total == 0) throw EmptyPopulation();

    std::set<std::string> ids;
    std::vector<GroupSpec> unknown;
    for (const auto& s : specs) {
        if (!ids.insert(agent_id_for(s.name)).second) throw DuplicateGroup(s.name);
        if (!s.characteristic) unknown.push_back(s);
    }

    std::map<std::string, Characteristic> assigned;
    if (!unknown.empty()) {
        for (auto& [id, c] : gateway.query_characteristics(unknown, country, seed)) {
            assigned.emplace(id, c);
        }
    }

    std::vector<GroupAgent> agents;
    agents.reserve(specs.size());
    for (const auto& s : specs) {
        GroupAgent a{agent_id_for(s.name), s.name, country, s.population,
                     Characteristic::ordinary, {}, Memory(memory_capacity)};
        if (s.characteristic) {
            a.characteristic = *s.characteristic;
        } else if (auto it = assigned.find(a.id); it != assigned.end()) {
            a.characteristic = it->second;
        } else {
            a.characteristic = characteristic_by_keyword(s.name);
            spdlog::warn("oracle gave no characteristic for {}; using keyword table ({})", a.id,
                         to_string(a.characteristic));
        }
        agents.push_back(std::move(a));
    }
    return agents;
}

Characteristic characteristic_by_keyword(std::string_view group_name) {
    static constexpr std::array<std::string_view, 8> kSusceptible = {
        "student", "undergraduate", "bachelor", "vocation",
        "normal",  "short-cycle",   "youth",    "fan"};
    static constexpr std::array<std::string_view, 10> kCalm = {
        "teacher", "doctor",    "postgraduate", "researcher",     "retiree",
        "mentor",  "personnel", "administrative", "faculty",      "expert"};
    const auto name = lower(group_name);
    auto hit = [&](const auto& table) {
        return std::any_of(table.begin(), table.end(),
                           [&](std::string_view k) { return name.find(k) != std::string::npos; });
    };
    if (hit(kSusceptible)) return Characteristic::susceptible;
    if (hit(kCalm)) return Characteristic::calm;
    return Characteristic::ordinary;
}

namespace {

constexpr const char* kCnEducation = R"(## Students: 58,030,769 (susceptible)
  1. **Postgraduates: 3,653,613** (calm)
    - Doctor: 556,065 (calm)
    - Master: 3,097,548 (ordinary)
  2. **Undergraduates: 19,656,436** (susceptible)
    - Bachelor: 19,656,436 (susceptible)
  3. **Vocation: 34,720,720** (susceptible)
    - Normal: 8,926,980 (susceptible)
    - Short-cycle: 25,794,740 (susceptible)
## Teachers: 3,450,000 (calm)
  1. **Educational Personnel: 2,870,866** (calm)
    - Full-time-Teachers: 2,005,188 (calm)
    - Administrative-Personnel: 405,420 (calm)
    - Supporting-Staff: 245,438 (ordinary)
    - Workers: 122,982 (ordinary)
    - Full-time-Researchers: 50,600 (calm)
    - Other-Agency: 41,238 (ordinary)
  2. **Others Teachers: 1,871,829** (calm)
    - Part-time-Teachers: 453,302 (calm)
    - Industry-Mentor: 405,037 (calm)
    - Foreign-Teachers: 19,219 (calm)
    - Retirees: 966,111 (calm)
    - Affiliated-Teachers: 28,160 (ordinary)
)";

}  // namespace

const char* builtin_group_document(const std::string& country, Domain domain) {
    if (country == "CN" && domain == Domain::education) return kCnEducation;
    return nullptr;
}

}  // namespace groupsim
