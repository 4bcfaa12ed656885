#pragma once

#include "groupsim/core.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace groupsim {

class OracleGateway;

/// Multiway tree of population groups for one (country, domain).
///
/// Nodes are stored flat in document order; `children` index into `nodes`.
/// Document order doubles as the sibling order for breadth-first traversal.
struct GroupTree {
    struct Node {
        GroupSpec spec;
        std::vector<std::size_t> children;

        friend bool operator==(const Node&, const Node&) = default;
    };

    std::string country;
    Domain domain = Domain::education;
    std::vector<Node> nodes;
    std::vector<std::size_t> roots;
    int depth = 0;

    std::size_t leaf_count() const;

    friend bool operator==(const GroupTree&, const GroupTree&) = default;
};

/// The deepest layer the document grammar can express.
inline constexpr int kMaxTreeDepth = 3;

/// Parses the three-marker outline:
///
///     ## Students: 58,030,769
///       1. **Postgraduates: 3,653,613**
///         - Doctor: 556,065
///
/// Each line may end with a parenthesised characteristic, e.g. "(calm)".
/// Blank lines are skipped; anything else is MalformedTree.
GroupTree parse_group_tree(std::string_view document, std::string country, Domain domain);

/// Canonical text form. parse(serialize(t)) == t.
std::string serialize_group_tree(const GroupTree& tree);

struct PopulationMismatch {
    std::string parent;
    std::int64_t declared = 0;
    std::int64_t children_sum = 0;
};

/// Parents whose population differs from the sum of their children. These
/// are reported, never enforced: leaf counts are taken as authoritative.
std::vector<PopulationMismatch> population_mismatches(const GroupTree& tree);

/// All nodes at exactly `layer`, level-by-level, left-to-right.
std::vector<GroupSpec> bfs_layer(const GroupTree& tree, int layer);

using GraphKey = std::pair<std::string, Domain>;

/// Cached map from (country, domain) to its group tree and source document.
class KnowledgeGraph {
public:
    struct Entry {
        GroupTree tree;
        std::string document;
    };

    std::size_t size() const noexcept { return entries_.size(); }
    bool contains(const std::string& country, Domain domain) const;
    const Entry* find(const std::string& country, Domain domain) const;
    const std::map<GraphKey, Entry>& entries() const noexcept { return entries_; }

    /// Replaces any existing entry under the tree's key.
    void insert(GroupTree tree, std::string document);

    /// Writes <country>_<domain>.txt per entry plus index.json.
    void save(const std::filesystem::path& dir) const;
    static KnowledgeGraph load(const std::filesystem::path& dir);

private:
    std::map<GraphKey, Entry> entries_;
};

/// Functional form of KnowledgeGraph::insert.
KnowledgeGraph merge_into_graph(KnowledgeGraph graph, GroupTree tree, std::string document);

/// Layer retrieval through the cache. Throws MissingEntry or LayerOutOfRange.
std::vector<GroupSpec> retrieve_layer(const KnowledgeGraph& graph, const std::string& country,
                                      Domain domain, int layer);

/// One agent per spec with zero emotions and empty memory. Specs without a
/// characteristic get one from the gateway's group-generation template.
std::vector<GroupAgent> instantiate_agents(const std::vector<GroupSpec>& specs,
                                           const std::string& country, std::uint64_t seed,
                                           OracleGateway& gateway,
                                           std::size_t memory_capacity = 16);

/// Characteristic from a fixed keyword table; "ordinary" when nothing matches.
Characteristic characteristic_by_keyword(std::string_view group_name);

/// Built-in documents shipped with the library, keyed like the graph.
/// Returns nullptr when no document exists for the key.
const char* builtin_group_document(const std::string& country, Domain domain);

}  // namespace groupsim
