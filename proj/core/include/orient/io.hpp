#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "orient/eval.hpp"
#include "orient/lca.hpp"
#include "orient/types.hpp"

namespace orient {

// Reserved for the artificial root in exports; rejected as an input label.
inline constexpr const char* kRootLabel = "__ROOT__";

enum class EmbeddingFormat { glove_text, word2vec_text };
const char* to_string(EmbeddingFormat format);
EmbeddingFormat embedding_format_from_string(std::string_view name);

// glove_text: "label v1 ... vd" per line, dimension inferred from the first
// line. word2vec_text: same, preceded by a "n d" header line. Line order
// defines frequency rank.
EmbeddingSet load_embedding(const std::string& path, EmbeddingFormat format);

// TSV "child<TAB>parent"; '#' lines are comments; duplicates collapse.
RelationSet load_relations(const std::string& path,
                           std::string kind = "relations");

// TSV "w1<TAB>w2<TAB>l1,l2,..."; an empty third column is an empty set.
LchMap load_lch(const std::string& path);

// TSV "label<TAB>power"; every embedding label must appear exactly once.
PowerAssignment load_power_file(const std::string& path,
                                const EmbeddingSet& embedding);

enum class TreeFormat { json, dot, tsv };
const char* to_string(TreeFormat format);
TreeFormat tree_format_from_string(std::string_view name);

struct LoadedTree {
  Arborescence tree;
  std::vector<std::string> labels;  // entity index -> label
};

void export_tree(const Arborescence& tree,
                 const std::vector<std::string>& labels, TreeFormat format,
                 const std::string& path);

LoadedTree load_tree_json(const std::string& path);

void write_curve_csv(const std::string& path, const AccuracyCurve& curve);
void write_sweep_csv(const std::string& path, const SweepResult& result);

}  // namespace orient
