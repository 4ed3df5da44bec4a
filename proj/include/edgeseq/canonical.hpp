#pragma once

#include <string>

#include "edgeseq/graph.hpp"

namespace edgeseq {

// Relabeling-invariant byte string: two graphs (up to 64 nodes) are
// isomorphic iff their certificates compare equal. Exact by construction:
// color refinement plus individualization search over refinement-respecting
// orderings, taking the lexicographically smallest adjacency encoding.
using Certificate = std::string;

Certificate canonical_form(const Graph& g);

bool isomorphic(const Graph& a, const Graph& b);

}  // namespace edgeseq
